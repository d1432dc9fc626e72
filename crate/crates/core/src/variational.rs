//! Variational representations of the tagged process.
//!
//! For a finite system with labels `lo..=hi` (top free) and one shared clock
//! schedule:
//!
//! * `sigma_k(t) = min_{i >= k} zeta^i_{k-i}(t)` where `zeta^i` is a jam packed
//!   behind `sigma_i` whose particle `j` reads clock `i + j`;
//! * `sigma_k(t) = min_{i >= k} sigma_i + xi^i_{k-i}(t)` with `xi^i` the same
//!   jam started at the origin;
//! * `sigma_lo(t) = min_{i >= lo} h_i + Z^i_lo(t)` where the corner process
//!   `Z^i` is an interface flat at 0 on columns `lo..=i` and infinite beyond,
//!   reading the clocks without translation.
//!
//! The processes are simulated under the shared schedule, never solved, so
//! every formula can be compared with the direct run path by path.

use std::sync::Arc;

use serde::Serialize;

use crate::engine::{jam_sweep, run, ClockSchedule, ClockView, SimulationRun};
use crate::error::{Error, Result};
use crate::state::{particles_to_heights, LabelRange, ParticleConfig};

/// Corner-growth interface `Z^i` over columns `lo..=base`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerProcess {
    lo: i64,
    base: i64,
    t: f64,
    /// `Z^i_k(t)` for `k = lo..=base`.
    columns: Vec<u64>,
    first_passage: Option<f64>,
}

impl CornerProcess {
    /// Simulate `Z^base` to time `t` with the event engine.
    pub fn simulate(lo: i64, base: i64, clocks: &Arc<ClockSchedule>, t: f64) -> Result<Self> {
        check_base(lo, base)?;
        let flat = ParticleConfig::new(lo, (lo..=base).collect())?;
        let out = run(SimulationRun::new(flat).track(lo), clocks.clone(), t)?;
        let columns = out
            .config()
            .positions()
            .iter()
            .zip(lo..)
            .map(|(&x, k)| (x - k) as u64)
            .collect();
        let first_passage = out.jump_times(lo).and_then(|j| j.first().copied());
        Ok(CornerProcess {
            lo,
            base,
            t,
            columns,
            first_passage,
        })
    }

    /// Same interface evaluated label by label.
    pub fn swept(lo: i64, base: i64, clocks: &ClockSchedule, t: f64) -> Result<Self> {
        check_base(lo, base)?;
        let n = (base - lo + 1) as u64;
        let view = ClockView::new(clocks).with_offset(base);
        let mut columns = vec![0; n as usize];
        let mut first_passage = None;
        jam_sweep(&view, t, n, |j, jumps| {
            columns[(j + base - lo) as usize] = jumps.len() as u64;
            if j + base == lo {
                first_passage = jumps.first().copied();
            }
            true
        })?;
        Ok(CornerProcess {
            lo,
            base,
            t,
            columns,
            first_passage,
        })
    }

    pub fn base(&self) -> i64 {
        self.base
    }
    pub fn time(&self) -> f64 {
        self.t
    }

    /// `Z^i_k(t)`; `None` stands for the infinite columns `k > i`.
    pub fn column(&self, k: i64) -> Option<u64> {
        if k > self.base {
            return None;
        }
        let idx = usize::try_from(k - self.lo).expect("column below the window");
        Some(self.columns[idx])
    }

    /// First increment time of the bottom column, if it happened by `t`.
    pub fn first_passage(&self) -> Option<f64> {
        self.first_passage
    }
}

fn check_base(lo: i64, base: i64) -> Result<()> {
    if base < lo {
        return Err(Error::domain(
            "corner base",
            format!("base {base} lies below column {lo}"),
        ));
    }
    Ok(())
}

/// `zeta^i` (or `xi^i` when `front` is 0): particles `j = lo - i ..= 0` at
/// `front + j`, particle `j` reading clock `i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryProcess {
    base: i64,
    positions: Vec<i64>,
}

impl AuxiliaryProcess {
    pub fn simulate(
        lo: i64,
        base: i64,
        front: i64,
        clocks: &Arc<ClockSchedule>,
        t: f64,
    ) -> Result<Self> {
        check_base(lo, base)?;
        let jlo = lo - base;
        let cfg = ParticleConfig::new(jlo, (jlo..=0).map(|j| front + j).collect())?;
        let out = run(
            SimulationRun::new(cfg).with_clock_offset(base),
            clocks.clone(),
            t,
        )?;
        Ok(AuxiliaryProcess {
            base,
            positions: out.config().positions().to_vec(),
        })
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    /// Position of particle `j <= 0`.
    pub fn position(&self, j: i64) -> Option<i64> {
        let idx = j + self.positions.len() as i64 - 1;
        usize::try_from(idx).ok().and_then(|i| self.positions.get(i).copied())
    }
}

/// Highest base label used: the whole system, or `lo + width` if smaller.
fn bases(config: &ParticleConfig, width: Option<u64>) -> LabelRange {
    let labels = config.labels();
    let hi = match width {
        Some(w) => labels.hi.min(labels.lo + w as i64),
        None => labels.hi,
    };
    LabelRange::new(labels.lo, hi)
}

fn check_requested(config: &ParticleConfig, ks: &[i64], bases: LabelRange) -> Result<()> {
    let labels = config.labels();
    if let Some(&k) = ks.iter().find(|&&k| !labels.contains(k) || k > bases.hi) {
        return Err(Error::OutOfWindow {
            label: k,
            lo: labels.lo,
            hi: bases.hi,
        });
    }
    Ok(())
}

/// `min_{k <= i <= hi} zeta^i_{k-i}(t)` for each requested `k`, over bases
/// `lo..=lo + width` (all of them when `width` is `None`).
pub fn evaluate_svar1(
    config: &ParticleConfig,
    clocks: &Arc<ClockSchedule>,
    t: f64,
    width: Option<u64>,
    ks: &[i64],
) -> Result<Vec<i64>> {
    let range = bases(config, width);
    check_requested(config, ks, range)?;
    let mut best = vec![i64::MAX; ks.len()];
    for i in range.iter() {
        let zeta = AuxiliaryProcess::simulate(range.lo, i, config.position(i)?, clocks, t)?;
        for (b, &k) in best.iter_mut().zip(ks) {
            if let Some(v) = (k <= i).then(|| zeta.position(k - i)).flatten() {
                *b = (*b).min(v);
            }
        }
    }
    Ok(best)
}

/// `min_{k <= i <= hi} sigma_i + xi^i_{k-i}(t)`. With `clocks` shared with
/// the direct run this is a pathwise identity; with an independent schedule
/// it is an identity in law.
pub fn evaluate_svar2(
    config: &ParticleConfig,
    clocks: &Arc<ClockSchedule>,
    t: f64,
    width: Option<u64>,
    ks: &[i64],
) -> Result<Vec<i64>> {
    let range = bases(config, width);
    check_requested(config, ks, range)?;
    let mut best = vec![i64::MAX; ks.len()];
    for i in range.iter() {
        let xi = AuxiliaryProcess::simulate(range.lo, i, 0, clocks, t)?;
        let sigma_i = config.position(i)?;
        for (b, &k) in best.iter_mut().zip(ks) {
            if let Some(v) = (k <= i).then(|| xi.position(k - i)).flatten() {
                *b = (*b).min(sigma_i + v);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CornerMethod {
    /// One event-engine run per base label.
    Naive,
    /// One label sweep per base label.
    Sweep,
}

/// Terms `h_i + Z^i_lo(t)` of the corner formula, in base order.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerTerms {
    pub lo: i64,
    pub terms: Vec<i64>,
    /// `h_{hi+1}` when the bases stop short of the system, a floor on every
    /// omitted term.
    pub omitted_floor: Option<i64>,
}

impl CornerTerms {
    pub fn bases(&self) -> LabelRange {
        LabelRange::new(self.lo, self.lo + self.terms.len() as i64 - 1)
    }

    pub fn minimum(&self) -> i64 {
        *self.terms.iter().min().expect("at least one base")
    }

    /// The minimum over the evaluated bases equals the full minimum.
    pub fn certified(&self) -> bool {
        self.omitted_floor.is_none_or(|f| self.minimum() <= f)
    }
}

pub fn corner_terms(
    config: &ParticleConfig,
    clocks: &Arc<ClockSchedule>,
    t: f64,
    width: Option<u64>,
    method: CornerMethod,
) -> Result<CornerTerms> {
    let range = bases(config, width);
    let heights = particles_to_heights(config);
    let mut terms = Vec::with_capacity(range.len());
    for i in range.iter() {
        let z = match method {
            CornerMethod::Naive => CornerProcess::simulate(range.lo, i, clocks, t)?,
            CornerMethod::Sweep => CornerProcess::swept(range.lo, i, clocks, t)?,
        };
        let h = heights.height(i).expect("base inside the system");
        terms.push(h + z.column(range.lo).expect("bottom column is finite") as i64);
    }
    Ok(CornerTerms {
        lo: range.lo,
        terms,
        omitted_floor: heights.height(range.hi + 1),
    })
}

/// `min_i h_i + Z^i_lo(t)`: the position of the lowest label at `t`.
pub fn evaluate_svar4(
    config: &ParticleConfig,
    clocks: &Arc<ClockSchedule>,
    t: f64,
    width: Option<u64>,
) -> Result<i64> {
    Ok(corner_terms(config, clocks, t, width, CornerMethod::Sweep)?.minimum())
}

/// Minima of the corner terms with base `<= boundary` and `> boundary`;
/// `None` marks an empty (infinite) infimum.
pub fn split_infimum(terms: &CornerTerms, boundary: f64) -> (Option<i64>, Option<i64>) {
    let mut s1 = None;
    let mut s2 = None;
    for (i, &v) in terms.bases().iter().zip(&terms.terms) {
        let side = if (i - terms.lo) as f64 <= boundary {
            &mut s1
        } else {
            &mut s2
        };
        *side = Some(side.map_or(v, |s: i64| s.min(v)));
    }
    (s1, s2)
}

/// Boundary index `q1 t^(1 - alpha)` of the near/far split.
pub fn split_boundary(q1: f64, t: f64, alpha: f64) -> f64 {
    q1 * t.powf(1.0 - alpha)
}

/// First time the bottom column of `Z^base` moves, if before `t`.
pub fn corner_first_passage(
    lo: i64,
    base: i64,
    clocks: &ClockSchedule,
    t: f64,
) -> Result<Option<f64>> {
    Ok(CornerProcess::swept(lo, base, clocks, t)?.first_passage())
}

/// One audited comparison of the formulas with the direct run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub trial: u64,
    pub particles: usize,
    pub t: f64,
    /// Highest base label in the formulas.
    pub window: i64,
    pub direct: i64,
    pub svar1: i64,
    pub svar2: i64,
    pub svar4: i64,
    /// Doubling the window left the corner formula unchanged.
    pub doubled_agrees: bool,
    pub certified: bool,
    pub matched: bool,
}

/// Compare all three formulas for the lowest label with a direct run.
pub fn audit_trial(
    trial: u64,
    config: &ParticleConfig,
    clocks: &Arc<ClockSchedule>,
    t: f64,
    width: Option<u64>,
) -> Result<AuditRecord> {
    let lo = config.labels().lo;
    let direct = run(SimulationRun::new(config.clone()), clocks.clone(), t)?;
    let direct = direct.config().position(lo)?;
    let svar1 = evaluate_svar1(config, clocks, t, width, &[lo])?[0];
    let svar2 = evaluate_svar2(config, clocks, t, width, &[lo])?[0];
    let corner = corner_terms(config, clocks, t, width, CornerMethod::Sweep)?;
    let svar4 = corner.minimum();
    let doubled = width.map(|w| w.saturating_mul(2).max(1));
    let doubled = corner_terms(config, clocks, t, doubled, CornerMethod::Sweep)?.minimum();
    Ok(AuditRecord {
        trial,
        particles: config.positions().len(),
        t,
        window: corner.bases().hi,
        direct,
        svar1,
        svar2,
        svar4,
        doubled_agrees: doubled == svar4,
        certified: corner.certified(),
        matched: direct == svar1 && direct == svar2 && direct == svar4,
    })
}
