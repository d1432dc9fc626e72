//! Label-by-label evaluation of the graphical construction.
//!
//! With totally asymmetric dynamics a particle only ever looks at its right
//! neighbour, so the whole trajectory of label `j` follows from its own ring
//! times and the jump times of `j + 1`:
//!
//! `D_j(m)` = first ring of `j` strictly after `max(D_j(m - 1), D_{j+1}(m - eta_j))`,
//!
//! with `D_{j+1}(k) = 0` for `k <= 0`. Sweeping labels from the top down
//! reproduces the event engine ring for ring while holding only two jump
//! lists in memory, and it lets the tagged particle be evaluated against an
//! unbounded environment: particle `j` can influence the first `C` jumps of
//! particle 0 only through its own first `C - (h_j - h_0)` jumps.
//!
//! Two realizations of the recursion implement [`Dynamics`]. [`ClockView`]
//! walks the Poisson rings themselves and matches the event engine path for
//! path. [`ServiceTimes`] uses that the first ring after a stopping time is
//! an exponential delay, giving the tandem-queue form
//! `D_j(m) = max(D_j(m - 1), D_{j+1}(m - eta_j)) + S_j(m)` with i.i.d.
//! `S_j(m) ~ Exp(p_j)`: the same law with one draw per jump instead of one
//! per ring.

use rand::Rng;
use rand_distr::Exp1;

use super::clock::{ClockSchedule, ClockStream, RateSource};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};
use crate::state::{particles_to_gaps, ParticleConfig};

/// Ring times seen by one process: clock `label + offset`, optionally thinned.
#[derive(Debug, Clone, Copy)]
pub struct ClockView<'a> {
    pub schedule: &'a ClockSchedule,
    pub offset: i64,
    pub thinning: Option<&'a RateSource>,
}

impl<'a> ClockView<'a> {
    pub fn new(schedule: &'a ClockSchedule) -> Self {
        ClockView {
            schedule,
            offset: 0,
            thinning: None,
        }
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.offset = offset;
        self
    }

    pub fn thinned(mut self, own: &'a RateSource) -> Self {
        self.thinning = Some(own);
        self
    }

    pub fn rings(&self, label: i64) -> Result<Rings> {
        let clock = label + self.offset;
        let stream = self.schedule.stream(clock)?;
        match self.thinning {
            None => Ok(Rings::Plain(stream)),
            Some(own) => {
                if !self.schedule.is_marked() {
                    return Err(Error::WindowMismatch(
                        "thinned process needs a marked clock schedule".into(),
                    ));
                }
                let keep = own.rate(clock)? / stream.rate();
                Ok(Rings::Thinned(stream, keep))
            }
        }
    }
}

/// Ring times of one label as seen through a [`ClockView`].
#[derive(Debug, Clone)]
pub enum Rings {
    Plain(ClockStream),
    /// Keeps attempts whose mark is below the acceptance ratio.
    Thinned(ClockStream, f64),
}

impl Iterator for Rings {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        match self {
            Rings::Plain(s) => s.next().map(|a| a.time),
            Rings::Thinned(s, keep) => s.find(|a| a.mark < *keep).map(|a| a.time),
        }
    }
}

/// Jump times in `(0, t]` of a particle with initial gap `gap` (`None` for a
/// free particle) whose right neighbour jumps at `ahead`, at most `cap` of them.
///
/// `ahead` must hold every neighbour jump up to `t`, or at least its first
/// `cap - gap` jumps.
pub fn advance(
    rings: &mut impl Iterator<Item = f64>,
    gap: Option<u64>,
    ahead: &[f64],
    t: f64,
    cap: u64,
    out: &mut Vec<f64>,
) {
    out.clear();
    let mut m: u64 = 0;
    while m < cap {
        m += 1;
        let threshold = match gap {
            None => 0.0,
            Some(g) if m <= g => 0.0,
            Some(g) => match ahead.get((m - g - 1) as usize) {
                Some(&s) => s,
                None => return,
            },
        };
        loop {
            let ring = rings.next().expect("clock streams are infinite");
            if ring > t {
                return;
            }
            if ring > threshold {
                out.push(ring);
                break;
            }
        }
    }
}

/// One particle's jump times from its gap and its right neighbour's jumps.
pub trait Dynamics {
    /// Same contract as [`advance`].
    fn advance(
        &self,
        label: i64,
        gap: Option<u64>,
        ahead: &[f64],
        t: f64,
        cap: u64,
        out: &mut Vec<f64>,
    ) -> Result<()>;
}

impl Dynamics for ClockView<'_> {
    fn advance(
        &self,
        label: i64,
        gap: Option<u64>,
        ahead: &[f64],
        t: f64,
        cap: u64,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        let mut rings = self.rings(label)?;
        advance(&mut rings, gap, ahead, t, cap, out);
        Ok(())
    }
}

/// Exponential service times `S_j(1), S_j(2), ...` per label, each stream a
/// pure function of `(seed, label)`.
#[derive(Debug, Clone)]
pub struct ServiceTimes {
    seed: u64,
    rates: RateSource,
}

impl ServiceTimes {
    pub fn new(seed: u64, rates: RateSource) -> Self {
        ServiceTimes { seed, rates }
    }

    pub fn rates(&self) -> &RateSource {
        &self.rates
    }
}

impl Dynamics for ServiceTimes {
    fn advance(
        &self,
        label: i64,
        gap: Option<u64>,
        ahead: &[f64],
        t: f64,
        cap: u64,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        out.clear();
        let rate = self.rates.rate(label)?;
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::domain("service rate", format!("label {label} has rate {rate}")));
        }
        let scale = rate.recip();
        let mut rng = stream_rng(self.seed, Domain::Service, label);
        let mut last = 0.0f64;
        let mut m: u64 = 0;
        while m < cap {
            m += 1;
            let ready = match gap {
                None => last,
                Some(g) if m <= g => last,
                Some(g) => match ahead.get((m - g - 1) as usize) {
                    Some(&s) => last.max(s),
                    None => return Ok(()),
                },
            };
            let e: f64 = rng.sample(Exp1);
            last = ready + e * scale;
            if last > t {
                return Ok(());
            }
            out.push(last);
        }
        Ok(())
    }
}

/// Evaluate a finite window to time `t` with its top label free. `visit`
/// receives every label (top first) together with its jump times.
pub fn sweep_jumps(
    config: &ParticleConfig,
    view: &impl Dynamics,
    t: f64,
    mut visit: impl FnMut(i64, &[f64]),
) -> Result<()> {
    let labels = config.labels();
    let gaps = particles_to_gaps(config).gaps;
    let mut ahead: Vec<f64> = Vec::new();
    let mut own: Vec<f64> = Vec::new();
    for label in (labels.lo..=labels.hi).rev() {
        let idx = (label - labels.lo) as usize;
        let gap = gaps.get(idx).copied();
        view.advance(label, gap, &ahead, t, u64::MAX, &mut own)?;
        visit(label, &own);
        std::mem::swap(&mut ahead, &mut own);
    }
    Ok(())
}

/// Final configuration of a finite window at time `t`.
pub fn sweep(config: &ParticleConfig, view: &impl Dynamics, t: f64) -> Result<ParticleConfig> {
    let mut out = config.clone();
    let lo = config.labels().lo;
    sweep_jumps(config, view, t, |label, jumps| {
        out.positions_mut()[(label - lo) as usize] += jumps.len() as i64;
    })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedOutcome {
    pub position: i64,
    pub jumps: u64,
    /// Jump cap of the final, certified pass.
    pub cap: u64,
    /// Highest label whose clock was read.
    pub top_label: i64,
    /// The top of the window was reached, so its free motion mattered.
    pub window_limited: bool,
    pub passes: u32,
}

/// Position at time `t` of label 0 in the system of labels `0..=window_hi`
/// (top free), with initial position `x0` and gaps `gap(0), gap(1), ...`.
///
/// Each pass caps particle 0 at `cap` jumps; a pass that makes fewer than
/// `cap` jumps is exact, otherwise the cap grows by a quarter. Clock streams are pure
/// functions of the label, so a repeated pass replays the same path.
pub fn tagged_sweep(
    x0: i64,
    gap: &mut dyn FnMut(i64) -> Result<u64>,
    view: &impl Dynamics,
    t: f64,
    window_hi: i64,
    initial_cap: u64,
) -> Result<TaggedOutcome> {
    let mut heights: Vec<u64> = vec![0];
    let mut gaps: Vec<u64> = Vec::new();
    let mut cap = initial_cap.max(1);
    let mut ahead = Vec::new();
    let mut own = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        // smallest top with h_top - h_0 >= cap, or the window edge
        let mut top = 0i64;
        while top < window_hi && heights[top as usize] < cap {
            if gaps.len() <= top as usize {
                let g = gap(top)?;
                gaps.push(g);
                heights.push(heights[top as usize] + g);
            }
            top += 1;
        }
        let window_limited = heights[top as usize] < cap;
        ahead.clear();
        for label in (0..=top).rev() {
            let lift = heights[label as usize];
            let label_cap = cap.saturating_sub(lift);
            if label_cap == 0 {
                ahead.clear();
                continue;
            }
            let g = (label < window_hi).then(|| gaps[label as usize]);
            view.advance(label, g, &ahead, t, label_cap, &mut own)?;
            std::mem::swap(&mut ahead, &mut own);
        }
        let jumps = ahead.len() as u64;
        if jumps < cap {
            return Ok(TaggedOutcome {
                position: x0 + jumps as i64,
                jumps,
                cap,
                top_label: top,
                window_limited,
                passes,
            });
        }
        cap = cap
            .checked_add(cap / 4 + 1)
            .ok_or_else(|| Error::WindowAudit(format!("tagged jump cap overflow at t = {t}")))?;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JamOutcome {
    /// Labels evaluated, counting down from 0.
    pub evaluated: u64,
    /// `visit` still asked for more when the jam ran out.
    pub exhausted: bool,
}

/// Jam start: label `-k` at `-k` for `k < n`, label 0 free. Labels are
/// evaluated from 0 downwards; `visit(label, jumps)` returns whether to go on.
pub fn jam_sweep(
    view: &impl Dynamics,
    t: f64,
    n: u64,
    mut visit: impl FnMut(i64, &[f64]) -> bool,
) -> Result<JamOutcome> {
    let mut ahead = Vec::new();
    let mut own = Vec::new();
    for k in 0..n {
        let label = -(k as i64);
        let g = (k > 0).then_some(0);
        view.advance(label, g, &ahead, t, u64::MAX, &mut own)?;
        if !visit(label, &own) {
            return Ok(JamOutcome {
                evaluated: k + 1,
                exhausted: false,
            });
        }
        std::mem::swap(&mut ahead, &mut own);
    }
    Ok(JamOutcome {
        evaluated: n,
        exhausted: true,
    })
}

/// `X_t`: particles of the jam strictly beyond `speed * t`.
pub fn jam_front_count(view: &impl Dynamics, t: f64, speed: f64, n: u64) -> Result<u64> {
    let threshold = speed * t;
    let mut count = 0;
    let out = jam_sweep(view, t, n, |label, jumps| {
        let beyond = (label + jumps.len() as i64) as f64 > threshold;
        count += beyond as u64;
        beyond
    })?;
    if out.exhausted {
        return Err(Error::WindowAudit(format!(
            "all {n} jam particles are beyond {threshold}"
        )));
    }
    Ok(count)
}
