//! Tagged-particle estimators: the slowdown tail from i.i.d. gaps and the
//! Poisson property of a tagged particle in equilibrium.

use std::sync::Arc;

use serde::Serialize;

use super::stats::{self, ChiSquareResult};
use super::{hypothesis, to_value, Artifact, Check, Ensemble, Report, ScalingFit, TailCurve};
use crate::disorder::{sample_rates, RateLaw, RateSampler};
use crate::engine::{
    choose_window, tagged_sweep, ClockSchedule, ClockView, Dynamics, RateSource, ServiceTimes,
    TaggedOutcome, WindowMode,
};
use crate::error::{Error, Result};
use crate::measures::{equilibrium_gap, EquilibriumSpec, GapFamily, IidGapSpec};
use crate::rng::{derive_seed, Domain};
use crate::state::LabelRange;

/// Jump cap for a first pass: the hydrodynamic displacement plus a few
/// fluctuation scales.
pub fn initial_cap(speed: f64, t: f64, exponent: f64) -> u64 {
    (speed * t + 3.0 * t.powf(exponent)).ceil() as u64 + 16
}

/// Tagged position at `t` on window `0..=window_hi`. When the window edge was
/// reached the evaluation is repeated on a doubled window and must agree.
pub fn audited_tagged(
    x0: i64,
    gap: &mut dyn FnMut(i64) -> Result<u64>,
    dynamics: &impl Dynamics,
    t: f64,
    window_hi: i64,
    cap: u64,
) -> Result<TaggedOutcome> {
    let out = tagged_sweep(x0, gap, dynamics, t, window_hi, cap)?;
    if !out.window_limited {
        return Ok(out);
    }
    let wide = tagged_sweep(x0, gap, dynamics, t, 2 * window_hi.max(1), out.cap)?;
    if wide.position != out.position {
        return Err(Error::WindowAudit(format!(
            "tagged position {} on labels 0..={window_hi} but {} after doubling",
            out.position, wide.position
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Params {
    pub law: RateLaw,
    pub gap_family: GapFamily,
    /// Mean initial gap.
    pub u: f64,
    pub horizons: Vec<f64>,
    pub z_grid: Vec<f64>,
    /// Window factor `K` of the tagged window `[0, K t]`.
    pub window_k: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Outcome {
    pub params: Theorem1Params,
    pub u_star: f64,
    /// `sigma_0(t) - c t` per horizon and replica.
    pub excess: Vec<Vec<f64>>,
    pub curves: Vec<TailCurve>,
    pub medians: Vec<f64>,
    pub fit: Option<ScalingFit>,
}

impl Theorem1Params {
    /// Checks `nu > 0`, `u > u*` and the gap family; returns `u*`.
    pub fn validate(&self) -> Result<f64> {
        let law = self.law;
        hypothesis(law.nu() > 0.0, || {
            format!("the slowdown tail requires nu > 0, got nu = {}", law.nu())
        })?;
        let u_star = law.critical_gap().finite().expect("nu > 0 has a finite critical gap");
        hypothesis(self.u > u_star, || {
            format!("the slowdown tail requires u > u* = {u_star}, got u = {}", self.u)
        })?;
        IidGapSpec::new(self.u, self.gap_family, 0)?;
        Ok(u_star)
    }
}

/// Bracket `(lower, upper)` on `P(w(t) > z)` for large `t`.
pub fn theorem1_bounds(law: &RateLaw, u: f64, u_star: f64, z: f64) -> (f64, f64) {
    let e = law.kappa() / (u - u_star) * z.powf(law.nu() + 2.0);
    ((-e).exp(), (-e / crate::disorder::a_nu(law.nu())).exp())
}

/// Empirical tail of `w(t) = (sigma_0(t) - c t) / t^(1 - alpha)` started from
/// i.i.d. gaps with mean `u > u*`, each replica with fresh disorder, gaps and
/// dynamics.
pub fn theorem1_tail(params: &Theorem1Params) -> Result<Theorem1Outcome> {
    let u_star = params.validate()?;
    let law = params.law;
    let expo = law.constants().one_minus_alpha;
    let c = law.c();
    let mut excess = Vec::new();
    let mut curves = Vec::new();
    let mut medians = Vec::new();
    for (h, &t) in params.horizons.iter().enumerate() {
        let window = choose_window(t, params.window_k, WindowMode::Tagged)?;
        let ens = params.ensemble.child(h as u64);
        let xs = ens.run(|_, seed| {
            let rates = RateSampler::new(law, derive_seed(seed, Domain::Disorder, 0));
            let dynamics = ServiceTimes::new(
                derive_seed(seed, Domain::Service, 0),
                RateSource::Lazy(Box::new(rates)),
            );
            let gaps =
                IidGapSpec::new(params.u, params.gap_family, derive_seed(seed, Domain::Gaps, 0))?
                    .sampler();
            let mut gap = |l: i64| Ok(gaps.gap(l));
            let cap = initial_cap(c, t, expo);
            let out = audited_tagged(0, &mut gap, &dynamics, t, window.hi, cap)?;
            Ok(out.position as f64 - c * t)
        })?;
        let scale = t.powf(expo);
        let ws: Vec<f64> = xs.iter().map(|x| x / scale).collect();
        curves.push(TailCurve::from_samples(t, &ws, &params.z_grid, |z| {
            theorem1_bounds(&law, params.u, u_star, z)
        }));
        medians.push(stats::median(&xs));
        excess.push(xs);
    }
    let fit = ScalingFit::new(params.horizons.clone(), medians.clone()).ok();
    Ok(Theorem1Outcome {
        params: params.clone(),
        u_star,
        excess,
        curves,
        medians,
        fit,
    })
}

/// Whether the empirical tail at `z` moves toward `[lower, upper]` as the
/// horizon grows. One step away from the interval is tolerated when the two
/// confidence intervals overlap.
pub fn bracket_trend(curves: &[TailCurve], z: f64) -> (bool, String) {
    let rows: Vec<_> = curves.iter().filter_map(|c| c.row(z)).collect();
    if rows.len() != curves.len() || rows.is_empty() {
        return (false, format!("grid lacks z = {z}"));
    }
    let dist = |r: &super::TailRow| {
        if r.empirical < r.bound_lower {
            r.bound_lower - r.empirical
        } else if r.empirical > r.bound_upper {
            r.empirical - r.bound_upper
        } else {
            0.0
        }
    };
    let mut inversions = 0;
    let mut ok = true;
    for w in rows.windows(2) {
        if dist(w[1]) > dist(w[0]) {
            let overlap = w[1].ci_lo <= w[0].ci_hi && w[0].ci_lo <= w[1].ci_hi;
            inversions += 1;
            ok &= overlap;
        }
    }
    ok &= inversions <= 1;
    let trail: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.4}[{:.4},{:.4}]", r.empirical, r.ci_lo, r.ci_hi))
        .collect();
    (
        ok,
        format!(
            "tail at z = {z}: {} toward [{:.4}, {:.4}], {inversions} inversion(s)",
            trail.join(" -> "),
            rows[0].bound_lower,
            rows[0].bound_upper
        ),
    )
}

impl Theorem1Outcome {
    pub fn target_exponent(&self) -> f64 {
        self.params.law.constants().one_minus_alpha
    }

    pub fn report(&self) -> Result<Report> {
        let target = self.target_exponent();
        let mut checks = Vec::new();
        match &self.fit {
            Some(f) => checks.push(Check::new(
                "median excess exponent",
                (f.slope() - target).abs() <= 0.1,
                format!("slope {:.4} +- {:.4}, target {target:.4} +- 0.1", f.slope(), f.fit.slope_se),
            )),
            None => checks.push(Check::new(
                "median excess exponent",
                false,
                format!("medians {:?} do not admit a log-log fit", self.medians),
            )),
        }
        if self.params.z_grid.contains(&1.0) && self.curves.len() >= 2 {
            let (ok, detail) = bracket_trend(&self.curves, 1.0);
            checks.push(Check::new("tail trend at z = 1", ok, detail));
            let last = self.curves.last().unwrap().row(1.0).unwrap();
            checks.push(Check::new(
                "tail at z = 1 near the bracket",
                last.empirical >= 0.5 * last.bound_lower && last.empirical <= 2.0 * last.bound_upper,
                format!(
                    "{:.4} within [{:.4}, {:.4}]",
                    last.empirical,
                    0.5 * last.bound_lower,
                    2.0 * last.bound_upper
                ),
            ));
        }
        let mut artifacts = vec![Artifact::csv("thm1_tail.csv", |b| {
            TailCurve::write_csv(&self.curves, b)
        })?];
        if let Some(f) = &self.fit {
            artifacts.push(Artifact::csv("thm1_scaling.csv", |b| f.write_csv(b))?);
        }
        Ok(Report {
            command: "thm1",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({
                "u_star": self.u_star,
                "medians": self.medians,
                "fit": self.fit.as_ref().map(|f| f.fit),
                "target_exponent": target,
            }),
            checks,
            artifacts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurkeParams {
    pub law: RateLaw,
    /// Equilibrium velocity.
    pub a: f64,
    /// Size of the fixed disorder field, labels `0..labels`.
    pub labels: u64,
    pub t: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BurkeOutcome {
    pub params: BurkeParams,
    pub p0: f64,
    /// `sigma_0(t) - sigma_0(0)` per replica.
    pub increments: Vec<u64>,
    /// `eta_0(t)` per replica.
    pub gaps: Vec<u64>,
    pub mean: f64,
    pub std_error: f64,
    pub dispersion: f64,
    pub chi_square: ChiSquareResult,
}

/// Quenched equilibrium on one fixed field: each replica draws product
/// geometric gaps with velocity `a` and fresh clocks, then records the
/// tagged increment over `[0, t]` and the gap in front of the tagged
/// particle at `t`.
impl BurkeParams {
    pub fn validate(&self) -> Result<()> {
        let c = self.law.c();
        hypothesis(self.a > 0.0 && self.a < c, || {
            format!("equilibrium needs 0 < a < c = {c}, got a = {}", self.a)
        })?;
        hypothesis(self.labels >= 2, || "the field needs at least two labels".into())
    }
}

pub fn burke(params: &BurkeParams) -> Result<BurkeOutcome> {
    params.validate()?;
    let law = params.law;
    let hi = params.labels as i64 - 1;
    let field = sample_rates(
        &law,
        LabelRange::new(0, hi),
        derive_seed(params.ensemble.seed, Domain::Disorder, 0),
    );
    let p0 = field.get(0).expect("label 0 in field");
    let shared = Arc::new(field.clone());
    let t = params.t;
    let cap = initial_cap(params.a, t, 0.5);
    let samples = params.ensemble.run(|_, seed| {
        let spec = EquilibriumSpec::new(params.a, field.clone(), derive_seed(seed, Domain::Gaps, 0));
        let clocks = ClockSchedule::new(
            derive_seed(seed, Domain::Clock, 0),
            RateSource::Field(shared.clone()),
        );
        let view = ClockView::new(&clocks);
        let eta0 = equilibrium_gap(&spec, 0)?;
        let mut gap = |l: i64| equilibrium_gap(&spec, l);
        let s0 = tagged_sweep(0, &mut gap, &view, t, hi, cap)?;
        let mut gap1 = |l: i64| equilibrium_gap(&spec, l + 1);
        let s1 = tagged_sweep(eta0 as i64 + 1, &mut gap1, &view.with_offset(1), t, hi - 1, cap)?;
        // the field is the whole system, so its top must stay out of reach
        if s0.window_limited || s1.window_limited {
            return Err(Error::WindowAudit(format!(
                "the top of the {}-label field influenced the tagged particle by t = {t}",
                params.labels
            )));
        }
        Ok((s0.jumps, (s1.position - s0.position - 1) as u64))
    })?;
    let increments: Vec<u64> = samples.iter().map(|s| s.0).collect();
    let gaps: Vec<u64> = samples.iter().map(|s| s.1).collect();
    let xs: Vec<f64> = increments.iter().map(|&k| k as f64).collect();
    let mean = stats::mean(&xs);
    let var = stats::variance(&xs);
    let rho = params.a / p0;
    let chi_square = stats::chi_square_pmf(&gaps, |k| (1.0 - rho) * rho.powi(k as i32), 5.0)?;
    Ok(BurkeOutcome {
        params: params.clone(),
        p0,
        increments,
        gaps,
        mean,
        std_error: (var / xs.len() as f64).sqrt(),
        dispersion: var / mean,
        chi_square,
    })
}

impl BurkeOutcome {
    pub fn report(&self) -> Result<Report> {
        let target = self.params.a * self.params.t;
        let checks = vec![
            Check::new(
                "tagged increment mean",
                (self.mean - target).abs() <= 4.0 * self.std_error,
                format!("{:.4} vs {target} (se {:.4})", self.mean, self.std_error),
            ),
            Check::new(
                "variance to mean ratio",
                (0.95..=1.05).contains(&self.dispersion),
                format!("{:.4}", self.dispersion),
            ),
            Check::new(
                "gap marginal chi-square",
                self.chi_square.p_value > 1e-3,
                format!(
                    "statistic {:.3} on {} dof, p = {:.4}",
                    self.chi_square.statistic, self.chi_square.dof, self.chi_square.p_value
                ),
            ),
        ];
        let samples = Artifact::csv("burke_samples.csv", |b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["replica", "increment", "gap"])?;
            for (r, (k, g)) in self.increments.iter().zip(&self.gaps).enumerate() {
                w.write_record([r.to_string(), k.to_string(), g.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(Report {
            command: "burke",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({
                "p0": self.p0,
                "mean": self.mean,
                "std_error": self.std_error,
                "dispersion": self.dispersion,
                "chi_square": self.chi_square,
            }),
            checks,
            artifacts: vec![samples],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> RateLaw {
        RateLaw::new(0.5, 1.0, 4.0, 0.5).unwrap()
    }

    #[test]
    fn bracket_values() {
        let (lo, hi) = theorem1_bounds(&law(), 3.0, 2.0, 1.0);
        assert!((lo - (-4.0f64).exp()).abs() < 1e-15);
        assert!((hi - (-4.0f64 / 6.75).exp()).abs() < 1e-15);
        assert_eq!(theorem1_bounds(&law(), 3.0, 2.0, 0.0), (1.0, 1.0));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let mut p = Theorem1Params {
            law: RateLaw::new(0.5, -0.5, 1.0, 0.5).unwrap(),
            gap_family: GapFamily::Geometric,
            u: 3.0,
            horizons: vec![10.0, 20.0, 40.0],
            z_grid: vec![1.0],
            window_k: 2.0,
            ensemble: Ensemble::new(2, 1),
        };
        assert!(matches!(theorem1_tail(&p), Err(Error::Hypothesis(_))));
        p.law = law();
        p.u = 1.5;
        assert!(matches!(theorem1_tail(&p), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn small_run_is_deterministic() {
        let p = Theorem1Params {
            law: law(),
            gap_family: GapFamily::Geometric,
            u: 3.0,
            horizons: vec![50.0, 100.0, 200.0],
            z_grid: vec![0.0, 1.0],
            window_k: 2.0,
            ensemble: Ensemble::new(20, 5),
        };
        let a = theorem1_tail(&p).unwrap();
        let b = theorem1_tail(&p).unwrap();
        assert_eq!(a, b);
        for c in &a.curves {
            assert_eq!((c.rows[0].bound_lower, c.rows[0].bound_upper), (1.0, 1.0));
            assert!(c.rows[1].empirical <= c.rows[0].empirical);
        }
    }

    #[test]
    fn trend_detects_motion_toward_the_bracket() {
        let curve = |p: f64, t: f64| {
            let n = 1000.0;
            let samples: Vec<f64> = (0..1000).map(|k| if (k as f64) < p * n { 2.0 } else { 0.0 }).collect();
            TailCurve::from_samples(t, &samples, &[1.0], |_| (0.1, 0.3))
        };
        let toward = [curve(0.9, 1.0), curve(0.6, 2.0), curve(0.35, 3.0)];
        assert!(bracket_trend(&toward, 1.0).0);
        let away = [curve(0.35, 1.0), curve(0.6, 2.0), curve(0.9, 3.0)];
        assert!(!bracket_trend(&away, 1.0).0);
    }

    #[test]
    fn small_burke_run() {
        let p = BurkeParams {
            law: law(),
            a: 0.45,
            labels: 500,
            t: 20.0,
            ensemble: Ensemble::new(2000, 3),
        };
        let out = burke(&p).unwrap();
        assert!((out.mean - 9.0).abs() < 5.0 * out.std_error, "{}", out.mean);
        assert!((0.85..1.15).contains(&out.dispersion));
    }
}
