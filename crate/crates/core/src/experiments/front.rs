//! Jam-release estimators: particles ahead of the hydrodynamic front,
//! the constant-rate density profile and the lagging-particle benchmark.

use serde::Serialize;

use super::stats::{self, wilson, Z95};
use super::{hypothesis, to_value, Artifact, Check, Ensemble, Report, ScalingFit, TailCurve};
use crate::disorder::{a_nu, RateLaw, RateSampler};
use crate::engine::{
    choose_window, jam_front_count, jam_sweep, RateSource, ServiceTimes, WindowMode, JAM_MARGIN,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Domain};

/// Where the rates of a jam run come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateModel {
    /// Fresh i.i.d. rates per replica.
    Disordered { law: RateLaw },
    /// Homogeneous control.
    Constant { rate: f64 },
}

impl RateModel {
    fn dynamics(&self, seed: u64) -> ServiceTimes {
        let source = match *self {
            RateModel::Disordered { law } => {
                RateSource::Lazy(Box::new(RateSampler::new(law, derive_seed(seed, Domain::Disorder, 0))))
            }
            RateModel::Constant { rate } => RateSource::Constant(rate),
        };
        ServiceTimes::new(derive_seed(seed, Domain::Service, 0), source)
    }

    /// Lower edge of the rate support: the front speed.
    pub fn edge(&self) -> f64 {
        match *self {
            RateModel::Disordered { law } => law.c(),
            RateModel::Constant { rate } => rate,
        }
    }
}

/// `X_t` per replica: jam particles strictly beyond `edge * t`.
pub fn front_samples(model: RateModel, t: f64, window_k: f64, ens: &Ensemble) -> Result<Vec<u64>> {
    let speed = model.edge();
    let n = choose_window(t, window_k, WindowMode::Jam { speed })?.len() as u64;
    ens.run(|_, seed| jam_front_count(&model.dynamics(seed), t, speed, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontParams {
    pub law: RateLaw,
    pub horizons: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub window_k: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontOutcome {
    pub params: FrontParams,
    pub samples: Vec<Vec<u64>>,
    pub curves: Vec<TailCurve>,
    pub medians: Vec<f64>,
    pub fit: Option<ScalingFit>,
}

/// Bracket `(lower, upper)` on `P(X_t > b t^(1 - alpha))` for large `t`.
pub fn theorem2_bounds(law: &RateLaw, b: f64) -> (f64, f64) {
    let a = a_nu(law.nu());
    let u_star = law.critical_gap().finite().unwrap_or(f64::INFINITY);
    let e = law.kappa() * b.powf(law.nu() + 2.0);
    let lower = (-a * (1.0 + u_star).powf(law.nu() + 1.0) * e).exp();
    (lower, (-e / a).exp())
}

fn summarize(samples: &[Vec<u64>]) -> Vec<f64> {
    samples
        .iter()
        .map(|xs| stats::median(&xs.iter().map(|&x| x as f64).collect::<Vec<_>>()))
        .collect()
}

impl FrontParams {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.law.nu() > 0.0, || {
            format!("the front tail requires nu > 0, got nu = {}", self.law.nu())
        })
    }
}

/// Tail of `X_t / t^(1 - alpha)` from the jam start.
pub fn theorem2_front(params: &FrontParams) -> Result<FrontOutcome> {
    params.validate()?;
    let law = params.law;
    let expo = law.constants().one_minus_alpha;
    let model = RateModel::Disordered { law };
    let mut samples = Vec::new();
    let mut curves = Vec::new();
    for (h, &t) in params.horizons.iter().enumerate() {
        let xs = front_samples(model, t, params.window_k, &params.ensemble.child(h as u64))?;
        let scaled: Vec<f64> = xs.iter().map(|&x| x as f64 / t.powf(expo)).collect();
        curves.push(TailCurve::from_samples(t, &scaled, &params.b_grid, |b| {
            theorem2_bounds(&law, b)
        }));
        samples.push(xs);
    }
    let medians = summarize(&samples);
    let fit = ScalingFit::new(params.horizons.clone(), medians.clone()).ok();
    Ok(FrontOutcome {
        params: params.clone(),
        samples,
        curves,
        medians,
        fit,
    })
}

fn exponent_check(name: &str, fit: &Option<ScalingFit>, lo: f64, hi: f64, medians: &[f64]) -> Check {
    match fit {
        Some(f) => Check::new(
            name,
            (lo..=hi).contains(&f.slope()),
            format!("slope {:.4} +- {:.4} against [{lo:.4}, {hi:.4}]", f.slope(), f.fit.slope_se),
        ),
        None => Check::new(name, false, format!("medians {medians:?} do not admit a log-log fit")),
    }
}

fn samples_csv(name: &str, horizons: &[f64], samples: &[Vec<u64>]) -> Result<Artifact> {
    Artifact::csv(name, |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["t", "replica", "x_t"])?;
        for (t, xs) in horizons.iter().zip(samples) {
            for (r, x) in xs.iter().enumerate() {
                w.write_record([t.to_string(), r.to_string(), x.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    })
}

impl FrontOutcome {
    pub fn report(&self) -> Result<Report> {
        let target = self.params.law.constants().one_minus_alpha;
        let mut checks = vec![exponent_check(
            "median front exponent",
            &self.fit,
            target - 0.1,
            target + 0.1,
            &self.medians,
        )];
        if let Some(last) = self.curves.last() {
            for r in last.rows.iter().filter(|r| r.param > 0.0) {
                checks.push(Check::new(
                    format!("tail at b = {} below twice the upper bound", r.param),
                    r.empirical <= 2.0 * r.bound_upper,
                    format!("{:.4} vs {:.4} at t = {}", r.empirical, 2.0 * r.bound_upper, last.t),
                ));
            }
        }
        let mut artifacts = vec![
            Artifact::csv("thm2_tail.csv", |b| TailCurve::write_csv(&self.curves, b))?,
            samples_csv("thm2_samples.csv", &self.params.horizons, &self.samples)?,
        ];
        if let Some(f) = &self.fit {
            artifacts.push(Artifact::csv("thm2_scaling.csv", |b| f.write_csv(b))?);
        }
        Ok(Report {
            command: "thm2",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({
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
pub struct Theorem3Params {
    pub law: RateLaw,
    pub horizons: Vec<f64>,
    pub a_grid: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub window_k: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowCell {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub frequency: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Outcome {
    pub params: Theorem3Params,
    pub samples: Vec<Vec<u64>>,
    pub cells: Vec<WindowCell>,
    /// Median of `X_t t^(-1/2)` per horizon.
    pub scaled_medians: Vec<f64>,
}

impl Theorem3Params {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.law.nu() == 0.0, || {
            format!("the diffusive window requires nu = 0, got nu = {}", self.law.nu())
        })
    }
}

/// Frequency of `a t^(1/2) / ln t <= X_t <= b t^(1/2)` over an `(a, b)` grid.
pub fn theorem3_window(params: &Theorem3Params) -> Result<Theorem3Outcome> {
    params.validate()?;
    let law = params.law;
    let model = RateModel::Disordered { law };
    let mut samples = Vec::new();
    let mut cells = Vec::new();
    let mut scaled_medians = Vec::new();
    for (h, &t) in params.horizons.iter().enumerate() {
        let xs = front_samples(model, t, params.window_k, &params.ensemble.child(h as u64))?;
        let n = xs.len() as u64;
        for &a in &params.a_grid {
            for &b in &params.b_grid {
                let lo = a * t.sqrt() / t.ln();
                let hi = b * t.sqrt();
                let k = xs.iter().filter(|&&x| lo <= x as f64 && x as f64 <= hi).count() as u64;
                let (ci_lo, ci_hi) = wilson(k, n, Z95);
                cells.push(WindowCell {
                    t,
                    a,
                    b,
                    frequency: k as f64 / n.max(1) as f64,
                    ci_lo,
                    ci_hi,
                });
            }
        }
        let scaled: Vec<f64> = xs.iter().map(|&x| x as f64 / t.sqrt()).collect();
        scaled_medians.push(stats::median(&scaled));
        samples.push(xs);
    }
    Ok(Theorem3Outcome {
        params: params.clone(),
        samples,
        cells,
        scaled_medians,
    })
}

impl Theorem3Outcome {
    /// The cell with the smallest `a` and largest `b` at horizon `t`.
    pub fn widest(&self, t: f64) -> Option<&WindowCell> {
        let a = self.params.a_grid.iter().copied().fold(f64::INFINITY, f64::min);
        let b = self.params.b_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.cells.iter().find(|c| c.t == t && c.a == a && c.b == b)
    }

    pub fn report(&self) -> Result<Report> {
        let checks = self
            .params
            .horizons
            .iter()
            .filter_map(|&t| self.widest(t))
            .map(|c| {
                Check::new(
                    format!("widest window holds at t = {}", c.t),
                    c.frequency >= 0.9,
                    format!("frequency {:.4} for a = {}, b = {}", c.frequency, c.a, c.b),
                )
            })
            .collect();
        let surface = Artifact::csv("thm3_window.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["t", "a", "b", "frequency", "ci_lo", "ci_hi"])?;
            for c in &self.cells {
                w.write_record([
                    c.t.to_string(),
                    c.a.to_string(),
                    c.b.to_string(),
                    c.frequency.to_string(),
                    c.ci_lo.to_string(),
                    c.ci_hi.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(Report {
            command: "thm3",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({ "scaled_medians": self.scaled_medians }),
            checks,
            artifacts: vec![
                surface,
                samples_csv("thm3_samples.csv", &self.params.horizons, &self.samples)?,
            ],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem4Params {
    pub law: RateLaw,
    pub horizons: Vec<f64>,
    /// Allowed slack around the exponent bracket.
    pub margin: f64,
    pub window_k: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem4Outcome {
    pub params: Theorem4Params,
    pub samples: Vec<Vec<u64>>,
    pub medians: Vec<f64>,
    pub fit: Option<ScalingFit>,
    /// `((1 + nu)/(3 + nu), (1 + nu)/2)`.
    pub bracket: (f64, f64),
}

pub fn theorem4_bracket(nu: f64) -> (f64, f64) {
    ((1.0 + nu) / (3.0 + nu), (1.0 + nu) / 2.0)
}

impl Theorem4Params {
    pub fn validate(&self) -> Result<()> {
        let nu = self.law.nu();
        hypothesis(nu > -1.0 && nu < 0.0, || {
            format!("the sub-diffusive window requires -1 < nu < 0, got nu = {nu}")
        })
    }
}

/// Growth exponent of the median `X_t` for `-1 < nu < 0`.
pub fn theorem4_window(params: &Theorem4Params) -> Result<Theorem4Outcome> {
    params.validate()?;
    let law = params.law;
    let model = RateModel::Disordered { law };
    let samples = params
        .horizons
        .iter()
        .enumerate()
        .map(|(h, &t)| front_samples(model, t, params.window_k, &params.ensemble.child(h as u64)))
        .collect::<Result<Vec<_>>>()?;
    let medians = summarize(&samples);
    let fit = ScalingFit::new(params.horizons.clone(), medians.clone()).ok();
    Ok(Theorem4Outcome {
        params: params.clone(),
        samples,
        medians,
        fit,
        bracket: theorem4_bracket(law.nu()),
    })
}

impl Theorem4Outcome {
    pub fn report(&self) -> Result<Report> {
        let (lo, hi) = self.bracket;
        let m = self.params.margin;
        let checks = vec![exponent_check(
            "median front exponent in bracket",
            &self.fit,
            lo - m,
            hi + m,
            &self.medians,
        )];
        let mut artifacts = vec![samples_csv("thm4_samples.csv", &self.params.horizons, &self.samples)?];
        if let Some(f) = &self.fit {
            artifacts.push(Artifact::csv("thm4_scaling.csv", |b| f.write_csv(b))?);
        }
        Ok(Report {
            command: "thm4",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({
                "medians": self.medians,
                "fit": self.fit.as_ref().map(|f| f.fit),
                "bracket": [lo, hi],
            }),
            checks,
            artifacts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RostParams {
    pub rate: f64,
    pub t: f64,
    /// Macroscopic bin centres `x` (position / t).
    pub xs: Vec<f64>,
    /// Bin half-width.
    pub delta: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityBin {
    pub x: f64,
    pub density: f64,
    /// Limit profile averaged over the bin.
    pub profile: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RostOutcome {
    pub params: RostParams,
    pub bins: Vec<DensityBin>,
}

/// Limit density of the homogeneous jam release at macroscopic position `x`
/// for unit rates: 1 left of -1, `(1 - x)/2` on `(-1, 1]`, 0 beyond.
pub fn rost_density(x: f64) -> f64 {
    if x <= -1.0 {
        1.0
    } else if x <= 1.0 {
        0.5 * (1.0 - x)
    } else {
        0.0
    }
}

fn rost_bin_average(lo: f64, hi: f64) -> f64 {
    // the profile is piecewise linear; Simpson is exact on each piece
    let pieces = [lo, hi, -1.0, 1.0];
    let mut cuts: Vec<f64> = pieces.iter().copied().filter(|&v| v >= lo && v <= hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let integral: f64 = cuts
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let m = 0.5 * (a + b);
            // evaluate inside the piece to dodge the kink conventions
            (b - a) / 6.0 * (rost_density(a + 1e-12 * (b - a)) + 4.0 * rost_density(m) + rost_density(b - 1e-12 * (b - a)))
        })
        .sum();
    integral / (hi - lo)
}

impl RostParams {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.rate > 0.0 && self.rate <= 1.0, || {
            format!("rate {} must lie in (0, 1]", self.rate)
        })?;
        hypothesis(self.delta > 0.0, || "bin half-width must be positive".into())
    }
}

/// Empirical density of the constant-rate jam release in bins `(x -+ delta) t`.
pub fn rost_profile(params: &RostParams) -> Result<RostOutcome> {
    params.validate()?;
    let t = params.t;
    let reach = params
        .xs
        .iter()
        .map(|x| x.abs() + params.delta)
        .fold(1.0, f64::max);
    let n = (reach * t).floor() as u64 + 1 + JAM_MARGIN as u64;
    // integer sites in (lo, hi]
    let edges: Vec<(i64, i64)> = params
        .xs
        .iter()
        .map(|x| {
            let lo = ((x - params.delta) * t).floor() as i64 + 1;
            let hi = ((x + params.delta) * t).floor() as i64;
            (lo, hi)
        })
        .collect();
    let model = RateModel::Constant { rate: params.rate };
    let counts = params.ensemble.run(|_, seed| {
        let mut counts = vec![0u64; edges.len()];
        let mut lowest = 0i64;
        let out = jam_sweep(&model.dynamics(seed), t, n, |label, jumps| {
            let x = label + jumps.len() as i64;
            for (c, &(lo, hi)) in counts.iter_mut().zip(&edges) {
                *c += (lo <= x && x <= hi) as u64;
            }
            lowest = label;
            !jumps.is_empty()
        })?;
        // everything below the first unmoved particle is still packed
        let packed_top = if out.exhausted { -(n as i64) } else { lowest - 1 };
        let packed_bottom = -(n as i64) + 1;
        for (c, &(lo, hi)) in counts.iter_mut().zip(&edges) {
            let a = lo.max(packed_bottom);
            let b = hi.min(packed_top);
            if b >= a {
                *c += (b - a + 1) as u64;
            }
        }
        Ok(counts)
    })?;
    let reps = counts.len() as f64;
    let bins = params
        .xs
        .iter()
        .zip(&edges)
        .enumerate()
        .map(|(k, (&x, &(lo, hi)))| {
            let sites = (hi - lo + 1).max(1) as f64;
            let total: u64 = counts.iter().map(|c| c[k]).sum();
            let r = params.rate;
            DensityBin {
                x,
                density: total as f64 / (sites * reps),
                profile: rost_bin_average((x - params.delta) / r, (x + params.delta) / r),
            }
        })
        .collect();
    Ok(RostOutcome {
        params: params.clone(),
        bins,
    })
}

impl RostOutcome {
    pub fn density_at(&self, x: f64) -> Option<f64> {
        self.bins.iter().find(|b| b.x == x).map(|b| b.density)
    }

    pub fn report(&self) -> Result<Report> {
        let mut checks = Vec::new();
        if let Some(d) = self.density_at(0.0) {
            checks.push(Check::new("density at x = 0", (d - 0.5).abs() <= 0.02, format!("{d:.4}")));
        }
        if let Some(d) = self.density_at(-1.5) {
            checks.push(Check::new("density at x = -1.5", d >= 0.98, format!("{d:.4}")));
        }
        if let Some(d) = self.density_at(1.5) {
            checks.push(Check::new("density at x = 1.5", d <= 0.02, format!("{d:.4}")));
        }
        let profile = Artifact::csv("rost_profile.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["x", "density", "profile"])?;
            for b in &self.bins {
                w.write_record([b.x.to_string(), b.density.to_string(), b.profile.to_string()])?;
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(Report {
            command: "rost",
            law: None,
            params: to_value(&self.params)?,
            summary: to_value(&self.bins)?,
            checks,
            artifacts: vec![profile],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlynnWhittParams {
    pub rate: f64,
    pub a: f64,
    pub gamma: f64,
    pub horizons: Vec<f64>,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlynnWhittRow {
    pub t: f64,
    pub label: i64,
    pub mean: f64,
    pub sd: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlynnWhittOutcome {
    pub params: GlynnWhittParams,
    pub rows: Vec<GlynnWhittRow>,
    pub limit: f64,
}

impl GlynnWhittParams {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.gamma > 0.0 && self.gamma < 1.0, || {
            format!("gamma = {} must lie in (0, 1)", self.gamma)
        })?;
        hypothesis(self.rate > 0.0 && self.rate <= 1.0 && self.a >= 0.0, || {
            "rate must lie in (0, 1] and a must be nonnegative".into()
        })
    }
}

/// `(xi_{-k}(t) - r t) / (r t)^((1 + gamma)/2)` with `k = floor(a t^gamma)`
/// for the constant-rate jam release.
pub fn glynn_whitt_benchmark(params: &GlynnWhittParams) -> Result<GlynnWhittOutcome> {
    params.validate()?;
    let model = RateModel::Constant { rate: params.rate };
    let rt = |t: f64| params.rate * t;
    let rows = params
        .horizons
        .iter()
        .enumerate()
        .map(|(h, &t)| {
            let k = (params.a * t.powf(params.gamma)).floor() as u64;
            let scale = rt(t).powf(0.5 * (1.0 + params.gamma));
            let xs = params.ensemble.child(h as u64).run(|_, seed| {
                let mut position = None;
                jam_sweep(&model.dynamics(seed), t, k + 1, |label, jumps| {
                    if label == -(k as i64) {
                        position = Some(label + jumps.len() as i64);
                    }
                    true
                })?;
                let x = position.ok_or_else(|| Error::WindowAudit("label not reached".into()))?;
                Ok((x as f64 - rt(t)) / scale)
            })?;
            let sd = stats::variance(&xs).sqrt();
            Ok(GlynnWhittRow {
                t,
                label: -(k as i64),
                mean: stats::mean(&xs),
                sd,
                std_error: sd / (xs.len() as f64).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GlynnWhittOutcome {
        params: params.clone(),
        rows,
        limit: -2.0 * params.a.sqrt(),
    })
}

impl GlynnWhittOutcome {
    pub fn report(&self) -> Result<Report> {
        let gaps: Vec<f64> = self.rows.iter().map(|r| (r.mean - self.limit).abs()).collect();
        let checks = vec![Check::new(
            "trend toward the limit",
            gaps.windows(2).all(|w| w[1] <= w[0]),
            format!("distances {gaps:?} to {}", self.limit),
        )];
        let table = Artifact::csv("glynnwhitt.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["t", "label", "mean", "sd", "std_error", "limit"])?;
            for r in &self.rows {
                w.write_record([
                    r.t.to_string(),
                    r.label.to_string(),
                    r.mean.to_string(),
                    r.sd.to_string(),
                    r.std_error.to_string(),
                    self.limit.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(Report {
            command: "glynnwhitt",
            law: None,
            params: to_value(&self.params)?,
            summary: serde_json::json!({ "rows": self.rows, "limit": self.limit }),
            checks,
            artifacts: vec![table],
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
    fn theorem2_bracket_values() {
        let (lo, hi) = theorem2_bounds(&law(), 1.0);
        assert!((hi - (-4.0f64 / 6.75).exp()).abs() < 1e-15);
        // A(1) (1 + u*)^2 kappa = 6.75 * 9 * 4
        assert!((lo.ln() + 243.0).abs() < 1e-9);
        assert_eq!(theorem2_bounds(&law(), 0.0).1, 1.0);
    }

    #[test]
    fn theorem4_bracket_at_half() {
        let (lo, hi) = theorem4_bracket(-0.5);
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.25).abs() < 1e-15);
        let (lo, hi) = theorem4_bracket(-1e-9);
        assert!((lo - 1.0 / 3.0).abs() < 1e-6 && (hi - 0.5).abs() < 1e-6);
    }

    #[test]
    fn hypotheses() {
        let p = FrontParams {
            law: RateLaw::new(0.5, 0.0, 1.0, 0.5).unwrap(),
            horizons: vec![10.0, 20.0, 40.0],
            b_grid: vec![1.0],
            window_k: 2.0,
            ensemble: Ensemble::new(2, 1),
        };
        assert!(matches!(theorem2_front(&p), Err(Error::Hypothesis(_))));
        let p3 = Theorem3Params {
            law: law(),
            horizons: vec![10.0],
            a_grid: vec![0.1],
            b_grid: vec![10.0],
            window_k: 2.0,
            ensemble: Ensemble::new(2, 1),
        };
        assert!(matches!(theorem3_window(&p3), Err(Error::Hypothesis(_))));
        let p4 = Theorem4Params {
            law: law(),
            horizons: vec![10.0, 20.0, 40.0],
            margin: 0.1,
            window_k: 2.0,
            ensemble: Ensemble::new(2, 1),
        };
        assert!(matches!(theorem4_window(&p4), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn front_is_empty_at_time_zero() {
        let xs = front_samples(RateModel::Disordered { law: law() }, 0.0, 2.0, &Ensemble::new(5, 1)).unwrap();
        assert!(xs.iter().all(|&x| x == 0));
    }

    #[test]
    fn homogeneous_front_is_thin() {
        let t = 2000.0;
        let xs = front_samples(RateModel::Constant { rate: 1.0 }, t, 2.0, &Ensemble::new(40, 3)).unwrap();
        let med = stats::median(&xs.iter().map(|&x| x as f64).collect::<Vec<_>>());
        assert!(med / t.powf(2.0 / 3.0) < 0.2, "median {med}");
    }

    #[test]
    fn bin_average_of_profile() {
        assert!((rost_bin_average(-0.1, 0.1) - 0.5).abs() < 1e-12);
        assert!((rost_bin_average(-1.6, -1.4) - 1.0).abs() < 1e-12);
        assert!(rost_bin_average(1.4, 1.6).abs() < 1e-12);
        // straddling the left kink: (0.1 * 1 + integral of (1-x)/2 over (-1,-0.9]) / 0.2
        let want = (0.1 + 0.1 * 0.975) / 0.2;
        assert!((rost_bin_average(-1.1, -0.9) - want).abs() < 1e-9);
    }

    #[test]
    fn small_rost_profile() {
        let p = RostParams {
            rate: 1.0,
            t: 400.0,
            xs: vec![-1.5, -0.5, 0.0, 0.5, 1.5],
            delta: 0.1,
            ensemble: Ensemble::new(30, 2),
        };
        let out = rost_profile(&p).unwrap();
        assert_eq!(out.density_at(-1.5), Some(1.0));
        assert_eq!(out.density_at(1.5), Some(0.0));
        assert!((out.density_at(0.0).unwrap() - 0.5).abs() < 0.05);
        assert!((out.density_at(-0.5).unwrap() - 0.75).abs() < 0.05);
    }

    #[test]
    fn glynn_whitt_small() {
        let p = GlynnWhittParams {
            rate: 1.0,
            a: 1.0,
            gamma: 0.5,
            horizons: vec![100.0, 1000.0],
            ensemble: Ensemble::new(50, 4),
        };
        let out = glynn_whitt_benchmark(&p).unwrap();
        assert_eq!(out.limit, -2.0);
        assert!(out.rows.iter().all(|r| r.mean < 0.0));
        assert_eq!(out.rows[1].label, -31);
    }
}
