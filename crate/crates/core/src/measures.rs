//! Initial and invariant laws: geometric product equilibria over a quenched
//! field, i.i.d. gap families with a prescribed mean, and the jam start.

use serde::Serialize;

use crate::disorder::{DisorderField, RateLaw};
use crate::error::{Error, Result};
use crate::rng::{open_unit, unit, Domain, IndexedStream};
use crate::state::{GapConfig, LabelRange, ParticleConfig};

/// Product equilibrium with common velocity `a`, optionally with every rate
/// floored at `fastening`.
#[derive(Debug, Clone)]
pub struct EquilibriumSpec {
    pub a: f64,
    pub field: DisorderField,
    pub fastening: Option<f64>,
    pub seed: u64,
}

impl EquilibriumSpec {
    pub fn new(a: f64, field: DisorderField, seed: u64) -> Self {
        EquilibriumSpec {
            a,
            field,
            fastening: None,
            seed,
        }
    }

    pub fn fastened(mut self, floor: f64) -> Self {
        self.fastening = Some(floor);
        self
    }

    /// `p_i`, or `max(p_i, floor)` under fastening.
    pub fn effective_rate(&self, label: i64) -> Result<f64> {
        let r = self.field.labels();
        let p = self.field.get(label).ok_or(Error::OutOfWindow {
            label,
            lo: r.lo,
            hi: r.hi,
        })?;
        Ok(self.fastening.map_or(p, |f| p.max(f)))
    }

    fn ratio(&self, label: i64) -> Result<f64> {
        let p = self.effective_rate(label)?;
        if !(self.a >= 0.0 && self.a < p) {
            return Err(Error::domain(
                "equilibrium velocity",
                format!("a = {} is not below the rate {p} of label {label}", self.a),
            ));
        }
        Ok(self.a / p)
    }
}

/// Geometric gap with `P(k) = (1 - rho) rho^k` by inversion of one uniform.
fn geometric(rho: f64, u: f64) -> u64 {
    if rho <= 0.0 {
        0
    } else {
        (u.ln() / rho.ln()).floor() as u64
    }
}

/// Equilibrium gap of one label: `P[eta_i = k] = (1 - a/p_i)(a/p_i)^k`.
/// A pure function of `(spec.seed, label)`.
pub fn equilibrium_gap(spec: &EquilibriumSpec, label: i64) -> Result<u64> {
    let stream = IndexedStream::<2>::new(spec.seed, Domain::Gaps);
    let rho = spec.ratio(label)?;
    Ok(geometric(rho, open_unit(&mut stream.at(label))))
}

/// Independent equilibrium gaps for every label in `labels`; the anchor
/// particle `labels.lo` sits at the origin.
pub fn sample_equilibrium_gaps(spec: &EquilibriumSpec, labels: LabelRange) -> Result<GapConfig> {
    let gaps = labels
        .iter()
        .map(|l| equilibrium_gap(spec, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapConfig {
        anchor_label: labels.lo,
        anchor_position: 0,
        gaps,
    })
}

/// Quenched mean gap: the field average of `a / (p̂_i - a)`.
pub fn equilibrium_mean_gap(spec: &EquilibriumSpec) -> Result<f64> {
    let labels = spec.field.labels();
    let total = labels
        .iter()
        .map(|l| {
            let rho = spec.ratio(l)?;
            Ok(rho / (1.0 - rho))
        })
        .sum::<Result<f64>>()?;
    Ok(total / labels.len() as f64)
}

/// Annealed mean gap `E[a / (max(p, floor) - a)]` over the law.
pub fn annealed_mean_gap(law: &RateLaw, a: f64, fastening: Option<f64>) -> Result<f64> {
    let floor = match fastening {
        Some(r) if r > law.c() => r,
        _ => return law.velocity_to_gap(a),
    };
    if !(a >= 0.0 && a < floor) {
        return Err(Error::domain(
            "equilibrium velocity",
            format!("a = {a} must lie in [0, {floor}) under fastening"),
        ));
    }
    let s_floor = law.window_coordinate(floor);
    let flat = law.window_mass() * s_floor * a / (floor - a);
    let lag = law.c() - a;
    let rest = law.expect_window_between(s_floor, 1.0, &|q: f64| a / (lag + q));
    Ok(flat + rest + law.top_mass() * a / (floor.max(1.0) - a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GapFamily {
    /// `P(k) = (1/(1+u)) (u/(1+u))^k`.
    Geometric,
    /// Uniform on `{0, ..., 2u}`; needs integer `u`.
    Uniform,
    /// Bounded: `hi` with probability `(u - lo)/(hi - lo)`, else `lo`.
    TwoPoint { lo: u64, hi: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IidGapSpec {
    pub mean: f64,
    pub family: GapFamily,
    pub seed: u64,
}

impl IidGapSpec {
    pub fn new(mean: f64, family: GapFamily, seed: u64) -> Result<Self> {
        let bad = |m: String| Err(Error::Config(m));
        if !(mean > 0.0 && mean.is_finite()) {
            return bad(format!("gap mean {mean} must be positive"));
        }
        match family {
            GapFamily::Uniform if mean.fract() != 0.0 => {
                return bad(format!(
                    "uniform gap family needs an integer mean, got {mean}"
                ))
            }
            GapFamily::TwoPoint { lo, hi } if !(lo < hi && lo as f64 <= mean && mean <= hi as f64) => {
                return bad(format!(
                    "two-point support {{{lo}, {hi}}} cannot have mean {mean}"
                ))
            }
            _ => {}
        }
        Ok(IidGapSpec { mean, family, seed })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn variance(&self) -> f64 {
        let u = self.mean;
        match self.family {
            GapFamily::Geometric => u * (1.0 + u),
            GapFamily::Uniform => ((2.0 * u + 1.0).powi(2) - 1.0) / 12.0,
            GapFamily::TwoPoint { lo, hi } => {
                let q = (u - lo as f64) / (hi - lo) as f64;
                ((hi - lo) as f64).powi(2) * q * (1.0 - q)
            }
        }
    }

    pub fn sampler(&self) -> IidGapSampler {
        IidGapSampler {
            spec: *self,
            stream: IndexedStream::new(self.seed, Domain::Gaps),
        }
    }
}

/// Counter-addressed gap generator: `eta_i` depends only on `(seed, i)`.
#[derive(Clone)]
pub struct IidGapSampler {
    spec: IidGapSpec,
    stream: IndexedStream<2>,
}

impl IidGapSampler {
    pub fn gap(&self, label: i64) -> u64 {
        let mut rng = self.stream.at(label);
        let u = self.spec.mean;
        match self.spec.family {
            GapFamily::Geometric => geometric(u / (1.0 + u), open_unit(&mut rng)),
            GapFamily::Uniform => {
                let top = 2 * u as u64;
                ((unit(&mut rng) * (top + 1) as f64) as u64).min(top)
            }
            GapFamily::TwoPoint { lo, hi } => {
                let q = (u - lo as f64) / (hi - lo) as f64;
                if unit(&mut rng) < q {
                    hi
                } else {
                    lo
                }
            }
        }
    }
}

/// I.i.d. gaps for every label in `labels`, anchored at the origin.
pub fn sample_iid_gaps(spec: &IidGapSpec, labels: LabelRange) -> GapConfig {
    let s = spec.sampler();
    GapConfig {
        anchor_label: labels.lo,
        anchor_position: 0,
        gaps: labels.iter().map(|l| s.gap(l)).collect(),
    }
}

/// Sites `(-n, 0]` occupied, labels `-n+1 ..= 0` at their own positions.
pub fn jam_initial(n: usize) -> ParticleConfig {
    assert!(n >= 1, "jam needs at least one particle");
    let lo = 1 - n as i64;
    ParticleConfig::new(lo, (lo..=0).collect()).expect("jam is ordered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::sample_rates;
    use crate::state::particles_to_heights;

    fn law() -> RateLaw {
        RateLaw::new(0.5, 1.0, 4.0, 0.5).unwrap()
    }

    fn const_field(n: usize, p: f64) -> DisorderField {
        // every rate equal to 1: a law with all mass on the atom
        let law = RateLaw::new(0.5, 1.0, 1e-9, 0.5).unwrap();
        let f = sample_rates(&law, LabelRange::new(0, n as i64 - 1), 1);
        assert!(f.rates().iter().all(|&r| r == p));
        f
    }

    #[test]
    fn zero_velocity_gives_jam() {
        let field = sample_rates(&law(), LabelRange::new(0, 99), 4);
        let g = sample_equilibrium_gaps(&EquilibriumSpec::new(0.0, field, 1), LabelRange::new(0, 99))
            .unwrap();
        assert!(g.gaps.iter().all(|&k| k == 0));
    }

    #[test]
    fn unit_rates_half_velocity_geometric() {
        let n = 100_000;
        let spec = EquilibriumSpec::new(0.5, const_field(n, 1.0), 8);
        let g = sample_equilibrium_gaps(&spec, LabelRange::new(0, n as i64 - 1)).unwrap();
        let mean = g.gaps.iter().sum::<u64>() as f64 / n as f64;
        // geometric with ratio 1/2: mean 1, variance 2
        let se = (2.0 / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");
        let zeros = g.gaps.iter().filter(|&&k| k == 0).count() as f64 / n as f64;
        assert!((zeros - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
        assert!((equilibrium_mean_gap(&spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_fast_velocity_names_label() {
        let field = sample_rates(&law(), LabelRange::new(0, 999), 4);
        let err = sample_equilibrium_gaps(&EquilibriumSpec::new(0.9, field, 1), LabelRange::new(0, 999))
            .unwrap_err();
        assert!(err.to_string().contains("label"), "{err}");
    }

    #[test]
    fn fastened_rates_admit_velocity_above_c() {
        let law = law();
        let (q2, q3, n) = (2.0, 1.0, 1e4);
        let floor = law.scan_threshold(q2, n);
        let a_hat = law.scan_threshold(q3, n);
        assert!(a_hat > law.c());
        let field = sample_rates(&law, LabelRange::new(0, 9999), 21);
        let spec = EquilibriumSpec::new(a_hat, field, 2).fastened(floor);
        for l in 0..10_000 {
            assert!(spec.effective_rate(l).unwrap() > a_hat);
        }
        assert!(sample_equilibrium_gaps(&spec, LabelRange::new(0, 9999)).is_ok());
    }

    #[test]
    fn quenched_mean_matches_annealed_quadrature() {
        let law = law();
        let a = 0.4;
        let target = law.velocity_to_gap(a).unwrap();
        let reps = 10_000;
        let samples: Vec<f64> = (0..reps)
            .map(|r| {
                let field = sample_rates(&law, LabelRange::new(0, 9), 1000 + r);
                equilibrium_mean_gap(&EquilibriumSpec::new(a, field, 0)).unwrap()
            })
            .collect();
        let m = samples.iter().sum::<f64>() / reps as f64;
        let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((m - target).abs() < 3.0 * (var / reps as f64).sqrt(), "{m} vs {target}");
        assert_eq!(annealed_mean_gap(&law, a, None).unwrap(), target);
    }

    #[test]
    fn fastened_mean_gap_trends_down_to_critical() {
        let law = law();
        let (q2, q3) = (2.0, 1.0);
        let u_star = law.critical_gap().finite().unwrap();
        let values: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|&n| {
                annealed_mean_gap(
                    &law,
                    law.scan_threshold(q3, n),
                    Some(law.scan_threshold(q2, n)),
                )
                .unwrap()
            })
            .collect();
        assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
        assert!(values[2] > u_star);
        // the excess decays like N^(-alpha nu)
        let far = annealed_mean_gap(&law, law.scan_threshold(q3, 1e15), Some(law.scan_threshold(q2, 1e15)))
            .unwrap();
        assert!(far > u_star && far - u_star < 0.01, "{far}");
    }

    #[test]
    fn fastened_annealed_mean_matches_field_average() {
        let law = law();
        let (a, floor) = (0.55, 0.6);
        let target = annealed_mean_gap(&law, a, Some(floor)).unwrap();
        let field = sample_rates(&law, LabelRange::new(0, 199_999), 5);
        let spec = EquilibriumSpec::new(a, field, 0).fastened(floor);
        let quenched = equilibrium_mean_gap(&spec).unwrap();
        assert!((quenched - target).abs() / target < 0.01, "{quenched} vs {target}");
    }

    #[test]
    fn two_point_mean_and_variance() {
        let s = IidGapSpec::new(2.0, GapFamily::TwoPoint { lo: 0, hi: 4 }, 3).unwrap();
        assert_eq!(s.variance(), 4.0);
        let g = sample_iid_gaps(&s, LabelRange::new(0, 99_999));
        assert!(g.gaps.iter().all(|&k| k == 0 || k == 4));
        let mean = g.gaps.iter().sum::<u64>() as f64 / 1e5;
        assert!((mean - 2.0).abs() < 3.0 * (4.0f64 / 1e5).sqrt());
    }

    #[test]
    fn geometric_family_clt() {
        let s = IidGapSpec::new(3.0, GapFamily::Geometric, 12).unwrap();
        let n = 100_000;
        let g = sample_iid_gaps(&s, LabelRange::new(0, n - 1));
        let mean = g.gaps.iter().sum::<u64>() as f64 / n as f64;
        let sd = s.variance().sqrt();
        assert!((mean - 3.0).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean}");
        // P(eta = 0) = 1/(1+u)
        let zeros = g.gaps.iter().filter(|&&k| k == 0).count() as f64 / n as f64;
        assert!((zeros - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / n as f64).sqrt());
    }

    #[test]
    fn uniform_family() {
        assert!(IidGapSpec::new(2.5, GapFamily::Uniform, 0).is_err());
        assert!(IidGapSpec::new(5.0, GapFamily::TwoPoint { lo: 0, hi: 4 }, 0).is_err());
        let s = IidGapSpec::new(2.0, GapFamily::Uniform, 9).unwrap();
        let g = sample_iid_gaps(&s, LabelRange::new(0, 49_999));
        assert!(g.gaps.iter().all(|&k| k <= 4));
        for v in 0..=4 {
            let f = g.gaps.iter().filter(|&&k| k == v).count() as f64 / 5e4;
            assert!((f - 0.2).abs() < 4.0 * (0.16f64 / 5e4).sqrt());
        }
    }

    #[test]
    fn samplers_are_reproducible_per_label() {
        let s = IidGapSpec::new(3.0, GapFamily::Geometric, 77).unwrap();
        let whole = sample_iid_gaps(&s, LabelRange::new(-20, 20));
        let part = sample_iid_gaps(&s, LabelRange::new(5, 9));
        assert_eq!(&whole.gaps[25..30], &part.gaps[..]);
        let field = sample_rates(&law(), LabelRange::new(0, 30), 2);
        let spec = EquilibriumSpec::new(0.45, field, 6);
        let a = sample_equilibrium_gaps(&spec, LabelRange::new(0, 30)).unwrap();
        let b = sample_equilibrium_gaps(&spec, LabelRange::new(10, 12)).unwrap();
        assert_eq!(&a.gaps[10..13], &b.gaps[..]);
    }

    #[test]
    fn jam_examples() {
        assert_eq!(jam_initial(1).positions(), &[0]);
        assert_eq!(jam_initial(1).labels(), LabelRange::new(0, 0));
        assert_eq!(jam_initial(3).positions(), &[-2, -1, 0]);
        assert!(particles_to_heights(&jam_initial(7)).heights.iter().all(|&h| h == 0));
    }
}
