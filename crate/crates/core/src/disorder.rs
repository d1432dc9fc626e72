//! Rate distribution family, quenched rate fields and everything computable
//! from the rates alone: critical gap, velocity/gap maps, slow-rate scans.
//!
//! The family is a power-law window of width `eps` above the support edge
//! `c`, with density `kappa (nu + 1) (p - c)^nu`, plus an atom at `p = 1`
//! carrying whatever mass the window leaves over.

use std::io::Write;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, open_unit, unit, Domain, IndexedStream};
use crate::state::LabelRange;

/// Absolute target for the double-exponential rule on the transformed integrand.
const QUAD_TOL: f64 = 1e-12;
/// Bisection stops once the bracket is this narrow.
const BISECT_TOL: f64 = 1e-13;
/// Upper limit of `y = -ln s`; `e^-700` is still a normal double.
const Y_MAX: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateLawParams", into = "RateLawParams")]
pub struct RateLaw {
    c: f64,
    nu: f64,
    kappa: f64,
    eps: f64,
    window_mass: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RateLawParams {
    c: f64,
    nu: f64,
    kappa: f64,
    eps: f64,
}

impl TryFrom<RateLawParams> for RateLaw {
    type Error = Error;
    fn try_from(p: RateLawParams) -> Result<Self> {
        RateLaw::new(p.c, p.nu, p.kappa, p.eps)
    }
}

impl From<RateLaw> for RateLawParams {
    fn from(l: RateLaw) -> Self {
        RateLawParams {
            c: l.c,
            nu: l.nu,
            kappa: l.kappa,
            eps: l.eps,
        }
    }
}

/// The maximal mean gap; infinite for `nu <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalGap {
    Finite(f64),
    Infinite,
}

impl CriticalGap {
    pub fn finite(self) -> Option<f64> {
        match self {
            CriticalGap::Finite(u) => Some(u),
            CriticalGap::Infinite => None,
        }
    }

    /// `(1 + u*)^-1`, with the limiting value 0 when `u*` is infinite.
    pub fn critical_density(self) -> f64 {
        match self {
            CriticalGap::Finite(u) => 1.0 / (1.0 + u),
            CriticalGap::Infinite => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub alpha: f64,
    pub one_minus_alpha: f64,
    pub a_nu: f64,
    pub u_star: CriticalGap,
    pub rho_star: f64,
}

impl RateLaw {
    pub fn new(c: f64, nu: f64, kappa: f64, eps: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidLaw(msg));
        if !(c > 0.0 && c < 1.0) {
            return bad(format!("c = {c} must lie in (0, 1)"));
        }
        if !(nu > -1.0 && nu.is_finite()) {
            return bad(format!("nu = {nu} must be finite and > -1"));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return bad(format!("kappa = {kappa} must be finite and > 0"));
        }
        if !(eps > 0.0 && eps <= 1.0 - c + 1e-15) {
            return bad(format!("eps = {eps} must lie in (0, 1 - c]"));
        }
        let window_mass = kappa * eps.powf(nu + 1.0);
        if window_mass > 1.0 + 1e-12 {
            return bad(format!(
                "kappa * eps^(nu+1) = {window_mass} exceeds 1; the window cannot carry more than unit mass"
            ));
        }
        Ok(RateLaw {
            c,
            nu,
            kappa,
            eps: eps.min(1.0 - c),
            window_mass: window_mass.min(1.0),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    /// Probability of a rate in the power-law window `(c, c + eps]`.
    pub fn window_mass(&self) -> f64 {
        self.window_mass
    }
    /// Probability of the atom at `p = 1`.
    pub fn top_mass(&self) -> f64 {
        1.0 - self.window_mass
    }

    pub fn cdf(&self, p: f64) -> f64 {
        if p <= self.c {
            0.0
        } else if p >= 1.0 {
            1.0
        } else if p <= self.c + self.eps {
            (self.kappa * (p - self.c).powf(self.nu + 1.0)).min(self.window_mass)
        } else {
            self.window_mass
        }
    }

    pub fn alpha(&self) -> f64 {
        1.0 / (self.nu + 2.0)
    }

    pub fn constants(&self) -> DerivedConstants {
        let u_star = self.critical_gap();
        DerivedConstants {
            alpha: self.alpha(),
            one_minus_alpha: (self.nu + 1.0) / (self.nu + 2.0),
            a_nu: a_nu(self.nu),
            u_star,
            rho_star: u_star.critical_density(),
        }
    }

    /// Inverse-transform map from two uniforms: `select` in [0,1) picks window
    /// or atom, `shape` in (0,1] places the rate inside the window.
    pub fn rate_from_uniforms(&self, select: f64, shape: f64) -> f64 {
        if select < self.window_mass {
            let p = self.c + self.eps * shape.powf(1.0 / (self.nu + 1.0));
            // keep the support open at c even when the offset underflows
            p.max(self.c.next_up()).min(1.0)
        } else {
            1.0
        }
    }

    /// The quenched rate of `label` under `seed`, without materializing a field.
    pub fn rate_at(&self, seed: u64, label: i64) -> f64 {
        RateSampler::new(*self, seed).rate(label)
    }

    /// Critical gap in closed form.
    pub fn critical_gap(&self) -> CriticalGap {
        if self.nu <= 0.0 {
            return CriticalGap::Infinite;
        }
        let window =
            self.c * self.kappa * (self.nu + 1.0) / self.nu * self.eps.powf(self.nu);
        CriticalGap::Finite(window + self.top_mass() * self.c / (1.0 - self.c))
    }

    /// Critical gap by quadrature of `c / (p - c)` against the law; used to
    /// cross-check the closed form.
    pub fn critical_gap_quadrature(&self) -> CriticalGap {
        if self.nu <= 0.0 {
            return CriticalGap::Infinite;
        }
        let c = self.c;
        CriticalGap::Finite(self.expect(|q| c / q))
    }

    /// `E[g(p - c)]` over the law, with the window integrated in the variable
    /// `s = F(p) / window_mass`, i.e. `p - c = eps s^(1/(nu+1))`. The integrand
    /// takes the offset above `c` so that tiny offsets keep full precision.
    pub(crate) fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.expect_window_between(0.0, 1.0, &g) + self.top_mass() * g(1.0 - self.c)
    }

    /// Window contribution restricted to `s` in `[s0, s1]`.
    ///
    /// Integrated in `y = -ln s` over doubling chunks so that the algebraic
    /// singularity at `s = 0` becomes an exponential tail.
    pub(crate) fn expect_window_between(
        &self,
        s0: f64,
        s1: f64,
        g: &impl Fn(f64) -> f64,
    ) -> f64 {
        if s1 <= s0 || self.window_mass == 0.0 {
            return 0.0;
        }
        let inv = 1.0 / (self.nu + 1.0);
        let eps = self.eps;
        let f = |y: f64| {
            let s = (-y).exp();
            g(eps * s.powf(inv)) * s
        };
        let y_lo = -s1.ln();
        let y_hi = if s0 > 0.0 { -s0.ln() } else { Y_MAX };
        let mut total = 0.0;
        let (mut a, mut width) = (y_lo, 1.0);
        while a < y_hi {
            let b = (a + width).min(y_hi);
            total += quadrature::double_exponential::integrate(f, a, b, QUAD_TOL).integral;
            a = b;
            width *= 2.0;
        }
        self.window_mass * total
    }

    /// Window `s`-coordinate of the rate `p`, clipped to [0, 1].
    pub(crate) fn window_coordinate(&self, p: f64) -> f64 {
        if p <= self.c {
            0.0
        } else {
            ((p - self.c) / self.eps).powf(self.nu + 1.0).min(1.0)
        }
    }

    /// Annealed equilibrium mean gap `u(a) = E[a / (p - a)]` for `a` in [0, c].
    pub fn velocity_to_gap(&self, a: f64) -> Result<f64> {
        if !(0.0..=self.c).contains(&a) {
            return Err(Error::domain(
                "velocity",
                format!("a = {a} must lie in [0, c = {}]", self.c),
            ));
        }
        if a == 0.0 {
            return Ok(0.0);
        }
        if a == self.c {
            return self.critical_gap().finite().ok_or_else(|| {
                Error::domain("velocity", "u(c) = u* is infinite for nu <= 0")
            });
        }
        let lag = self.c - a;
        Ok(self.expect(|q| a / (lag + q)))
    }

    /// Inverse of [`velocity_to_gap`](Self::velocity_to_gap) by bisection.
    pub fn gap_to_velocity(&self, u: f64) -> Result<f64> {
        let u_star = self.critical_gap().finite().ok_or_else(|| {
            Error::domain("mean gap", "u* is infinite; every mean gap is subcritical")
        })?;
        if !(u >= 0.0 && u < u_star) {
            return Err(Error::domain(
                "mean gap",
                format!("u = {u} must lie in [0, u* = {u_star})"),
            ));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, self.c);
        while hi - lo > BISECT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.velocity_to_gap(mid)? < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Slow-rate threshold `c + q2 N^-alpha`.
    pub fn scan_threshold(&self, q2: f64, n: f64) -> f64 {
        self.c + q2 * n.powf(-self.alpha())
    }

    /// Number of rates that must all exceed the threshold: `floor(q1 N^(1-alpha))`.
    pub fn scan_length(&self, q1: f64, n: f64) -> u64 {
        // nudge so that exact integers such as 1000^(2/3) do not round down
        (q1 * n.powf(1.0 - self.alpha()) * (1.0 + 1e-12)).floor() as u64
    }

    /// Finite-`N` probability `(1 - F(c + q2 N^-alpha))^floor(q1 N^(1-alpha))`.
    pub fn scan_event_exact(&self, q1: f64, q2: f64, n: f64) -> f64 {
        let f = self.cdf(self.scan_threshold(q2, n));
        let len = self.scan_length(q1, n);
        if len == 0 {
            return 1.0;
        }
        (len as f64 * (-f).ln_1p()).exp()
    }

    /// Large-`N` limit `exp(-kappa q1 q2^(nu+1))`.
    pub fn scan_event_limit(&self, q1: f64, q2: f64) -> f64 {
        (-self.kappa * q1 * q2.powf(self.nu + 1.0)).exp()
    }
}

/// `(nu + 2)^(nu + 2) / (nu + 1)^(nu + 1)`.
pub fn a_nu(nu: f64) -> f64 {
    ((nu + 2.0) * (nu + 2.0).ln() - (nu + 1.0) * (nu + 1.0).ln()).exp()
}

/// Counter-addressed rate generator: rate `i` is a pure function of `(seed, i)`.
#[derive(Clone)]
pub struct RateSampler {
    law: RateLaw,
    stream: IndexedStream<4>,
}

impl RateSampler {
    pub fn new(law: RateLaw, seed: u64) -> Self {
        RateSampler {
            law,
            stream: IndexedStream::new(seed, Domain::Disorder),
        }
    }

    pub fn law(&self) -> &RateLaw {
        &self.law
    }

    pub fn rate(&self, label: i64) -> f64 {
        let mut rng = self.stream.at(label);
        self.draw(&mut rng)
    }

    fn draw(&self, rng: &mut impl RngCore) -> f64 {
        let select = unit(rng);
        let shape = open_unit(rng);
        self.law.rate_from_uniforms(select, shape)
    }

    /// Rates at `start, start + 1, ...` read sequentially from the keystream.
    pub fn ascending(&self, start: i64) -> impl Iterator<Item = f64> + '_ {
        let mut rng = self.stream.at(start);
        std::iter::repeat_with(move || self.draw(&mut rng))
    }
}

/// A realized block of quenched rates over a contiguous label range.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderField {
    law: RateLaw,
    seed: u64,
    lo: i64,
    rates: Vec<f64>,
}

/// Draw i.i.d. rates for every label in `labels`.
pub fn sample_rates(law: &RateLaw, labels: LabelRange, seed: u64) -> DisorderField {
    let sampler = RateSampler::new(*law, seed);
    let rates = sampler.ascending(labels.lo).take(labels.len()).collect();
    DisorderField {
        law: *law,
        seed,
        lo: labels.lo,
        rates,
    }
}

impl DisorderField {
    /// A recorded field, e.g. read back from an audit export.
    pub fn from_rates(law: RateLaw, seed: u64, lo: i64, rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::domain("disorder field", "no rates"));
        }
        if let Some(k) = rates.iter().position(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::domain(
                "disorder field",
                format!("label {} has rate {}", lo + k as i64, rates[k]),
            ));
        }
        Ok(DisorderField { law, seed, lo, rates })
    }

    pub fn law(&self) -> &RateLaw {
        &self.law
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn labels(&self) -> LabelRange {
        LabelRange::new(self.lo, self.lo + self.rates.len() as i64 - 1)
    }
    pub fn get(&self, label: i64) -> Option<f64> {
        let idx = label.checked_sub(self.lo)?;
        usize::try_from(idx).ok().and_then(|i| self.rates.get(i).copied())
    }
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Two-column audit export `index,rate`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "rate"])?;
        for (k, p) in self.rates.iter().enumerate() {
            w.write_record([(self.lo + k as i64).to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDirection {
    Forward,
    Backward,
}

/// Smallest `k >= 0` with `p_{±k} <= threshold`, or `None` once the stored
/// labels run out.
pub fn slow_scan(field: &DisorderField, threshold: f64, direction: ScanDirection) -> Option<u64> {
    let step = match direction {
        ScanDirection::Forward => 1,
        ScanDirection::Backward => -1,
    };
    (0u64..)
        .map_while(|k| field.get(step * k as i64).map(|p| (k, p)))
        .find(|&(_, p)| p <= threshold)
        .map(|(k, _)| k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanEstimate {
    pub q1: f64,
    pub q2: f64,
    pub n: f64,
    pub replicas: u64,
    pub hits: u64,
    pub empirical: f64,
    pub std_error: f64,
    /// Finite-`N` product with exponent `floor(q1 N^(1-alpha))`.
    pub exact: f64,
    pub limit: f64,
}

/// Monte Carlo frequency of the event that every rate with label in
/// `0..=floor(q1 N^(1-alpha))` exceeds `c + q2 N^-alpha`, each replica
/// using a fresh field.
pub fn scan_event_probability(
    law: &RateLaw,
    q1: f64,
    q2: f64,
    n: f64,
    replicas: u64,
    seed: u64,
) -> ScanEstimate {
    let threshold = law.scan_threshold(q2, n);
    let last = law.scan_length(q1, n);
    let hits = (0..replicas)
        .filter(|&r| {
            let sampler = RateSampler::new(*law, derive_seed(seed, Domain::Replica, r));
            // lazily scanned; stops at the first slow rate
            let clear = sampler
                .ascending(0)
                .take(last as usize + 1)
                .all(|p| p > threshold);
            clear
        })
        .count() as u64;
    let empirical = hits as f64 / replicas.max(1) as f64;
    let exact = law.scan_event_exact(q1, q2, n);
    ScanEstimate {
        q1,
        q2,
        n,
        replicas,
        hits,
        empirical,
        std_error: (exact * (1.0 - exact) / replicas.max(1) as f64).sqrt(),
        exact,
        limit: law.scan_event_limit(q1, q2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law_pure() -> RateLaw {
        RateLaw::new(0.5, 1.0, 4.0, 0.5).unwrap()
    }

    #[test]
    fn pure_power_law_has_no_atom() {
        let law = law_pure();
        assert_eq!(law.top_mass(), 0.0);
        let f = sample_rates(&law, LabelRange::new(0, 9999), 3);
        assert!(f.rates().iter().all(|&p| p > 0.5 && p <= 1.0));
        assert!(f.rates().iter().all(|&p| p < 1.0));
    }

    #[test]
    fn rejects_overweight_window() {
        assert!(matches!(
            RateLaw::new(0.5, 1.0, 5.0, 0.5),
            Err(Error::InvalidLaw(_))
        ));
        assert!(RateLaw::new(0.5, -1.0, 1.0, 0.5).is_err());
        assert!(RateLaw::new(1.0, 1.0, 1.0, 0.1).is_err());
        assert!(RateLaw::new(0.5, 1.0, 1.0, 0.6).is_err());
    }

    #[test]
    fn atom_frequency_matches_top_mass() {
        let law = RateLaw::new(0.5, 1.0, 1.0, 0.5).unwrap();
        assert!((law.top_mass() - 0.75).abs() < 1e-15);
        let n = 100_000;
        let f = sample_rates(&law, LabelRange::new(0, n - 1), 99);
        let ones = f.rates().iter().filter(|&&p| p == 1.0).count() as f64 / n as f64;
        let sigma = (0.75f64 * 0.25 / n as f64).sqrt();
        assert!((ones - 0.75).abs() < 3.0 * sigma, "fraction {ones}");
    }

    #[test]
    fn sampling_is_deterministic_and_window_independent() {
        let law = RateLaw::new(0.3, 0.5, 2.0, 0.4).unwrap();
        let a = sample_rates(&law, LabelRange::new(-50, 50), 17);
        let b = sample_rates(&law, LabelRange::new(-50, 50), 17);
        assert_eq!(a, b);
        let sub = sample_rates(&law, LabelRange::new(10, 20), 17);
        for l in 10..=20 {
            assert_eq!(sub.get(l), a.get(l));
            assert_eq!(law.rate_at(17, l), a.get(l).unwrap());
        }
    }

    #[test]
    fn cdf_shape() {
        let law = RateLaw::new(0.5, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(law.cdf(0.5), 0.0);
        assert_eq!(law.cdf(0.2), 0.0);
        assert!((law.cdf(0.6) - 0.01).abs() < 1e-15);
        assert!((law.cdf(0.99) - 0.2401).abs() < 1e-15);
        let law = RateLaw::new(0.5, 1.0, 1.0, 0.3).unwrap();
        assert!((law.cdf(0.9) - 0.09).abs() < 1e-15);
        assert_eq!(law.cdf(1.0), 1.0);
        // assumption holds with equality on the window
        for q in [1e-2, 1e-4, 1e-6] {
            let ratio = law.cdf(0.5 + q) / q.powf(2.0);
            assert!((ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn derived_constants() {
        let k = law_pure().constants();
        assert!((k.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert!((k.alpha + k.one_minus_alpha - 1.0).abs() < 1e-15);
        assert!((k.a_nu - 6.75).abs() < 1e-12);
        assert_eq!(k.u_star, CriticalGap::Finite(2.0));
        assert!((k.rho_star - 1.0 / 3.0).abs() < 1e-15);
        let flat = RateLaw::new(0.5, 0.0, 1.0, 0.5).unwrap().constants();
        assert_eq!(flat.u_star, CriticalGap::Infinite);
        assert_eq!(flat.rho_star, 0.0);
        assert!((a_nu(0.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn critical_gap_closed_form_matches_quadrature() {
        for (c, nu, kappa, eps) in [
            (0.5, 1.0, 4.0, 0.5),
            (0.5, 1.0, 1.0, 0.5),
            (0.3, 0.5, 1.5, 0.6),
            (0.7, 2.5, 10.0, 0.3),
            (0.2, 0.2, 1.0, 0.5),
        ] {
            let law = RateLaw::new(c, nu, kappa, eps).unwrap();
            let closed = law.critical_gap().finite().unwrap();
            let quad = law.critical_gap_quadrature().finite().unwrap();
            assert!(
                ((closed - quad) / closed).abs() < 1e-8,
                "{closed} vs {quad} at nu = {nu}"
            );
        }
        let law = RateLaw::new(0.5, -0.5, 1.0, 0.5).unwrap();
        assert_eq!(law.critical_gap(), CriticalGap::Infinite);
    }

    #[test]
    fn vanishing_window_leaves_atom_term() {
        // kappa held fixed: the window mass and its contribution both vanish
        let (c, nu, kappa) = (0.5, 0.5, 1.0);
        let mut prev = f64::INFINITY;
        for eps in [0.1, 0.01, 1e-4, 1e-6] {
            let law = RateLaw::new(c, nu, kappa, eps).unwrap();
            let u = law.critical_gap().finite().unwrap();
            let atom = law.top_mass() * c / (1.0 - c);
            assert!(u > atom && u < prev);
            prev = u;
        }
        assert!((prev - 1.0).abs() < 1e-2);
    }

    /// Midpoint rule on a fine grid in `q = p - c`, independent of the
    /// library's substitution and quadrature rule.
    fn riemann_gap(law: &RateLaw, a: f64, cells: usize) -> f64 {
        let (c, eps) = (law.c(), law.eps());
        let h = eps / cells as f64;
        let density = |q: f64| law.kappa() * (law.nu() + 1.0) * q.powf(law.nu());
        let window: f64 = (0..cells)
            .map(|k| {
                let q = (k as f64 + 0.5) * h;
                a / (c + q - a) * density(q) * h
            })
            .sum();
        window + law.top_mass() * a / (1.0 - a)
    }

    #[test]
    fn velocity_to_gap_matches_riemann_oracle() {
        let law = law_pure();
        let quad = law.velocity_to_gap(0.25).unwrap();
        let oracle = riemann_gap(&law, 0.25, 2_000_000);
        assert!((quad - oracle).abs() < 1e-8, "{quad} vs {oracle}");
        let law = RateLaw::new(0.5, 1.0, 1.0, 0.5).unwrap();
        let quad = law.velocity_to_gap(0.4).unwrap();
        let oracle = riemann_gap(&law, 0.4, 2_000_000);
        assert!((quad - oracle).abs() < 1e-8, "{quad} vs {oracle}");
    }

    #[test]
    fn velocity_to_gap_endpoints_and_monotonicity() {
        let law = law_pure();
        assert_eq!(law.velocity_to_gap(0.0).unwrap(), 0.0);
        assert_eq!(law.velocity_to_gap(0.5).unwrap(), 2.0);
        let near = law.velocity_to_gap(0.5 - 1e-9).unwrap();
        assert!((near - 2.0).abs() < 1e-6);
        let mut prev = 0.0;
        for k in 1..50 {
            let u = law.velocity_to_gap(0.01 * k as f64).unwrap();
            assert!(u > prev);
            prev = u;
        }
        assert!(matches!(
            law.velocity_to_gap(0.6),
            Err(Error::Domain { .. })
        ));
        assert!(law.velocity_to_gap(-0.1).is_err());
    }

    #[test]
    fn gap_to_velocity_round_trip() {
        let law = law_pure();
        assert_eq!(law.gap_to_velocity(0.0).unwrap(), 0.0);
        let a = law.gap_to_velocity(1.0).unwrap();
        assert!((law.velocity_to_gap(a).unwrap() - 1.0).abs() < 1e-8);
        let mut prev = 0.0;
        for u in [0.5, 1.0, 1.5, 1.9, 1.99, 1.999] {
            let a = law.gap_to_velocity(u).unwrap();
            assert!(a > prev && a < 0.5);
            prev = a;
        }
        assert!(prev > 0.49);
        assert!(law.gap_to_velocity(2.0).is_err());
        let flat = RateLaw::new(0.5, 0.0, 1.0, 0.5).unwrap();
        assert!(flat.gap_to_velocity(1.0).is_err());
    }

    #[test]
    fn slow_scan_examples() {
        let law = law_pure();
        let f = DisorderField {
            law,
            seed: 0,
            lo: 0,
            rates: vec![0.9, 0.7, 0.55],
        };
        assert_eq!(slow_scan(&f, 0.6357, ScanDirection::Forward), Some(2));
        assert_eq!(slow_scan(&f, 0.5, ScanDirection::Forward), None);
        assert_eq!(slow_scan(&f, 0.95, ScanDirection::Forward), Some(0));
        let back = DisorderField {
            law,
            seed: 0,
            lo: -2,
            rates: vec![0.55, 0.7, 0.9],
        };
        assert_eq!(slow_scan(&back, 0.6357, ScanDirection::Backward), Some(2));
        assert_eq!(slow_scan(&back, 0.6357, ScanDirection::Forward), None);
    }

    #[test]
    fn scan_exact_limit() {
        let law = RateLaw::new(0.5, 1.0, 1.0, 0.5).unwrap();
        let lim = law.scan_event_limit(1.0, 1.0);
        assert!((lim - (-1.0f64).exp()).abs() < 1e-15);
        let exact = law.scan_event_exact(1.0, 1.0, 1e8);
        assert!((exact - 0.367879).abs() < 1e-3);
        // direct evaluation of the product agrees
        let f = law.cdf(0.5 + 1e8f64.powf(-1.0 / 3.0));
        let n = (1e8f64.powf(2.0 / 3.0)).floor();
        assert!(((1.0 - f).powf(n) - exact).abs() < 1e-12);
        assert_eq!(law.scan_event_exact(1e-9, 1.0, 1e6), 1.0);
        assert_eq!(law.scan_event_exact(1.0, 0.0, 1e6), 1.0);
    }

    #[test]
    fn csv_export() {
        let law = law_pure();
        let f = sample_rates(&law, LabelRange::new(-1, 1), 5);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "index,rate");
        assert!(lines[1].starts_with("-1,"));
        assert_eq!(lines.len(), 4);
    }
}
