//! Small statistics toolkit for the estimators.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Median (mean of the two middle values for even length).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; NaN with only two points.
    pub slope_se: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain("regression", format!("{} points", xs.len())));
    }
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("regression", "all abscissae equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
    })
}

/// Slope of `ln y` against `ln t`; every `y` must be positive.
pub fn loglog_fit(ts: &[f64], ys: &[f64]) -> Result<LineFit> {
    if let Some(y) = ys.iter().find(|&&y| y.is_nan() || y <= 0.0) {
        return Err(Error::domain(
            "log-log fit",
            format!("statistic {y} is not positive"),
        ));
    }
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    ols(&lx, &ly)
}

/// Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test against a continuous cdf.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
    }
}

/// Two-sample Kolmogorov–Smirnov test. Ties are handled by stepping both
/// empirical cdfs past a shared value together, so integer data is fine,
/// though the p-value is then conservative.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    /// Bin upper edges (inclusive); the last bin is open.
    pub bins: Vec<u64>,
}

/// Pearson goodness of fit of nonnegative integer data to a pmf. Cells are
/// merged from the left until each expects at least `min_expected`; the
/// final cell collects the upper tail.
pub fn chi_square_pmf(
    data: &[u64],
    pmf: impl Fn(u64) -> f64,
    min_expected: f64,
) -> Result<ChiSquareResult> {
    let n = data.len() as f64;
    if data.is_empty() {
        return Err(Error::domain("chi-square", "no data"));
    }
    let max = *data.iter().max().unwrap();
    // cell edges so that each cell except the tail expects enough counts
    let mut edges = Vec::new();
    let mut acc = 0.0;
    let mut cum = 0.0;
    let mut k = 0u64;
    loop {
        let p = pmf(k);
        acc += p;
        cum += p;
        if acc * n >= min_expected {
            if (1.0 - cum) * n < min_expected {
                break;
            }
            edges.push(k);
            acc = 0.0;
        }
        k += 1;
        if k > max.saturating_add(10_000) {
            break;
        }
    }
    let cells = edges.len() + 1;
    let mut observed = vec![0u64; cells];
    for &x in data {
        let c = edges.partition_point(|&e| e < x);
        observed[c] += 1;
    }
    let mut expected = vec![0.0; cells];
    let mut lo = 0u64;
    let mut covered = 0.0;
    for (c, &e) in edges.iter().enumerate() {
        let p: f64 = (lo..=e).map(&pmf).sum();
        expected[c] = p * n;
        covered += p;
        lo = e + 1;
    }
    expected[cells - 1] = (1.0 - covered).max(0.0) * n;
    if cells < 2 {
        return Err(Error::domain("chi-square", "fewer than two cells"));
    }
    let statistic: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (cells - 1) as u64;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::domain("chi-square", e.to_string()))?;
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: dist.sf(statistic),
        bins: edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        // textbook value for 30/100
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        let (lo, hi) = wilson(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn median_and_variance() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!((variance(&[1.0, 2.0, 3.0, 4.0]) - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_power_law_fit() {
        let ts = [1e3, 1e4, 1e5];
        let ys: Vec<f64> = ts.iter().map(|t: &f64| 2.0 * t.powf(2.0 / 3.0)).collect();
        let fit = loglog_fit(&ts, &ys).unwrap();
        assert!((fit.slope - 2.0 / 3.0).abs() < 1e-12);
        assert!(fit.slope_se < 1e-10);
        assert!(loglog_fit(&ts, &[1.0, -1.0, 2.0]).is_err());
    }

    #[test]
    fn kolmogorov_tail_values() {
        // standard table: P(K > 1.36) ~ 0.049, P(K > 1.63) ~ 0.0098
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_sf(1.63) - 0.0098).abs() < 5e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shift() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).p_value > 1e-3);
        let shifted: Vec<f64> = xs.iter().map(|x| x * 0.9).collect();
        assert!(ks_one_sample(&shifted, |x| x.clamp(0.0, 1.0)).p_value < 1e-3);
        let ys: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&xs, &ys).p_value > 1e-3);
        assert!(ks_two_sample(&shifted, &ys).p_value < 1e-3);
    }

    #[test]
    fn chi_square_on_geometric_samples() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        let r: f64 = 0.6;
        let data: Vec<u64> = (0..20_000)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                (u.ln() / r.ln()).floor() as u64
            })
            .collect();
        let pmf = |k: u64| (1.0 - r) * r.powi(k as i32);
        let good = chi_square_pmf(&data, pmf, 5.0).unwrap();
        assert!(good.p_value > 1e-3, "{good:?}");
        let wrong = |k: u64| 0.5 * 0.5f64.powi(k as i32);
        assert!(chi_square_pmf(&data, wrong, 5.0).unwrap().p_value < 1e-3);
    }
}
