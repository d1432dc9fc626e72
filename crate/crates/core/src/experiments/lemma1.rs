//! Rates-only check of the slow-stretch event probability.

use serde::Serialize;

use super::{hypothesis, to_value, Artifact, Check, Report};
use crate::disorder::{scan_event_probability, RateLaw, ScanEstimate};
use crate::error::Result;
use crate::rng::{derive_seed, Domain};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Params {
    pub law: RateLaw,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub n: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Outcome {
    pub params: Lemma1Params,
    pub rows: Vec<ScanEstimate>,
}

impl Lemma1Params {
    pub fn validate(&self) -> Result<()> {
        let ok = self.q1.iter().chain(&self.q2).all(|&q| q >= 0.0 && q.is_finite())
            && self.n.iter().all(|&n| n >= 1.0 && n.is_finite());
        hypothesis(ok, || "q1, q2 must be nonnegative and N at least 1".into())
    }
}

/// Empirical `P(D(N))` with the finite-`N` product and the limit, for every
/// `(q1, q2, N)` on the grid. Each cell gets its own derived seed.
pub fn lemma1_curve(params: &Lemma1Params) -> Lemma1Outcome {
    let mut rows = Vec::new();
    let mut cell = 0;
    for &q1 in &params.q1 {
        for &q2 in &params.q2 {
            for &n in &params.n {
                let seed = derive_seed(params.seed, Domain::Trial, cell);
                rows.push(scan_event_probability(
                    &params.law,
                    q1,
                    q2,
                    n,
                    params.replicas,
                    seed,
                ));
                cell += 1;
            }
        }
    }
    Lemma1Outcome {
        params: params.clone(),
        rows,
    }
}

/// `|empirical - exact| <= 4 SE`; a degenerate exact value demands equality.
pub fn within_four_se(row: &ScanEstimate) -> bool {
    let diff = (row.empirical - row.exact).abs();
    if row.std_error == 0.0 {
        diff < 1e-12
    } else {
        diff <= 4.0 * row.std_error
    }
}

impl Lemma1Outcome {
    pub fn report(&self) -> Result<Report> {
        let bad: Vec<String> = self
            .rows
            .iter()
            .filter(|r| !within_four_se(r))
            .map(|r| {
                format!(
                    "(q1 {}, q2 {}, N {}): {} vs {}",
                    r.q1, r.q2, r.n, r.empirical, r.exact
                )
            })
            .collect();
        let checks = vec![Check::new(
            "empirical within 4 SE of the finite-N product",
            bad.is_empty(),
            if bad.is_empty() {
                format!("{} cells", self.rows.len())
            } else {
                bad.join("; ")
            },
        )];
        let table = Artifact::csv("lemma1.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record([
                "q1", "q2", "n", "replicas", "hits", "empirical", "std_error", "exact", "limit",
            ])?;
            for r in &self.rows {
                w.write_record([
                    r.q1.to_string(),
                    r.q2.to_string(),
                    r.n.to_string(),
                    r.replicas.to_string(),
                    r.hits.to_string(),
                    r.empirical.to_string(),
                    r.std_error.to_string(),
                    r.exact.to_string(),
                    r.limit.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(Report {
            command: "lemma1",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: to_value(&self.rows)?,
            checks,
            artifacts: vec![table],
        })
    }
}
