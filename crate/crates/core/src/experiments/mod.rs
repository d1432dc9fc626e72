//! Annealed Monte Carlo estimators built on the engine.
//!
//! Every estimator takes a master seed and runs independent replicas whose
//! randomness is derived from `(master seed, replica index)`; replicas run on
//! a rayon pool but are folded in index order, so results do not depend on
//! the number of threads. Each estimator returns a [`Report`] holding CSV
//! artifacts, a JSON summary and named pass/fail checks.

pub mod coupling;
pub mod front;
pub mod lemma1;
pub mod stats;
pub mod tagged;
pub mod trajectory;
pub mod varcheck;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::disorder::RateLaw;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Domain};
use stats::{wilson, LineFit, Z95};

pub use coupling::{coupling_check, CouplingParams};
pub use front::{
    front_samples, glynn_whitt_benchmark, rost_profile, theorem2_front, theorem3_window,
    theorem4_window, FrontParams, GlynnWhittParams, RostParams, Theorem3Params, Theorem4Params,
};
pub use lemma1::{lemma1_curve, Lemma1Params};
pub use tagged::{burke, theorem1_tail, BurkeParams, Theorem1Params};
pub use trajectory::{simulate, InitialCondition, SimulateParams};
pub use varcheck::{variational_check, VarcheckParams};

/// Replica count, master seed and worker count of one estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ensemble {
    pub replicas: u64,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: usize,
}

impl Ensemble {
    pub fn new(replicas: u64, seed: u64) -> Self {
        Ensemble {
            replicas,
            seed,
            jobs: 1,
        }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    /// Sub-ensemble with an independent seed, e.g. one per horizon.
    pub fn child(&self, index: u64) -> Self {
        Ensemble {
            seed: derive_seed(self.seed, Domain::Trial, index),
            ..*self
        }
    }

    pub fn replica_seed(&self, replica: u64) -> u64 {
        derive_seed(self.seed, Domain::Replica, replica)
    }

    /// `f(replica, replica_seed)` for every replica, in replica order.
    pub fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, u64) -> Result<T> + Sync + Send,
    {
        let task = |r: u64| f(r, self.replica_seed(r));
        if self.jobs <= 1 {
            return (0..self.replicas).map(task).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| (0..self.replicas).into_par_iter().map(task).collect())
    }
}

/// One grid point of an empirical tail with its analytic bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub param: f64,
    pub hits: u64,
    pub empirical: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound_lower: f64,
    pub bound_upper: f64,
}

/// Empirical `P(statistic > param)` over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    pub t: f64,
    pub replicas: u64,
    pub rows: Vec<TailRow>,
}

impl TailCurve {
    /// `bounds(param) -> (lower, upper)`.
    pub fn from_samples(
        t: f64,
        samples: &[f64],
        grid: &[f64],
        bounds: impl Fn(f64) -> (f64, f64),
    ) -> Self {
        let n = samples.len() as u64;
        let rows = grid
            .iter()
            .map(|&z| {
                let hits = samples.iter().filter(|&&w| w > z).count() as u64;
                let (ci_lo, ci_hi) = wilson(hits, n, Z95);
                let (bound_lower, bound_upper) = bounds(z);
                TailRow {
                    param: z,
                    hits,
                    empirical: hits as f64 / n.max(1) as f64,
                    ci_lo,
                    ci_hi,
                    bound_lower,
                    bound_upper,
                }
            })
            .collect();
        TailCurve {
            t,
            replicas: n,
            rows,
        }
    }

    pub fn row(&self, param: f64) -> Option<&TailRow> {
        self.rows.iter().find(|r| r.param == param)
    }

    /// Rows `param,empirical,ci_lo,ci_hi,bound_lower,bound_upper`, with a
    /// leading `t` column when several curves share one file.
    pub fn write_csv<W: Write>(curves: &[TailCurve], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "t",
            "param",
            "empirical",
            "ci_lo",
            "ci_hi",
            "bound_lower",
            "bound_upper",
        ])?;
        for c in curves {
            for r in &c.rows {
                w.write_record([
                    c.t.to_string(),
                    r.param.to_string(),
                    r.empirical.to_string(),
                    r.ci_lo.to_string(),
                    r.ci_hi.to_string(),
                    r.bound_lower.to_string(),
                    r.bound_upper.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Log-log regression of a per-horizon summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub horizons: Vec<f64>,
    pub statistic: Vec<f64>,
    pub fit: LineFit,
}

impl ScalingFit {
    pub fn new(horizons: Vec<f64>, statistic: Vec<f64>) -> Result<Self> {
        if horizons.len() < 3 {
            return Err(Error::Config(format!(
                "a scaling fit needs at least 3 horizons, got {}",
                horizons.len()
            )));
        }
        if horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must increase".into()));
        }
        let fit = stats::loglog_fit(&horizons, &statistic)?;
        Ok(ScalingFit {
            horizons,
            statistic,
            fit,
        })
    }

    pub fn slope(&self) -> f64 {
        self.fit.slope
    }

    /// Rows `t,statistic,slope,slope_se`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "statistic", "slope", "slope_se"])?;
        for (t, s) in self.horizons.iter().zip(&self.statistic) {
            w.write_record([
                t.to_string(),
                s.to_string(),
                self.fit.slope.to_string(),
                self.fit.slope_se.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A named output file produced by an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Self> {
        let mut bytes = Vec::new();
        write(&mut bytes)?;
        Ok(Artifact {
            name: name.to_string(),
            bytes,
        })
    }

    pub fn json(name: &str, value: &impl Serialize) -> Result<Self> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Artifact {
            name: name.to_string(),
            bytes,
        })
    }
}

/// Everything one estimator produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub law: Option<RateLaw>,
    pub params: serde_json::Value,
    pub summary: serde_json::Value,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn manifest(&self, seed: u64) -> Manifest<'_> {
        Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            law: self.law.as_ref(),
            params: &self.params,
            outputs: self.artifacts.iter().map(|a| a.name.as_str()).collect(),
            summary: &self.summary,
            checks: &self.checks,
        }
    }
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: u64,
    pub law: Option<&'a RateLaw>,
    pub params: &'a serde_json::Value,
    pub outputs: Vec<&'a str>,
    pub summary: &'a serde_json::Value,
    pub checks: &'a [Check],
}

pub(crate) fn to_value(v: &impl Serialize) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

pub(crate) fn hypothesis(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(msg()))
    }
}
