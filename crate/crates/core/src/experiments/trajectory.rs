//! Full trajectories from the event engine: snapshots, event logs and the
//! realized field, for inspection and replay.

use std::sync::Arc;

use serde::Serialize;

use super::{hypothesis, to_value, Artifact, Report};
use crate::disorder::{sample_rates, RateLaw};
use crate::engine::{run, ClockSchedule, RateSource, SimulationRun};
use crate::error::Result;
use crate::measures::{
    jam_initial, sample_equilibrium_gaps, sample_iid_gaps, EquilibriumSpec, GapFamily, IidGapSpec,
};
use crate::rng::{derive_seed, Domain};
use crate::state::{gaps_to_particles, LabelRange, ParticleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Sites `-n+1 ..= 0` occupied.
    Jam,
    /// I.i.d. gaps with the given mean.
    Iid { mean: f64, family: GapFamily },
    /// Product equilibrium at velocity `a` over the realized field.
    Equilibrium { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateParams {
    pub law: RateLaw,
    pub initial: InitialCondition,
    pub particles: usize,
    pub t: f64,
    /// Extra snapshot times; `0` and `t` are always recorded.
    pub snapshots: Vec<f64>,
    pub event_log: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: SimulateParams,
    pub field: crate::disorder::DisorderField,
    pub run: SimulationRun,
}

fn initial_config(p: &SimulateParams, field: &crate::disorder::DisorderField) -> Result<ParticleConfig> {
    let n = p.particles as i64;
    let gap_labels = LabelRange::new(0, n - 2);
    let seed = derive_seed(p.seed, Domain::Gaps, 0);
    Ok(match p.initial {
        InitialCondition::Jam => jam_initial(p.particles),
        InitialCondition::Iid { mean, family } => {
            let spec = IidGapSpec::new(mean, family, seed)?;
            gaps_to_particles(&sample_iid_gaps(&spec, gap_labels))
        }
        InitialCondition::Equilibrium { a } => {
            let spec = EquilibriumSpec::new(a, field.clone(), seed);
            gaps_to_particles(&sample_equilibrium_gaps(&spec, gap_labels)?)
        }
    })
}

impl SimulateParams {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.particles >= 2, || "need at least 2 particles".into())?;
        hypothesis(self.t >= 0.0 && self.t.is_finite(), || {
            format!("horizon {} must be finite and nonnegative", self.t)
        })?;
        if let InitialCondition::Iid { mean, family } = self.initial {
            IidGapSpec::new(mean, family, 0)?;
        }
        Ok(())
    }
}

/// Runs a finite system of `particles` labels under the event engine.
pub fn simulate(params: &SimulateParams) -> Result<Trajectory> {
    params.validate()?;
    let n = params.particles as i64;
    let labels = match params.initial {
        InitialCondition::Jam => LabelRange::new(1 - n, 0),
        _ => LabelRange::new(0, n - 1),
    };
    let field = sample_rates(&params.law, labels, derive_seed(params.seed, Domain::Disorder, 0));
    let config = initial_config(params, &field)?;
    let clocks = Arc::new(ClockSchedule::new(
        derive_seed(params.seed, Domain::Clock, 0),
        RateSource::Field(Arc::new(field.clone())),
    ));
    let mut times: Vec<f64> = params
        .snapshots
        .iter()
        .copied()
        .filter(|&s| s > 0.0 && s < params.t)
        .collect();
    times.push(params.t);
    let mut r = SimulationRun::new(config).snapshot_at(&times);
    if params.event_log {
        r = r.with_event_log();
    }
    let run = run(r, clocks, params.t)?;
    Ok(Trajectory {
        params: params.clone(),
        field,
        run,
    })
}

impl Trajectory {
    pub fn report(&self) -> Result<Report> {
        let snapshots = Artifact::csv("snapshots.csv", |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["time", "label", "position", "gap", "height"])?;
            self.run.initial().write_snapshot_rows(Some(0.0), &mut w)?;
            for (time, cfg) in self.run.snapshots() {
                cfg.write_snapshot_rows(Some(*time), &mut w)?;
            }
            w.flush()?;
            Ok(())
        })?;
        let field = Artifact::csv("field.csv", |buf| self.field.write_csv(buf))?;
        let mut artifacts = vec![snapshots, field];
        if let Some(log) = self.run.event_log() {
            artifacts.push(Artifact::csv("events.csv", |buf| {
                let mut w = csv::Writer::from_writer(buf);
                for e in log {
                    w.serialize(e)?;
                }
                w.flush()?;
                Ok(())
            })?);
        }
        let labels = self.run.labels();
        let jumps: u64 = labels.iter().map(|l| self.run.jumps(l).unwrap_or(0)).sum();
        Ok(Report {
            command: "simulate",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({
                "labels": [labels.lo, labels.hi],
                "jumps": jumps,
                "events": self.run.event_count(),
                "final_positions": self.run.config().positions(),
            }),
            checks: Vec::new(),
            artifacts,
        })
    }
}
