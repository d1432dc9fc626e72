//! Event-level audits of the two monotone couplings under shared clocks.

use std::sync::Arc;

use serde::Serialize;

use super::{hypothesis, to_value, Check, Ensemble, Report};
use crate::disorder::{sample_rates, RateLaw};
use crate::engine::{ClockSchedule, RateSource, Simulation, SimulationRun};
use crate::error::Result;
use crate::measures::{sample_iid_gaps, GapFamily, IidGapSpec};
use crate::rng::{derive_seed, Domain};
use crate::state::{gaps_to_particles, particles_to_gaps, GapConfig, LabelRange, ParticleConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingParams {
    pub law: RateLaw,
    pub particles: usize,
    pub t: f64,
    /// Mean of the geometric gaps, and of the extra gaps added to the larger
    /// configuration.
    pub mean_gap: f64,
    /// Rate floor of the fastened process.
    pub fastening: f64,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CouplingTrial {
    /// Events after which some gap of the smaller system exceeded the larger.
    pub gap_violations: u64,
    /// Events after which a fastened particle was behind its slow copy.
    pub dominance_violations: u64,
    pub events: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingOutcome {
    pub params: CouplingParams,
    pub trials: Vec<CouplingTrial>,
}

fn gap_ordered(lo: &ParticleConfig, hi: &ParticleConfig) -> bool {
    let (a, b) = (particles_to_gaps(lo), particles_to_gaps(hi));
    a.gaps.iter().zip(&b.gaps).all(|(x, y)| x <= y)
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        hypothesis(self.particles >= 2, || "need at least 2 particles".into())?;
        hypothesis(self.fastening > 0.0 && self.fastening <= 1.0, || {
            format!("fastening floor {} must lie in (0, 1]", self.fastening)
        })?;
        IidGapSpec::new(self.mean_gap, GapFamily::Geometric, 0).map(|_| ())
    }
}

/// Per trial: (a) two gap-ordered configurations under one clock schedule,
/// (b) a process and its fastened copy driven by a marked schedule. Both
/// orderings are checked after every event.
pub fn coupling_check(params: &CouplingParams) -> Result<CouplingOutcome> {
    params.validate()?;
    let n = params.particles as i64;
    let gap_labels = LabelRange::new(0, n - 2);
    let trials = params.ensemble.run(|_, seed| {
        let field = Arc::new(sample_rates(
            &params.law,
            LabelRange::new(0, n - 1),
            derive_seed(seed, Domain::Disorder, 0),
        ));
        let base = RateSource::Field(field);
        let gaps = |k| IidGapSpec::new(params.mean_gap, GapFamily::Geometric, derive_seed(seed, Domain::Gaps, k));
        let small = sample_iid_gaps(&gaps(0)?, gap_labels);
        let extra = sample_iid_gaps(&gaps(1)?, gap_labels);
        let big = GapConfig {
            gaps: small.gaps.iter().zip(&extra.gaps).map(|(a, b)| a + b).collect(),
            ..small.clone()
        };
        let small = gaps_to_particles(&small);
        let big = gaps_to_particles(&big);

        let clocks = Arc::new(ClockSchedule::new(derive_seed(seed, Domain::Clock, 0), base.clone()));
        let mut sim = Simulation::coupled(
            clocks,
            vec![SimulationRun::new(small.clone()), SimulationRun::new(big)],
        )?;
        let mut gap_violations = 0;
        sim.run_inspected(params.t, |_, runs| {
            gap_violations += !gap_ordered(runs[0].config(), runs[1].config()) as u64;
            Ok::<_, ()>(())
        })
        .expect("the inspector never fails");
        let mut events = sim.run(0).event_count();

        let marked = Arc::new(
            ClockSchedule::new(
                derive_seed(seed, Domain::Clock, 1),
                base.clone().fastened(params.fastening),
            )
            .marked(),
        );
        let fast = SimulationRun::new(small.clone());
        let slow = SimulationRun::new(small).thinned(base);
        let mut sim = Simulation::coupled(marked, vec![fast, slow])?;
        let mut dominance_violations = 0;
        sim.run_inspected(params.t, |_, runs| {
            let (f, s) = (runs[0].config(), runs[1].config());
            dominance_violations +=
                !f.positions().iter().zip(s.positions()).all(|(a, b)| a >= b) as u64;
            Ok::<_, ()>(())
        })
        .expect("the inspector never fails");
        events += sim.run(0).event_count();
        Ok(CouplingTrial {
            gap_violations,
            dominance_violations,
            events,
        })
    })?;
    Ok(CouplingOutcome {
        params: params.clone(),
        trials,
    })
}

impl CouplingOutcome {
    pub fn gap_violations(&self) -> u64 {
        self.trials.iter().map(|t| t.gap_violations).sum()
    }

    pub fn dominance_violations(&self) -> u64 {
        self.trials.iter().map(|t| t.dominance_violations).sum()
    }

    pub fn report(&self) -> Result<Report> {
        let n = self.trials.len();
        let events: u64 = self.trials.iter().map(|t| t.events).sum();
        Ok(Report {
            command: "coupling",
            law: Some(self.params.law),
            params: to_value(&self.params)?,
            summary: serde_json::json!({ "trials": n, "events": events }),
            checks: vec![
                Check::new(
                    "basic coupling keeps gaps ordered",
                    self.gap_violations() == 0,
                    format!("{} violating events in {n} trials", self.gap_violations()),
                ),
                Check::new(
                    "fastened process stays ahead",
                    self.dominance_violations() == 0,
                    format!("{} violating events in {n} trials", self.dominance_violations()),
                ),
            ],
            artifacts: Vec::new(),
        })
    }
}
