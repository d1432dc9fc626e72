//! The `dtasep` batch harness: run files, subcommands, seeds and artifacts.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 configuration or
//! hypothesis error, 3 failed check under `--assert`, 4 window audit failure.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::disorder::RateLaw;
use crate::engine::{choose_window, WindowMode};
use crate::error::{Error, Result};
use crate::experiments::front::theorem2_front;
use crate::experiments::tagged::initial_cap;
use crate::experiments::{
    burke, glynn_whitt_benchmark, lemma1_curve, rost_profile, simulate, theorem1_tail,
    theorem3_window, theorem4_window, variational_check, BurkeParams, Ensemble, FrontParams,
    GlynnWhittParams, InitialCondition, Lemma1Params, Report, RostParams, SimulateParams,
    Theorem1Params, Theorem3Params, Theorem4Params, VarcheckParams,
};
use crate::measures::GapFamily;
pub use config::RunConfig;

/// Master seed when neither `--seed` nor the run file sets one.
pub const DEFAULT_SEED: u64 = 20_240_517;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ASSERT: i32 = 3;
pub const EXIT_AUDIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dtasep", version, about = "Exclusion with quenched particle rates: simulations and scaling experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Run file with [law] and [experiment] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Concurrent replicas.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Output directory (default `out/<command>`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Exit with code 3 when any check fails.
    #[arg(long = "assert", global = true)]
    pub assert_checks: bool,

    /// Validate and print the resolved plan without simulating.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Event-driven trajectory with snapshots and optional event log.
    Simulate,
    /// Slow-stretch probability against its finite-N product and limit.
    Lemma1,
    /// Tagged-particle slowdown tail from i.i.d. gaps.
    Thm1,
    /// Particles ahead of the front after a jam release (nu > 0).
    Thm2,
    /// Front window frequencies at nu = 0.
    Thm3,
    /// Front growth exponent for -1 < nu < 0.
    Thm4,
    /// Poisson jumps of a tagged particle in equilibrium.
    Burke,
    /// Infimum formulas against direct simulation.
    Varcheck,
    /// Density profile of the homogeneous jam release.
    Rost,
    /// Lagging particle in the homogeneous jam release.
    Glynnwhitt,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Lemma1 => "lemma1",
            Command::Thm1 => "thm1",
            Command::Thm2 => "thm2",
            Command::Thm3 => "thm3",
            Command::Thm4 => "thm4",
            Command::Burke => "burke",
            Command::Varcheck => "varcheck",
            Command::Rost => "rost",
            Command::Glynnwhitt => "glynnwhitt",
        }
    }

    /// Law used when the run file has no `[law]` block.
    pub fn default_law(self) -> Option<RateLaw> {
        let (nu, kappa) = match self {
            Command::Rost | Command::Glynnwhitt => return None,
            Command::Lemma1 => (1.0, 1.0),
            Command::Thm3 => (0.0, 1.0),
            Command::Thm4 => (-0.5, 1.0),
            _ => (1.0, 4.0),
        };
        Some(RateLaw::new(0.5, nu, kappa, 0.5).expect("admissible default law"))
    }
}

/// A fully resolved, validated run.
#[derive(Debug, Clone)]
pub enum Plan {
    Simulate(SimulateParams),
    Lemma1(Lemma1Params),
    Thm1(Theorem1Params),
    Thm2(FrontParams),
    Thm3(Theorem3Params),
    Thm4(Theorem4Params),
    Burke(BurkeParams),
    Varcheck(VarcheckParams),
    Rost(RostParams),
    Glynnwhitt(GlynnWhittParams),
}

const EXP: &str = "experiment";

fn gap_family(cfg: &RunConfig) -> Result<GapFamily> {
    let name: String = cfg.or(EXP, "family", "geometric".to_string())?;
    match name.as_str() {
        "geometric" => Ok(GapFamily::Geometric),
        "uniform" => Ok(GapFamily::Uniform),
        "two_point" => Ok(GapFamily::TwoPoint {
            lo: cfg.require(EXP, "lo")?,
            hi: cfg.require(EXP, "hi")?,
        }),
        other => Err(Error::Config(format!(
            "unknown gap family `{other}` (geometric, uniform, two_point)"
        ))),
    }
}

impl Plan {
    /// Reads the run file for `command`, rejecting unknown keys, and checks the
    /// resulting parameters against the command's hypotheses.
    pub fn resolve(command: Command, cfg: &RunConfig, seed: u64, jobs: usize) -> Result<Plan> {
        if let Some(name) = cfg.get::<String>(EXP, "name")? {
            if name != command.name() {
                return Err(Error::Config(format!(
                    "run file is for `{name}`, not `{}`",
                    command.name()
                )));
            }
        }
        let law = match (cfg.law()?, command.default_law()) {
            (Some(_), None) => {
                return Err(Error::Config(format!(
                    "`{}` uses constant rates and takes no [law] block",
                    command.name()
                )))
            }
            (l, d) => l.or(d),
        };
        let law = || law.expect("command with a law");
        let ens = |default: u64| -> Result<Ensemble> {
            Ok(Ensemble::new(cfg.or(EXP, "replicas", default)?, seed).with_jobs(jobs))
        };
        let plan = match command {
            Command::Simulate => {
                let kind: String = cfg.or(EXP, "initial", "iid".to_string())?;
                let initial = match kind.as_str() {
                    "jam" => InitialCondition::Jam,
                    "iid" => InitialCondition::Iid {
                        mean: cfg.or(EXP, "mean", 2.0)?,
                        family: gap_family(cfg)?,
                    },
                    "equilibrium" => InitialCondition::Equilibrium {
                        a: cfg.or(EXP, "a", 0.3)?,
                    },
                    other => {
                        return Err(Error::Config(format!(
                            "unknown initial condition `{other}` (jam, iid, equilibrium)"
                        )))
                    }
                };
                Plan::Simulate(SimulateParams {
                    law: law(),
                    initial,
                    particles: cfg.or(EXP, "particles", 100)?,
                    t: cfg.or(EXP, "t", 10.0)?,
                    snapshots: cfg.list_or(EXP, "snapshots", vec![])?,
                    event_log: cfg.or(EXP, "event_log", false)?,
                    seed,
                })
            }
            Command::Lemma1 => Plan::Lemma1(Lemma1Params {
                law: law(),
                q1: cfg.list_or(EXP, "q1", vec![0.5, 1.0, 2.0])?,
                q2: cfg.list_or(EXP, "q2", vec![0.5, 1.0, 2.0])?,
                n: cfg.list_or(EXP, "n", vec![1e4, 1e6])?,
                replicas: cfg.or(EXP, "replicas", 10_000)?,
                seed,
            }),
            Command::Thm1 => Plan::Thm1(Theorem1Params {
                law: law(),
                gap_family: gap_family(cfg)?,
                u: cfg.or(EXP, "u", 3.0)?,
                horizons: cfg.list_or(EXP, "horizons", vec![1e3, 3e3, 1e4])?,
                z_grid: cfg.list_or(EXP, "z", vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0])?,
                window_k: cfg.or(EXP, "window_k", 2.0)?,
                ensemble: ens(200)?,
            }),
            Command::Thm2 => Plan::Thm2(FrontParams {
                law: law(),
                horizons: cfg.list_or(EXP, "horizons", vec![1e3, 3e3, 1e4])?,
                b_grid: cfg.list_or(EXP, "b", vec![0.0, 0.25, 0.5, 1.0, 1.5])?,
                window_k: cfg.or(EXP, "window_k", 2.0)?,
                ensemble: ens(200)?,
            }),
            Command::Thm3 => Plan::Thm3(Theorem3Params {
                law: law(),
                horizons: cfg.list_or(EXP, "horizons", vec![1e3, 1e4])?,
                a_grid: cfg.list_or(EXP, "a", vec![0.01, 0.1, 0.5])?,
                b_grid: cfg.list_or(EXP, "b", vec![1.0, 3.0, 10.0])?,
                window_k: cfg.or(EXP, "window_k", 2.0)?,
                ensemble: ens(200)?,
            }),
            Command::Thm4 => Plan::Thm4(Theorem4Params {
                law: law(),
                horizons: cfg.list_or(EXP, "horizons", vec![1e3, 1e4, 1e5])?,
                margin: cfg.or(EXP, "margin", 0.1)?,
                window_k: cfg.or(EXP, "window_k", 2.0)?,
                ensemble: ens(200)?,
            }),
            Command::Burke => Plan::Burke(BurkeParams {
                law: law(),
                a: cfg.or(EXP, "a", 0.45)?,
                labels: cfg.or(EXP, "labels", 10_000)?,
                t: cfg.or(EXP, "t", 100.0)?,
                ensemble: ens(10_000)?,
            }),
            Command::Varcheck => Plan::Varcheck(VarcheckParams {
                law: law(),
                max_particles: cfg.or(EXP, "max_particles", 20)?,
                max_t: cfg.or(EXP, "max_t", 10.0)?,
                mean_gap: cfg.or(EXP, "mean_gap", 1.5)?,
                window_k: cfg.or(EXP, "window_k", 3.0)?,
                ensemble: Ensemble::new(cfg.or(EXP, "trials", 1000)?, seed).with_jobs(jobs),
            }),
            Command::Rost => Plan::Rost(RostParams {
                rate: cfg.or(EXP, "rate", 1.0)?,
                t: cfg.or(EXP, "t", 1e4)?,
                xs: cfg.list_or(EXP, "x", vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])?,
                delta: cfg.or(EXP, "delta", 0.1)?,
                ensemble: ens(100)?,
            }),
            Command::Glynnwhitt => Plan::Glynnwhitt(GlynnWhittParams {
                rate: cfg.or(EXP, "rate", 1.0)?,
                a: cfg.or(EXP, "a", 1.0)?,
                gamma: cfg.or(EXP, "gamma", 0.5)?,
                horizons: cfg.list_or(EXP, "horizons", vec![1e3, 1e4, 1e5])?,
                ensemble: ens(200)?,
            }),
        };
        // the seed key is read by the caller; mark it consumed here too
        let _ = cfg.get::<u64>(EXP, "seed")?;
        cfg.finish()?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Plan::Simulate(p) => p.validate(),
            Plan::Lemma1(p) => p.validate(),
            Plan::Thm1(p) => p.validate().map(|_| ()),
            Plan::Thm2(p) => p.validate(),
            Plan::Thm3(p) => p.validate(),
            Plan::Thm4(p) => p.validate(),
            Plan::Burke(p) => p.validate(),
            Plan::Varcheck(p) => p.validate(),
            Plan::Rost(p) => p.validate(),
            Plan::Glynnwhitt(p) => p.validate(),
        }
    }

    pub fn execute(&self) -> Result<Report> {
        match self {
            Plan::Simulate(p) => simulate(p)?.report(),
            Plan::Lemma1(p) => lemma1_curve(p).report(),
            Plan::Thm1(p) => theorem1_tail(p)?.report(),
            Plan::Thm2(p) => theorem2_front(p)?.report(),
            Plan::Thm3(p) => theorem3_window(p)?.report(),
            Plan::Thm4(p) => theorem4_window(p)?.report(),
            Plan::Burke(p) => burke(p)?.report(),
            Plan::Varcheck(p) => variational_check(p)?.report(),
            Plan::Rost(p) => rost_profile(p)?.report(),
            Plan::Glynnwhitt(p) => glynn_whitt_benchmark(p)?.report(),
        }
    }

    /// Window sizes, replica counts and a rough peak memory estimate.
    pub fn describe(&self) -> Result<serde_json::Value> {
        #[derive(Serialize)]
        struct Horizon {
            t: f64,
            labels: usize,
            memory_bytes: u64,
        }
        let jam = |law_c: f64, t: f64, k: f64| -> Result<Horizon> {
            let n = choose_window(t, k, WindowMode::Jam { speed: law_c })?.len();
            Ok(Horizon {
                t,
                labels: n,
                memory_bytes: 16 * (n as u64 + (t as u64)),
            })
        };
        let value = match self {
            Plan::Simulate(p) => serde_json::json!({
                "params": p,
                "memory_bytes": 64 * p.particles as u64,
            }),
            Plan::Lemma1(p) => serde_json::json!({
                "params": p,
                "cells": p.q1.len() * p.q2.len() * p.n.len(),
            }),
            Plan::Thm1(p) => {
                let expo = p.law.constants().one_minus_alpha;
                let horizons = p
                    .horizons
                    .iter()
                    .map(|&t| {
                        let w = choose_window(t, p.window_k, WindowMode::Tagged)?;
                        Ok(Horizon {
                            t,
                            labels: w.len(),
                            memory_bytes: 16 * initial_cap(p.law.c(), t, expo),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                serde_json::json!({ "params": p, "horizons": horizons })
            }
            Plan::Thm2(p) => serde_json::json!({
                "params": p,
                "horizons": p.horizons.iter().map(|&t| jam(p.law.c(), t, p.window_k)).collect::<Result<Vec<_>>>()?,
            }),
            Plan::Thm3(p) => serde_json::json!({
                "params": p,
                "horizons": p.horizons.iter().map(|&t| jam(p.law.c(), t, p.window_k)).collect::<Result<Vec<_>>>()?,
            }),
            Plan::Thm4(p) => serde_json::json!({
                "params": p,
                "horizons": p.horizons.iter().map(|&t| jam(p.law.c(), t, p.window_k)).collect::<Result<Vec<_>>>()?,
            }),
            Plan::Burke(p) => serde_json::json!({
                "params": p,
                "memory_bytes": 8 * p.labels + 16 * (p.t as u64 + 16),
            }),
            Plan::Varcheck(p) => serde_json::json!({ "params": p }),
            Plan::Rost(p) => serde_json::json!({
                "params": p,
                "horizon": jam(p.rate, p.t, 1.0 + p.xs.iter().fold(0.0f64, |m, x| m.max(x.abs())))?,
            }),
            Plan::Glynnwhitt(p) => serde_json::json!({ "params": p }),
        };
        Ok(value)
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Hypothesis(_) | Error::InvalidLaw(_) | Error::Domain { .. } => {
            EXIT_CONFIG
        }
        Error::WindowAudit(_) => EXIT_AUDIT,
        _ => EXIT_FAILURE,
    }
}

/// Writes every artifact plus `manifest.json` into `dir`.
pub fn write_outputs(report: &Report, seed: u64, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for a in &report.artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
    }
    let mut manifest = serde_json::to_vec_pretty(&report.manifest(seed))?;
    manifest.push(b'\n');
    fs::write(dir.join("manifest.json"), manifest)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let cfg = RunConfig::parse(&text)?;
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.or(EXP, "seed", DEFAULT_SEED)?,
    };
    let plan = Plan::resolve(cli.command, &cfg, seed, cli.jobs.max(1))?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| Path::new("out").join(cli.command.name()));
    if cli.dry_run {
        let plan_json = serde_json::json!({
            "command": cli.command.name(),
            "seed": seed,
            "jobs": cli.jobs.max(1),
            "out": out,
            "plan": plan.describe()?,
        });
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&plan_json)?);
        return Ok(EXIT_OK);
    }
    let report = plan.execute()?;
    write_outputs(&report, seed, &out)?;
    let mut stdout = std::io::stdout().lock();
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(stdout, "{verdict} {}: {}", c.name, c.detail);
    }
    let _ = writeln!(stdout, "wrote {} files to {}", report.artifacts.len() + 1, out.display());
    if cli.assert_checks && !report.passed() {
        return Ok(EXIT_ASSERT);
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dtasep {}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}
