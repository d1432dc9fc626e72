//! Driving the batch harness from code: a run file, a dry run, then the run.
//!
//!     cargo run --release --example harness

use disordered_tasep::cli::{main_with, Command, Plan, RunConfig};

const RUN_FILE: &str = "\
[law]
c = 0.5
nu = 1
kappa = 4
eps = 0.5

[experiment]
horizons = 100, 300, 1000
b = 0, 0.5
replicas = 40
";

fn main() -> disordered_tasep::Result<()> {
    let cfg = RunConfig::parse(RUN_FILE)?;
    let plan = Plan::resolve(Command::Thm2, &cfg, 1, 1)?;
    println!("{}", serde_json::to_string_pretty(&plan.describe()?)?);

    let dir = std::env::temp_dir().join("dtasep-harness-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("thm2.cfg");
    std::fs::write(&path, RUN_FILE)?;
    let code = main_with([
        "dtasep",
        "thm2",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.join("out").to_str().unwrap(),
    ]);
    println!("exit code {code}; outputs in {}", dir.join("out").display());
    Ok(())
}
