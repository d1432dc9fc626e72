//! Shared clocks: two gap-ordered systems stay ordered, and a fastened copy
//! stays ahead of the original.
//!
//!     cargo run --release --example coupling

use disordered_tasep::experiments::{coupling_check, CouplingParams, Ensemble};
use disordered_tasep::RateLaw;

fn main() -> disordered_tasep::Result<()> {
    let params = CouplingParams {
        law: RateLaw::new(0.5, 1.0, 4.0, 0.5)?,
        particles: 30,
        t: 40.0,
        mean_gap: 1.0,
        fastening: 0.7,
        ensemble: Ensemble::new(200, 11),
    };
    let out = coupling_check(&params)?;
    let events: u64 = out.trials.iter().map(|t| t.events).sum();
    println!("{} trials, {events} events inspected", out.trials.len());
    println!("gap-order violations:  {}", out.gap_violations());
    println!("dominance violations:  {}", out.dominance_violations());
    Ok(())
}
