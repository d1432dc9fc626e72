//! Tagged particle started from i.i.d. gaps with mean above u*: the excess
//! over c t, its tail on the t^(2/3) scale and the fitted exponent.
//!
//!     cargo run --release --example slowdown_tail

use disordered_tasep::experiments::{theorem1_tail, Ensemble, Theorem1Params};
use disordered_tasep::measures::GapFamily;
use disordered_tasep::RateLaw;

fn main() -> disordered_tasep::Result<()> {
    let params = Theorem1Params {
        law: RateLaw::new(0.5, 1.0, 4.0, 0.5)?,
        gap_family: GapFamily::Geometric,
        u: 3.0,
        horizons: vec![300.0, 1000.0, 3000.0],
        z_grid: vec![0.0, 0.5, 1.0, 1.5],
        window_k: 2.0,
        ensemble: Ensemble::new(100, 2024).with_jobs(2),
    };
    let out = theorem1_tail(&params)?;
    println!("u* = {:.4}", out.u_star);
    for (c, m) in out.curves.iter().zip(&out.medians) {
        print!("t = {:>6}: median excess {m:7.1} |", c.t);
        for r in &c.rows {
            print!(" P(w > {}) = {:.3}", r.param, r.empirical);
        }
        println!();
    }
    if let Some(f) = &out.fit {
        println!("slope {:.3} +- {:.3} (target 2/3)", f.slope(), f.fit.slope_se);
    }
    for c in out.report()?.checks {
        println!("{}: {} ({})", c.name, c.passed, c.detail);
    }
    Ok(())
}
