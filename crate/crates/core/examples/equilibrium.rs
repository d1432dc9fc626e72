//! Product equilibrium over a fixed field: the tagged particle jumps as a
//! Poisson process of rate a and the gap ahead keeps its geometric law.
//!
//!     cargo run --release --example equilibrium

use disordered_tasep::disorder::sample_rates;
use disordered_tasep::experiments::{burke, BurkeParams, Ensemble};
use disordered_tasep::measures::{annealed_mean_gap, equilibrium_mean_gap, EquilibriumSpec};
use disordered_tasep::{LabelRange, RateLaw};

fn main() -> disordered_tasep::Result<()> {
    let law = RateLaw::new(0.5, 1.0, 4.0, 0.5)?;
    let a = 0.45;
    let field = sample_rates(&law, LabelRange::new(0, 9_999), 8);
    let spec = EquilibriumSpec::new(a, field, 9);
    println!(
        "mean gap at a = {a}: field {:.4}, annealed {:.4}, from the law {:.4}",
        equilibrium_mean_gap(&spec)?,
        annealed_mean_gap(&law, a, None)?,
        law.velocity_to_gap(a)?
    );

    let out = burke(&BurkeParams {
        law,
        a,
        labels: 5_000,
        t: 100.0,
        ensemble: Ensemble::new(2_000, 10),
    })?;
    println!(
        "increment mean {:.3} +- {:.3} (a t = {}), variance/mean {:.4}",
        out.mean,
        out.std_error,
        a * 100.0,
        out.dispersion
    );
    println!("gap chi-square: {:.2} on {} dof, p = {:.3}", out.chi_square.statistic, out.chi_square.dof, out.chi_square.p_value);
    Ok(())
}
