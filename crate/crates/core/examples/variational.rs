//! The three infimum formulas against a direct run under the same clocks.
//!
//!     cargo run --release --example variational

use std::sync::Arc;

use disordered_tasep::disorder::sample_rates;
use disordered_tasep::engine::{run, ClockSchedule, RateSource, SimulationRun};
use disordered_tasep::measures::{sample_iid_gaps, GapFamily, IidGapSpec};
use disordered_tasep::state::gaps_to_particles;
use disordered_tasep::variational::{
    corner_terms, evaluate_svar1, evaluate_svar2, split_infimum, CornerMethod,
};
use disordered_tasep::{LabelRange, RateLaw};

fn main() -> disordered_tasep::Result<()> {
    let law = RateLaw::new(0.5, 1.0, 4.0, 0.5)?;
    let n = 40;
    let t = 12.0;
    let field = sample_rates(&law, LabelRange::new(0, n - 1), 5);
    let clocks = Arc::new(ClockSchedule::new(6, RateSource::Field(Arc::new(field))));
    let gaps = IidGapSpec::new(1.0, GapFamily::Geometric, 7)?;
    let cfg = gaps_to_particles(&sample_iid_gaps(&gaps, LabelRange::new(0, n - 2)));

    let direct = run(SimulationRun::new(cfg.clone()), clocks.clone(), t)?;
    let ks = [0, 5, 10];
    let v1 = evaluate_svar1(&cfg, &clocks, t, None, &ks)?;
    let v2 = evaluate_svar2(&cfg, &clocks, t, None, &ks)?;
    for (i, k) in ks.iter().enumerate() {
        println!(
            "label {k:>2}: direct {:>3}  zeta-inf {:>3}  xi-inf {:>3}",
            direct.config().position(*k)?,
            v1[i],
            v2[i]
        );
    }

    let width = (3.0 * t).ceil() as u64;
    let corner = corner_terms(&cfg, &clocks, t, Some(width), CornerMethod::Sweep)?;
    println!(
        "corner infimum over {} bases: {} (certified: {})",
        corner.terms.len(),
        corner.minimum(),
        corner.certified()
    );
    let (near, far) = split_infimum(&corner, t.powf(2.0 / 3.0));
    println!("near-part minimum {near:?}, far-part minimum {far:?}");
    Ok(())
}
