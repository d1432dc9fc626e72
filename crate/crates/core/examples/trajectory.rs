//! Event-driven run from i.i.d. gaps: snapshots, a tracked particle and the
//! snapshot CSV.
//!
//!     cargo run --release --example trajectory

use std::sync::Arc;

use disordered_tasep::disorder::sample_rates;
use disordered_tasep::engine::{run, ClockSchedule, RateSource, SimulationRun};
use disordered_tasep::measures::{sample_iid_gaps, GapFamily, IidGapSpec};
use disordered_tasep::state::gaps_to_particles;
use disordered_tasep::{LabelRange, RateLaw};

fn main() -> disordered_tasep::Result<()> {
    let law = RateLaw::new(0.5, 1.0, 4.0, 0.5)?;
    let n = 200;
    let field = sample_rates(&law, LabelRange::new(0, n - 1), 1);
    let clocks = Arc::new(ClockSchedule::new(2, RateSource::Field(Arc::new(field))));
    let gaps = IidGapSpec::new(3.0, GapFamily::Geometric, 3)?;
    let start = gaps_to_particles(&sample_iid_gaps(&gaps, LabelRange::new(0, n - 2)));

    let t = 50.0;
    let r = SimulationRun::new(start).track(0).snapshot_at(&[10.0, 25.0, t]);
    let r = run(r, clocks, t)?;

    for s in [5.0, 10.0, 20.0, 50.0] {
        println!("sigma_0({s}) = {}", r.tagged_position(0, s)?);
    }
    println!("{} events, {} jumps of particle 0", r.event_count(), r.jumps(0)?);
    println!("excess over c t: {}", r.config().position(0)? as f64 - law.c() * t);

    let mut csv = Vec::new();
    r.snapshots()[0].1.write_snapshot_csv(Some(r.snapshots()[0].0), &mut csv)?;
    let text = String::from_utf8_lossy(&csv);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
