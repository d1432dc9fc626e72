//! Jam release: particles beyond c t under disorder, the homogeneous
//! density profile, and the lagging-particle statistic.
//!
//!     cargo run --release --example jam_front

use disordered_tasep::experiments::front::{front_samples, theorem2_front, RateModel};
use disordered_tasep::experiments::{
    glynn_whitt_benchmark, rost_profile, Ensemble, FrontParams, GlynnWhittParams, RostParams,
};
use disordered_tasep::RateLaw;

fn main() -> disordered_tasep::Result<()> {
    let law = RateLaw::new(0.5, 1.0, 4.0, 0.5)?;
    let out = theorem2_front(&FrontParams {
        law,
        horizons: vec![1e3, 3e3, 1e4],
        b_grid: vec![0.0, 0.25, 0.5],
        window_k: 2.0,
        ensemble: Ensemble::new(100, 1),
    })?;
    println!("median X_t: {:?}", out.medians);
    if let Some(f) = &out.fit {
        println!("front exponent {:.3} (target 2/3)", f.slope());
    }

    // without disorder the front carries no t^(2/3) excess
    let flat = front_samples(RateModel::Constant { rate: 1.0 }, 1e4, 2.0, &Ensemble::new(50, 2))?;
    println!("constant rates, t = 1e4: X_t = {:?}", &flat[..10]);

    let rost = rost_profile(&RostParams {
        rate: 1.0,
        t: 2000.0,
        xs: vec![-1.5, -0.5, 0.0, 0.5, 1.5],
        delta: 0.1,
        ensemble: Ensemble::new(20, 3),
    })?;
    for b in &rost.bins {
        println!("x = {:>4}: density {:.4}, limit {:.4}", b.x, b.density, b.profile);
    }

    let gw = glynn_whitt_benchmark(&GlynnWhittParams {
        rate: 1.0,
        a: 1.0,
        gamma: 0.5,
        horizons: vec![1e3, 1e4],
        ensemble: Ensemble::new(50, 4),
    })?;
    for r in &gw.rows {
        println!("t = {:>6}: label {} statistic {:.3} +- {:.3} (limit {})", r.t, r.label, r.mean, r.std_error, gw.limit);
    }
    Ok(())
}
