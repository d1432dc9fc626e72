//! The service-time sweep against the clock-walking sweep (itself pathwise
//! equal to the event loop): same law, different randomness.

use disordered_tasep::disorder::RateSampler;
use disordered_tasep::engine::{
    jam_front_count, tagged_sweep, ClockSchedule, ClockView, Dynamics, RateSource, ServiceTimes,
};
use disordered_tasep::experiments::stats::ks_two_sample;
use disordered_tasep::measures::{GapFamily, IidGapSpec};
use disordered_tasep::rng::{derive_seed, Domain};
use disordered_tasep::RateLaw;

fn law() -> RateLaw {
    RateLaw::new(0.5, 1.0, 4.0, 0.5).unwrap()
}

fn rates(seed: u64) -> RateSource {
    RateSource::Lazy(Box::new(RateSampler::new(law(), derive_seed(seed, Domain::Disorder, 0))))
}

fn tagged(seed: u64, dynamics: &impl Dynamics, t: f64) -> f64 {
    let gaps = IidGapSpec::new(3.0, GapFamily::Geometric, derive_seed(seed, Domain::Gaps, 0))
        .unwrap()
        .sampler();
    let mut gap = |l: i64| Ok(gaps.gap(l));
    tagged_sweep(0, &mut gap, dynamics, t, 400, 60).unwrap().position as f64
}

fn compare(name: &str, a: &[f64], b: &[f64]) {
    let ks = ks_two_sample(a, b);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(
        ks.p_value > 1e-3,
        "{name}: D = {:.4}, p = {:.2e}, means {} vs {}",
        ks.statistic,
        ks.p_value,
        mean(a),
        mean(b)
    );
}

#[test]
fn tagged_position_has_the_same_law() {
    let t = 60.0;
    let (mut walk, mut service) = (Vec::new(), Vec::new());
    for r in 0..3000u64 {
        let clocks = ClockSchedule::new(derive_seed(r, Domain::Clock, 0), rates(r));
        walk.push(tagged(r, &ClockView::new(&clocks), t));
        let s = ServiceTimes::new(derive_seed(r, Domain::Service, 0), rates(r + 1_000_000));
        service.push(tagged(r + 1_000_000, &s, t));
    }
    compare("tagged", &walk, &service);
}

#[test]
fn jam_front_has_the_same_law() {
    let t = 200.0;
    let (mut walk, mut service) = (Vec::new(), Vec::new());
    for r in 0..3000u64 {
        let clocks = ClockSchedule::new(derive_seed(r, Domain::Clock, 0), rates(r));
        walk.push(jam_front_count(&ClockView::new(&clocks), t, 0.5, 400).unwrap() as f64);
        let s = ServiceTimes::new(derive_seed(r, Domain::Service, 0), rates(r + 1_000_000));
        service.push(jam_front_count(&s, t, 0.5, 400).unwrap() as f64);
    }
    compare("jam front", &walk, &service);
}
