//! Derived constants of a rate law and the velocity/gap correspondence.
//!
//!     cargo run --release --example rate_law

use disordered_tasep::disorder::{sample_rates, slow_scan, ScanDirection};
use disordered_tasep::{LabelRange, RateLaw};

fn main() -> disordered_tasep::Result<()> {
    let law = RateLaw::new(0.5, 1.0, 4.0, 0.5)?;
    let k = law.constants();
    println!("alpha = {:.4}, 1 - alpha = {:.4}, A(nu) = {:.4}", k.alpha, k.one_minus_alpha, k.a_nu);
    println!("u* = {:?}, rho* = {:.4}", k.u_star, k.rho_star);

    for a in [0.1, 0.3, 0.45, 0.49] {
        let u = law.velocity_to_gap(a)?;
        println!("a = {a:<5} mean gap {u:8.4}  (back: {:.6})", law.gap_to_velocity(u)?);
    }

    // slow stretches in one realized field
    let field = sample_rates(&law, LabelRange::new(0, 99_999), 7);
    for q in [0.05, 0.02, 0.01] {
        let first = slow_scan(&field, law.c() + q, ScanDirection::Forward);
        println!("first rate below c + {q}: label {first:?}");
    }

    for n in [1e4, 1e6, 1e8] {
        println!(
            "N = {n:e}: P(no slow rate) = {:.6}, limit {:.6}",
            law.scan_event_exact(1.0, 1.0, n),
            law.scan_event_limit(1.0, 1.0)
        );
    }
    Ok(())
}
