//! Product rules on the ball against closed-form Beta integrals, and graded
//! integration that notices divergence.
//!
//! Run with `cargo run --release --example quadrature_oracles`.

use std::f64::consts::PI;

use bmo_corona::quadrature::{quad_ball, try_integrate_to_endpoint, GradedOptions};
use statrs::function::beta::beta;

fn main() -> bmo_corona::Result<()> {
    let disk = quad_ball(1, 256, None)?;
    println!(
        "{:>4} {:>4} {:>22} {:>22}",
        "b", "c", "quadrature", "π·B(c/2+1, b+1)"
    );
    for (b, c) in [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (1.0, 2.0), (0.5, 1.0)] {
        let got = disk.integrate(|w| (1.0 - w.norm_sqr()).powf(b) * w.norm().powf(c));
        println!(
            "{b:>4} {c:>4} {got:>22.15} {:>22.15}",
            PI * beta(c / 2.0 + 1.0, b + 1.0)
        );
    }
    let ball = quad_ball(2, 64, None)?;
    println!(
        "\nvolume of 𝔹₂: {:.12} (π²/2 = {:.12})",
        ball.integrate(|_| 1.0),
        PI * PI / 2.0
    );

    let opts = GradedOptions::default();
    let finite = try_integrate_to_endpoint(1.0, opts, |t| Ok(t.powf(-0.5)))?;
    println!("\n∫₀¹ t^(−1/2) dt toward the singular end: {finite:.10}");
    match try_integrate_to_endpoint(1.0, opts, |t| Ok(1.0 / t)) {
        Ok(v) => println!("∫₀¹ dt/t reported finite: {v}"),
        Err(e) => println!("∫₀¹ dt/t: {e}"),
    }
    Ok(())
}
