//! Holomorphic polynomials, the radial derivative and the `𝒴^m` norms.
//!
//! Run with `cargo run --release --example polynomials`.

use bmo_corona::holo::{d_op, y_norm, y_words};
use bmo_corona::{CVector, Complex64, HoloPoly};

fn main() -> bmo_corona::Result<()> {
    let p = HoloPoly::from_terms(
        2,
        &[
            (&[2, 1], Complex64::new(1.0, 0.5)),
            (&[0, 1], Complex64::new(-2.0, 0.0)),
        ],
    )?;
    println!("p       = {p}");
    println!("R p     = {}", p.radial());
    println!("∂p/∂z₁  = {}", p.d_holo(0));
    println!("JSON    = {}", p.to_json()?);

    let z = CVector::from_pairs(&[(0.4, 0.1), (-0.2, 0.3)]);
    println!("\nat z = {z:?}:");
    println!("  p(z)   = {:.6}", p.eval(&z));
    println!("  D p(z) = {:?}", d_op(&p, &z)?);
    for m in 0..=3 {
        println!(
            "  |𝒴^{m} p(z)| = {:.6} over {} words",
            y_norm(&p, m, &z)?,
            y_words(m).len()
        );
    }
    Ok(())
}
