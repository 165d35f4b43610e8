//! The Koszul forms built from corona data: the chain identity, the wedge
//! factorization and quasi-multiplicativity.
//!
//! Run with `cargo run --release --example koszul_forms`.

use bmo_corona::koszul::{
    koszul_residual, omega, omega_direct, quasimult_constants, CoronaData, FD_STEP,
};
use bmo_corona::tensor::tensor_norm;
use bmo_corona::{CVector, Complex64, HoloPoly, VecHoloPoly};

fn main() -> bmo_corona::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let g = VecHoloPoly::new(vec![
        HoloPoly::coordinate(2, 0),
        HoloPoly::from_terms(2, &[(&[0, 1], c(1.0, 0.0)), (&[1, 1], c(0.3, 0.0))])?,
        HoloPoly::from_terms(2, &[(&[0, 0], c(0.6, 0.0)), (&[0, 2], c(0.2, 0.1))])?,
    ])?;
    let d = CoronaData::from_generators(g)?;
    println!("n = {}, N = {}, δ = {:.4}", d.n(), d.big_n(), d.delta());

    let z = CVector::from_pairs(&[(0.2, -0.1), (0.3, 0.25)]);
    for q in 0..2 {
        println!(
            "|∂̄Ω_{q} − Λ_g Ω_{}| = {:.2e}",
            q + 1,
            koszul_residual(q, &d, &z, FD_STEP)?
        );
    }
    for ell in 0..=2 {
        let a = omega(ell, &d, &z)?;
        let b = omega_direct(ell, &d, &z)?;
        println!(
            "ℓ = {ell}: |Ω_ℓ| = {:.5}, wedge vs permutation formula {:.1e}",
            tensor_norm(&a),
            tensor_norm(&a.sub(&b)?)
        );
    }

    println!("\nquasi-multiplicativity constants C_ℓ on 𝔹₂:");
    for big_n in [4, 8, 16] {
        let cs = quasimult_constants(2, big_n, 3, 30, 0.95, 7)?;
        println!("  N = {big_n:>2}: {cs:.4?}");
    }
    Ok(())
}
