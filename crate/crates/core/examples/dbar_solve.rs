//! Solving `∂̄u = z̄ dz̄` on the disk and watching the residual fall with the
//! quadrature resolution.
//!
//! Run with `cargo run --release --example dbar_solve`.

use std::sync::Arc;

use bmo_corona::holo::FnField;
use bmo_corona::solver::{
    calibrate_cq, form_dbar, residual_grid, DbarProblem, Field, KernelChoice, SolutionField,
};
use bmo_corona::CVector;

fn main() -> bmo_corona::Result<()> {
    let grid = residual_grid(1, 48, 0.9);
    for res in [32, 64, 128, 256] {
        let cal = calibrate_cq(1, 0, res, &KernelChoice::Plain)?;
        let rhs: Field = Arc::new(FnField::new(1, |z: &CVector| Ok(vec![z[0].conj()])));
        let u = SolutionField::new(
            DbarProblem::new(1, 0, rhs, res, KernelChoice::Plain)?,
            cal.c_q,
        );
        let mut worst = 0.0f64;
        for z in &grid {
            worst = worst.max((form_dbar(&u, 1, 0, z, 1e-3)?[0] - z[0].conj()).norm());
        }
        println!(
            "resolution {res:>3}: c₀ = {:.8}, max |∂̄u − z̄| = {worst:.2e}",
            cal.c_q.re
        );
    }
    println!("(−1/π = {:.8})", -1.0 / std::f64::consts::PI);
    Ok(())
}
