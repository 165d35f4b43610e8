//! A corona solve on the disk: `f₁z + f₂(1 − 2z/3) = h`, with the residual
//! table and the tent norm of the weighted derivative of `f`.
//!
//! Run with `cargo run --release --example corona_disk` (about a minute).

use bmo_corona::cli::witness_rule;
use bmo_corona::koszul::CoronaData;
use bmo_corona::norms::{cm_norm, sampled_bmoa_witness};
use bmo_corona::solver::{corona_solve, residual_grid, residuals, SolverParams};
use bmo_corona::{Complex64, HoloPoly, VecHoloPoly};

fn main() -> bmo_corona::Result<()> {
    let g = VecHoloPoly::new(vec![
        HoloPoly::coordinate(1, 0),
        HoloPoly::from_terms(
            1,
            &[
                (&[0], Complex64::new(1.0, 0.0)),
                (&[1], Complex64::new(-2.0 / 3.0, 0.0)),
            ],
        )?,
    ])?;
    let data = CoronaData::from_generators(g.clone())?;
    println!("δ² lower bound on |g|²: {:.4}", data.delta().powi(2));
    let params = SolverParams::default();
    let grid = residual_grid(1, 48, 0.9);
    let (tents, rule) = witness_rule();
    for h in [
        HoloPoly::constant(1, Complex64::new(1.0, 0.0)),
        HoloPoly::coordinate(1, 0),
    ] {
        let f = corona_solve(&data, &h, &params)?;
        let rep = residuals(&f, &g, &h, &grid, params.fd_step)?;
        let cm = cm_norm(&sampled_bmoa_witness(&f, 1, params.fd_step), &tents, &rule)?;
        println!(
            "h = {h}: max |f·g − h| = {:.1e}, max |∂̄f| = {:.2e}, mean |∂̄f| = {:.2e}, tent norm of (1−|z|²)^(3/2) f′ = {:.4}",
            rep.max_algebraic, rep.max_dbar, rep.mean_dbar, cm.value
        );
    }
    Ok(())
}
