//! Ratios of the weighted multilinear integral to its sup-norm/Hardy-norm
//! bound over a random polynomial family.
//!
//! Run with `cargo run --release --example multilinear`.

use bmo_corona::norms::multilinear_harness;
use bmo_corona::quadrature::quad_ball;

fn main() -> bmo_corona::Result<()> {
    for (n, res) in [(1usize, 256usize), (2, 100)] {
        let rule = quad_ball(n, res, None)?;
        let r = multilinear_harness(n, &[0, 1, 1], 2.0, n as f64 / 2.0, 20, 7, &rule)?;
        let lo = r.ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.ratios.iter().copied().fold(0.0, f64::max);
        println!(
            "n = {n}: ratios in [{lo:.4}, {hi:.4}], max/median {:.3}, scaling errors g {:.1e} h {:.1e}",
            r.max_over_median, r.g_homogeneity_error, r.h_homogeneity_error
        );
    }
    Ok(())
}
