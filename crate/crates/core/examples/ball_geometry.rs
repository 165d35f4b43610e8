//! The quasi-distance Δ, Möbius magnitudes and the dyadic tent chain.
//!
//! Run with `cargo run --release --example ball_geometry`.

use bmo_corona::ball::{delta, mobius_magnitude, pairing};
use bmo_corona::{CVector, Complex64, Tent};

fn main() -> bmo_corona::Result<()> {
    let w = CVector::from_pairs(&[(0.3, -0.2), (0.1, 0.5)]);
    let z = CVector::from_pairs(&[(-0.4, 0.1), (0.6, 0.2)]);
    let one_minus = (Complex64::new(1.0, 0.0) - pairing(&w, &z)?).norm_sqr();
    let m = mobius_magnitude(&w, &z)?;
    println!("Δ(w, z)                 = {:.15}", delta(&w, &z));
    println!("|1 − ⟨w, z⟩|²·|φ_w(z)|² = {:.15}", one_minus * m * m);

    let apex = CVector::real(&[0.999, 0.0]);
    let tent = Tent::new(apex)?;
    println!(
        "\ntent depth δ = {:.3e}, chain length {}",
        tent.depth(),
        tent.max_chain_index()
    );
    for k in [0, 3, 6, 9] {
        let zk = tent.chain_point(k)?;
        println!(
            "  ζ_{k}: |ζ_k| = {:.6}, contains apex: {}",
            zk.norm(),
            tent.chain_tent(k)?.contains(tent.apex())
        );
    }
    Ok(())
}
