//! Charpentier kernels and the pointwise estimates that control them.
//!
//! Run with `cargo run --release --example kernels`.

use bmo_corona::ball::sample_ball;
use bmo_corona::kernels::{charpentier, check_crucial, Crucial};
use bmo_corona::HoloPoly;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bmo_corona::Result<()> {
    let w = bmo_corona::CVector::from_pairs(&[(0.1, 0.2), (-0.3, 0.0)]);
    let z = bmo_corona::CVector::from_pairs(&[(0.5, -0.1), (0.2, 0.4)]);
    for q in 0..2 {
        let k = charpentier(2, q, &w, &z)?;
        println!(
            "𝒞₂^(0,{q})(w, z): {} components, norm {:.5}",
            k.len(),
            k.norm()
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kinds = [
        ("RootD", Crucial::RootD),
        ("RootDRadial", Crucial::RootDRadial),
        ("DBound k=3 m=2", Crucial::DBound { k: 3, m: 2 }),
        (
            "ModDelta z₁² m=1",
            Crucial::ModDelta {
                p: HoloPoly::coordinate(2, 0).mul(&HoloPoly::coordinate(2, 0))?,
                order: 1,
            },
        ),
    ];
    println!("\nlargest LHS/RHS over 2000 random pairs:");
    for (name, kind) in &kinds {
        let mut worst = 0.0f64;
        for _ in 0..2000 {
            let w = sample_ball(&mut rng, 2, 0.99);
            let z = sample_ball(&mut rng, 2, 0.99);
            worst = worst.max(check_crucial(kind, &w, &z)?);
        }
        println!("  {name:<18} {worst:.4}");
    }
    Ok(())
}
