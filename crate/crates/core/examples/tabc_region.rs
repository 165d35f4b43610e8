//! The concentrating-bump probe of `T_{a,b,c}` on the disk: norm curves
//! inside the index region stay flat, outside they blow up.
//!
//! Run with `cargo run --release --example tabc_region` (about a minute).

use bmo_corona::norms::{tabc_region_harness, HarnessOptions, TabcParams};

fn main() -> bmo_corona::Result<()> {
    let opts = HarnessOptions::default();
    for (a, b, c) in [
        (1.0, 0.0, 0.0),
        (1.5, -1.2, -1.5),
        (0.5, 0.0, 0.0),
        (1.0, -1.5, 0.0),
        (1.0, 0.0, -2.0),
    ] {
        let t = TabcParams::new(a, b, c);
        let r = tabc_region_harness(&t, 1, &opts)?;
        let curve: Vec<String> = r.curve.iter().map(|p| format!("{:.3}", p.norm)).collect();
        println!(
            "(a, b, c) = ({a:>4}, {b:>4}, {c:>4}) in region: {:<5} verdict {:<12} curve [{}]",
            r.in_region,
            r.verdict.to_string(),
            curve.join(", ")
        );
    }
    Ok(())
}
