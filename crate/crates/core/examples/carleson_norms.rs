//! Tent norms, boundary mean oscillation and the weak-Carleson norm for
//! monomials on the disk.
//!
//! Run with `cargo run --release --example carleson_norms`.

use bmo_corona::norms::{bmoa_ratio, wx_norm, CapGrid, SliceRule, TentGrid};
use bmo_corona::{Complex64, HoloPoly, VecHoloPoly};

fn main() -> bmo_corona::Result<()> {
    let tents = TentGrid::default_for(1)?;
    let caps = CapGrid::default_for(1)?;
    let rule = SliceRule::coarse();
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>12}",
        "k", "cm", "bmo", "cm/bmo", "wx(2,1/2,1)"
    );
    for k in 1..=10u32 {
        let p = HoloPoly::from_terms(1, &[(&[k], Complex64::new(1.0, 0.0))])?;
        let r = bmoa_ratio(&VecHoloPoly::new(vec![p.clone()])?, &tents, &caps, &rule)?;
        let wx = wx_norm(&p, 2.0, 0.5, 1, &tents, &rule)?;
        println!(
            "{k:>3} {:>10.4} {:>10.4} {:>10.4} {:>12.4}",
            r.cm,
            r.bmo,
            r.lower.unwrap_or(f64::NAN),
            wx.value
        );
    }
    Ok(())
}
