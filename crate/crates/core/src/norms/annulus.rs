//! Geometry of the dyadic tent chain: points of `S_{ζ_k} \ S_{ζ_{k−1}}` sit
//! at distance comparable to `2^k δ` from the apex `ζ`, in every sense that
//! matters for kernel estimates.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::ball::{delta, mobius_magnitude, pairing, sample_sphere, CVector, Tent};
use crate::norms::tents::{from_frame, unitary_frame};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusReport {
    pub apex: CVector,
    pub k: u32,
    pub samples: usize,
    /// Extremes of `|1 − ⟨w, ζ⟩| / (2^k δ)` over the annulus sample.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Extremes of `|φ_w(z)|` for `z ∈ S_ζ` and `w` in the annulus.
    pub mobius_min: f64,
    pub mobius_max: f64,
    /// Extremes of `√Δ(w, z) / (2^k δ)` over the same pairs.
    pub sqrt_delta_min: f64,
    pub sqrt_delta_max: f64,
}

impl AnnulusReport {
    /// Whether the distance ratios lie in `[lo, hi]`.
    pub fn ratios_within(&self, lo: f64, hi: f64) -> bool {
        self.ratio_min >= lo && self.ratio_max <= hi
    }
}

/// A point of `{w : |1 − (1 − d)⟨w, ξ⟩| < 2d}` (the tent of depth `d` in
/// direction `ξ`) by rejection in the first frame coordinate; the remaining
/// coordinates fill the ball uniformly in radius.
fn sample_tent_coords<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: f64,
    reject: impl Fn(Complex64) -> bool,
) -> Option<Vec<Complex64>> {
    let r = 1.0 - d;
    let centre = 1.0 / r;
    let radius = 2.0 * d / r;
    for _ in 0..10_000 {
        let w1 = Complex64::new(centre, 0.0)
            + Complex64::from_polar(
                radius * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
        let rest = 1.0 - w1.norm_sqr();
        if rest <= 0.0 || reject(w1) {
            continue;
        }
        let mut coords = vec![w1];
        if n > 1 {
            let tail = sample_sphere(rng, n - 1);
            let s = rest.sqrt() * rng.gen::<f64>().powf(1.0 / (2 * (n - 1)) as f64) * (1.0 - 1e-12);
            coords.extend(tail.coords().iter().map(|c| c * s));
        }
        return Some(coords);
    }
    None
}

/// Samples the annulus `S_{ζ_k} \ S_{ζ_{k−1}}` and reports the distance
/// ratios, with Möbius and `Δ` comparisons against points of `S_ζ`.
pub fn annulus_check<R: Rng + ?Sized>(
    apex: &CVector,
    k: u32,
    samples: usize,
    rng: &mut R,
) -> Result<AnnulusReport> {
    let tent = Tent::new(apex.clone())?;
    let d = tent.depth();
    let scale = 2f64.powi(k as i32) * d;
    if d > 0.25 || k < 3 || scale > 0.5 {
        return Err(Error::InvalidArgument(format!(
            "need δ ≤ 1/4, k ≥ 3 and 2^k δ ≤ 1/2; got δ = {d}, k = {k}"
        )));
    }
    let n = apex.dim();
    let frame = unitary_frame(apex)?;
    let outer = tent.chain_tent(k)?;
    let inner = tent.chain_tent(k - 1)?;
    let inner_depth = inner.depth();
    let one = Complex64::new(1.0, 0.0);
    let mut report = AnnulusReport {
        apex: apex.clone(),
        k,
        samples,
        ratio_min: f64::INFINITY,
        ratio_max: 0.0,
        mobius_min: f64::INFINITY,
        mobius_max: 0.0,
        sqrt_delta_min: f64::INFINITY,
        sqrt_delta_max: 0.0,
    };
    for _ in 0..samples {
        let wc = sample_tent_coords(rng, n, outer.depth(), |w1| {
            (one - w1 * (1.0 - inner_depth)).norm() < 2.0 * inner_depth
        })
        .ok_or_else(|| Error::InvalidArgument("empty annulus sample".into()))?;
        let w = from_frame(&frame, &wc);
        debug_assert!(outer.contains(&w) && !inner.contains(&w));
        let ratio = (one - pairing(&w, apex)?).norm() / scale;
        report.ratio_min = report.ratio_min.min(ratio);
        report.ratio_max = report.ratio_max.max(ratio);
        let zc = sample_tent_coords(rng, n, d, |_| false)
            .ok_or_else(|| Error::InvalidArgument("empty tent sample".into()))?;
        let z = from_frame(&frame, &zc);
        let m = mobius_magnitude(&w, &z)?;
        report.mobius_min = report.mobius_min.min(m);
        report.mobius_max = report.mobius_max.max(m);
        let s = delta(&w, &z).sqrt() / scale;
        report.sqrt_delta_min = report.sqrt_delta_min.min(s);
        report.sqrt_delta_max = report.sqrt_delta_max.max(s);
    }
    Ok(report)
}

/// `trials` random `(ζ, k)` with `δ = 2^{−u}`, `u ∈ [4, 12]`, `k` uniform in
/// `3..=⌊log₂(1/(2δ))⌋` and a uniform direction.
pub fn annulus_sweep<R: Rng + ?Sized>(
    n: usize,
    trials: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<AnnulusReport>> {
    (0..trials)
        .map(|_| {
            let d = 2f64.powf(-rng.gen_range(4.0..12.0));
            let kmax = (1.0 / (2.0 * d)).log2().floor() as u32;
            let k = rng.gen_range(3..=kmax);
            let apex = sample_sphere(rng, n).scale_real(1.0 - d);
            annulus_check(&apex, k, samples, rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_lie_in_annulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2] {
            let apex = sample_sphere(&mut rng, n).scale_real(1.0 - 1e-3);
            let tent = Tent::new(apex.clone()).unwrap();
            let frame = unitary_frame(&apex).unwrap();
            let (o, i) = (tent.chain_tent(5).unwrap(), tent.chain_tent(4).unwrap());
            let id = i.depth();
            for _ in 0..200 {
                let c = sample_tent_coords(&mut rng, n, o.depth(), |w1| {
                    (Complex64::new(1.0, 0.0) - w1 * (1.0 - id)).norm() < 2.0 * id
                })
                .unwrap();
                let w = from_frame(&frame, &c);
                assert!(w.is_interior() && o.contains(&w) && !i.contains(&w));
            }
        }
    }

    #[test]
    fn ratios_at_maximal_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let apex = CVector::real(&[1.0 - 2f64.powi(-10)]);
        let kmax = 9; // 2^9·2^{−10} = 1/2, the largest admissible scale
        let r = annulus_check(&apex, kmax, 500, &mut rng).unwrap();
        assert!(r.ratios_within(0.25, 4.0), "{r:?}");
        assert!(r.mobius_min > 0.3 && r.mobius_max < 1.0);
    }

    #[test]
    fn preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let apex = CVector::real(&[0.99]);
        assert!(annulus_check(&apex, 2, 10, &mut rng).is_err());
        assert!(annulus_check(&apex, 6, 10, &mut rng).is_err());
        assert!(annulus_check(&CVector::real(&[0.5]), 3, 10, &mut rng).is_err());
    }
}
