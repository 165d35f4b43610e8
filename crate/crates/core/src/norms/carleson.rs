//! Carleson-measure norms of functions on the ball and their weak variants.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{lambda_weight, CVector, Tent};
use crate::holo::{y_norm, y_norm_vec, HoloPoly, SampledField, VecHoloPoly};
use crate::norms::tents::{tent_integral, SliceRule, TentGrid};
use crate::{Error, Result};

/// Normalized tent value at one apex.
#[derive(Clone, Debug, Serialize)]
pub struct ApexValue {
    pub apex: CVector,
    pub value: f64,
}

/// A supremum over a [`TentGrid`] together with the per-apex values.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    /// Maximum over apexes; `+∞` when some tent integral diverges.
    pub value: f64,
    pub per_apex: Vec<ApexValue>,
    /// First apex (in grid order) whose tent integral diverged.
    pub divergent_apex: Option<CVector>,
}

impl NormReport {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// The apex attaining the maximum.
    pub fn argmax(&self) -> Option<&ApexValue> {
        self.per_apex
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
    }
}

/// Evaluates `(∫_{S_ζ} f dV / norm(ζ))^{root}` on every tent of the grid.
pub(crate) fn tent_sweep<F, N>(
    grid: &TentGrid,
    rule: &SliceRule,
    integrand: F,
    normalizer: N,
    root: f64,
) -> Result<NormReport>
where
    F: Fn(&CVector) -> Result<f64> + Sync,
    N: Fn(&Tent) -> f64 + Sync,
{
    let values: Vec<Result<f64>> = grid
        .tents()
        .par_iter()
        .map(|t| match tent_integral(t, rule, &integrand) {
            Ok(v) => Ok((v.max(0.0) / normalizer(t)).powf(root)),
            Err(Error::Divergent(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect();
    let mut per_apex = Vec::with_capacity(values.len());
    let mut divergent_apex = None;
    let mut value = 0.0f64;
    for (t, v) in grid.tents().iter().zip(values) {
        let v = v?;
        if v.is_infinite() && divergent_apex.is_none() {
            divergent_apex = Some(t.apex().clone());
        }
        value = value.max(v);
        per_apex.push(ApexValue {
            apex: t.apex().clone(),
            value: v,
        });
    }
    Ok(NormReport {
        value,
        per_apex,
        divergent_apex,
    })
}

/// `sup_ζ sqrt(∫_{S_ζ} |h|² dλₙ / (1 − |ζ|)ⁿ)` over the grid, with `|h|` the
/// pointwise ℓ² modulus of a tuple-valued `h`.
pub fn cm_norm(
    h: &(impl SampledField + ?Sized),
    grid: &TentGrid,
    rule: &SliceRule,
) -> Result<NormReport> {
    tent_sweep(
        grid,
        rule,
        |z| {
            let m: f64 = h.sample(z)?.iter().map(|c| c.norm_sqr()).sum();
            Ok(m * lambda_weight(z)?)
        },
        |t| t.depth().powi(t.dim() as i32),
        0.5,
    )
}

/// Density of `dμ_g^m = |(1 − |z|²)^{n/2} 𝒴^m g|² dλₙ` against `dV`.
pub fn mu_gm_density(g: &VecHoloPoly, m: usize, z: &CVector) -> Result<f64> {
    let c = 1.0 - z.norm_sqr();
    let y = y_norm_vec(g, m, z)?;
    Ok(c.powi(g.dim() as i32) * y * y * lambda_weight(z)?)
}

/// The weak-Carleson norm
/// `sup_ζ (∫_{S_ζ} |(1 − |z|²)^σ 𝒴^m f|^p dλₙ / (1 − |ζ|²)^{pσ})^{1/p}`.
pub fn wx_norm(
    f: &HoloPoly,
    p: f64,
    sigma: f64,
    m: usize,
    grid: &TentGrid,
    rule: &SliceRule,
) -> Result<NormReport> {
    if !(p > 1.0) || !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need p > 1 and σ ≥ 0, got p = {p}, σ = {sigma}"
        )));
    }
    tent_sweep(
        grid,
        rule,
        |z| {
            let c = 1.0 - z.norm_sqr();
            Ok((c.powf(sigma) * y_norm(f, m, z)?).powf(p) * lambda_weight(z)?)
        },
        |t| (1.0 - t.apex().norm_sqr()).powf(p * sigma),
        1.0 / p,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::FnField;
    use num_complex::Complex64;

    fn disk_grid() -> TentGrid {
        TentGrid::standard(1, 4, 5).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let h = FnField::new(1, |_| Ok(vec![Complex64::new(0.0, 0.0)]));
        let r = cm_norm(&h, &disk_grid(), &SliceRule::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn constant_field_diverges() {
        let h = FnField::new(1, |_| Ok(vec![Complex64::new(1.0, 0.0)]));
        let r = cm_norm(&h, &disk_grid(), &SliceRule::default()).unwrap();
        assert!(r.value.is_infinite());
        assert!(r.divergent_apex.is_some());
    }

    #[test]
    fn bmoa_witness_of_z_peaks_at_large_tents() {
        // |h|²λ = (1 − |z|²) for h = (1 − |z|²)^{3/2}, and ∫_{S_ζ}(1 − |z|²) dV
        // is of order δ³, so tent values decay like δ.
        let h = FnField::new(1, |z: &CVector| {
            Ok(vec![Complex64::new((1.0 - z.norm_sqr()).powf(1.5), 0.0)])
        });
        let grid = TentGrid::standard(1, 1, 8).unwrap();
        let r = cm_norm(&h, &grid, &SliceRule::default()).unwrap();
        assert!(r.is_finite());
        let best = r.argmax().unwrap();
        assert!((best.apex.norm() - 0.5).abs() < 1e-12);
        let v: Vec<f64> = r.per_apex.iter().map(|a| a.value).collect();
        for w in v.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.3 && ratio < 0.75, "{ratio}");
        }
    }

    #[test]
    fn tuple_equals_modulus() {
        let pair = FnField::new(2, |z: &CVector| {
            let c = 1.0 - z.norm_sqr();
            Ok(vec![z[0] * c, Complex64::new(0.0, c * c)])
        });
        let modulus = FnField::new(1, |z: &CVector| {
            let c = 1.0 - z.norm_sqr();
            Ok(vec![Complex64::new(
                (z.norm_sqr() * c * c + c.powi(4)).sqrt(),
                0.0,
            )])
        });
        let a = cm_norm(&pair, &disk_grid(), &SliceRule::default()).unwrap();
        let b = cm_norm(&modulus, &disk_grid(), &SliceRule::default()).unwrap();
        for (x, y) in a.per_apex.iter().zip(&b.per_apex) {
            assert!((x.value - y.value).abs() <= 1e-13 * y.value.max(1e-300));
        }
    }

    #[test]
    fn monotone_in_modulus() {
        let small = FnField::new(1, |z: &CVector| {
            Ok(vec![Complex64::new(0.5 * (1.0 - z.norm_sqr()), 0.0)])
        });
        let big = FnField::new(1, |z: &CVector| {
            Ok(vec![Complex64::new(
                (1.0 - z.norm_sqr()) * (1.0 + z.norm()),
                0.0,
            )])
        });
        let a = cm_norm(&small, &disk_grid(), &SliceRule::default()).unwrap();
        let b = cm_norm(&big, &disk_grid(), &SliceRule::default()).unwrap();
        for (x, y) in a.per_apex.iter().zip(&b.per_apex) {
            assert!(x.value <= y.value);
        }
    }

    #[test]
    fn density_of_constant() {
        let g = VecHoloPoly::new(vec![HoloPoly::constant(2, Complex64::new(0.0, 3.0))]).unwrap();
        let z = CVector::from_pairs(&[(0.2, 0.1), (-0.3, 0.4)]);
        let c = 1.0 - z.norm_sqr();
        let want = c.powi(4) * 9.0 * c.powi(-3);
        assert!((mu_gm_density(&g, 1, &z).unwrap() - want).abs() < 1e-13);
        let g2 = g.scale(Complex64::new(0.0, 2.0));
        assert!((mu_gm_density(&g2, 1, &z).unwrap() - 4.0 * want).abs() < 1e-12);
    }

    #[test]
    fn wx_matches_cm_at_hardy_point() {
        // At p = 2, σ = n/2 the two norms differ only by the normalizer
        // (1 − |ζ|²)ⁿ versus (1 − |ζ|)ⁿ.
        let f = HoloPoly::from_terms(
            1,
            &[
                (&[3], Complex64::new(1.0, 0.0)),
                (&[1], Complex64::new(0.0, 0.5)),
            ],
        )
        .unwrap();
        let grid = disk_grid();
        let rule = SliceRule::default();
        let wx = wx_norm(&f, 2.0, 0.5, 1, &grid, &rule).unwrap();
        let ff = f.clone();
        let field = FnField::new(1, move |z: &CVector| {
            let c = 1.0 - z.norm_sqr();
            Ok(vec![Complex64::new(c.sqrt() * y_norm(&ff, 1, z)?, 0.0)])
        });
        let cm = cm_norm(&field, &grid, &rule).unwrap();
        for (w, c) in wx.per_apex.iter().zip(&cm.per_apex) {
            let factor = (1.0 + w.apex.norm()).sqrt();
            assert!((w.value * factor - c.value).abs() < 1e-10 * c.value);
        }
        let f3 = f.scale(Complex64::new(3.0, 0.0));
        let wx3 = wx_norm(&f3, 2.0, 0.5, 1, &grid, &rule).unwrap();
        assert!((wx3.value - 3.0 * wx.value).abs() < 1e-10 * wx.value);
    }
}
