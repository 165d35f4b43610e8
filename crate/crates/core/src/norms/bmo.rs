//! Mean oscillation over non-isotropic boundary balls and the BMOA/Carleson
//! comparison.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::CVector;
use crate::holo::{d_probe, FnField, SampledField, VecHoloPoly};
use crate::norms::carleson::cm_norm;
use crate::norms::tents::{
    cap_integral, from_frame, sphere_directions, unitary_frame, SliceRule, TentGrid,
};
use crate::{Error, Result};

/// Boundary balls `Q_δ(η) = {ξ : |1 − ⟨ξ, η⟩| < δ²}` on which oscillation is
/// sampled.
#[derive(Clone, Debug)]
pub struct CapGrid {
    caps: Vec<(CVector, f64)>,
}

impl CapGrid {
    /// Every pair of a centre and a radius `δ`.
    pub fn new(centers: &[CVector], radii: &[f64]) -> Result<Self> {
        let mut caps = Vec::new();
        for c in centers {
            if !c.is_on_boundary() {
                return Err(Error::NotOnBoundary { norm: c.norm() });
            }
            for &d in radii {
                if !(d > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "cap radius must be positive, got {d}"
                    )));
                }
                caps.push((c.clone(), d));
            }
        }
        Ok(Self { caps })
    }

    /// `directions` centres with `δ² = 2^{1−j}`, `j = 0..levels`.
    pub fn standard(n: usize, directions: usize, levels: u32) -> Result<Self> {
        let radii: Vec<f64> = (0..levels)
            .map(|j| 2f64.powf((1.0 - j as f64) / 2.0))
            .collect();
        Self::new(&sphere_directions(n, directions)?, &radii)
    }

    /// 16 centres × 8 radii.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::standard(n, 16, 8)
    }

    pub fn caps(&self) -> &[(CVector, f64)] {
        &self.caps
    }
}

/// Mean and root-mean-square oscillation of `b` over one cap.
pub fn cap_oscillation(
    b: &(impl SampledField + ?Sized),
    center: &CVector,
    radius: f64,
    rule: &SliceRule,
) -> Result<(Vec<Complex64>, f64)> {
    let n = center.dim();
    let frame = unitary_frame(center)?;
    let tau = radius * radius;
    let k = b.components();
    let area: f64 = cap_integral(n, 1.0, tau, rule, |_| Ok(1.0))?;
    if area <= 0.0 {
        return Err(Error::InvalidArgument("empty boundary cap".into()));
    }
    let mut mean = Vec::with_capacity(k);
    for c in 0..k {
        let m: Complex64 = cap_integral(n, 1.0, tau, rule, |eta| {
            Ok(b.sample(&from_frame(&frame, eta))?[c])
        })?;
        mean.push(m / area);
    }
    let var: f64 = cap_integral(n, 1.0, tau, rule, |eta| {
        let v = b.sample(&from_frame(&frame, eta))?;
        Ok(v.iter()
            .zip(&mean)
            .map(|(x, m)| (x - m).norm_sqr())
            .sum::<f64>())
    })?;
    Ok((mean, (var / area).max(0.0).sqrt()))
}

/// `sup_{(η,δ)} sqrt(mean_{Q_δ(η)} |b − mean b|²)` over the grid.
pub fn bmo_norm(b: &(impl SampledField + ?Sized), grid: &CapGrid, rule: &SliceRule) -> Result<f64> {
    let vals: Vec<Result<f64>> = grid
        .caps()
        .par_iter()
        .map(|(c, d)| cap_oscillation(b, c, *d, rule).map(|x| x.1))
        .collect();
    let mut best = 0.0f64;
    for v in vals {
        best = best.max(v?);
    }
    Ok(best)
}

/// Both sides of the BMOA/Carleson comparison for a holomorphic tuple.
#[derive(Clone, Debug, Serialize)]
pub struct BmoaRatio {
    /// `cm_norm((1 − |z|²)^{n/2+1} g′)`.
    pub cm: f64,
    /// `bmo_norm(g|_{∂𝔹ₙ})`.
    pub bmo: f64,
    /// `cm / bmo`; `None` when degenerate.
    pub lower: Option<f64>,
    /// `bmo / cm`; `None` when degenerate.
    pub upper: Option<f64>,
}

impl BmoaRatio {
    pub fn is_degenerate(&self) -> bool {
        self.lower.is_none()
    }
}

/// The weighted derivative field `(1 − |z|²)^{n/2+1}·(∂_j g_i)_{i,j}`.
pub fn bmoa_witness(g: &VecHoloPoly) -> impl SampledField + '_ {
    let n = g.dim();
    let derivs: Vec<_> = g
        .components()
        .iter()
        .flat_map(|p| (0..n).map(move |j| p.d_holo(j)))
        .collect();
    FnField::new(derivs.len(), move |z: &CVector| {
        let w = (1.0 - z.norm_sqr()).powf(n as f64 / 2.0 + 1.0);
        Ok(derivs.iter().map(|d| d.eval(z) * w).collect())
    })
}

/// The same weighted derivative for a sampled tuple `f`, with `∂_j f_i` by
/// central differences whose step shrinks near the sphere.
pub fn sampled_bmoa_witness<'a, F: SampledField + ?Sized>(
    f: &'a F,
    n: usize,
    step: f64,
) -> impl SampledField + 'a {
    let k = f.components();
    FnField::new(k * n, move |z: &CVector| {
        let h = step.min((1.0 - z.norm()) / 4.0);
        let d = d_probe(f, z, h)?;
        let w = (1.0 - z.norm_sqr()).powf(n as f64 / 2.0 + 1.0);
        Ok(d.iter()
            .flat_map(|row| row.iter().map(move |c| c * w))
            .collect())
    })
}

pub fn bmoa_ratio(
    g: &VecHoloPoly,
    tents: &TentGrid,
    caps: &CapGrid,
    rule: &SliceRule,
) -> Result<BmoaRatio> {
    let cm = cm_norm(&bmoa_witness(g), tents, rule)?.value;
    let boundary = FnField::new(g.len(), |z: &CVector| Ok(g.eval(z)));
    let bmo = bmo_norm(&boundary, caps, rule)?;
    let scale = cm.max(bmo);
    let degenerate = scale == 0.0 || cm <= 1e-12 * scale || bmo <= 1e-12 * scale || !cm.is_finite();
    Ok(BmoaRatio {
        cm,
        bmo,
        lower: (!degenerate).then(|| cm / bmo),
        upper: (!degenerate).then(|| bmo / cm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::HoloPoly;

    fn re_z(z: &CVector) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(z[0].re, 0.0)])
    }

    #[test]
    fn constant_has_zero_oscillation() {
        let b = FnField::new(1, |_: &CVector| Ok(vec![Complex64::new(2.0, -1.0)]));
        let grid = CapGrid::default_for(2).unwrap();
        assert!(bmo_norm(&b, &grid, &SliceRule::coarse()).unwrap() < 1e-12);
    }

    #[test]
    fn real_part_on_circle() {
        // On an arc |α − θ| < a: mean cos = cos θ sin a / a and
        // mean cos² = 1/2 + cos 2θ sin 2a / (4a).
        let grid = CapGrid::default_for(1).unwrap();
        let mut want = 0.0f64;
        for (c, d) in grid.caps() {
            let theta = c[0].arg();
            let tau: f64 = d * d;
            let a = if tau >= 2.0 {
                std::f64::consts::PI
            } else {
                2.0 * (tau / 2.0).asin()
            };
            let m1 = theta.cos() * a.sin() / a;
            let m2 = 0.5 + (2.0 * theta).cos() * (2.0 * a).sin() / (4.0 * a);
            want = want.max((m2 - m1 * m1).sqrt());
        }
        let b = FnField::new(1, re_z);
        let got = bmo_norm(&b, &grid, &SliceRule::default()).unwrap();
        assert!(got > 0.0);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        let shifted = FnField::new(1, |z: &CVector| {
            Ok(vec![Complex64::new(z[0].re + 5.0, 1.0)])
        });
        assert!((bmo_norm(&shifted, &grid, &SliceRule::default()).unwrap() - got).abs() < 1e-10);
    }

    #[test]
    fn constant_g_is_degenerate() {
        let g = VecHoloPoly::new(vec![HoloPoly::constant(1, Complex64::new(1.0, 0.0))]).unwrap();
        let r = bmoa_ratio(
            &g,
            &TentGrid::default_for(1).unwrap(),
            &CapGrid::default_for(1).unwrap(),
            &SliceRule::coarse(),
        )
        .unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.cm, 0.0);
    }

    #[test]
    fn sampled_witness_matches_exact_derivative() {
        let p = HoloPoly::from_terms(
            1,
            &[
                (&[2], Complex64::new(1.0, 0.5)),
                (&[1], Complex64::new(-0.3, 0.0)),
            ],
        )
        .unwrap();
        let g = VecHoloPoly::new(vec![p]).unwrap();
        let exact = bmoa_witness(&g);
        let approx = sampled_bmoa_witness(&g, 1, 1e-3);
        for z in [
            CVector::real(&[0.3]),
            CVector::from_pairs(&[(-0.5, 0.7)]),
            CVector::real(&[0.9999]),
        ] {
            let (a, b) = (exact.sample(&z).unwrap(), approx.sample(&z).unwrap());
            assert!((a[0] - b[0]).norm() < 1e-10, "{z:?}");
        }
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let g = VecHoloPoly::new(vec![HoloPoly::coordinate(1, 0)
            .mul(&HoloPoly::coordinate(1, 0))
            .unwrap()])
        .unwrap();
        let tents = TentGrid::default_for(1).unwrap();
        let caps = CapGrid::default_for(1).unwrap();
        let rule = SliceRule::default();
        let a = bmoa_ratio(&g, &tents, &caps, &rule).unwrap();
        let b = bmoa_ratio(&g.scale(Complex64::new(7.0, 0.0)), &tents, &caps, &rule).unwrap();
        assert!((a.lower.unwrap() - b.lower.unwrap()).abs() < 1e-10 * a.lower.unwrap());
    }
}
