//! Integration over Carleson tents and non-isotropic boundary caps.
//!
//! Both regions are cut out by a condition `|1 − R·η₁| < τ` on a point `η` of
//! the unit sphere written in a unitary frame whose first vector is the
//! apex direction. For `n = 1` the admissible `η = e^{iα}` form an arc; for
//! `n = 2`, with `η = (√(1−s)e^{iα}, √s e^{iβ})` and surface measure
//! `½ ds dα dβ`, each `s` contributes an arc in `α` and a full circle in `β`.
//! Tents add a radial integral in `ρ = |z|`, graded toward the sphere so that
//! divergence at the boundary is detected rather than truncated.

use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};

use num_complex::Complex64;

use crate::ball::{CVector, Tent};
use crate::quadrature::{gauss_legendre, try_integrate_to_endpoint, GradedOptions};
use crate::{Error, Result};

/// Resolution of tent and cap integrals.
#[derive(Clone, Copy, Debug)]
pub struct SliceRule {
    /// Gauss points on each arc in `α` and on each `s` segment.
    pub angular: usize,
    /// Trapezoid points on the `β` circle (`n = 2`).
    pub torus: usize,
    /// Radial grading toward the sphere.
    pub graded: GradedOptions,
}

impl Default for SliceRule {
    fn default() -> Self {
        Self {
            angular: 24,
            torus: 16,
            graded: GradedOptions {
                rel_tol: 1e-9,
                ..GradedOptions::default()
            },
        }
    }
}

impl SliceRule {
    /// A cheaper rule for integrands that are themselves integrals.
    pub fn coarse() -> Self {
        Self {
            angular: 10,
            torus: 8,
            graded: GradedOptions {
                order: 5,
                rel_tol: 1e-6,
                ..GradedOptions::default()
            },
        }
    }
}

/// An orthonormal basis of `ℂⁿ` whose first vector is `xi/|xi|`.
pub fn unitary_frame(xi: &CVector) -> Result<Vec<CVector>> {
    let n = xi.dim();
    let norm = xi.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "frame direction must be nonzero".into(),
        ));
    }
    let mut basis = vec![xi.scale_real(1.0 / norm)];
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = CVector::axis(n, j, 1.0);
        for b in basis.clone() {
            // v ← v − ⟨v, b⟩ b
            let c: Complex64 = v
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| x * y.conj())
                .sum();
            v = &v - &b.scale(c);
        }
        let len = v.norm();
        if len > 1e-8 {
            basis.push(v.scale_real(1.0 / len));
        }
    }
    Ok(basis)
}

/// `Σ_j coords_j · frame_j`.
pub fn from_frame(frame: &[CVector], coords: &[Complex64]) -> CVector {
    let n = frame.len();
    let mut out = CVector::zeros(n);
    for (c, col) in coords.iter().zip(frame) {
        for k in 0..n {
            out.coords_mut()[k] += c * col[k];
        }
    }
    out
}

/// Half-width of the arc `{α : |1 − R e^{iα}| < τ}`, or `None` when empty.
fn half_width(r: f64, tau: f64) -> Option<f64> {
    if r <= 0.0 {
        return (tau > 1.0).then_some(PI);
    }
    let thr = (1.0 + r * r - tau * tau) / (2.0 * r);
    if thr >= 1.0 {
        None
    } else if thr <= -1.0 {
        Some(PI)
    } else {
        Some(thr.acos())
    }
}

/// Gauss pairs on `[a, b]` for an integrand with a square-root edge at `b`:
/// `s = a + (b − a)(1 − (1 − y)²)`.
fn edge_graded(a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    gauss_legendre(m, 0.0, 1.0)
        .map(|(y, w)| {
            (
                a + (b - a) * (1.0 - (1.0 - y) * (1.0 - y)),
                w * (b - a) * 2.0 * (1.0 - y),
            )
        })
        .collect()
}

/// Integrates `f(η)` over `{η ∈ S^{2n−1} : |1 − R η₁| < τ}` in frame
/// coordinates, `n ∈ {1, 2}`.
pub fn cap_integral<T, F>(n: usize, r: f64, tau: f64, rule: &SliceRule, mut f: F) -> Result<T>
where
    T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    F: FnMut(&[Complex64]) -> Result<T>,
{
    let mut acc = T::default();
    match n {
        1 => {
            if let Some(a) = half_width(r, tau) {
                for (al, w) in gauss_legendre(rule.angular, -a, a) {
                    acc += f(&[Complex64::from_polar(1.0, al)])? * w;
                }
            }
        }
        2 => {
            // Segments of s with an arc edge or a full-circle kink at an end.
            let mut segments: Vec<(f64, f64)> = Vec::new();
            if tau < 1.0 {
                if r <= 1.0 - tau {
                    return Ok(acc);
                }
                let s_max = (1.0 - ((1.0 - tau) / r).powi(2)).clamp(0.0, 1.0);
                segments.push((0.0, s_max));
            } else if r > tau - 1.0 {
                let s_k = (1.0 - ((tau - 1.0) / r).powi(2)).clamp(0.0, 1.0);
                segments.push((0.0, s_k));
                segments.push((s_k, 1.0));
            } else {
                segments.push((0.0, 1.0));
            }
            let dbeta = 2.0 * PI / rule.torus as f64;
            for (i, &(a, b)) in segments.iter().enumerate() {
                if b <= a {
                    continue;
                }
                let pairs = if i == 0 {
                    edge_graded(a, b, rule.angular)
                } else {
                    gauss_legendre(rule.angular, a, b).collect()
                };
                for (s, ws) in pairs {
                    let rs = (1.0 - s).max(0.0).sqrt();
                    let Some(half) = half_width(r * rs, tau) else {
                        continue;
                    };
                    for (al, wa) in gauss_legendre(rule.angular, -half, half) {
                        let e1 = Complex64::from_polar(rs, al);
                        for k in 0..rule.torus {
                            let be = (k as f64 + 0.5) * dbeta;
                            let e2 = Complex64::from_polar(s.sqrt(), be);
                            acc += f(&[e1, e2])? * (0.5 * ws * wa * dbeta);
                        }
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    }
    Ok(acc)
}

/// `∫_{S_ζ} f dV`, detecting divergence at the sphere.
pub fn tent_integral<F>(tent: &Tent, rule: &SliceRule, mut f: F) -> Result<f64>
where
    F: FnMut(&CVector) -> Result<f64>,
{
    let n = tent.dim();
    let zeta = tent.apex();
    let r = zeta.norm();
    let frame = unitary_frame(zeta)?;
    let tau = 2.0 * (1.0 - r);
    let rho_min = ((2.0 * r - 1.0) / r).max(0.0);
    let span = 1.0 - rho_min;
    try_integrate_to_endpoint(1.0, rule.graded, |y| {
        let rho = 1.0 - span * (2.0 * y - y * y);
        let jac = 2.0 * span * (1.0 - y);
        let inner: f64 = cap_integral(n, r * rho, tau, rule, |eta| {
            let scaled: Vec<Complex64> = eta.iter().map(|c| c * rho).collect();
            f(&from_frame(&frame, &scaled))
        })?;
        Ok(inner * rho.powi(2 * n as i32 - 1) * jac)
    })
}

/// A finite set of tents standing in for the supremum over all apexes.
#[derive(Clone, Debug)]
pub struct TentGrid {
    tents: Vec<Tent>,
}

/// Deterministic, well-spread unit vectors in `ℂⁿ` (`n ≤ 2`).
pub fn sphere_directions(n: usize, count: usize) -> Result<Vec<CVector>> {
    match n {
        1 => Ok((0..count)
            .map(|k| {
                CVector::new([Complex64::from_polar(
                    1.0,
                    2.0 * PI * (k as f64 + 0.25) / count as f64,
                )])
            })
            .collect()),
        2 => {
            let phi = 0.618_033_988_749_894_9_f64;
            Ok((0..count)
                .map(|k| {
                    let s = (k as f64 + 0.5) / count as f64;
                    let a = 2.0 * PI * (k as f64 * phi).fract();
                    let b = 2.0 * PI * (k as f64 * phi * phi + 0.3).fract();
                    CVector::new([
                        Complex64::from_polar((1.0 - s).sqrt(), a),
                        Complex64::from_polar(s.sqrt(), b),
                    ])
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

impl TentGrid {
    pub fn new(tents: Vec<Tent>) -> Self {
        Self { tents }
    }

    /// `directions` apex directions times depths `1 − |ζ| = 2^{−j}`,
    /// `j = 1..=levels`.
    pub fn standard(n: usize, directions: usize, levels: u32) -> Result<Self> {
        let mut tents = Vec::new();
        for xi in sphere_directions(n, directions)? {
            for j in 1..=levels {
                tents.push(Tent::new(xi.scale_real(1.0 - 0.5f64.powi(j as i32)))?);
            }
        }
        Ok(Self { tents })
    }

    /// 8 directions × 6 depths for `n = 1`, 16 × 6 for `n = 2`.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::standard(n, if n == 1 { 8 } else { 16 }, 6)
    }

    /// Tents near the boundary point `xi`: depths `δ·2^k` for
    /// `k ∈ {−1, …, 4}` (capped at `1/2`), each at the direction of `xi` and
    /// rotated by `±` its depth, for `n = 1`. For `n = 2` the rotation acts
    /// in the first frame coordinate.
    pub fn around(xi: &CVector, delta: f64) -> Result<Self> {
        let frame = unitary_frame(xi)?;
        let n = xi.dim();
        let mut tents = Vec::new();
        let mut depths: Vec<f64> = (-1..=4).map(|k| (delta * 2f64.powi(k)).min(0.5)).collect();
        depths.dedup();
        for d in depths {
            for sgn in [0.0, 1.0, -1.0] {
                let mut coords = vec![Complex64::new(0.0, 0.0); n];
                coords[0] = Complex64::from_polar(1.0 - d, sgn * d);
                tents.push(Tent::new(from_frame(&frame, &coords))?);
            }
        }
        Ok(Self { tents })
    }

    pub fn tents(&self) -> &[Tent] {
        &self.tents
    }

    pub fn len(&self) -> usize {
        self.tents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tents.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{sample_ball, tent_contains};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Area of the intersection of two discs (radii `a`, `b`, centre distance `d`).
    fn lens_area(a: f64, b: f64, d: f64) -> f64 {
        if d >= a + b {
            return 0.0;
        }
        if d <= (a - b).abs() {
            return PI * a.min(b).powi(2);
        }
        let t1 = ((d * d + a * a - b * b) / (2.0 * d * a)).acos();
        let t2 = ((d * d + b * b - a * a) / (2.0 * d * b)).acos();
        a * a * t1 + b * b * t2
            - 0.5 * ((-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b)).sqrt()
    }

    #[test]
    fn frame_is_unitary() {
        let xi = CVector::from_pairs(&[(0.3, -0.4), (0.5, 0.2)]);
        let f = unitary_frame(&xi).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let ip: Complex64 = f[i]
                    .coords()
                    .iter()
                    .zip(f[j].coords())
                    .map(|(x, y)| x * y.conj())
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).norm() < 1e-14);
            }
        }
        let e1 = from_frame(&f, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((&e1 - &xi.scale_real(1.0 / xi.norm())).norm() < 1e-14);
    }

    #[test]
    fn disk_tent_area_matches_lens() {
        // In the disk S_ζ is the unit disc cut by the disc of centre ξ/r and
        // radius 2(1 − r)/r.
        for (r, ang) in [(0.5, 0.0), (0.75, 1.0), (0.9, -2.0), (0.99, 0.3)] {
            let tent = Tent::new(CVector::new([Complex64::from_polar(r, ang)])).unwrap();
            let got = tent_integral(&tent, &SliceRule::default(), |_| Ok(1.0)).unwrap();
            let want = lens_area(1.0, 2.0 * (1.0 - r) / r, 1.0 / r);
            assert!((got - want).abs() < 1e-7 * want, "r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn disk_cap_is_arc() {
        // R = 1: |1 − e^{iα}| < τ ⇔ |α| < 2 arcsin(τ/2).
        for tau in [0.1, 0.5, 1.5] {
            let got: f64 = cap_integral(1, 1.0, tau, &SliceRule::default(), |_| Ok(1.0)).unwrap();
            assert!((got - 4.0 * (tau / 2.0f64).asin()).abs() < 1e-12);
        }
        let all: f64 = cap_integral(1, 1.0, 2.5, &SliceRule::default(), |_| Ok(1.0)).unwrap();
        assert!((all - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_cap_measure_n2() {
        // Whole S³ has area 2π²; the cap |1 − η₁| < τ with τ < 1 has area
        // ∫∫_{|1−u|<τ, |u|≤1} 2π du, i.e. 2π times the lens of the unit disc and
        // the disc of radius τ centred at 1.
        let rule = SliceRule::default();
        let all: f64 = cap_integral(2, 1.0, 3.0, &rule, |_| Ok(1.0)).unwrap();
        assert!((all - 2.0 * PI * PI).abs() < 1e-10);
        for tau in [0.2, 0.7, 1.3] {
            let got: f64 = cap_integral(2, 1.0, tau, &rule, |_| Ok(1.0)).unwrap();
            let want = 2.0 * PI * lens_area(1.0, tau, 1.0);
            assert!((got - want).abs() < 1e-6 * want, "τ={tau}: {got} vs {want}");
        }
    }

    #[test]
    fn n2_tent_volume_matches_monte_carlo() {
        let tent = Tent::new(CVector::from_pairs(&[(0.6, 0.1), (-0.2, 0.3)])).unwrap();
        let got = tent_integral(&tent, &SliceRule::default(), |_| Ok(1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let count = 400_000;
        let hits = (0..count)
            .filter(|_| tent_contains(&tent, &sample_ball(&mut rng, 2, 1.0)))
            .count();
        let p = hits as f64 / count as f64;
        let vol = PI * PI / 2.0;
        let sigma = vol * (p * (1.0 - p) / count as f64).sqrt();
        assert!((got - p * vol).abs() < 5.0 * sigma, "{got} vs {}", p * vol);
    }

    #[test]
    fn divergence_is_detected() {
        let tent = Tent::new(CVector::real(&[0.75])).unwrap();
        let r = tent_integral(&tent, &SliceRule::default(), |z| {
            Ok(1.0 / (1.0 - z.norm_sqr()))
        });
        assert!(matches!(r, Err(Error::Divergent(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(TentGrid::default_for(1).unwrap().len(), 48);
        assert_eq!(TentGrid::default_for(2).unwrap().len(), 96);
        let g = TentGrid::around(&CVector::real(&[1.0]), 1e-2).unwrap();
        assert_eq!(g.len(), 18);
        for t in g.tents() {
            assert!(t.apex().norm() >= 0.5);
        }
    }
}
