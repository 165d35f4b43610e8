//! Geometry of the unit ball 𝔹ₙ ⊂ ℂⁿ.
//!
//! Conventions: `pairing(w, z) = Σ w_j·conj(z_j)`, so `⟨w, z⟩` is linear in
//! the first slot. Tents, the quasi-distance `Δ` and the Möbius magnitude are
//! all written in terms of this pairing.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::{Error, Result};

/// Tolerance for the boundary predicate `||z| − 1| < BOUNDARY_TOL`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// A point of ℂⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVector(SmallVec<[Complex64; 3]>);

impl CVector {
    pub fn new(coords: impl IntoIterator<Item = Complex64>) -> Self {
        Self(coords.into_iter().collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(SmallVec::from_elem(Complex64::new(0.0, 0.0), n))
    }

    /// Builds a point from real pairs `(re, im)`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self(
            pairs
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }

    /// Builds a point with real coordinates.
    pub fn real(coords: &[f64]) -> Self {
        Self(coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The `j`-th standard basis vector of ℂⁿ scaled by `r`.
    pub fn axis(n: usize, j: usize, r: f64) -> Self {
        let mut v = Self::zeros(n);
        v.0[j] = Complex64::new(r, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    /// Returns a copy with coordinate `j` shifted by `dz`.
    pub fn shifted(&self, j: usize, dz: Complex64) -> Self {
        let mut v = self.clone();
        v.0[j] += dz;
        v
    }

    pub fn is_interior(&self) -> bool {
        self.norm_sqr() < 1.0
    }

    pub fn is_on_boundary(&self) -> bool {
        (self.norm() - 1.0).abs() < BOUNDARY_TOL
    }

    /// Flattened `[re₁, im₁, re₂, im₂, …]` representation.
    pub fn to_flat(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 || flat.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "flat point needs an even, nonzero length, got {}",
                flat.len()
            )));
        }
        Ok(Self(
            flat.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect(),
        ))
    }

    pub(crate) fn check_dim(&self, other: &CVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &CVector {
    type Output = CVector;

    fn add(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;

    fn sub(self, rhs: &CVector) -> CVector {
        CVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CVector {
    type Output = CVector;

    fn mul(self, rhs: f64) -> CVector {
        self.scale_real(rhs)
    }
}

/// `⟨w, z⟩ = Σ_j w_j·conj(z_j)`.
pub fn pairing(w: &CVector, z: &CVector) -> Result<Complex64> {
    w.check_dim(z)?;
    Ok(pairing_unchecked(w, z))
}

#[inline]
pub(crate) fn pairing_unchecked(w: &CVector, z: &CVector) -> Complex64 {
    w.0.iter().zip(&z.0).map(|(a, b)| a * b.conj()).sum()
}

/// `Δ(w, z) = |1 − ⟨w, z⟩|² − (1 − |w|²)(1 − |z|²)`.
///
/// Evaluated through the equivalent split
/// `Δ = |(z − w)_∥|² + (1 − |w|²)·|(z − w)_⊥|²` (components relative to the
/// complex line through `w`), which is free of cancellation and manifestly
/// nonnegative inside the closed ball.
pub fn delta(w: &CVector, z: &CVector) -> f64 {
    debug_assert_eq!(w.dim(), z.dim());
    let d = z - w;
    let d2 = d.norm_sqr();
    let w2 = w.norm_sqr();
    if w2 == 0.0 {
        return d2;
    }
    let par2 = pairing_unchecked(&d, w).norm_sqr() / w2;
    let perp2 = (d2 - par2).max(0.0);
    par2 + (1.0 - w2) * perp2
}

/// `Δ(w, z)` evaluated literally from its defining expression.
pub fn delta_direct(w: &CVector, z: &CVector) -> f64 {
    let one_minus = Complex64::new(1.0, 0.0) - pairing_unchecked(w, z);
    one_minus.norm_sqr() - (1.0 - w.norm_sqr()) * (1.0 - z.norm_sqr())
}

/// The involutive automorphism `φ_w` of the ball, evaluated at `z`.
///
/// `φ_w(z) = (w − P_w z − s_w Q_w z) / (1 − ⟨z, w⟩)` with `s_w = √(1 − |w|²)`,
/// `P_w` the orthogonal projection onto `ℂw` and `Q_w = I − P_w`.
pub fn mobius(w: &CVector, z: &CVector) -> Result<CVector> {
    w.check_dim(z)?;
    let w2 = w.norm_sqr();
    if w2 >= 1.0 {
        return Err(Error::OutsideBall { norm: w2.sqrt() });
    }
    let denom = Complex64::new(1.0, 0.0) - pairing_unchecked(z, w);
    if w2 == 0.0 {
        return Ok(z.scale_real(-1.0));
    }
    let s = (1.0 - w2).sqrt();
    let pz = w.scale(pairing_unchecked(z, w) / w2);
    let qz = z - &pz;
    let num = &(w - &pz) - &qz.scale_real(s);
    Ok(num.scale(1.0 / denom))
}

/// `|φ_w(z)|`, computed from the automorphism itself.
pub fn mobius_magnitude(w: &CVector, z: &CVector) -> Result<f64> {
    if w == z {
        return Ok(0.0);
    }
    Ok(mobius(w, z)?.norm())
}

/// Density of the invariant measure: `dλₙ = (1 − |z|²)^{−n−1} dV`.
pub fn lambda_weight(z: &CVector) -> Result<f64> {
    let r2 = z.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::OutsideBall { norm: r2.sqrt() });
    }
    Ok((1.0 - r2).powi(-(z.dim() as i32) - 1))
}

/// Non-isotropic boundary ball: `ξ ∈ Q_δ(η)` iff `|1 − ⟨ξ, η⟩| < δ²`.
pub fn qball_contains(eta: &CVector, radius: f64, xi: &CVector) -> Result<bool> {
    eta.check_dim(xi)?;
    for p in [eta, xi] {
        if !p.is_on_boundary() {
            return Err(Error::NotOnBoundary { norm: p.norm() });
        }
    }
    let d = (Complex64::new(1.0, 0.0) - pairing_unchecked(xi, eta)).norm();
    Ok(d < radius * radius)
}

/// A Carleson tent `S_ζ = {z : (1 − |ζ|) / |1 − ⟨z, ζ⟩| > 1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tent {
    apex: CVector,
}

impl Tent {
    pub fn new(apex: CVector) -> Result<Self> {
        let r = apex.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidApex { norm: r });
        }
        Ok(Self { apex })
    }

    pub fn apex(&self) -> &CVector {
        &self.apex
    }

    /// Distance `δ = 1 − |ζ|` of the apex to the boundary.
    pub fn depth(&self) -> f64 {
        1.0 - self.apex.norm()
    }

    pub fn dim(&self) -> usize {
        self.apex.dim()
    }

    pub fn contains(&self, z: &CVector) -> bool {
        let d = (Complex64::new(1.0, 0.0) - pairing_unchecked(z, &self.apex)).norm();
        2.0 * self.depth() > d
    }

    /// Largest admissible chain index `⌊log₂(1/δ)⌋`.
    pub fn max_chain_index(&self) -> u32 {
        (1.0 / self.depth()).log2().floor().max(0.0) as u32
    }

    /// The point `ζ_k = ((1 − 2^k δ)/(1 − δ)) ζ` on the ray through the apex,
    /// `2^k` times as far from the boundary as `ζ`.
    pub fn chain_point(&self, k: u32) -> Result<CVector> {
        let max = self.max_chain_index();
        if k > max {
            return Err(Error::ChainIndex { k, max });
        }
        let d = self.depth();
        let s = (1.0 - 2f64.powi(k as i32) * d) / (1.0 - d);
        Ok(self.apex.scale_real(s))
    }

    /// The tent with apex `ζ_k`; fails when `ζ_k` is the origin.
    pub fn chain_tent(&self, k: u32) -> Result<Tent> {
        Tent::new(self.chain_point(k)?)
    }
}

pub fn tent_contains(t: &Tent, z: &CVector) -> bool {
    t.contains(z)
}

pub fn tent_chain(t: &Tent, k: u32) -> Result<CVector> {
    t.chain_point(k)
}

/// Uniform sample of the unit sphere `∂𝔹ₙ`.
pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = CVector::new(
            (0..n).map(|_| Complex64::new(standard_normal(rng), standard_normal(rng))),
        );
        let r = v.norm();
        if r > 1e-12 {
            return v.scale_real(1.0 / r);
        }
    }
}

/// Uniform sample of the ball `{|z| < radius}` in ℂⁿ.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> CVector {
    let dir = sample_sphere(rng, n);
    let u: f64 = rng.gen();
    dir.scale_real(radius * u.powf(1.0 / (2 * n) as f64))
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pairing_examples() {
        let z0 = CVector::zeros(2);
        assert_eq!(pairing(&z0, &z0).unwrap(), c(0.0, 0.0));
        let e1 = CVector::axis(2, 0, 1.0);
        let e2 = CVector::axis(2, 1, 1.0);
        assert_eq!(pairing(&e1, &e2).unwrap(), c(0.0, 0.0));
        let w = CVector::new([c(0.5, 0.0), c(0.0, 0.5)]);
        let z = CVector::new([c(0.0, 0.5), c(0.5, 0.0)]);
        // 0.5·conj(0.5i) + 0.5i·conj(0.5) = −0.25i + 0.25i
        let p = pairing(&w, &z).unwrap();
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn pairing_rejects_mismatch() {
        let err = pairing(&CVector::zeros(1), &CVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn delta_examples() {
        let w = CVector::real(&[0.5, 0.0]);
        let z = CVector::real(&[0.0, 0.5]);
        assert!((delta(&w, &z) - 0.4375).abs() < 1e-15);
        assert!((delta_direct(&w, &z) - 0.4375).abs() < 1e-15);
        assert_eq!(delta(&w, &w), 0.0);
        let z = CVector::new([c(0.3, -0.2), c(0.1, 0.4)]);
        assert!((delta(&CVector::zeros(2), &z) - z.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let z = CVector::new([c(0.3, -0.2), c(0.1, 0.4)]);
        assert_eq!(mobius_magnitude(&z, &z).unwrap(), 0.0);
        let m = mobius_magnitude(&CVector::zeros(2), &z).unwrap();
        assert!((m - z.norm()).abs() < 1e-15);
        // φ_w is an involution.
        let w = CVector::new([c(-0.2, 0.1), c(0.5, 0.2)]);
        let back = mobius(&w, &mobius(&w, &z).unwrap()).unwrap();
        assert!((&back - &z).norm() < 1e-13);
    }

    #[test]
    fn mobius_magnitude_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let w = sample_ball(&mut rng, 2, 0.99);
            let z = sample_ball(&mut rng, 2, 0.99);
            let a = mobius_magnitude(&w, &z).unwrap();
            let b = mobius_magnitude(&z, &w).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            assert!(a < 1.0);
        }
    }

    #[test]
    fn tent_membership() {
        let t = Tent::new(CVector::real(&[0.4])).unwrap();
        assert!(t.contains(&CVector::zeros(1)));
        let t = Tent::new(CVector::real(&[0.6])).unwrap();
        assert!(!t.contains(&CVector::zeros(1)));
        let apex = CVector::new([c(0.1, 0.7), c(-0.3, 0.2)]);
        let t = Tent::new(apex.clone()).unwrap();
        assert!(t.contains(&apex));
        assert!(matches!(
            Tent::new(CVector::zeros(2)),
            Err(Error::InvalidApex { .. })
        ));
    }

    #[test]
    fn tent_chain_examples() {
        let t = Tent::new(CVector::real(&[0.875])).unwrap();
        assert_eq!(t.chain_point(0).unwrap(), *t.apex());
        assert_eq!(t.max_chain_index(), 3);
        assert!(t.chain_point(3).unwrap().norm() < 1e-15);
        assert!(matches!(t.chain_point(4), Err(Error::ChainIndex { .. })));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let apex =
                sample_sphere(&mut rng, 2).scale_real(1.0 - 10f64.powf(-rng.gen_range(0.5..4.0)));
            let t = Tent::new(apex).unwrap();
            let k = rng.gen_range(0..=t.max_chain_index());
            let zk = t.chain_point(k).unwrap();
            let lhs = 1.0 - zk.norm();
            let rhs = 2f64.powi(k as i32) * t.depth();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn lambda_weight_examples() {
        assert_eq!(lambda_weight(&CVector::zeros(3)).unwrap(), 1.0);
        let z = CVector::real(&[0.5f64.sqrt()]);
        assert!((lambda_weight(&z).unwrap() - 4.0).abs() < 1e-12);
        let z = CVector::real(&[0.75f64.sqrt(), 0.0]);
        assert!((lambda_weight(&z).unwrap() - 64.0).abs() < 1e-9);
        assert!(lambda_weight(&CVector::real(&[1.0])).is_err());
    }

    #[test]
    fn qball_examples() {
        let eta = CVector::real(&[1.0]);
        assert!(qball_contains(&eta, 0.1, &eta).unwrap());
        let xi = CVector::real(&[-1.0]);
        assert!(!qball_contains(&eta, 1.0, &xi).unwrap());
        assert!(qball_contains(&eta, 0.5, &CVector::real(&[0.5])).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let z = CVector::new([c(0.1, -0.2), c(0.3, 0.4)]);
        assert_eq!(CVector::from_flat(&z.to_flat()).unwrap(), z);
        assert!(CVector::from_flat(&[1.0]).is_err());
    }
}
