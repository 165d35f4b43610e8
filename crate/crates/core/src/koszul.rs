//! Koszul-complex forms built from corona data `g = (g₁, …, g_N)`.
//!
//! With `Ω₀¹ = ḡ/|g|²` and `Ω̃(i; m) = conj(∂g_i/∂z_m)/|g|²`, the forms
//!
//! ```text
//! Ω_ℓ = κ_ℓ · Ω₀¹ ∧ Ω̃ ∧ ⋯ ∧ Ω̃   (ℓ copies of Ω̃),   κ_ℓ = (−1)^{ℓ(ℓ+1)/2}
//! ```
//!
//! satisfy the chain identity `∂̄Ω_ℓ = Λ_g Ω_{ℓ+1}` under the sign
//! conventions of [`crate::tensor`]. For `ℓ = 1` this reproduces
//! `Ω₁(j, k) = conj(g_k ∂g_j − g_j ∂g_k)/|g|⁴`.
//!
//! The normalisation `−(ℓ+1)·Ω₀¹ ∧ Ω̃^ℓ` that appears in the literature uses
//! a different scaling of wedge products. The ratio between that convention
//! and the one used here is [`convention_factor`]`(ℓ) = −(ℓ+1)κ_ℓ`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::ball::CVector;
use crate::holo::{d_vector, VecHoloPoly};
use crate::tensor::{
    contract_values, signed_permutations, tensor_norm, wedge, AltTensor, IncIndex,
};
use crate::{Error, Result};

/// Default finite-difference step for `∂̄` checks.
pub const FD_STEP: f64 = 1e-4;

/// Corona data: generators `g` with `Σ|g_j|² ≥ δ²` on the ball.
#[derive(Clone, Debug)]
pub struct CoronaData {
    g: VecHoloPoly,
    delta: f64,
    dg: Vec<Vec<crate::holo::HoloPoly>>,
}

/// Summary of a sampled check of the corona condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoronaBounds {
    /// Smallest sampled `Σ|g_j|²`.
    pub min_norm_sqr: f64,
    /// Largest sampled `Σ|g_j|²`.
    pub max_norm_sqr: f64,
}

/// Samples `Σ|g_j|²` over the closed ball: a polar grid for `n = 1`, a
/// deterministic quasi-random cloud plus sphere points otherwise.
pub fn sample_corona_bounds(g: &VecHoloPoly, density: usize) -> CoronaBounds {
    let n = g.dim();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut visit = |z: &CVector| {
        let v = g.norm_sqr_at(z);
        lo = lo.min(v);
        hi = hi.max(v);
    };
    if n == 1 {
        let radii = density.max(4);
        let angles = 4 * density.max(4);
        for a in 0..=radii {
            let r = a as f64 / radii as f64;
            for b in 0..angles {
                let th = 2.0 * std::f64::consts::PI * b as f64 / angles as f64;
                visit(&CVector::new([Complex64::from_polar(r, th)]));
            }
        }
    } else {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let count = density.pow(2).max(256) * n;
        for _ in 0..count {
            visit(&crate::ball::sample_ball(&mut rng, n, 1.0));
            visit(&crate::ball::sample_sphere(&mut rng, n));
        }
    }
    CoronaBounds {
        min_norm_sqr: lo,
        max_norm_sqr: hi,
    }
}

impl CoronaData {
    /// Wraps `g` with a declared `δ`, checking `Σ|g_j|² ≥ δ²` on a sample grid.
    pub fn new(g: VecHoloPoly, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "δ must be positive, got {delta}"
            )));
        }
        let bounds = sample_corona_bounds(&g, 48);
        if bounds.min_norm_sqr < delta * delta * (1.0 - 1e-9) {
            return Err(Error::CoronaViolation {
                value: bounds.min_norm_sqr,
                guard: delta * delta,
            });
        }
        Ok(Self::unchecked(g, delta))
    }

    /// Wraps `g`, taking `δ² = min Σ|g_j|²` over a dense sample of the closed
    /// ball.
    pub fn from_generators(g: VecHoloPoly) -> Result<Self> {
        let bounds = sample_corona_bounds(&g, 96);
        if !(bounds.min_norm_sqr > 0.0) {
            return Err(Error::CoronaViolation {
                value: bounds.min_norm_sqr,
                guard: 0.0,
            });
        }
        Ok(Self::unchecked(g, bounds.min_norm_sqr.sqrt()))
    }

    fn unchecked(g: VecHoloPoly, delta: f64) -> Self {
        let dg = g
            .components()
            .iter()
            .map(|p| (0..p.dim()).map(|m| p.d_holo(m)).collect())
            .collect();
        Self { g, delta, dg }
    }

    pub fn g(&self) -> &VecHoloPoly {
        &self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of variables `n`.
    pub fn n(&self) -> usize {
        self.g.dim()
    }

    /// Number of generators `N`.
    pub fn big_n(&self) -> usize {
        self.g.len()
    }

    /// `g(z)` and `|g(z)|²`, failing below the guard `|g|² ≥ δ²/4`.
    pub fn guarded_values(&self, z: &CVector) -> Result<(Vec<Complex64>, f64)> {
        let v = self.g.eval(z);
        let s: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let guard = 0.25 * self.delta * self.delta;
        if !(s >= guard) {
            return Err(Error::CoronaViolation { value: s, guard });
        }
        Ok((v, s))
    }

    /// `∂g_i/∂z_m (z)` as `out[i][m]`.
    pub fn jacobian(&self, z: &CVector) -> Vec<Vec<Complex64>> {
        self.dg
            .iter()
            .map(|row| row.iter().map(|p| p.eval(z)).collect())
            .collect()
    }
}

/// `κ_ℓ = (−1)^{ℓ(ℓ+1)/2}`.
pub fn kappa(ell: usize) -> f64 {
    if (ell * (ell + 1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Ratio between the `−(ℓ+1)·Ω₀¹ ∧ Ω̃^ℓ` normalisation and [`omega`].
pub fn convention_factor(ell: usize) -> f64 {
    -((ell + 1) as f64) * kappa(ell)
}

/// The constant `c` with `Ω₁ = c·Ω₀¹ ∧ Ω̃`, measured once on the instance
/// `n = 1`, `g = (z, 1/2)`, `z₀ = 0.3` against the componentwise formula
/// `Ω₁(1, 2) = conj(g₂ ∂g₁ − g₁ ∂g₂)/|g|⁴`.
pub fn measured_kappa1() -> f64 {
    static MEASURED: OnceLock<f64> = OnceLock::new();
    *MEASURED.get_or_init(|| {
        let g = VecHoloPoly::new(vec![
            crate::holo::HoloPoly::coordinate(1, 0),
            crate::holo::HoloPoly::constant(1, Complex64::new(0.5, 0.0)),
        ])
        .expect("two generators");
        let d = CoronaData::unchecked(g, 0.5);
        let z0 = CVector::real(&[0.3]);
        let w = wedge_power(&d, 1, &z0, false).expect("instance satisfies the guard");
        let key = (IncIndex::new(&[0, 1]).unwrap(), IncIndex::single(0));
        let raw = w.get(&key.0, &key.1);
        let s = 0.09 + 0.25;
        let direct = Complex64::new(0.5 * 1.0 - 0.3 * 0.0, 0.0).conj() / (s * s);
        let c = direct / raw;
        assert!(
            c.im.abs() < 1e-12 && (c.re.abs() - 1.0).abs() < 1e-12,
            "wedge and componentwise Ω₁ disagree beyond a sign: {c}"
        );
        c.re
    })
}

/// `Ω₀¹(z) = ḡ(z)/|g(z)|²` as a 1-tensor of functions.
pub fn omega01(d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    let (v, s) = d.guarded_values(z)?;
    let comps: Vec<Complex64> = v.iter().map(|c| c.conj() / s).collect();
    Ok(AltTensor::vector(d.n(), &comps))
}

fn tilde_from_jacobian(n: usize, jac: &[Vec<Complex64>], s: f64) -> AltTensor {
    let mut t = AltTensor::zero(jac.len(), n, 1, 1).expect("rank 1, degree 1");
    for (i, row) in jac.iter().enumerate() {
        for (m, c) in row.iter().enumerate() {
            t.set(IncIndex::single(i), IncIndex::single(m), c.conj() / s);
        }
    }
    t
}

fn d_jacobian(d: &CoronaData, z: &CVector) -> Vec<Vec<Complex64>> {
    d.jacobian(z).iter().map(|row| d_vector(row, z)).collect()
}

/// `Ω̃(i; m) = conj(∂_m g_i)/|g|²`.
pub fn omega_tilde(d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    let (_, s) = d.guarded_values(z)?;
    Ok(tilde_from_jacobian(d.n(), &d.jacobian(z), s))
}

/// `Ω̃` with each `∂g_i` replaced by `D g_i(z)`.
pub fn omega_hat_tilde(d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    let (_, s) = d.guarded_values(z)?;
    Ok(tilde_from_jacobian(d.n(), &d_jacobian(d, z), s))
}

fn check_level(d: &CoronaData, ell: usize) -> Result<()> {
    if ell > d.n() || ell + 1 > d.big_n() {
        return Err(Error::DegreeOverflow(format!(
            "Ω_{ell} needs ℓ ≤ n = {} and ℓ + 1 ≤ N = {}",
            d.n(),
            d.big_n()
        )));
    }
    Ok(())
}

/// Whether `Ω_ℓ` is a nonzero object for this data (`ℓ ≤ n`, `ℓ + 1 ≤ N`).
pub fn level_exists(d: &CoronaData, ell: usize) -> bool {
    check_level(d, ell).is_ok()
}

/// `Ω₀¹ ∧ Ω̃^ℓ` without the sign `κ_ℓ`.
pub fn wedge_power(d: &CoronaData, ell: usize, z: &CVector, hat: bool) -> Result<AltTensor> {
    check_level(d, ell)?;
    let mut acc = omega01(d, z)?;
    if ell == 0 {
        return Ok(acc);
    }
    let tilde = if hat {
        omega_hat_tilde(d, z)?
    } else {
        omega_tilde(d, z)?
    };
    for _ in 0..ell {
        acc = wedge(&acc, &tilde)?;
    }
    Ok(acc)
}

/// `Ω_ℓ^{ℓ+1}(z)`, an `(ℓ+1)`-tensor of `(0,ℓ)`-forms.
pub fn omega(ell: usize, d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    let w = wedge_power(d, ell, z, false)?;
    Ok(w.scale(Complex64::new(signed_kappa(ell), 0.0)))
}

/// `Ω̂_ℓ^{ℓ+1}(z)`: [`omega`] with `∂` replaced by the derivative `D`.
pub fn omega_hat(ell: usize, d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    let w = wedge_power(d, ell, z, true)?;
    Ok(w.scale(Complex64::new(signed_kappa(ell), 0.0)))
}

fn signed_kappa(ell: usize) -> f64 {
    if ell == 1 {
        measured_kappa1()
    } else {
        kappa(ell)
    }
}

/// `Ω_ℓ` entry by entry from the permutation expansion
/// `κ_ℓ Σ_{π, ρ} sgn π sgn ρ ḡ_{k_{π0}} Π_i conj(∂_{l_{ρ(i−1)}} g_{k_{πi}}) / |g|^{2(ℓ+1)}`,
/// independent of the wedge machinery.
pub fn omega_direct(ell: usize, d: &CoronaData, z: &CVector) -> Result<AltTensor> {
    check_level(d, ell)?;
    let (v, s) = d.guarded_values(z)?;
    let jac = d.jacobian(z);
    let mut out = AltTensor::zero(d.big_n(), d.n(), ell + 1, ell)?;
    let perms_k = signed_permutations(ell + 1);
    let perms_l = signed_permutations(ell);
    let scale = kappa(ell) / s.powi(ell as i32 + 1);
    for k in IncIndex::all(d.big_n(), ell + 1) {
        let kv = k.to_vec();
        for l in IncIndex::all(d.n(), ell) {
            let lv = l.to_vec();
            let mut acc = Complex64::new(0.0, 0.0);
            for (pi, spi) in &perms_k {
                let head = v[kv[pi[0]]].conj();
                for (rho, srho) in &perms_l {
                    let mut prod = head;
                    for i in 0..ell {
                        prod *= jac[kv[pi[i + 1]]][lv[rho[i]]].conj();
                    }
                    acc += prod * (spi * srho);
                }
            }
            out.set(k.clone(), l, acc * scale);
        }
    }
    Ok(out)
}

/// Fourth-order central-difference `∂̄` of a tensor-valued field at `z`.
///
/// The `(0,q)` coefficients `T(I; L)` become the `(0,q+1)` coefficients
/// `(∂̄T)(I; K) = Σ_{m ⊔ L = K} sign(m, L)·∂T(I; L)/∂z̄_m`.
pub fn dbar_tensor<F>(f: F, z: &CVector, h: f64) -> Result<AltTensor>
where
    F: Fn(&CVector) -> Result<AltTensor>,
{
    let margin = 1.0 - z.norm();
    if !(h > 0.0) || margin <= 2.0 * h {
        return Err(Error::StepTooLarge { step: h, margin });
    }
    let n = z.dim();
    let center = f(z)?;
    let mut out = AltTensor::zero(center.big_n(), n, center.rank(), center.degree() + 1)?;
    let i_unit = Complex64::new(0.0, 1.0);
    for m in 0..n {
        let sample = |dir: Complex64| -> Result<Vec<AltTensor>> {
            [1.0, -1.0, 2.0, -2.0]
                .iter()
                .map(|&t| f(&z.shifted(m, dir * (t * h))))
                .collect()
        };
        let sx = sample(Complex64::new(1.0, 0.0))?;
        let sy = sample(i_unit)?;
        let stencil = |s: &[AltTensor]| -> Result<AltTensor> {
            let a = s[0].sub(&s[1])?.scale(Complex64::new(8.0, 0.0));
            let b = s[2].sub(&s[3])?;
            Ok(a.sub(&b)?.scale(Complex64::new(1.0 / (12.0 * h), 0.0)))
        };
        let dx = stencil(&sx)?;
        let dy = stencil(&sy)?;
        let dzbar = dx.add(&dy.scale(i_unit))?.scale(Complex64::new(0.5, 0.0));
        for ((i, l), c) in dzbar.entries() {
            if let Some((k, sign)) = IncIndex::single(m).merge(l) {
                out.add_to(i.clone(), k, c * sign);
            }
        }
    }
    Ok(out)
}

/// `max |∂̄Ω_q − Λ_gΩ_{q+1}|` over entries at `z`, with `∂̄` by finite
/// differences of step `h`. Levels beyond `N` count as zero.
pub fn koszul_residual(q: usize, d: &CoronaData, z: &CVector, h: f64) -> Result<f64> {
    if q + 1 > d.n() {
        return Err(Error::InvalidArgument(format!(
            "q = {q} must satisfy q ≤ n − 1 = {}",
            d.n() - 1
        )));
    }
    if !level_exists(d, q) {
        return Ok(0.0);
    }
    let lhs = dbar_tensor(|w| omega(q, d, w), z, h)?;
    let rhs = if level_exists(d, q + 1) {
        let (g, _) = d.guarded_values(z)?;
        contract_values(&omega(q + 1, d, z)?, &g)?
    } else {
        AltTensor::zero(lhs.big_n(), lhs.n(), lhs.rank(), lhs.degree())?
    };
    Ok(lhs.sub(&rhs)?.max_abs())
}

/// `|Ω_ℓ(z)|² / (|Ω₀¹(z)|² |Ω̃(z)|^{2ℓ})`, with the `D`-modified forms when
/// `hat` is set. Returns 0 where `Ω̃` vanishes.
pub fn quasimult_ratio(ell: usize, d: &CoronaData, z: &CVector, hat: bool) -> Result<f64> {
    let top = if hat {
        omega_hat(ell, d, z)?
    } else {
        omega(ell, d, z)?
    };
    let base = tensor_norm(&omega01(d, z)?);
    let tilde = tensor_norm(&if hat {
        omega_hat_tilde(d, z)?
    } else {
        omega_tilde(d, z)?
    });
    let denom = base * base * tilde.powi(2 * ell as i32);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(tensor_norm(&top).powi(2) / denom)
}

/// Random corona data in `n` variables with `big_n` generators of degree at
/// most 2 and coefficients of modulus at most 1; the constant terms keep
/// `|g|` away from zero in practice, and `δ` is measured.
pub fn random_corona_data<R: rand::Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    big_n: usize,
) -> Result<CoronaData> {
    use crate::holo::{HoloPoly, MultiIndex};
    let mut coeff = |r: f64| {
        Complex64::from_polar(
            r * rng.gen::<f64>(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let comps: Vec<HoloPoly> = (0..big_n)
        .map(|_| {
            let mut p = HoloPoly::constant(n, coeff(1.0));
            for deg in 1..=2 {
                for alpha in MultiIndex::all_of_order(n, deg) {
                    p = p.add(&HoloPoly::monomial(alpha, coeff(1.0 / deg as f64)));
                }
            }
            p
        })
        .collect();
    CoronaData::from_generators(VecHoloPoly::new(comps)?)
}

/// `C_ℓ = max quasimult_ratio(ℓ, ·)` for `ℓ = 1..=min(n, N−1)` over
/// `datasets` random corona data and `points` random points with
/// `|z| ≤ radius`, all drawn from `seed`.
pub fn quasimult_constants(
    n: usize,
    big_n: usize,
    datasets: usize,
    points: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let top = n.min(big_n.saturating_sub(1));
    let mut consts = vec![0.0f64; top];
    for _ in 0..datasets {
        let d = random_corona_data(&mut rng, n, big_n)?;
        for _ in 0..points {
            let z = crate::ball::sample_ball(&mut rng, n, radius);
            for (ell, c) in (1..=top).zip(consts.iter_mut()) {
                *c = c.max(quasimult_ratio(ell, &d, &z, false)?);
            }
        }
    }
    Ok(consts)
}
