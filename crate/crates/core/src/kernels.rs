//! Charpentier solution kernels on the ball and the pointwise estimates that
//! control them.
//!
//! For `0 ≤ q ≤ n − 1` the kernel `𝒞ₙ^{0,q}(w, z)` is a sum over the
//! index splits `ν = (i, J, L)` of `{0, …, n−1}` with `|J| = n − q − 1` and
//! `|L| = q`. Each split contributes the coefficient
//! `(−1)^q Φₙ^q(w, z) sgn(ν) (w̄_i − z̄_i)` of `dw̄^J ∧ dz̄^L ∧ ωₙ(w)`, where
//! `Φₙ^q = (1 − ⟨w, z⟩)^{n−1−q}(1 − |w|²)^q / Δ(w, z)^n`.

use num_complex::Complex64;

use crate::ball::{delta, pairing_unchecked, CVector};
use crate::holo::{d_matrix, y_apply, HoloPoly, Letter, MultiIndex};
use crate::tensor::IncIndex;
use crate::{Error, Result};

/// One index split `ν = (i, J, L)` with the signature of
/// `(0, …, n−1) ↦ (i, J, L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermEntry {
    pub i: usize,
    pub j: IncIndex,
    pub l: IncIndex,
    pub sign: i8,
}

/// All splits for `(n, q)`; there are `n!/((n−q−1)!·q!)` of them.
pub fn perms(n: usize, q: usize) -> Result<Vec<PermEntry>> {
    if n == 0 || q + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ q ≤ n − 1, got n = {n}, q = {q}"
        )));
    }
    let mut out = Vec::new();
    for i in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        for l_pos in IncIndex::all(rest.len(), q) {
            let l: Vec<usize> = l_pos.iter().map(|p| rest[p]).collect();
            let j: Vec<usize> = rest.iter().copied().filter(|k| !l.contains(k)).collect();
            let seq: Vec<usize> = std::iter::once(i)
                .chain(j.iter().copied())
                .chain(l.iter().copied())
                .collect();
            let (_, s) = IncIndex::sort_signed(&seq).expect("a permutation has no repeats");
            out.push(PermEntry {
                i,
                j: IncIndex::new(&j)?,
                l: IncIndex::new(&l)?,
                sign: if s > 0.0 { 1 } else { -1 },
            });
        }
    }
    Ok(out)
}

fn check_pair(w: &CVector, z: &CVector) -> Result<()> {
    w.check_dim(z)?;
    for p in [w, z] {
        if !p.is_interior() {
            return Err(Error::OutsideBall { norm: p.norm() });
        }
    }
    Ok(())
}

/// `Φₙ^q(w, z)`.
pub fn phi(n: usize, q: usize, w: &CVector, z: &CVector) -> Result<Complex64> {
    if q + 1 > n || w.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "Φ needs q ≤ n − 1 and dim n (n={n}, q={q})"
        )));
    }
    check_pair(w, z)?;
    let d = delta(w, z);
    if d == 0.0 {
        return Err(Error::Diagonal);
    }
    Ok(phi_unchecked(n, q, w, z, d))
}

#[inline]
pub(crate) fn phi_unchecked(n: usize, q: usize, w: &CVector, z: &CVector, d: f64) -> Complex64 {
    let one_minus = Complex64::new(1.0, 0.0) - pairing_unchecked(w, z);
    one_minus.powu((n - 1 - q) as u32) * (1.0 - w.norm_sqr()).powi(q as i32) / d.powi(n as i32)
}

/// Kernel components at `(w, z)`, one per split of [`perms`].
#[derive(Clone, Debug)]
pub struct KernelValue {
    pub q: usize,
    pub components: Vec<(PermEntry, Complex64)>,
}

impl KernelValue {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `sqrt(Σ |component|²)`.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `𝒞ₙ^{0,q}(w, z)`.
pub fn charpentier(n: usize, q: usize, w: &CVector, z: &CVector) -> Result<KernelValue> {
    let f = phi(n, q, w, z)?;
    let sign_q = if q % 2 == 0 { 1.0 } else { -1.0 };
    let components = perms(n, q)?
        .into_iter()
        .map(|nu| {
            let c = f * sign_q * nu.sign as f64 * (w[nu.i].conj() - z[nu.i].conj());
            (nu, c)
        })
        .collect();
    Ok(KernelValue { q, components })
}

/// `((1 − |w|²)/(1 − ⟨w, z⟩))^{s−n} Σ_j c_j ((1 − |w|²)(1 − |z|²)/|1 − ⟨w, z⟩|²)^j`.
pub fn amel_factor(n: usize, s: f64, w: &CVector, z: &CVector, c: &[f64]) -> Result<Complex64> {
    if !(s > n as f64) {
        return Err(Error::InvalidArgument(format!(
            "need s > n, got s = {s}, n = {n}"
        )));
    }
    check_pair(w, z)?;
    let one_minus = Complex64::new(1.0, 0.0) - pairing_unchecked(w, z);
    let bw = 1.0 - w.norm_sqr();
    let base = (Complex64::new(bw, 0.0) / one_minus).powf(s - n as f64);
    let t = bw * (1.0 - z.norm_sqr()) / one_minus.norm_sqr();
    let poly: f64 = c
        .iter()
        .enumerate()
        .map(|(j, cj)| cj * t.powi(j as i32))
        .sum();
    Ok(base * poly)
}

/// Ameliorated kernel `𝒞_{n,s}^{0,q}`: [`charpentier`] times [`amel_factor`].
/// `c` must have `n − q` entries.
pub fn amel_charpentier(
    n: usize,
    s: f64,
    q: usize,
    w: &CVector,
    z: &CVector,
    c: &[f64],
) -> Result<KernelValue> {
    if c.len() != n - q.min(n) {
        return Err(Error::InvalidArgument(format!(
            "expected {} amelioration constants, got {}",
            n - q,
            c.len()
        )));
    }
    let factor = amel_factor(n, s, w, z, c)?;
    let mut k = charpentier(n, q, w, z)?;
    k.components.iter_mut().for_each(|(_, v)| *v *= factor);
    Ok(k)
}

/// `𝒮_{n,s}(w, z) = (1 − |w|²)^{s−n−1} / (1 − ⟨w, z⟩)^s` with unit constant.
pub fn s_kernel(n: usize, s: f64, w: &CVector, z: &CVector) -> Result<Complex64> {
    if !(s > n as f64) {
        return Err(Error::InvalidArgument(format!(
            "need s > n, got s = {s}, n = {n}"
        )));
    }
    check_pair(w, z)?;
    let one_minus = Complex64::new(1.0, 0.0) - pairing_unchecked(w, z);
    Ok((1.0 - w.norm_sqr()).powf(s - n as f64 - 1.0) / one_minus.powf(s))
}

/// The pointwise estimates controlling the kernels. Each is evaluated as the
/// ratio of its left side to its right side with unit constant.
#[derive(Clone, Debug)]
pub enum Crucial {
    /// `|((z̄ − w̄)·∂̄)^m F(w)|` against `(√Δ/(1 − |w|²))^m |D̄^m F(w)|` for
    /// `F = p̄`. The left side is the full order-`m` contraction
    /// `Σ_{|α|=m} (m!/α!) (z̄ − w̄)^α ∂̄^α F`.
    ModDelta { p: HoloPoly, order: usize },
    /// `|D_z Δ(w, z)|` against `(1 − |z|²)√Δ + Δ`.
    RootD,
    /// `(1 − |z|²)|R_z Δ(w, z)|` against `(1 − |z|²)√Δ`.
    RootDRadial,
    /// `|D_z^m (1 − w̄z)^k|` against `|1 − w̄z|^k ((1 − |z|²)/|1 − w̄z|)^{m/2}`.
    DBound { k: u32, m: usize },
    /// `(1 − |z|²)^m |R^m (1 − w̄z)^k|` against
    /// `|1 − w̄z|^k ((1 − |z|²)/|1 − w̄z|)^m`.
    DBoundRadial { k: u32, m: usize },
}

/// `∂Δ(w, z)/∂z_j = −w̄_j(1 − ⟨w, z⟩) + z̄_j(1 − |w|²)`.
pub fn grad_delta_z(w: &CVector, z: &CVector) -> Vec<Complex64> {
    let one_minus = Complex64::new(1.0, 0.0) - pairing_unchecked(w, z);
    let bw = 1.0 - w.norm_sqr();
    (0..w.dim())
        .map(|j| -w[j].conj() * one_minus + z[j].conj() * bw)
        .collect()
}

/// Ratio LHS/RHS of one of the [`Crucial`] estimates at `(w, z)`.
pub fn check_crucial(kind: &Crucial, w: &CVector, z: &CVector) -> Result<f64> {
    check_pair(w, z)?;
    let dlt = delta(w, z);
    let cz = 1.0 - z.norm_sqr();
    let ratio = |lhs: f64, rhs: f64| -> Result<f64> {
        if rhs == 0.0 {
            if lhs == 0.0 {
                return Err(Error::Diagonal);
            }
            return Ok(f64::INFINITY);
        }
        Ok(lhs / rhs)
    };
    match kind {
        Crucial::ModDelta { p, order } => {
            let d = z - w;
            let mut q = p.clone();
            for _ in 0..*order {
                q = q.directional(&d);
            }
            let lhs = q.eval(w).norm();
            let word = vec![Letter::D; *order];
            let dm: f64 = y_apply(&word, p, w)?
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt();
            let rhs = (dlt.sqrt() / (1.0 - w.norm_sqr())).powi(*order as i32) * dm;
            if *order > 0 && dlt == 0.0 {
                return Err(Error::Diagonal);
            }
            ratio(lhs, rhs)
        }
        Crucial::RootD => {
            let a = d_matrix(z);
            let g = grad_delta_z(w, z);
            let lhs = a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&g)
                        .map(|(x, y)| x * y)
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            ratio(lhs, cz * dlt.sqrt() + dlt)
        }
        Crucial::RootDRadial => {
            let g = grad_delta_z(w, z);
            let r: Complex64 = g.iter().zip(z.coords()).map(|(a, b)| a * b).sum();
            ratio(cz * r.norm(), cz * dlt.sqrt())
        }
        Crucial::DBound { k, m } => {
            let t = pairing_unchecked(w, z).conj();
            let base = (Complex64::new(1.0, 0.0) - t).norm();
            let a = d_matrix(z);
            let wbar: Vec<Complex64> = w.coords().iter().map(|c| c.conj()).collect();
            let aw = a
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&wbar)
                        .map(|(x, y)| x * y)
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            let falling: f64 = (0..*m).map(|i| *k as f64 - i as f64).product();
            let lhs = if *m as u32 > *k {
                0.0
            } else {
                falling.abs() * base.powi(*k as i32 - *m as i32) * aw.powi(*m as i32)
            };
            let rhs = base.powi(*k as i32) * (cz / base).powf(*m as f64 / 2.0);
            ratio(lhs, rhs)
        }
        Crucial::DBoundRadial { k, m } => {
            // (1 − w̄z)^k depends on z through t = w̄z only, and R acts on
            // functions of t as t·d/dt.
            let t = pairing_unchecked(w, z).conj();
            let mut f = HoloPoly::zero(1);
            for i in 0..=*k {
                let binom = binomial(*k, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
                f = f.add(&HoloPoly::monomial(
                    MultiIndex::new(&[i]),
                    Complex64::new(binom, 0.0),
                ));
            }
            for _ in 0..*m {
                f = f.radial();
            }
            let lhs = cz.powi(*m as i32) * f.eval(&CVector::new([t])).norm();
            let base = (Complex64::new(1.0, 0.0) - t).norm();
            let rhs = base.powi(*k as i32) * (cz / base).powi(*m as i32);
            ratio(lhs, rhs)
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::sample_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn det(m: &[Vec<Complex64>]) -> Complex64 {
        // Gaussian elimination with partial pivoting.
        let n = m.len();
        let mut a = m.to_vec();
        let mut d = c(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap();
            if a[piv][col].norm() == 0.0 {
                return c(0.0, 0.0);
            }
            if piv != col {
                a.swap(piv, col);
                d = -d;
            }
            d *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    let v = a[col][k];
                    a[r][k] -= f * v;
                }
            }
        }
        d
    }

    #[test]
    fn perm_counts() {
        let p = perms(1, 0).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(
            (p[0].i, p[0].j.len(), p[0].l.len(), p[0].sign),
            (0, 0, 0, 1)
        );
        assert_eq!(perms(2, 0).unwrap().len(), 2);
        assert_eq!(perms(3, 1).unwrap().len(), 6);
        assert_eq!(perms(3, 0).unwrap().len(), 3);
        assert!(perms(2, 2).is_err());
    }

    #[test]
    fn perm_signs_reproduce_determinants() {
        // Laplace-type expansion: for each split, the sign times the product
        // of the row-i entry and the minors over J and L rebuilds det M when
        // summed over the splits with fixed (|J|, |L|) and all ways to place
        // the leading column.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        use rand::Rng;
        for n in 1..=4 {
            let m: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            let want = det(&m);
            for q in 0..n {
                let ncols_j = n - q - 1;
                let mut got = c(0.0, 0.0);
                for nu in perms(n, q).unwrap() {
                    let rows_j: Vec<usize> = nu.j.to_vec();
                    let rows_l: Vec<usize> = nu.l.to_vec();
                    let minor = |rows: &[usize], cols: std::ops::Range<usize>| -> Complex64 {
                        let sub: Vec<Vec<Complex64>> = rows
                            .iter()
                            .map(|&r| cols.clone().map(|k| m[r][k]).collect())
                            .collect();
                        if sub.is_empty() {
                            c(1.0, 0.0)
                        } else {
                            det(&sub)
                        }
                    };
                    got += m[nu.i][0]
                        * minor(&rows_j, 1..1 + ncols_j)
                        * minor(&rows_l, 1 + ncols_j..n)
                        * nu.sign as f64;
                }
                // Generalised Laplace expansion along the column blocks.
                assert!((got - want).norm() < 1e-10, "n={n} q={q}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn phi_examples() {
        let w = CVector::real(&[0.3]);
        let z = CVector::new([c(-0.2, 0.4)]);
        let v = phi(1, 0, &w, &z).unwrap();
        assert!((v - 1.0 / delta(&w, &z)).norm() < 1e-12);
        let z2 = CVector::from_pairs(&[(0.3, 0.1), (-0.2, 0.2)]);
        let v = phi(2, 1, &CVector::zeros(2), &z2).unwrap();
        assert!((v - z2.norm_sqr().powi(-2)).norm() < 1e-9);
        let w = CVector::real(&[0.5, 0.0]);
        let z = CVector::real(&[0.0, 0.5]);
        let v = phi(2, 1, &w, &z).unwrap();
        assert!((v - 0.75 / (0.4375 * 0.4375)).norm() < 1e-12);
        assert!((v.re - 3.9184).abs() < 1e-4);
        assert!(matches!(phi(1, 0, &w.clone(), &w), Err(_)));
        assert!(matches!(
            phi(1, 0, &CVector::real(&[0.1]), &CVector::real(&[0.1])),
            Err(Error::Diagonal)
        ));
    }

    #[test]
    fn charpentier_in_one_variable_is_cauchy() {
        let w = CVector::new([c(0.2, -0.5)]);
        let z = CVector::new([c(-0.1, 0.3)]);
        let k = charpentier(1, 0, &w, &z).unwrap();
        assert_eq!(k.len(), 1);
        let want = (w[0].conj() - z[0].conj()) / delta(&w, &z);
        assert!((k.components[0].1 - want).norm() < 1e-12);
        assert!((k.components[0].1 - 1.0 / (w[0] - z[0])).norm() < 1e-12);
    }

    #[test]
    fn charpentier_rederived_for_n2() {
        // Re-derivation with explicit signs: n = 2, q = 0 splits are
        // (i=0, J={1}) with +1 and (i=1, J={0}) with −1; q = 1 splits are
        // (i=0, L={1}) with +1 and (i=1, L={0}) with −1, times (−1)^q.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let w = sample_ball(&mut rng, 2, 0.95);
            let z = sample_ball(&mut rng, 2, 0.95);
            let d = delta(&w, &z);
            let one_minus = c(1.0, 0.0) - pairing_unchecked(&w, &z);
            let bw = 1.0 - w.norm_sqr();
            let k0 = charpentier(2, 0, &w, &z).unwrap();
            let f0 = one_minus / (d * d);
            assert!(
                (k0.components[0].1 - f0 * (w[0].conj() - z[0].conj())).norm() < 1e-9 * f0.norm()
            );
            assert!(
                (k0.components[1].1 + f0 * (w[1].conj() - z[1].conj())).norm() < 1e-9 * f0.norm()
            );
            let k1 = charpentier(2, 1, &w, &z).unwrap();
            let f1 = bw / (d * d);
            assert!((k1.components[0].1 + f1 * (w[0].conj() - z[0].conj())).norm() < 1e-9 * f1);
            assert!((k1.components[1].1 - f1 * (w[1].conj() - z[1].conj())).norm() < 1e-9 * f1);
        }
    }

    #[test]
    fn charpentier_diagonal_rate() {
        // Along w = z + t·u the modulus grows like Δ^{−n}|w − z| ∝ t^{1−2n}.
        let z = CVector::from_pairs(&[(0.2, 0.1), (-0.3, 0.2)]);
        let u = CVector::from_pairs(&[(0.6, 0.0), (0.0, 0.8)]);
        let norm_at = |t: f64| {
            charpentier(2, 0, &(&z + &u.scale_real(t)), &z)
                .unwrap()
                .norm()
        };
        let slope = (norm_at(1e-4).ln() - norm_at(1e-3).ln()) / (1e-4f64.ln() - 1e-3f64.ln());
        assert!((slope + 3.0).abs() < 1e-2, "{slope}");
    }

    #[test]
    fn unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (a, b) = (
            Complex64::from_polar(1.0, 0.4),
            Complex64::from_polar(1.0, -1.1),
        );
        let rot = |p: &CVector| CVector::new([p[0] * a, p[1] * b]);
        for _ in 0..20 {
            let w = sample_ball(&mut rng, 2, 0.95);
            let z = sample_ball(&mut rng, 2, 0.95);
            for q in 0..2 {
                let x = charpentier(2, q, &w, &z).unwrap().norm();
                let y = charpentier(2, q, &rot(&w), &rot(&z)).unwrap().norm();
                assert!((x - y).abs() < 1e-10 * x);
            }
        }
    }

    #[test]
    fn amelioration_examples() {
        let w = CVector::from_pairs(&[(0.3, 0.1), (-0.2, 0.2)]);
        let z = CVector::from_pairs(&[(0.1, -0.4), (0.25, 0.0)]);
        // s → n with c = (1, 0) leaves the kernel unchanged.
        let f = amel_factor(2, 2.0 + 1e-12, &w, &z, &[1.0, 0.0]).unwrap();
        assert!((f - 1.0).norm() < 1e-10);
        let f = amel_factor(2, 3.5, &CVector::zeros(2), &z, &[1.0, 2.0]).unwrap();
        let t = 1.0 - z.norm_sqr();
        assert!((f - (1.0 + 2.0 * t)).norm() < 1e-12);
        assert!(amel_factor(2, 2.0, &w, &z, &[1.0]).is_err());
        let k = amel_charpentier(2, 3.0, 0, &w, &z, &[1.0, 1.0]).unwrap();
        assert_eq!(k.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let w = sample_ball(&mut rng, 2, 1.0);
            let z = sample_ball(&mut rng, 2, 1.0);
            let f = amel_factor(2, 3.7, &w, &z, &[0.5, -1.5]).unwrap();
            assert!(f.norm() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn s_kernel_examples() {
        let w = CVector::real(&[0.5]);
        assert!((s_kernel(1, 2.0, &w, &w).unwrap() - 16.0 / 9.0).norm() < 1e-14);
        let v = s_kernel(1, 2.5, &w, &CVector::zeros(1)).unwrap();
        assert!((v - 0.75f64.powf(0.5)).norm() < 1e-14);
        assert!(
            (s_kernel(2, 3.0, &CVector::zeros(2), &CVector::real(&[0.2, 0.3])).unwrap() - 1.0)
                .norm()
                < 1e-15
        );
        assert!(s_kernel(1, 1.0, &w, &w).is_err());
    }

    #[test]
    fn crucial_examples() {
        let z = CVector::from_pairs(&[(0.3, 0.2), (-0.1, 0.4)]);
        let r = check_crucial(&Crucial::RootDRadial, &CVector::zeros(2), &z).unwrap();
        assert!((r - z.norm()).abs() < 1e-12);
        let w = CVector::from_pairs(&[(0.1, -0.2), (0.5, 0.1)]);
        assert!(
            (check_crucial(&Crucial::DBound { k: 3, m: 0 }, &w, &z).unwrap() - 1.0).abs() < 1e-12
        );
        let p = HoloPoly::from_terms(2, &[(&[2, 1], c(1.0, 0.5))]).unwrap();
        let r = check_crucial(&Crucial::ModDelta { p, order: 0 }, &w, &z).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(matches!(
            check_crucial(&Crucial::RootD, &w, &w),
            Err(Error::Diagonal)
        ));
    }

    #[test]
    fn crucial_ratios_stay_bounded() {
        let p = HoloPoly::from_terms(
            2,
            &[
                (&[2, 1], c(1.0, 0.5)),
                (&[0, 3], c(-0.3, 0.2)),
                (&[1, 0], c(0.7, 0.0)),
            ],
        )
        .unwrap();
        let kinds = [
            Crucial::ModDelta {
                p: p.clone(),
                order: 1,
            },
            Crucial::ModDelta { p, order: 2 },
            Crucial::RootD,
            Crucial::RootDRadial,
            Crucial::DBound { k: 4, m: 2 },
            Crucial::DBoundRadial { k: 4, m: 2 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let pairs: Vec<(CVector, CVector)> = (0..10000)
            .map(|_| (sample_ball(&mut rng, 2, 1.0), sample_ball(&mut rng, 2, 1.0)))
            .collect();
        for kind in &kinds {
            let sup = |k: usize| {
                pairs[..k]
                    .iter()
                    .map(|(w, z)| check_crucial(kind, w, z).unwrap())
                    .fold(0.0, f64::max)
            };
            let (a, b) = (sup(1000), sup(10000));
            assert!(
                b.is_finite() && b < 2.0 * a.max(1.0) + 10.0,
                "{kind:?}: {a} → {b}"
            );
        }
    }
}
