//! Alternating tensors over `ℂᴺ` whose entries are `(0,q)`-forms on `ℂⁿ`.
//!
//! A tensor is stored pointwise: a sparse map from pairs `(I, L)` of
//! increasing index tuples to complex coefficients, representing
//! `Σ c_{I,L} e_I ⊗ dz̄^L`. Both index sets are 0-based.
//!
//! Sign conventions:
//!
//! - merging increasing tuples `I` and `J` into `K` costs
//!   `(−1)^{#{(i, j) ∈ I × J : i > j}}`;
//! - the wedge product applies this sign independently to the `e` indices
//!   and to the `dz̄` indices, with no extra cross sign, so
//!   `A ∧ B = (−1)^{rs + qℓ} B ∧ A`;
//! - contraction by `g` acts in the final tensor slot:
//!   `(Λ_g T)(I) = Σ_{k ∉ I} T(I, k)·g_k` with `T(I, k)` the antisymmetric
//!   extension of `T` to the unsorted tuple `(I, k)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::ball::CVector;
use crate::holo::VecHoloPoly;
use crate::{Error, Result};

/// A strictly increasing tuple of 0-based indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IncIndex(SmallVec<[u8; 6]>);

impl IncIndex {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(i: usize) -> Self {
        Self(SmallVec::from_elem(i as u8, 1))
    }

    /// Builds an index, rejecting tuples that are not strictly increasing.
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "index tuple {indices:?} is not strictly increasing"
            )));
        }
        if indices.iter().any(|&i| i > u8::MAX as usize) {
            return Err(Error::InvalidArgument("index exceeds 255".into()));
        }
        Ok(Self(indices.iter().map(|&i| i as u8).collect()))
    }

    /// Sorts an arbitrary tuple; returns `None` on repeated entries and the
    /// permutation sign otherwise.
    pub fn sort_signed(indices: &[usize]) -> Option<(Self, f64)> {
        let mut v: Vec<usize> = indices.to_vec();
        let mut sign = 1.0;
        // Insertion sort counts inversions directly.
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((Self(v.iter().map(|&i| i as u8).collect()), sign))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&(i as u8)).is_ok()
    }

    /// `I ⊔ J` with its merge sign, or `None` when the sets overlap.
    pub fn merge(&self, other: &IncIndex) -> Option<(IncIndex, f64)> {
        let mut out = SmallVec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (0, 0);
        let mut inversions = 0usize;
        while a < self.0.len() || b < other.0.len() {
            if b == other.0.len() || (a < self.0.len() && self.0[a] < other.0[b]) {
                out.push(self.0[a]);
                a += 1;
            } else if a == self.0.len() || other.0[b] < self.0[a] {
                // Every remaining element of `self` is larger than this one.
                inversions += self.0.len() - a;
                out.push(other.0[b]);
                b += 1;
            } else {
                return None;
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((IncIndex(out), sign))
    }

    /// All increasing tuples of length `k` drawn from `0..n`.
    pub fn all(n: usize, k: usize) -> Vec<IncIndex> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<IncIndex>) {
            if cur.len() == k {
                out.push(IncIndex(cur.iter().map(|&i| i as u8).collect()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    /// Complement of `self` in `0..n`.
    pub fn complement(&self, n: usize) -> IncIndex {
        IncIndex((0..n as u8).filter(|i| !self.0.contains(i)).collect())
    }
}

impl fmt::Display for IncIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Value at a point of an alternating `r`-tensor of `(0,q)`-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct AltTensor {
    big_n: usize,
    n: usize,
    rank: usize,
    degree: usize,
    entries: BTreeMap<(IncIndex, IncIndex), Complex64>,
}

impl AltTensor {
    /// The zero tensor of rank `rank` over `ℂ^{big_n}` with `(0, degree)`-form
    /// values on `ℂⁿ`.
    pub fn zero(big_n: usize, n: usize, rank: usize, degree: usize) -> Result<Self> {
        if rank > big_n || degree > n {
            return Err(Error::DegreeOverflow(format!(
                "rank {rank} over N = {big_n} or form degree {degree} over n = {n}"
            )));
        }
        Ok(Self {
            big_n,
            n,
            rank,
            degree,
            entries: BTreeMap::new(),
        })
    }

    /// The rank-0, degree-0 tensor with value `c`.
    pub fn scalar(big_n: usize, n: usize, c: Complex64) -> Self {
        let mut t = Self::zero(big_n, n, 0, 0).expect("rank 0 always fits");
        t.set(IncIndex::empty(), IncIndex::empty(), c);
        t
    }

    /// A 1-tensor of functions: `Σ_j v_j e_j`.
    pub fn vector(n: usize, v: &[Complex64]) -> Self {
        let mut t = Self::zero(v.len(), n, 1, 0).expect("rank 1 fits");
        for (j, c) in v.iter().enumerate() {
            t.set(IncIndex::single(j), IncIndex::empty(), *c);
        }
        t
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(IncIndex, IncIndex), &Complex64)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sets the coefficient of `e_I ⊗ dz̄^L`; zero values are not stored.
    pub fn set(&mut self, i: IncIndex, l: IncIndex, c: Complex64) {
        debug_assert_eq!(i.len(), self.rank);
        debug_assert_eq!(l.len(), self.degree);
        if c == Complex64::new(0.0, 0.0) {
            self.entries.remove(&(i, l));
        } else {
            self.entries.insert((i, l), c);
        }
    }

    pub fn add_to(&mut self, i: IncIndex, l: IncIndex, c: Complex64) {
        let cur = self.get(&i, &l);
        self.set(i, l, cur + c);
    }

    pub fn get(&self, i: &IncIndex, l: &IncIndex) -> Complex64 {
        self.entries
            .get(&(i.clone(), l.clone()))
            .copied()
            .unwrap_or_default()
    }

    /// Coefficient at arbitrary (possibly unsorted) tuples, with the
    /// antisymmetric sign applied in both index groups.
    pub fn get_perm(&self, i: &[usize], l: &[usize]) -> Complex64 {
        match (IncIndex::sort_signed(i), IncIndex::sort_signed(l)) {
            (Some((ii, si)), Some((ll, sl))) => self.get(&ii, &ll) * (si * sl),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn same_shape(&self, other: &AltTensor) -> Result<()> {
        if (self.big_n, self.n, self.rank, self.degree)
            != (other.big_n, other.n, other.rank, other.degree)
        {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch: (N={}, n={}, r={}, q={}) vs (N={}, n={}, r={}, q={})",
                self.big_n,
                self.n,
                self.rank,
                self.degree,
                other.big_n,
                other.n,
                other.rank,
                other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &AltTensor) -> Result<AltTensor> {
        self.same_shape(other)?;
        let mut t = self.clone();
        for ((i, l), c) in &other.entries {
            t.add_to(i.clone(), l.clone(), *c);
        }
        Ok(t)
    }

    pub fn sub(&self, other: &AltTensor) -> Result<AltTensor> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> AltTensor {
        let mut t = self.clone();
        t.entries.values_mut().for_each(|c| *c *= s);
        t.entries.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        t
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// All permutations of `0..k` with their signs, in a fixed order.
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for m in 0..k {
        out = out
            .into_iter()
            .flat_map(|(p, s): (Vec<usize>, f64)| {
                (0..=p.len()).map(move |pos| {
                    let mut v = p.clone();
                    v.insert(pos, m);
                    // The new largest element jumps over len − pos entries.
                    let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
                    (v, sign)
                })
            })
            .collect();
    }
    out
}

/// `A ∧ B` with independent merge signs on tensor and form indices.
pub fn wedge(a: &AltTensor, b: &AltTensor) -> Result<AltTensor> {
    if a.big_n != b.big_n || a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.big_n,
            found: b.big_n,
        });
    }
    let mut out = AltTensor::zero(a.big_n, a.n, a.rank + b.rank, a.degree + b.degree)?;
    for ((i, l), x) in &a.entries {
        for ((j, m), y) in &b.entries {
            let (Some((k, s1)), Some((p, s2))) = (i.merge(j), l.merge(m)) else {
                continue;
            };
            out.add_to(k, p, x * y * (s1 * s2));
        }
    }
    Ok(out)
}

/// `Λ_g T` in the final slot, for given values `g_k(z)`.
pub fn contract_values(t: &AltTensor, g: &[Complex64]) -> Result<AltTensor> {
    if t.rank == 0 {
        return Err(Error::InvalidArgument(
            "cannot contract a rank-0 tensor".into(),
        ));
    }
    if g.len() != t.big_n {
        return Err(Error::DimensionMismatch {
            expected: t.big_n,
            found: g.len(),
        });
    }
    let mut out = AltTensor::zero(t.big_n, t.n, t.rank - 1, t.degree)?;
    for ((k_idx, l), c) in &t.entries {
        // Remove each member k of K: T(K) = sign·T(K∖k, k), where the sign
        // moves k from its sorted position to the end.
        let r = k_idx.len();
        for (pos, k) in k_idx.iter().enumerate() {
            let rest = IncIndex(
                k_idx
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != pos)
                    .map(|(_, v)| *v)
                    .collect(),
            );
            let sign = if (r - 1 - pos) % 2 == 0 { 1.0 } else { -1.0 };
            out.add_to(rest, l.clone(), c * g[k] * sign);
        }
    }
    Ok(out)
}

/// `Λ_g T` at `z` with `g` evaluated from polynomials.
pub fn contract_g(t: &AltTensor, g: &VecHoloPoly, z: &CVector) -> Result<AltTensor> {
    contract_values(t, &g.eval(z))
}

/// `sqrt(Σ |c_{I,L}|²)` with `{e_I ⊗ dz̄^L}` orthonormal.
pub fn tensor_norm(t: &AltTensor) -> f64 {
    t.entries.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_tensor(
        rng: &mut ChaCha8Rng,
        big_n: usize,
        n: usize,
        r: usize,
        q: usize,
    ) -> AltTensor {
        let mut t = AltTensor::zero(big_n, n, r, q).unwrap();
        for i in IncIndex::all(big_n, r) {
            for l in IncIndex::all(n, q) {
                if rng.gen_bool(0.7) {
                    t.set(
                        i.clone(),
                        l,
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    );
                }
            }
        }
        t
    }

    fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
        if k == 0 {
            return vec![(vec![], 1.0)];
        }
        let mut out = Vec::new();
        for (p, s) in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut v = p.clone();
                v.insert(pos, k - 1);
                // Inserting the largest element at `pos` adds len − pos inversions.
                let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
                out.push((v, sign));
            }
        }
        out
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|x| x as f64).product()
    }

    /// Wedge by the alternation formula over all permutations of both index
    /// groups, reading coefficients through `get_perm`.
    fn wedge_oracle(a: &AltTensor, b: &AltTensor) -> AltTensor {
        let (r, s, q, l) = (a.rank, b.rank, a.degree, b.degree);
        let mut out = AltTensor::zero(a.big_n, a.n, r + s, q + l).unwrap();
        let norm = factorial(r) * factorial(s) * factorial(q) * factorial(l);
        for k in IncIndex::all(a.big_n, r + s) {
            for p in IncIndex::all(a.n, q + l) {
                let kv = k.to_vec();
                let pv = p.to_vec();
                let mut acc = c(0.0, 0.0);
                for (pi, spi) in permutations(r + s) {
                    let ki: Vec<usize> = pi.iter().map(|&x| kv[x]).collect();
                    for (rho, srho) in permutations(q + l) {
                        let pr: Vec<usize> = rho.iter().map(|&x| pv[x]).collect();
                        acc += a.get_perm(&ki[..r], &pr[..q])
                            * b.get_perm(&ki[r..], &pr[q..])
                            * (spi * srho);
                    }
                }
                out.set(k.clone(), p, acc / norm);
            }
        }
        out
    }

    fn close(a: &AltTensor, b: &AltTensor, tol: f64) -> bool {
        tensor_norm(&a.sub(b).unwrap()) <= tol
    }

    #[test]
    fn merge_signs() {
        let a = IncIndex::new(&[0, 2]).unwrap();
        let b = IncIndex::new(&[1]).unwrap();
        let (k, s) = a.merge(&b).unwrap();
        assert_eq!(k.to_vec(), vec![0, 1, 2]);
        assert_eq!(s, -1.0);
        assert!(a.merge(&IncIndex::single(2)).is_none());
        assert!(IncIndex::new(&[2, 1]).is_err());
        assert_eq!(IncIndex::sort_signed(&[2, 0, 1]).unwrap().1, 1.0);
        assert!(IncIndex::sort_signed(&[1, 1]).is_none());
        assert_eq!(IncIndex::all(4, 2).len(), 6);
    }

    #[test]
    fn wedge_matches_alternation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(r, q, s, l) in &[
            (1, 0, 1, 0),
            (1, 1, 1, 0),
            (1, 0, 1, 1),
            (2, 1, 1, 1),
            (1, 1, 2, 0),
        ] {
            let a = random_tensor(&mut rng, 4, 2, r, q);
            let b = random_tensor(&mut rng, 4, 2, s, l);
            let w = wedge(&a, &b).unwrap();
            assert!(
                close(&w, &wedge_oracle(&a, &b), 1e-12),
                "shape ({r},{q})∧({s},{l})"
            );
        }
    }

    #[test]
    fn wedge_identity_and_alternation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_tensor(&mut rng, 3, 2, 1, 1);
        let one = AltTensor::scalar(3, 2, c(1.0, 0.0));
        assert_eq!(wedge(&one, &a).unwrap(), a);
        assert_eq!(wedge(&a, &one).unwrap(), a);
        let v = AltTensor::vector(2, &[c(0.3, 1.0), c(-2.0, 0.5), c(1.0, 0.0)]);
        assert_eq!(tensor_norm(&wedge(&v, &v).unwrap()), 0.0);
        let big = AltTensor::zero(2, 1, 2, 1).unwrap();
        assert!(matches!(wedge(&big, &v.clone()), Err(_)));
        let v2 = AltTensor::vector(1, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let t = AltTensor::zero(2, 1, 2, 0).unwrap();
        assert!(matches!(wedge(&t, &v2), Err(Error::DegreeOverflow(_))));
    }

    #[test]
    fn contraction_examples() {
        let g = [c(0.5, 0.1), c(-0.2, 0.3), c(0.7, 0.0)];
        let mut e = AltTensor::zero(3, 1, 1, 0).unwrap();
        e.set(IncIndex::single(1), IncIndex::empty(), c(1.0, 0.0));
        let out = contract_values(&e, &g).unwrap();
        assert_eq!(out.get(&IncIndex::empty(), &IncIndex::empty()), g[1]);
        assert!(contract_values(&AltTensor::scalar(3, 1, c(1.0, 0.0)), &g).is_err());

        // The r = 2 display: (Λ_g Γ)_j = Σ_k Γ(j, k) g_k.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gamma = random_tensor(&mut rng, 3, 1, 2, 0);
        let lg = contract_values(&gamma, &g).unwrap();
        for j in 0..3 {
            let want: Complex64 = (0..3).map(|k| gamma.get_perm(&[j, k], &[]) * g[k]).sum();
            assert!((lg.get(&IncIndex::single(j), &IncIndex::empty()) - want).norm() < 1e-14);
        }
        // Γ(g, g) = 0.
        let pair: Complex64 = (0..3)
            .map(|j| lg.get(&IncIndex::single(j), &IncIndex::empty()) * g[j])
            .sum();
        assert!(pair.norm() < 1e-12);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(tensor_norm(&AltTensor::zero(3, 1, 1, 0).unwrap()), 0.0);
        let v = AltTensor::vector(1, &[c(0.0, 3.0), c(0.0, 0.0)]);
        assert_eq!(tensor_norm(&v), 3.0);
        let w = AltTensor::vector(1, &[c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((tensor_norm(&w) - 5.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn graded_anticommutativity(seed in any::<u64>(), r in 0usize..3, q in 0usize..2, s in 0usize..3, l in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_tensor(&mut rng, 4, 2, r, q);
            let b = random_tensor(&mut rng, 4, 2, s, l);
            let ab = wedge(&a, &b).unwrap();
            let ba = wedge(&b, &a).unwrap();
            let sign = if (r * s + q * l) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(close(&ab, &ba.scale(c(sign, 0.0)), 1e-12));
        }

        #[test]
        fn wedge_is_associative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_tensor(&mut rng, 4, 2, 1, 1);
            let b = random_tensor(&mut rng, 4, 2, 1, 0);
            let d = random_tensor(&mut rng, 4, 2, 1, 1);
            let left = wedge(&wedge(&a, &b).unwrap(), &d).unwrap();
            let right = wedge(&a, &wedge(&b, &d).unwrap()).unwrap();
            prop_assert!(close(&left, &right, 1e-12));
        }

        #[test]
        fn wedge_is_bilinear(seed in any::<u64>(), x in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a1 = random_tensor(&mut rng, 3, 2, 1, 1);
            let a2 = random_tensor(&mut rng, 3, 2, 1, 1);
            let b = random_tensor(&mut rng, 3, 2, 1, 0);
            let lhs = wedge(&a1.add(&a2.scale(c(x, 0.5))).unwrap(), &b).unwrap();
            let rhs = wedge(&a1, &b).unwrap().add(&wedge(&a2, &b).unwrap().scale(c(x, 0.5))).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn double_contraction_vanishes(seed in any::<u64>(), r in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, 4, 1, r, 1);
            let g: Vec<Complex64> = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let once = contract_values(&t, &g).unwrap();
            let twice = contract_values(&once, &g).unwrap();
            prop_assert!(twice.max_abs() < 1e-12);
        }

        #[test]
        fn contraction_is_linear_in_g(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tensor(&mut rng, 3, 2, 2, 1);
            let g1: Vec<Complex64> = (0..3).map(|_| c(rng.gen_range(-1.0..1.0), 0.2)).collect();
            let g2: Vec<Complex64> = (0..3).map(|_| c(0.1, rng.gen_range(-1.0..1.0))).collect();
            let sum: Vec<Complex64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
            let lhs = contract_values(&t, &sum).unwrap();
            let rhs = contract_values(&t, &g1).unwrap().add(&contract_values(&t, &g2).unwrap()).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }
    }
}
