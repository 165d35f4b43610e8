//! Exact holomorphic polynomials and the derivative operators built on them.
//!
//! Coordinates are indexed from 0 in the API. Polynomials store only nonzero
//! coefficients, keyed by [`MultiIndex`] in lexicographic order, so equality
//! and iteration are deterministic.
//!
//! The almost-invariant derivative is `D = (1 − |z|²)P_z∇ + √(1 − |z|²)Q_z∇`.
//! The gradient `∇p = (∂₁p, …, ∂ₙp)` is paired with directions through
//! `Rp = Σ z_j ∂_j p`, so the radial part of the gradient is its component
//! along `z̄`; `P_z` here projects onto that line, `Q_z = I − P_z`, and
//! `P₀ = 0`. For real `z` this is the projection onto `span{z}`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::ball::CVector;
use crate::{Error, Result};

/// Largest total degree accepted by polynomial constructors and products.
pub const MAX_DEGREE: u32 = 96;

/// Exponent vector `α ∈ ℤ₊ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(SmallVec<[u32; 3]>);

impl MultiIndex {
    pub fn new(exponents: &[u32]) -> Self {
        Self(exponents.iter().copied().collect())
    }

    pub fn zero(n: usize) -> Self {
        Self(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut a = Self::zero(n);
        a.0[j] = 1;
        a
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `z^α`.
    pub fn monomial(&self, z: &CVector) -> Complex64 {
        self.0
            .iter()
            .zip(z.coords())
            .map(|(&a, zj)| zj.powu(a))
            .product()
    }

    fn add(&self, other: &MultiIndex) -> MultiIndex {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All multi-indices of dimension `n` and order exactly `m`.
    pub fn all_of_order(n: usize, m: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(j: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if j + 1 == n {
                cur[j] = left;
                out.push(MultiIndex::new(cur));
                return;
            }
            for a in (0..=left).rev() {
                cur[j] = a;
                rec(j + 1, left - a, cur, out);
            }
        }
        if n > 0 {
            rec(0, m, &mut cur, &mut out);
        }
        out
    }
}

/// A holomorphic polynomial in `n` complex variables.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl Serialize for HoloPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| TermJson {
                    alpha: a.exponents().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HoloPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyJson::deserialize(d)?;
        let mut p = HoloPoly::zero(doc.n);
        for t in doc.terms {
            if t.alpha.len() != doc.n {
                return Err(serde::de::Error::custom(format!(
                    "exponent {:?} has length {} but n = {}",
                    t.alpha,
                    t.alpha.len(),
                    doc.n
                )));
            }
            let alpha = MultiIndex::new(&t.alpha);
            if alpha.order() > MAX_DEGREE {
                return Err(serde::de::Error::custom(format!(
                    "degree {} exceeds {MAX_DEGREE}",
                    alpha.order()
                )));
            }
            p.add_term(alpha, Complex64::new(t.re, t.im));
        }
        Ok(p)
    }
}

impl HoloPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    /// `c·z^α`.
    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `z_j`.
    pub fn coordinate(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs.
    pub fn from_terms(n: usize, terms: &[(&[u32], Complex64)]) -> Result<Self> {
        let mut p = Self::zero(n);
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: alpha.len(),
                });
            }
            let a = MultiIndex::new(alpha);
            if a.order() > MAX_DEGREE {
                return Err(Error::DegreeOverflow(format!("degree {}", a.order())));
            }
            p.add_term(a, *c);
        }
        Ok(p)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        let entry = self
            .terms
            .entry(alpha.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&alpha);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &CVector) -> Complex64 {
        debug_assert_eq!(z.dim(), self.n);
        self.terms.iter().map(|(a, c)| c * a.monomial(z)).sum()
    }

    pub fn try_eval(&self, z: &CVector) -> Result<Complex64> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.dim(),
            });
        }
        Ok(self.eval(z))
    }

    pub fn add(&self, other: &HoloPoly) -> HoloPoly {
        let mut p = self.clone();
        for (a, c) in &other.terms {
            p.add_term(a.clone(), *c);
        }
        p
    }

    pub fn sub(&self, other: &HoloPoly) -> HoloPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> HoloPoly {
        let mut p = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            p.add_term(a.clone(), c * s);
        }
        p
    }

    pub fn mul(&self, other: &HoloPoly) -> Result<HoloPoly> {
        if self.degree() + other.degree() > MAX_DEGREE {
            return Err(Error::DegreeOverflow(format!(
                "product degree {} exceeds {MAX_DEGREE}",
                self.degree() + other.degree()
            )));
        }
        let mut p = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                p.add_term(a.add(b), c * d);
            }
        }
        Ok(p)
    }

    /// `∂p/∂z_j`, exact.
    pub fn d_holo(&self, j: usize) -> HoloPoly {
        let mut p = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            let e = a.0[j];
            if e == 0 {
                continue;
            }
            let mut b = a.clone();
            b.0[j] -= 1;
            p.add_term(b, c * e as f64);
        }
        p
    }

    /// `∂^α p`.
    pub fn d_multi(&self, alpha: &MultiIndex) -> HoloPoly {
        let mut p = self.clone();
        for (j, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                p = p.d_holo(j);
            }
        }
        p
    }

    /// Radial derivative `Rp = Σ_j z_j ∂p/∂z_j`; scales each `z^α` by `|α|`.
    pub fn radial(&self) -> HoloPoly {
        let mut p = HoloPoly::zero(self.n);
        for (a, c) in &self.terms {
            p.add_term(a.clone(), c * a.order() as f64);
        }
        p
    }

    /// Directional derivative `Σ_j v_j ∂p/∂z_j` with constant coefficients.
    pub fn directional(&self, v: &CVector) -> HoloPoly {
        (0..self.n).fold(HoloPoly::zero(self.n), |acc, j| {
            acc.add(&self.d_holo(j).scale(v[j]))
        })
    }

    /// `(∂₁p(z), …, ∂ₙp(z))`.
    pub fn gradient(&self, z: &CVector) -> Vec<Complex64> {
        (0..self.n).map(|j| self.d_holo(j).eval(z)).collect()
    }
}

impl fmt::Display for HoloPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| {
                let mono: Vec<String> = a
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| {
                        if e == 1 {
                            format!("z{}", j + 1)
                        } else {
                            format!("z{}^{e}", j + 1)
                        }
                    })
                    .collect();
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})·{}", mono.join("·"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An `N`-tuple of polynomials in the same `n` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<HoloPoly>", into = "Vec<HoloPoly>")]
pub struct VecHoloPoly {
    components: Vec<HoloPoly>,
}

impl TryFrom<Vec<HoloPoly>> for VecHoloPoly {
    type Error = Error;

    fn try_from(components: Vec<HoloPoly>) -> Result<Self> {
        Self::new(components)
    }
}

impl From<VecHoloPoly> for Vec<HoloPoly> {
    fn from(v: VecHoloPoly) -> Self {
        v.components
    }
}

impl VecHoloPoly {
    pub fn new(components: Vec<HoloPoly>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidArgument("need at least one component".into()));
        };
        let n = first.dim();
        if let Some(bad) = components.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Self { components })
    }

    /// Number of components `N`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Number of variables `n`.
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[HoloPoly] {
        &self.components
    }

    pub fn eval(&self, z: &CVector) -> Vec<Complex64> {
        self.components.iter().map(|p| p.eval(z)).collect()
    }

    /// `Σ_j |g_j(z)|²`.
    pub fn norm_sqr_at(&self, z: &CVector) -> f64 {
        self.components.iter().map(|p| p.eval(z).norm_sqr()).sum()
    }

    pub fn scale(&self, s: Complex64) -> VecHoloPoly {
        Self {
            components: self.components.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// The frozen matrix of `D` at `z`: `A = (1 − |z|²)P + √(1 − |z|²)Q`.
///
/// Entry `(i, j)` is `s δ_ij + ((1 − |z|²) − s)·z̄_i z_j / |z|²`.
pub fn d_matrix(z: &CVector) -> Vec<Vec<Complex64>> {
    let n = z.dim();
    let r2 = z.norm_sqr();
    let c = 1.0 - r2;
    let s = c.sqrt();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if i == j {
                *e += s;
            }
            if r2 > 0.0 {
                *e += z[i].conj() * z[j] * ((c - s) / r2);
            }
        }
    }
    a
}

fn apply_matrix(a: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `D p(z)`, the almost-invariant derivative of `p` at `|z| < 1`.
pub fn d_op(p: &HoloPoly, z: &CVector) -> Result<Vec<Complex64>> {
    if z.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: z.dim(),
        });
    }
    if !z.is_interior() {
        return Err(Error::OutsideBall { norm: z.norm() });
    }
    Ok(d_vector(&p.gradient(z), z))
}

/// Applies the frozen `D` matrix at `z` to a gradient vector.
pub fn d_vector(grad: &[Complex64], z: &CVector) -> Vec<Complex64> {
    apply_matrix(&d_matrix(z), grad)
}

/// A letter of a `𝒴^m` word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    /// `(1 − |z|²)·I`
    I,
    /// `(1 − |z|²)·R`
    R,
    /// `D`
    D,
}

pub type Word = Vec<Letter>;

/// All `3^m` words of length `m`, in lexicographic order `I < R < D`.
pub fn y_words(m: usize) -> Vec<Word> {
    let mut words: Vec<Word> = vec![Vec::new()];
    for _ in 0..m {
        words = words
            .into_iter()
            .flat_map(|w| {
                [Letter::I, Letter::R, Letter::D].into_iter().map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    words
}

/// Applies a frozen word to `p` at `z`; returns the flattened tensor of rank
/// `#D` (length `n^{#D}`, slot indices in row-major order).
///
/// Every coefficient is frozen at `z`, so the word becomes a product of
/// commuting constant-coefficient operators:
/// `c^{#I+#R}·(z·∇)^{#R}` followed by the `#D`-th derivative tensor with `A`
/// applied in each slot, where `c = 1 − |z|²`.
pub fn y_apply(word: &[Letter], p: &HoloPoly, z: &CVector) -> Result<Vec<Complex64>> {
    if z.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: z.dim(),
        });
    }
    if !z.is_interior() {
        return Err(Error::OutsideBall { norm: z.norm() });
    }
    let n = p.dim();
    let c = 1.0 - z.norm_sqr();
    let n_scalar = word.iter().filter(|l| **l != Letter::D).count();
    let n_r = word.iter().filter(|l| **l == Letter::R).count();
    let n_d = word.len() - n_scalar;
    let mut q = p.clone();
    for _ in 0..n_r {
        q = q.directional(z);
    }
    let scale = c.powi(n_scalar as i32);
    // Raw derivative tensor ∂_{j1}⋯∂_{jk} q(z), flattened row-major.
    let mut polys = vec![q];
    for _ in 0..n_d {
        polys = polys
            .iter()
            .flat_map(|r| (0..n).map(move |j| r.d_holo(j)))
            .collect();
    }
    let mut t: Vec<Complex64> = polys.iter().map(|r| r.eval(z) * scale).collect();
    let a = d_matrix(z);
    // Contract A into each slot in turn.
    for slot in 0..n_d {
        let stride = n.pow((n_d - 1 - slot) as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let i = (idx / stride) % n;
            let base = idx - i * stride;
            for j in 0..n {
                *o += a[i][j] * t[base + j * stride];
            }
        }
        t = out;
    }
    Ok(t)
}

/// `|𝒴^m p(z)|`: the ℓ² norm over all words of length `m` and all slots.
pub fn y_norm(p: &HoloPoly, m: usize, z: &CVector) -> Result<f64> {
    let mut acc = 0.0;
    for w in y_words(m) {
        acc += y_apply(&w, p, z)?.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    Ok(acc.sqrt())
}

/// `|𝒴^m g(z)|` for a tuple, taking the ℓ² norm over components as well.
pub fn y_norm_vec(g: &VecHoloPoly, m: usize, z: &CVector) -> Result<f64> {
    let mut acc = 0.0;
    for p in g.components() {
        acc += y_norm(p, m, z)?.powi(2);
    }
    Ok(acc.sqrt())
}

/// A deterministic vector-valued function on the ball.
///
/// This carries both exact data (closures over polynomials) and fields
/// produced by quadrature, such as solution-operator outputs.
pub trait SampledField: Sync {
    /// Number of complex output components.
    fn components(&self) -> usize;

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>>;
}

/// Adapts a closure into a [`SampledField`].
pub struct FnField<F> {
    len: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&CVector) -> Result<Vec<Complex64>> + Sync,
{
    pub fn new(len: usize, f: F) -> Self {
        Self { len, f }
    }
}

impl<F> SampledField for FnField<F>
where
    F: Fn(&CVector) -> Result<Vec<Complex64>> + Sync,
{
    fn components(&self) -> usize {
        self.len
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        (self.f)(z)
    }
}

impl SampledField for HoloPoly {
    fn components(&self) -> usize {
        1
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        Ok(vec![self.try_eval(z)?])
    }
}

impl SampledField for VecHoloPoly {
    fn components(&self) -> usize {
        self.len()
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        Ok(self.eval(z))
    }
}

/// Fourth-order central differences of `F` along the real and imaginary
/// axes of each coordinate: returns `(∂F/∂x_j, ∂F/∂y_j)` as `out[c][j]`.
fn partials<F: SampledField + ?Sized>(
    field: &F,
    z: &CVector,
    h: f64,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let margin = 1.0 - z.norm();
    if !(h > 0.0) || margin <= 2.0 * h {
        return Err(Error::StepTooLarge { step: h, margin });
    }
    let n = z.dim();
    let m = field.components();
    let zero = Complex64::new(0.0, 0.0);
    let mut dx = vec![vec![zero; n]; m];
    let mut dy = vec![vec![zero; n]; m];
    for j in 0..n {
        for (dir, out) in [
            (Complex64::new(h, 0.0), &mut dx),
            (Complex64::new(0.0, h), &mut dy),
        ] {
            let p1 = field.sample(&z.shifted(j, dir))?;
            let m1 = field.sample(&z.shifted(j, -dir))?;
            let p2 = field.sample(&z.shifted(j, 2.0 * dir))?;
            let m2 = field.sample(&z.shifted(j, -2.0 * dir))?;
            for c in 0..m {
                out[c][j] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h);
            }
        }
    }
    Ok((dx, dy))
}

/// Central-difference `∂F/∂z̄_j = ½(∂F/∂x_j + i ∂F/∂y_j)` at `z`, using the
/// five-point stencil (truncation error `O(h⁴)`); requires `1 − |z| > 2h`.
///
/// Returns `out[c][j]` for output component `c` and coordinate `j`.
pub fn dbar_probe<F: SampledField + ?Sized>(
    field: &F,
    z: &CVector,
    h: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let (dx, dy) = partials(field, z, h)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x + i * y)).collect())
        .collect())
}

/// Central-difference holomorphic derivative `∂F/∂z_j = ½(∂F/∂x_j − i ∂F/∂y_j)`.
pub fn d_probe<F: SampledField + ?Sized>(
    field: &F,
    z: &CVector,
    h: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let (dx, dy) = partials(field, z, h)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(dx
        .iter()
        .zip(&dy)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x - i * y)).collect())
        .collect())
}
