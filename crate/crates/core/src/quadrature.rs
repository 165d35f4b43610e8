//! Quadrature over the ball and graded one-dimensional integration.
//!
//! Three families of rules live here:
//!
//! - [`quad_ball`] without a target: a product rule in `s = |z|²`, simplex
//!   face coordinates for the moduli and trapezoidal angles, with dyadic
//!   panels in `s` toward the boundary sphere.
//! - [`quad_ball`] with a target `z`: spherical coordinates centred at `z`.
//!   Writing `w = z + ρu` with `|u| = 1`, one has
//!   `Δ(w, z) = ρ²(1 − |z|² + |⟨u, z⟩|²)`, so the volume factor `ρ^{2n−1}`
//!   cancels the `Δ^{−n}·|w − z|` singularity of the solution kernels and the
//!   radial integrand is smooth on `[0, R(u)]`.
//! - [`monte_carlo_ball`]: seeded uniform sampling, used for `n = 3` checks.
//!
//! [`integrate_to_endpoint`] handles one-dimensional integrands with an
//! endpoint singularity, detecting divergence from the decay of dyadic panel
//! contributions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{pairing_unchecked, sample_ball, CVector};
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[0, 1]`, cached per order.
pub fn gauss_legendre_01(m: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(m)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(m.max(1)).unwrap());
            let mut pairs: Vec<(f64, f64)> = rule
                .as_node_weight_pairs()
                .iter()
                .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// Gauss–Legendre pairs mapped to `[a, b]`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let h = b - a;
    let rule = gauss_legendre_01(m);
    (0..rule.len()).map(move |k| (a + h * rule[k].0, h * rule[k].1))
}

/// A weighted node set over `𝔹ₙ` realising `∫ · dV` (Lebesgue measure).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    n: usize,
    nodes: Vec<CVector>,
    weights: Vec<f64>,
    singular_target: Option<CVector>,
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    singular_target: Option<Vec<f64>>,
}

impl QuadratureRule {
    /// Builds a rule from explicit nodes and weights.
    pub fn from_parts(
        nodes: Vec<CVector>,
        weights: Vec<f64>,
        singular_target: Option<CVector>,
    ) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        let n = nodes.first().map(CVector::dim).unwrap_or(1);
        for p in &nodes {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            if !p.is_interior() {
                return Err(Error::OutsideBall { norm: p.norm() });
            }
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument(format!("bad weight {w}")));
        }
        Ok(Self {
            n,
            nodes,
            weights,
            singular_target,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn singular_target(&self) -> Option<&CVector> {
        self.singular_target.as_ref()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_k w_k f(x_k)`, evaluated in parallel and summed in node order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&CVector) -> f64 + Sync,
    {
        let vals: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        vals.iter().sum()
    }

    pub fn integrate_complex<F>(&self, f: F) -> Complex64
    where
        F: Fn(&CVector) -> Complex64 + Sync,
    {
        let vals: Vec<Complex64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| f(x) * *w)
            .collect();
        vals.iter().sum()
    }

    /// Sequential fallible integration of a vector-valued integrand of fixed
    /// length `len`. Non-finite sums are reported as [`Error::NonFinite`].
    pub fn try_integrate_vec<F>(&self, len: usize, mut f: F) -> Result<Vec<Complex64>>
    where
        F: FnMut(&CVector, &mut [Complex64]) -> Result<()>,
    {
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            f(x, &mut buf)?;
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b * *w;
            }
        }
        if acc.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = RuleJson {
            nodes: self.nodes.iter().map(CVector::to_flat).collect(),
            weights: self.weights.clone(),
            singular_target: self.singular_target.as_ref().map(CVector::to_flat),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: RuleJson = serde_json::from_str(s)?;
        let nodes = doc
            .nodes
            .iter()
            .map(|v| CVector::from_flat(v))
            .collect::<Result<Vec<_>>>()?;
        let target = doc
            .singular_target
            .as_deref()
            .map(CVector::from_flat)
            .transpose()?;
        Self::from_parts(nodes, doc.weights, target)
    }
}

/// Number of Gauss points per real axis for a given resolution.
fn axis_count(resolution: usize) -> usize {
    ((resolution as f64).sqrt().ceil() as usize).max(2)
}

/// Dyadic panels in `s = |z|²` graded toward both `s = 0` and `s = 1`, so
/// that non-polynomial powers of `|z|` and of `1 − |z|²` both converge.
fn boundary_panels(m: usize) -> Vec<(f64, f64)> {
    let levels = (m as f64).log2().ceil() as usize;
    let mut cuts = vec![0.0, 0.5, 1.0];
    for k in 1..=levels {
        let d = 0.5f64.powi(k as i32 + 1);
        cuts.push(d);
        cuts.push(1.0 - d);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Builds a quadrature rule over `𝔹ₙ`, `n ∈ {1, 2, 3}`.
///
/// `resolution` sets roughly the node count per complex coordinate plane:
/// each real axis gets `⌈√resolution⌉` Gauss points. With a
/// `singular_target` the rule is centred on that point (see the module docs).
pub fn quad_ball(
    n: usize,
    resolution: usize,
    singular_target: Option<&CVector>,
) -> Result<QuadratureRule> {
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    match singular_target {
        None => Ok(product_rule(n, resolution)),
        Some(z) => {
            if z.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: z.dim(),
                });
            }
            if !z.is_interior() {
                return Err(Error::OutsideBall { norm: z.norm() });
            }
            Ok(centred_rule(z, resolution))
        }
    }
}

/// Points of the simplex `{t ≥ 0, Σt = 1}` in `n` variables with weights for
/// `dt₁⋯dt_{n−1}`, built from collapsed Gauss coordinates.
fn simplex_face(n: usize, m: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        1 => vec![(vec![1.0], 1.0)],
        2 => gauss_legendre(m, 0.0, 1.0)
            .map(|(s, w)| (vec![s, 1.0 - s], w))
            .collect(),
        _ => {
            let mut out = Vec::new();
            for (s1, w1) in gauss_legendre(m, 0.0, 1.0) {
                for (s2, w2) in gauss_legendre(m, 0.0, 1.0) {
                    let t = vec![s1, (1.0 - s1) * s2, (1.0 - s1) * (1.0 - s2)];
                    out.push((t, w1 * w2 * (1.0 - s1)));
                }
            }
            out
        }
    }
}

/// All angle tuples of a tensor trapezoid rule with `m` angles per axis.
fn torus_angles(n: usize, m: usize) -> Vec<Vec<f64>> {
    let step = 2.0 * PI / m as f64;
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |k| {
                    let mut v = prefix.clone();
                    v.push((k as f64 + 0.5) * step);
                    v
                })
            })
            .collect();
    }
    out
}

fn point_from_moduli(t: &[f64], scale: f64, angles: &[f64]) -> CVector {
    CVector::new(
        t.iter()
            .zip(angles)
            .map(|(&tj, &th)| Complex64::from_polar((scale * tj).sqrt(), th)),
    )
}

fn product_rule(n: usize, resolution: usize) -> QuadratureRule {
    let m = axis_count(resolution);
    // Extra coordinate planes get a coarser share to keep n ≥ 2 affordable.
    let (m_face, m_theta) = match n {
        1 => (1, 2 * m),
        2 => ((m / 2).max(2), (m / 2).max(4)),
        _ => ((m / 4).max(2), (m / 4).max(4)),
    };
    let face = simplex_face(n, m_face);
    let angles = torus_angles(n, m_theta);
    let angle_w = (2.0 * PI / m_theta as f64).powi(n as i32);
    let half_n = 0.5f64.powi(n as i32);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in boundary_panels(m) {
        for (rho, wr) in gauss_legendre(m, a, b) {
            let radial = half_n * rho.powi(n as i32 - 1) * wr;
            for (t, wf) in &face {
                for th in &angles {
                    nodes.push(point_from_moduli(t, rho, th));
                    weights.push(radial * wf * angle_w);
                }
            }
        }
    }
    QuadratureRule {
        n,
        nodes,
        weights,
        singular_target: None,
    }
}

/// Distance from `z` to the sphere along the unit direction `u`.
fn ray_exit(z: &CVector, u: &CVector) -> f64 {
    let b = pairing_unchecked(z, u).re;
    let c = 1.0 - z.norm_sqr();
    // Larger root of ρ² + 2bρ − c = 0, written to avoid cancellation.
    if b >= 0.0 {
        c / (b + (b * b + c).sqrt())
    } else {
        -b + (b * b + c).sqrt()
    }
}

fn centred_rule(z: &CVector, resolution: usize) -> QuadratureRule {
    let n = z.dim();
    let m = axis_count(resolution);
    // Near the sphere the exit distance R(u) varies sharply with direction,
    // so the angular count grows like 1/(1 − |z|).
    let boost = (0.25 / (1.0 - z.norm())).clamp(1.0, 8.0);
    let (m_face, m_theta) = match n {
        1 => (1, ((m as f64) * boost).ceil() as usize),
        2 => ((m / 2).max(2), ((m.max(8) as f64) * boost).ceil() as usize),
        _ => (
            (m / 4).max(2),
            (((m / 2).max(6) as f64) * boost).ceil() as usize,
        ),
    };
    let face = simplex_face(n, m_face);
    let angles = torus_angles(n, m_theta);
    let sphere_w = 2f64.powi(1 - n as i32) * (2.0 * PI / m_theta as f64).powi(n as i32);
    let radial = gauss_legendre_01(m);
    let mut nodes = Vec::with_capacity(face.len() * angles.len() * m);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (tau, wf) in &face {
        for th in &angles {
            let u = point_from_moduli(tau, 1.0, th);
            let r = ray_exit(z, &u);
            for &(x, wx) in radial.iter() {
                let rho = r * x;
                let w = z + &u.scale_real(rho);
                if !w.is_interior() {
                    continue;
                }
                nodes.push(w);
                weights.push(wf * sphere_w * rho.powi(2 * n as i32 - 1) * r * wx);
            }
        }
    }
    QuadratureRule {
        n,
        nodes,
        weights,
        singular_target: Some(z.clone()),
    }
}

/// Uniform Monte Carlo rule with `count` nodes, reproducible from `seed`.
pub fn monte_carlo_ball(n: usize, count: usize, seed: u64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = ball_volume(n);
    let nodes: Vec<CVector> = (0..count).map(|_| sample_ball(&mut rng, n, 1.0)).collect();
    let weights = vec![vol / count as f64; count];
    Ok(QuadratureRule {
        n,
        nodes,
        weights,
        singular_target: None,
    })
}

/// `πⁿ/n!`, the Lebesgue volume of `𝔹ₙ`.
pub fn ball_volume(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * PI / k as f64)
}

/// Settings for [`integrate_to_endpoint`].
#[derive(Clone, Copy, Debug)]
pub struct GradedOptions {
    /// Gauss points per panel.
    pub order: usize,
    /// Relative size of the last panel at which the sweep stops.
    pub rel_tol: f64,
    /// Consecutive panel ratios below this count as geometric decay.
    pub geometric_ratio: f64,
    /// Over a full sweep without geometric decay, panel masses are fitted by
    /// `C (k + k₀)^{−p}`. Fitted exponents below this value are treated as
    /// divergent. Harmonic tails (`p = 1`, a `1/(t log t)` singularity)
    /// diverge; `1/(t log² t)` has `p = 2` asymptotically but fits closer to
    /// 1.5 over a 28-panel sweep, so the threshold sits just above 1.
    pub min_tail_exponent: f64,
    /// Number of dyadic panels in a full sweep.
    pub max_panels: usize,
    /// Panels always taken before the early stop may fire, for integrands
    /// with a known feature at depth `len·2^{−min_panels}`.
    pub min_panels: usize,
}

impl Default for GradedOptions {
    fn default() -> Self {
        Self {
            order: 8,
            rel_tol: 1e-10,
            geometric_ratio: 0.9,
            min_tail_exponent: 1.2,
            max_panels: 46,
            min_panels: 0,
        }
    }
}

/// Integrates `f(t)` over `t ∈ (0, len]` where `f` may be singular at `t = 0`.
///
/// Panels `[len/2^{k+1}, len/2^k]` are summed until the latest panel is
/// negligible and the panel masses decay geometrically; a geometric tail
/// estimate is then added. Otherwise the full sweep of `max_panels` panels is
/// taken and a power law fitted to three equal blocks of trailing panels
/// decides between an algebraically convergent tail (masses like `k^{−p}`,
/// `p ≥ min_tail_exponent`) and divergence, reported as [`Error::Divergent`].
pub fn integrate_to_endpoint<F>(len: f64, opts: GradedOptions, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_to_endpoint(len, opts, |t| Ok(f(t)))
}

/// [`integrate_to_endpoint`] for a fallible integrand; the first error is
/// returned unchanged.
pub fn try_integrate_to_endpoint<F>(len: f64, opts: GradedOptions, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if len <= 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_legendre_01(opts.order);
    let mut signed: Vec<f64> = Vec::with_capacity(opts.max_panels);
    let mut masses: Vec<f64> = Vec::with_capacity(opts.max_panels);
    let mut hi = len;
    for k in 0..opts.max_panels {
        let lo = 0.5 * hi;
        let h = hi - lo;
        let (mut s, mut a) = (0.0, 0.0);
        for &(x, w) in rule.iter() {
            let v = f(lo + h * x)?;
            s += w * h * v;
            a += w * h * v.abs();
        }
        if !s.is_finite() || !a.is_finite() {
            return Err(Error::Divergent(format!(
                "non-finite panel at t ≈ {lo:.3e}"
            )));
        }
        signed.push(s);
        masses.push(a);
        hi = lo;
        if k >= 4 && k + 1 >= opts.min_panels {
            let abs_total: f64 = masses.iter().sum();
            let q = last_ratio(&masses);
            if a <= opts.rel_tol * abs_total && q < opts.geometric_ratio {
                let total: f64 = signed.iter().sum();
                return Ok(total + s * q / (1.0 - q));
            }
        }
    }
    let total: f64 = signed.iter().sum();
    let q = last_ratio(&masses);
    let last = *signed.last().unwrap_or(&0.0);
    if q < opts.geometric_ratio {
        return Ok(total + last * q / (1.0 - q));
    }
    let tail = algebraic_tail(&masses, &signed, opts.min_tail_exponent)?;
    Ok(total + tail)
}

/// Tail beyond the last panel from three equal trailing blocks of masses.
///
/// The fit uses the last half of the sweep, where the masses are closest
/// to their asymptotic form; shorter and then longer windows are tried when
/// the masses do not decrease across it. A tail whose last quarter is not
/// lighter than the quarter before is divergent.
fn algebraic_tail(masses: &[f64], signed: &[f64], min_exponent: f64) -> Result<f64> {
    let k = masses.len();
    let blocks = |d: usize| {
        let block = |i: usize| masses[k - (3 - i) * d..k - (2 - i) * d].iter().sum::<f64>();
        (block(0), block(1), block(2))
    };
    let d0 = (k / 4).max(1);
    if k < 3 * d0 {
        return Err(Error::Divergent("too few panels to judge the tail".into()));
    }
    let (_, b2, b3) = blocks(d0);
    if b3 == 0.0 {
        return Ok(0.0);
    }
    if b3 >= b2 {
        return Err(Error::Divergent(format!(
            "panel masses do not decrease (last blocks {b2:.3e}, {b3:.3e})"
        )));
    }
    let fitted = [k / 6, k / 8, d0]
        .into_iter()
        .filter(|&d| d >= 2)
        .find_map(|d| {
            let (b1, b2, b3) = blocks(d);
            (b1 > b2 && b2 > b3).then(|| (d, b1, b2, b3))
        });
    let Some((d, b1, b2, b3)) = fitted else {
        let r = b3 / b2;
        let sign = signed[k - d0..].iter().sum::<f64>() / b3;
        return Ok(sign * b3 * r / (1.0 - r));
    };
    let sign = signed[k - d..].iter().sum::<f64>() / b3;
    // For B_i ∝ X_i^{−p} with equally spaced X_i, x_i = (B_i/B₃)^{−1/p}
    // is affine in i; h(p) measures the failure of that.
    let h = |p: f64| {
        let x1 = (b1 / b3).powf(-1.0 / p);
        let x2 = (b2 / b3).powf(-1.0 / p);
        (1.0 - x2) - (x2 - x1)
    };
    let grid: Vec<f64> = (0..=160)
        .map(|i| 0.05 * 4000f64.powf(i as f64 / 160.0))
        .collect();
    let bracket = grid.windows(2).find(|w| h(w[0]) * h(w[1]) <= 0.0);
    let Some(&[mut lo, mut hi]) = bracket else {
        if h(grid[0]) > 0.0 {
            // Faster than any power: geometric in blocks.
            let r = b3 / b2;
            return Ok(sign * b3 * r / (1.0 - r));
        }
        return Err(Error::Divergent(
            "panel masses decay slower than any power".into(),
        ));
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if h(lo) * h(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    if p < min_exponent {
        return Err(Error::Divergent(format!(
            "panel masses decay like k^(−{p:.2})"
        )));
    }
    // X₃ in panel units, then Σ_{m ≥ 1} B(X₃ + m d) by the midpoint integral.
    let x2 = (b2 / b3).powf(-1.0 / p);
    let big_x = d as f64 / (1.0 - x2);
    let half = big_x + 0.5 * d as f64;
    Ok(sign * b3 * (half / big_x).powf(1.0 - p) * big_x / ((p - 1.0) * d as f64))
}

/// Largest of the last three consecutive panel ratios; 0 when masses vanish.
fn last_ratio(masses: &[f64]) -> f64 {
    let k = masses.len();
    if k < 4 {
        return 1.0;
    }
    let mut q: f64 = 0.0;
    for i in (k - 3)..k {
        let prev = masses[i - 1];
        let r = if prev > 0.0 { masses[i] / prev } else { 0.0 };
        q = q.max(r);
    }
    q
}

/// Composite Gauss–Legendre rule on `[a, b]` with panels graded toward both
/// endpoints by halving, `levels` halvings per side.
pub fn graded_interval(a: f64, b: f64, order: usize, levels: usize) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let mut cuts = vec![a, mid, b];
    let half = 0.5 * (b - a);
    for k in 1..=levels {
        let d = half * 0.5f64.powi(k as i32);
        cuts.push(a + d);
        cuts.push(b - d);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for win in cuts.windows(2) {
        out.extend(gauss_legendre(order, win[0], win[1]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn beta(a: f64, b: f64) -> f64 {
        statrs::function::beta::beta(a, b)
    }

    #[test]
    fn disk_area_and_beta_family() {
        let rule = quad_ball(1, 64, None).unwrap();
        assert!((rule.total_weight() - PI).abs() < 1e-12);
        for &(b, c, tol) in &[
            (0.0, 0.0, 1e-12),
            (2.0, 0.0, 1e-12),
            (0.0, 2.0, 1e-12),
            (1.0, 2.0, 1e-12),
            (0.5, 1.0, 1e-4),
        ] {
            let got = rule.integrate(|w| {
                let r2 = w.norm_sqr();
                (1.0 - r2).powf(b) * r2.powf(c / 2.0)
            });
            let want = PI * beta(c / 2.0 + 1.0, b + 1.0);
            assert!((got - want).abs() < tol, "b={b} c={c}: {got} vs {want}");
        }
    }

    #[test]
    fn higher_dim_volumes() {
        let r2 = quad_ball(2, 64, None).unwrap();
        assert!((r2.total_weight() - PI * PI / 2.0).abs() < 1e-10);
        let r3 = quad_ball(3, 64, None).unwrap();
        assert!((r3.total_weight() - ball_volume(3)).abs() < 1e-10);
        // ∫_{𝔹₂} |z₁|² dV = π²/6.
        let m = r2.integrate(|z| z[0].norm_sqr());
        assert!((m - PI * PI / 6.0).abs() < 1e-10);
    }

    #[test]
    fn centred_rule_volume_and_singular_kernel() {
        for (n, zc) in [(1usize, vec![0.3, -0.5]), (2, vec![0.2, 0.1, -0.4, 0.3])] {
            let z = CVector::from_flat(&zc).unwrap();
            let rule = quad_ball(n, 256, Some(&z)).unwrap();
            let vol = rule.total_weight();
            assert!(
                (vol - ball_volume(n)).abs() < 1e-6 * ball_volume(n),
                "n={n} vol={vol}"
            );
        }
        // ∫_𝔻 dV(w)/|w − z| = 4 E(|z|²)-type value; compare against a fine
        // plain rule on the same integrand, smoothed by symmetry at z = 0.
        let z0 = CVector::zeros(1);
        let rule = quad_ball(1, 256, Some(&z0)).unwrap();
        let got = rule.integrate(|w| 1.0 / (w - &z0).norm());
        assert!((got - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let rule = quad_ball(1, 4, None).unwrap();
        let back = QuadratureRule::from_json(&rule.to_json().unwrap()).unwrap();
        assert_eq!(back.len(), rule.len());
        for (a, b) in back.weights().iter().zip(rule.weights()) {
            assert_eq!(a, b);
        }
        let bad = r#"{"nodes":[[2.0,0.0]],"weights":[1.0]}"#;
        assert!(QuadratureRule::from_json(bad).is_err());
        assert!(matches!(
            quad_ball(4, 16, None),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a = monte_carlo_ball(3, 100, 5).unwrap();
        let b = monte_carlo_ball(3, 100, 5).unwrap();
        assert_eq!(a, b);
        assert!((a.total_weight() - ball_volume(3)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_integration() {
        let opts = GradedOptions::default();
        let v = integrate_to_endpoint(1.0, opts, |t| t.powf(-0.5)).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
        let v = integrate_to_endpoint(2.0, opts, |t| t * t).unwrap();
        assert!((v - 8.0 / 3.0).abs() < 1e-12);
        assert!(integrate_to_endpoint(1.0, opts, |t| 1.0 / t).is_err());
        assert!(integrate_to_endpoint(1.0, opts, |t| t.powf(-1.2)).is_err());
        // Divergent only through a slowly growing logarithmic factor.
        assert!(integrate_to_endpoint(1.0, opts, |t| 1.0 / (t * (1.0 - t.ln()))).is_err());
        let v = integrate_to_endpoint(1.0, opts, |t| 1.0 / (t * (1.0 - t.ln()).powi(2))).unwrap();
        assert!((v - 1.0).abs() < 0.02, "{v}");
        let v = integrate_to_endpoint(
            1.0,
            GradedOptions {
                max_panels: 28,
                ..opts
            },
            |t| 1.0 / (t * (5.0 - t.ln()).powi(2)),
        )
        .unwrap();
        assert!((v - 0.2).abs() < 0.01, "{v}");
        assert!(integrate_to_endpoint(
            1.0,
            GradedOptions {
                max_panels: 28,
                ..opts
            },
            |t| 1.0 / (t * (5.0 - t.ln()))
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn beta_family_converges(b in 0.0f64..3.0, c in 0.0f64..3.0) {
            let want = PI * beta(c / 2.0 + 1.0, b + 1.0);
            let coarse = quad_ball(1, 16, None).unwrap();
            // The error of the coarse rule can cross zero, hence the wide
            // resolution gap and the absolute floor.
            let fine = quad_ball(1, 128, None).unwrap();
            let f = |w: &CVector| {
                let r2 = w.norm_sqr();
                (1.0 - r2).powf(b) * r2.powf(c / 2.0)
            };
            let e1 = (coarse.integrate(f) - want).abs();
            let e2 = (fine.integrate(f) - want).abs();
            prop_assert!(e2 <= e1 / 2.0 || e2 < 1e-8, "{} -> {}", e1, e2);
        }
    }
}
