//! The positive integral operators
//! `T_{a,b,c} h(z) = ∫ (1−|z|²)^a (1−|w|²)^b Δ(w,z)^{c/2} |1−⟨w,z⟩|^{−(n+1+a+b+c)} h(w) dV(w)`
//! and a harness that probes their boundedness on Carleson-measure
//! functions.
//!
//! The harness evaluates `T h` after the substitution `w = φ_z(u)`, under
//! which every power of `1 − |z|²` cancels:
//!
//! `T h(z) = ∫ (1−|u|²)^b |u|^c |1−⟨u,z⟩|^{a−b−n−1} h(φ_z(u)) dV(u)`.
//!
//! The local singularity `|u|^c` sits at the origin and the boundary weight
//! `(1−|u|²)^b` at `|u| = 1`, so a polar rule graded at both ends resolves
//! the integrand at every depth of `z`. In the disk the test functions are
//! supported on discs, whose images under `φ_z` are again discs (or disc
//! complements); the angular integral is split exactly at those circles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball::{delta, lambda_weight, pairing, CVector, Tent};
use crate::holo::SampledField;
use crate::norms::carleson::{cm_norm, tent_sweep};
use crate::norms::tents::{SliceRule, TentGrid};
use crate::quadrature::{gauss_legendre, quad_ball, try_integrate_to_endpoint, GradedOptions};
use crate::{Error, Result};

/// Exponents of `T_{a,b,c}`; `p` and `σ` select the weak-Carleson variant of
/// the index region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub sigma: f64,
}

fn default_p() -> f64 {
    2.0
}

impl TabcParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            p: 2.0,
            sigma: 0.0,
        }
    }

    /// Slacks of `c > −2n`, `−pa < −n` and `−n < p(b + 1)`; all positive
    /// exactly inside the region.
    pub fn region_margins(&self, n: usize) -> [f64; 3] {
        let n = n as f64;
        [
            self.c + 2.0 * n,
            self.p * self.a - n,
            self.p * (self.b + 1.0) + n,
        ]
    }

    pub fn in_region(&self, n: usize) -> bool {
        self.region_margins(n).iter().all(|m| *m > 0.0)
    }

    /// Exponent of `|1 − ⟨w, z⟩|` in the kernel.
    fn denominator(&self, n: usize) -> f64 {
        n as f64 + 1.0 + self.a + self.b + self.c
    }
}

/// `T_{a,b,c} h(z)` by a target-centred ball rule of the given resolution.
///
/// Only the first component of `h` is used. The rule does not detect
/// divergence; a non-finite sum is reported as [`Error::Divergent`].
pub fn tabc_apply(
    t: &TabcParams,
    h: &(impl SampledField + ?Sized),
    z: &CVector,
    resolution: usize,
) -> Result<Complex64> {
    let n = z.dim();
    let rule = quad_ball(n, resolution, Some(z))?;
    let cz = 1.0 - z.norm_sqr();
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, wt) in rule.nodes().iter().zip(rule.weights()) {
        let d = delta(w, z);
        if d == 0.0 && t.c != 0.0 {
            continue;
        }
        let hv = h.sample(w)?[0];
        if hv == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = cz.powf(t.a)
            * (1.0 - w.norm_sqr()).powf(t.b)
            * d.powf(t.c / 2.0)
            * (Complex64::new(1.0, 0.0) - pairing(w, z)?)
                .norm()
                .powf(-t.denominator(n));
        acc += hv * (k * wt);
    }
    if !acc.re.is_finite() || !acc.im.is_finite() {
        return Err(Error::Divergent(
            "T_{a,b,c} quadrature is not finite".into(),
        ));
    }
    Ok(acc)
}

/// Outcome of a boundedness probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Bounded => "BOUNDED",
            Verdict::Unbounded => "UNBOUNDED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Quadrature settings of the harness.
#[derive(Clone, Debug)]
pub struct HarnessOptions {
    /// Concentration scales, decreasing.
    pub deltas: Vec<f64>,
    /// Rule for the outer tent integrals of `|T h|² dλ`.
    pub outer: SliceRule,
    /// Gauss points per angular segment of the inner integral.
    pub inner_order: usize,
    /// Radial grading of the inner integral.
    pub inner_graded: GradedOptions,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            deltas: (0..5).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect(),
            outer: SliceRule {
                angular: 8,
                torus: 8,
                graded: GradedOptions {
                    order: 4,
                    rel_tol: 1e-6,
                    max_panels: 28,
                    ..GradedOptions::default()
                },
            },
            inner_order: 8,
            inner_graded: GradedOptions {
                order: 5,
                rel_tol: 1e-8,
                max_panels: 28,
                ..GradedOptions::default()
            },
        }
    }
}

impl HarnessOptions {
    /// Three depths and lighter rules, for sweeping many triples.
    pub fn quick() -> Self {
        Self {
            deltas: vec![1e-1, 10f64.powf(-1.75), 10f64.powf(-2.5)],
            outer: SliceRule {
                angular: 6,
                torus: 6,
                graded: GradedOptions {
                    order: 3,
                    rel_tol: 1e-4,
                    max_panels: 24,
                    ..GradedOptions::default()
                },
            },
            inner_order: 6,
            inner_graded: GradedOptions {
                order: 4,
                rel_tol: 1e-6,
                max_panels: 24,
                ..GradedOptions::default()
            },
        }
    }
}

/// One point of the norm curve `δ ↦ cm_norm(T h_δ)`.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub delta: f64,
    /// `+∞` when a tent integral of `|T h_δ|² dλ` (or `T h_δ` itself) diverges.
    pub norm: f64,
    pub divergent_apex: Option<CVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub params: TabcParams,
    pub n: usize,
    pub in_region: bool,
    pub curve: Vec<CurvePoint>,
    pub max_over_median: f64,
    pub verdict: Verdict,
}

/// A disk bump concentrated on the tent `S_{ζ₀}`, `ζ₀ = (1 − δ)`:
///
/// `h_δ(w) = N·χ(s)·(1 − |w|²)^{1/2} / (1 + log(4δ / (1 − |w|²)))`,
/// `s = δ / |1 − w̄ζ₀|`,
///
/// with `χ` a quintic smoothstep rising from 0 at `s = 1/2` (the tent edge)
/// to 1 at `s = 2/3`. The profile is critical: its tent masses are of order
/// `δ` only because of the squared logarithm, so no power of `1 − |w|²` can
/// be traded against the weights of `T`.
#[derive(Clone, Copy, Debug)]
pub struct DiskBump {
    delta: f64,
    scale: f64,
}

/// Support disc `{|1 − w̄ζ₀| < κδ}` for `κ = 2` and the plateau for `κ = 3/2`.
const SUPPORT_KAPPA: f64 = 2.0;
const PLATEAU_KAPPA: f64 = 1.5;

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

impl DiskBump {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.25) {
            return Err(Error::InvalidArgument(format!(
                "bump scale must lie in (0, 1/4], got {delta}"
            )));
        }
        Ok(Self { delta, scale: 1.0 })
    }

    pub fn apex(&self) -> CVector {
        CVector::real(&[1.0 - self.delta])
    }

    /// Profile value given `w` and `1 − |w|²` (passed separately so that
    /// callers can supply it without cancellation).
    fn value(&self, w: Complex64, one_minus_w2: f64) -> f64 {
        if one_minus_w2 <= 0.0 {
            return 0.0;
        }
        let zeta0 = 1.0 - self.delta;
        let s = self.delta / (Complex64::new(1.0, 0.0) - w.conj() * zeta0).norm();
        let chi = smoothstep((s - 0.5) * 6.0);
        if chi == 0.0 {
            return 0.0;
        }
        self.scale * chi * one_minus_w2.sqrt() / (1.0 + (4.0 * self.delta / one_minus_w2).ln())
    }

    /// Centre and radius of the disc `{|1 − w̄ζ₀| < κδ}`.
    fn disc(&self, kappa: f64) -> (Complex64, f64) {
        let r = 1.0 - self.delta;
        (Complex64::new(1.0 / r, 0.0), kappa * self.delta / r)
    }

    /// Tents probing the bump: apex direction 1, depths `δ·2^k`, `k = −1..=2`.
    pub fn probe_grid(&self) -> Result<TentGrid> {
        let tents = (-1..=2)
            .map(|k| Tent::new(CVector::real(&[1.0 - (self.delta * 2f64.powi(k)).min(0.5)])))
            .collect::<Result<Vec<_>>>()?;
        Ok(TentGrid::new(tents))
    }

    /// Rescales so that `cm_norm` over [`DiskBump::probe_grid`] equals 1.
    pub fn normalized(mut self, rule: &SliceRule) -> Result<Self> {
        self.scale = 1.0;
        let norm = cm_norm(&self, &self.probe_grid()?, rule)?.value;
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::IllConditioned(format!("bump norm {norm}")));
        }
        self.scale = 1.0 / norm;
        Ok(self)
    }
}

impl SampledField for DiskBump {
    fn components(&self) -> usize {
        1
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(
            self.value(z[0], 1.0 - z.norm_sqr()),
            0.0,
        )])
    }
}

/// Preimage under `φ_z` of the disc `{|w − c| < r}`: the disc (or, when
/// `1/z̄` lies inside the original disc, the exterior) of the circle with
/// the given centre and radius.
///
/// Centre and radius come from closed forms rather than from mapped points.
/// For `z` far from the disc the preimage is a tiny circle hugging `|u| = 1`,
/// and only the closed forms keep its radius to full relative precision.
#[derive(Clone, Copy, Debug)]
struct Preimage {
    centre: Complex64,
    radius: f64,
    exterior: bool,
}

/// `φ_z(w) = (z − w)/(1 − z̄w)` in the disk.
fn mobius_disk(z: Complex64, w: Complex64) -> Complex64 {
    (z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)
}

fn preimage_of_disc(z: Complex64, centre: Complex64, radius: f64) -> Preimage {
    // u lies in the preimage iff |(z − c) − u(1 − c z̄)|² < r²|1 − z̄u|², i.e.
    // q|u|² − 2 Re(u·conj(β ᾱ − r² z)) + |β|² − r² < 0.
    let alpha = Complex64::new(1.0, 0.0) - centre * z.conj();
    let beta = z - centre;
    let r2 = radius * radius;
    let q = alpha.norm_sqr() - r2 * z.norm_sqr();
    let cz = 1.0 - z.norm_sqr();
    Preimage {
        centre: (beta * alpha.conj() - z * r2) / q,
        radius: radius * cz / q.abs(),
        exterior: q < 0.0,
    }
}

impl Preimage {
    #[cfg(test)]
    fn contains(&self, u: Complex64) -> bool {
        ((u - self.centre).norm() < self.radius) != self.exterior
    }

    /// Smallest `ρ ∈ [0, 1)` whose circle meets the region (1 if none).
    fn inner_radius(&self) -> f64 {
        if self.exterior {
            0.0
        } else {
            (self.centre.norm() - self.radius).clamp(0.0, 1.0)
        }
    }
}

/// Arc `{θ : ρe^{iθ} ∈ region}` as (centre angle, half-width); half-width
/// `≥ π` means the whole circle.
fn arc_of(region: &Preimage, rho: f64) -> Option<(f64, f64)> {
    let d = region.centre.norm();
    let r = region.radius;
    // Half-width of the arc of |u| = ρ inside the circle; None if disjoint.
    let inside = if rho + d <= r {
        Some(PI)
    } else if (rho - d).abs() >= r || d == 0.0 {
        None
    } else {
        // sin²(θ/2) = (r² − (ρ − d)²) / (4ρd), free of cancellation for small r.
        let gap = rho - d;
        let s2 = ((r - gap) * (r + gap) / (4.0 * rho * d)).clamp(0.0, 1.0);
        Some(2.0 * s2.sqrt().asin())
    };
    let mid = region.centre.arg();
    match (inside, region.exterior) {
        (Some(half), false) => Some((mid, half)),
        (None, false) => None,
        (None, true) => Some((0.0, PI)),
        (Some(half), true) => (half < PI).then_some((mid + PI, PI - half)),
    }
}

fn in_arc(theta: f64, arc: (f64, f64)) -> bool {
    if arc.1 >= PI {
        return true;
    }
    let d = (theta - arc.0 + PI).rem_euclid(2.0 * PI) - PI;
    d.abs() < arc.1
}

/// `T_{a,b,c} h_δ(z)` for the disk bump, via the Möbius-adapted polar rule.
fn tabc_bump_disk(
    t: &TabcParams,
    bump: &DiskBump,
    z: Complex64,
    opts: &HarnessOptions,
) -> Result<f64> {
    let cz = 1.0 - z.norm_sqr();
    let (c0, r0) = bump.disc(SUPPORT_KAPPA);
    let (c1, r1) = bump.disc(PLATEAU_KAPPA);
    let support = preimage_of_disc(z, c0, r0);
    let plateau = preimage_of_disc(z, c1, r1);
    let expo = t.a - t.b - 2.0;

    // ρ-density: ρ·(1−ρ²)^b·ρ^c·∫ |1−ūz|^{a−b−2} h(φ_z(u)) dθ.
    let density = |rho: f64, one_minus_rho2: f64| -> Result<f64> {
        let Some(outer) = arc_of(&support, rho) else {
            return Ok(0.0);
        };
        let mut cuts = Vec::with_capacity(5);
        if outer.1 < PI {
            cuts.push(outer.0 - outer.1);
            cuts.push(outer.0 + outer.1);
        }
        if let Some(inner) = arc_of(&plateau, rho) {
            if inner.1 < PI {
                cuts.push(inner.0 - inner.1);
                cuts.push(inner.0 + inner.1);
            }
        }
        // The kernel peaks at arg u = arg z with angular width 1 − ρ|z|.
        let peak = z.arg().rem_euclid(2.0 * PI);
        let width = {
            let (a, b) = (one_minus_rho2 / (1.0 + rho), cz / (1.0 + z.norm()));
            (a + b - a * b).max(1e-15)
        };
        cuts.push(peak);
        let mut cuts: Vec<f64> = cuts.into_iter().map(|c| c.rem_euclid(2.0 * PI)).collect();
        cuts.sort_by(f64::total_cmp);
        let first = cuts[0];
        cuts.push(first + 2.0 * PI);
        let mut sum = 0.0;
        let mut segment = |lo: f64, hi: f64| {
            for (th, wt) in gauss_legendre(opts.inner_order, lo, hi) {
                let u = Complex64::from_polar(rho, th);
                let q = Complex64::new(1.0, 0.0) - u.conj() * z;
                let qn = q.norm_sqr();
                let w = mobius_disk(z, u);
                let hv = bump.value(w, cz * one_minus_rho2 / qn);
                if hv != 0.0 {
                    sum += wt * hv * qn.powf(0.5 * expo);
                }
            }
        };
        for win in cuts.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            if hi - lo <= 0.0 || !in_arc(0.5 * (lo + hi), outer) {
                continue;
            }
            let at_lo = lo == peak;
            let at_hi = hi == peak || hi == peak + 2.0 * PI;
            if !(at_lo || at_hi) || hi - lo <= 2.0 * width {
                segment(lo, hi);
                continue;
            }
            // Dyadic panels shrinking toward the peak end, then one last panel.
            let mut len = hi - lo;
            let mut far = if at_lo { hi } else { lo };
            while len > width {
                len *= 0.5;
                let near = if at_lo { lo + len } else { hi - len };
                if at_lo {
                    segment(near, far);
                } else {
                    segment(far, near);
                }
                far = near;
            }
            if at_lo {
                segment(lo, far);
            } else {
                segment(far, hi);
            }
        }
        Ok(sum * rho.powf(1.0 + t.c) * one_minus_rho2.powf(t.b))
    };

    // Radial range of the image.
    let lo = support.inner_radius();
    if lo >= 1.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let split = lo.max(0.5);
    if lo < 0.5 {
        if lo == 0.0 {
            total +=
                try_integrate_to_endpoint(0.5, opts.inner_graded, |r| density(r, 1.0 - r * r))?;
        } else {
            for (r, wt) in gauss_legendre(2 * opts.inner_graded.order, lo, 0.5) {
                total += wt * density(r, 1.0 - r * r)?;
            }
        }
    }
    // The radial structure near |u| = 1 lives at the depth of z; the dyadic
    // panels must reach well below it.
    let depth = ((1.0 - split) / cz).log2().ceil().max(0.0) as usize;
    let graded = GradedOptions {
        max_panels: opts.inner_graded.max_panels.max(depth + 12),
        min_panels: depth + 4,
        ..opts.inner_graded
    };
    total += try_integrate_to_endpoint(1.0 - split, graded, |s| density(1.0 - s, s * (2.0 - s)))?;
    Ok(total)
}

struct BumpImage<'a> {
    params: &'a TabcParams,
    bump: &'a DiskBump,
    opts: &'a HarnessOptions,
}

impl SampledField for BumpImage<'_> {
    fn components(&self) -> usize {
        1
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(
            tabc_bump_disk(self.params, self.bump, z[0], self.opts)?,
            0.0,
        )])
    }
}

/// `cm_norm(T h_δ)` over the bump's probe tents.
pub fn tabc_bump_norm(t: &TabcParams, delta: f64, opts: &HarnessOptions) -> Result<CurvePoint> {
    let bump = DiskBump::new(delta)?.normalized(&opts.outer)?;
    let image = BumpImage {
        params: t,
        bump: &bump,
        opts,
    };
    let report = tent_sweep(
        &bump.probe_grid()?,
        &opts.outer,
        |z| {
            let v = image.sample(z)?[0].re;
            Ok(v * v * lambda_weight(z)?)
        },
        |tent| tent.depth(),
        0.5,
    )?;
    Ok(CurvePoint {
        delta,
        norm: report.value,
        divergent_apex: report.divergent_apex,
    })
}

/// Reads a verdict off a curve ordered by decreasing `δ`.
pub fn classify(curve: &[CurvePoint]) -> (Verdict, f64) {
    let vals: Vec<f64> = curve.iter().map(|p| p.norm).collect();
    if vals.is_empty() {
        return (Verdict::Inconclusive, f64::NAN);
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return (Verdict::Unbounded, f64::INFINITY);
    }
    let mut sorted = vals.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let max = sorted[sorted.len() - 1];
    let spread = if median > 0.0 {
        max / median
    } else {
        f64::INFINITY
    };
    if spread < 1.5 {
        return (Verdict::Bounded, spread);
    }
    let decades = (curve[0].delta / curve[curve.len() - 1].delta).log10();
    let monotone = vals.windows(2).all(|w| w[1] > w[0]);
    if monotone
        && decades > 0.0
        && (vals[vals.len() - 1] / vals[0]).log10() / decades >= 2f64.log10()
    {
        return (Verdict::Unbounded, spread);
    }
    (Verdict::Inconclusive, spread)
}

/// Runs the concentrating-family probe. Only the disk is supported.
pub fn tabc_region_harness(
    t: &TabcParams,
    n: usize,
    opts: &HarnessOptions,
) -> Result<HarnessReport> {
    if n != 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    let curve = opts
        .deltas
        .iter()
        .map(|&d| tabc_bump_norm(t, d, opts))
        .collect::<Result<Vec<_>>>()?;
    let (verdict, max_over_median) = classify(&curve);
    Ok(HarnessReport {
        params: *t,
        n,
        in_region: t.in_region(n),
        curve,
        max_over_median,
        verdict,
    })
}
