//! Weighted multilinear integrals of `𝒴`-derivatives and the ratio harness
//! that compares them with sup-norm and Hardy-space surrogates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::lambda_weight;
use crate::holo::{y_norm, HoloPoly, MultiIndex};
use crate::norms::tents::sphere_directions;
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// `∫ (1−|z|²)^{pσ} Π_j |𝒴^{α_j} g_j|^p · |𝒴^{α_0} h|^p dλₙ`, with `alpha`
/// listing `α_0` (for `h`) followed by one order per `g_j`.
pub fn multilinear_lhs(
    gs: &[HoloPoly],
    h: &HoloPoly,
    alpha: &[usize],
    p: f64,
    sigma: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    if alpha.len() != gs.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "need {} derivative orders, got {}",
            gs.len() + 1,
            alpha.len()
        )));
    }
    let mut acc = 0.0;
    for (z, w) in rule.nodes().iter().zip(rule.weights()) {
        let mut v = (1.0 - z.norm_sqr()).powf(p * sigma) * y_norm(h, alpha[0], z)?.powf(p);
        for (g, &a) in gs.iter().zip(&alpha[1..]) {
            if v == 0.0 {
                break;
            }
            v *= y_norm(g, a, z)?.powf(p);
        }
        acc += w * v * lambda_weight(z)?;
    }
    Ok(acc)
}

/// `‖h‖²_{H²}` for the normalized surface measure:
/// `Σ |c_α|² α!(n−1)!/(n−1+|α|)!`.
pub fn hardy_norm_sqr(h: &HoloPoly) -> f64 {
    let n = h.dim();
    h.terms()
        .map(|(alpha, c)| {
            let num: f64 = alpha
                .exponents()
                .iter()
                .map(|&k| factorial(k))
                .product::<f64>()
                * factorial(n as u32 - 1);
            c.norm_sqr() * num / factorial(n as u32 - 1 + alpha.order())
        })
        .sum()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `max |g|` over deterministic boundary directions (`n ≤ 2`).
pub fn sup_norm_boundary(g: &HoloPoly, samples: usize) -> Result<f64> {
    Ok(sphere_directions(g.dim(), samples)?
        .iter()
        .map(|z| g.eval(z).norm())
        .fold(0.0, f64::max))
}

/// `|φ(0)| + (∫ |(1−|z|²)^σ 𝒴¹φ|^p dλₙ)^{1/p}`, standing in for the
/// `B_p^σ` norm.
pub fn bp_sigma_surrogate(
    phi: &HoloPoly,
    p: f64,
    sigma: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let origin = crate::ball::CVector::zeros(phi.dim());
    let mut mass = 0.0;
    for (z, w) in rule.nodes().iter().zip(rule.weights()) {
        mass +=
            w * ((1.0 - z.norm_sqr()).powf(sigma) * y_norm(phi, 1, z)?).powf(p) * lambda_weight(z)?;
    }
    Ok(phi.eval(&origin).norm() + mass.powf(1.0 / p))
}

#[derive(Clone, Debug, Serialize)]
pub struct MultilinearRatio {
    pub lhs: f64,
    /// `Π ‖g_j‖_∞^p` times `‖h‖²_{H²}` (Hardy point `p = 2`, `σ = n/2`) or
    /// the `p`-th power of the `B_p^σ` surrogate otherwise.
    pub rhs: f64,
    pub ratio: f64,
}

/// Boundary samples used for sup norms.
const SUP_SAMPLES: usize = 512;

pub fn multilinear_ratio(
    gs: &[HoloPoly],
    h: &HoloPoly,
    alpha: &[usize],
    p: f64,
    sigma: f64,
    rule: &QuadratureRule,
) -> Result<MultilinearRatio> {
    let lhs = multilinear_lhs(gs, h, alpha, p, sigma, rule)?;
    let mut rhs = 1.0;
    for g in gs {
        rhs *= sup_norm_boundary(g, SUP_SAMPLES)?.powf(p);
    }
    let hardy_point = (p - 2.0).abs() < 1e-12 && (sigma - h.dim() as f64 / 2.0).abs() < 1e-12;
    rhs *= if hardy_point {
        hardy_norm_sqr(h)
    } else {
        bp_sigma_surrogate(h, p, sigma, rule)?.powf(p)
    };
    Ok(MultilinearRatio {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// A random polynomial of degree `1..=max_degree` with coefficients of
/// modulus in `[1/2, 1]`.
pub fn random_poly(rng: &mut impl Rng, n: usize, max_degree: u32, constant: bool) -> HoloPoly {
    let deg = rng.gen_range(1..=max_degree);
    let mut p = HoloPoly::zero(n);
    for d in (if constant { 0 } else { 1 })..=deg {
        for alpha in MultiIndex::all_of_order(n, d) {
            let c = Complex64::from_polar(
                rng.gen_range(0.5..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            p = p.add(&HoloPoly::monomial(alpha, c));
        }
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct MultilinearReport {
    pub n: usize,
    pub alpha: Vec<usize>,
    pub ratios: Vec<f64>,
    pub max_over_median: f64,
    /// Relative deviation of `LHS(c·g)/LHS(g)` from `|c|^{pM}`.
    pub g_homogeneity_error: f64,
    /// Relative deviation of the `h → c·h` scaling of both sides from `|c|^p`.
    pub h_homogeneity_error: f64,
}

/// Ratios over `members` random data sets `(g_1..g_M, h)` drawn from `seed`,
/// plus exact scaling checks on the first member.
pub fn multilinear_harness(
    n: usize,
    alpha: &[usize],
    p: f64,
    sigma: f64,
    members: usize,
    seed: u64,
    rule: &QuadratureRule,
) -> Result<MultilinearReport> {
    if alpha.len() < 2 {
        return Err(Error::InvalidArgument("need at least one g".into()));
    }
    let m = alpha.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(members);
    let mut first: Option<(Vec<HoloPoly>, HoloPoly, MultilinearRatio)> = None;
    for _ in 0..members {
        let gs: Vec<HoloPoly> = (0..m).map(|_| random_poly(&mut rng, n, 3, true)).collect();
        let h = random_poly(&mut rng, n, 3, true);
        let r = multilinear_ratio(&gs, &h, alpha, p, sigma, rule)?;
        ratios.push(r.ratio);
        if first.is_none() {
            first = Some((gs, h, r));
        }
    }
    let (gs, h, base) = first.ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    let c = Complex64::new(1.7, -0.6);
    let scaled: Vec<HoloPoly> = gs.iter().map(|g| g.scale(c)).collect();
    let lhs_g = multilinear_lhs(&scaled, &h, alpha, p, sigma, rule)?;
    let want_g = c.norm().powf(p * m as f64);
    let g_err = (lhs_g / base.lhs / want_g - 1.0).abs();
    let rh = multilinear_ratio(&gs, &h.scale(c), alpha, p, sigma, rule)?;
    let want_h = c.norm().powf(p);
    let h_err = (rh.lhs / base.lhs / want_h - 1.0)
        .abs()
        .max((rh.rhs / base.rhs / want_h - 1.0).abs());
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    Ok(MultilinearReport {
        n,
        alpha: alpha.to_vec(),
        max_over_median: sorted[sorted.len() - 1] / median,
        ratios,
        g_homogeneity_error: g_err,
        h_homogeneity_error: h_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::quad_ball;
    use statrs::function::gamma::gamma;

    #[test]
    fn hardy_norm_of_monomials() {
        // ‖z₁²z₂‖² = 2!·1!·1!/4! = 1/12 on the sphere of ℂ².
        let p = HoloPoly::monomial(MultiIndex::new(&[2, 1]), Complex64::new(0.0, 2.0));
        assert!((hardy_norm_sqr(&p) - 1.0 / 3.0).abs() < 1e-15);
        let q = HoloPoly::from_terms(
            1,
            &[
                (&[0], Complex64::new(1.0, 0.0)),
                (&[5], Complex64::new(3.0, 0.0)),
            ],
        )
        .unwrap();
        assert!((hardy_norm_sqr(&q) - 10.0).abs() < 1e-15);
    }

    #[test]
    fn hardy_norm_matches_sphere_average() {
        // Mean of |h|² over directions on the circle.
        let h = HoloPoly::from_terms(
            1,
            &[
                (&[1], Complex64::new(1.0, 1.0)),
                (&[3], Complex64::new(-0.5, 0.0)),
            ],
        )
        .unwrap();
        let dirs = sphere_directions(1, 64).unwrap();
        let mean: f64 = dirs.iter().map(|z| h.eval(z).norm_sqr()).sum::<f64>() / 64.0;
        assert!((mean - hardy_norm_sqr(&h)).abs() < 1e-13);
        // And on S³, integrating over the whole sphere (area 2π²).
        let h2 = HoloPoly::from_terms(
            2,
            &[
                (&[1, 1], Complex64::new(1.0, 0.0)),
                (&[0, 2], Complex64::new(0.0, 2.0)),
                (&[0, 0], Complex64::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let rule = crate::norms::SliceRule::default();
        let total: f64 = crate::norms::cap_integral(2, 1.0, 3.0, &rule, |e| {
            Ok(h2
                .eval(&crate::ball::CVector::new(e.iter().copied()))
                .norm_sqr())
        })
        .unwrap();
        let mean2 = total / (2.0 * std::f64::consts::PI.powi(2));
        assert!((mean2 - hardy_norm_sqr(&h2)).abs() < 1e-10, "{mean2}");
    }

    #[test]
    fn constant_data_reduce_to_beta_integral() {
        // Constant g_j with α_j = 1 and h ≡ 1 with α_0 = 1: each factor is
        // (1 − |z|²)|c|, so the integrand is |c₁c₂|²(1 − |z|²)^{n+6−n−1}.
        for n in [1usize, 2] {
            let c1 = Complex64::new(0.0, 2.0);
            let c2 = Complex64::new(0.5, 0.5);
            let gs = vec![HoloPoly::constant(n, c1), HoloPoly::constant(n, c2)];
            let h = HoloPoly::constant(n, Complex64::new(1.0, 0.0));
            let rule = quad_ball(n, 64, None).unwrap();
            let got = multilinear_lhs(&gs, &h, &[1, 1, 1], 2.0, n as f64 / 2.0, &rule).unwrap();
            let s = 5.0;
            let beta =
                std::f64::consts::PI.powi(n as i32) * gamma(s + 1.0) / gamma(n as f64 + s + 1.0);
            let want = (c1 * c2).norm_sqr() * beta;
            assert!((got - want).abs() < 1e-10 * want, "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn exact_homogeneity() {
        let rule = quad_ball(1, 64, None).unwrap();
        let r = multilinear_harness(1, &[0, 1, 1], 2.0, 0.5, 3, 11, &rule).unwrap();
        assert!(r.g_homogeneity_error < 1e-12);
        assert!(r.h_homogeneity_error < 1e-12);
    }
}
