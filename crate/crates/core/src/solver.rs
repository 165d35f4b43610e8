//! The `∂̄` solution operator `u(z) = c_q ∫ f ∧ 𝒞ₙ^{0,q}(·, z)` and the
//! Koszul-complex corona pipeline built on it.
//!
//! Forms are stored as flat coefficient vectors. A `(0,q)`-form on `ℂⁿ` has
//! one coefficient per increasing index `L` in the order of
//! [`IncIndex::all`]`(n, q)`; a field may carry several such forms side by
//! side ("blocks"), which lets a whole tensor of forms share one quadrature
//! pass.
//!
//! Pairing `f = Σ_K f_K dw̄^K` with the kernel keeps only the splits
//! `ν = (i, J, L)` with `K = {i} ⊔ L`, giving
//!
//! ```text
//! u_L(z) = c_q Σ_{ν : L_ν = L} σ(K_ν, J_ν) · 𝒞_ν(w, z) · f_{K_ν}(w)  integrated in w,
//! ```
//!
//! where `σ(K, J)` is the sign sorting `K ⊔ J`. Any factor common to all
//! splits (the orientation of `dw̄ ∧ ωₙ` and the position of `dz̄^L`) is
//! absorbed in `c_q`, which [`calibrate_cq`] fits from pairs with a known
//! `∂̄`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{delta, CVector};
use crate::holo::{dbar_probe, HoloPoly, SampledField};
use crate::kernels::{amel_factor, perms, phi_unchecked};
use crate::koszul::{level_exists, omega, omega01, CoronaData};
use crate::quadrature::quad_ball;
use crate::tensor::{contract_values, AltTensor, IncIndex};
use crate::{Error, Result};

/// A shareable field, as stored inside solver objects.
pub type Field = Arc<dyn SampledField + Send + Sync>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of coefficients of a `(0,q)`-form on `ℂⁿ`.
pub fn form_len(n: usize, q: usize) -> usize {
    binomial(n, q)
}

/// Which kernel the solution operator integrates against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum KernelChoice {
    Plain,
    /// Ameliorated kernel with exponent `s > n` and constants `c_j`; when `c`
    /// is empty all constants are 1.
    Ameliorated {
        s: f64,
        c: Vec<f64>,
    },
}

impl KernelChoice {
    fn key(&self) -> String {
        match self {
            KernelChoice::Plain => "plain".into(),
            KernelChoice::Ameliorated { s, c } => format!("amel:{s}:{c:?}"),
        }
    }
}

/// Tunable parameters of the solver and corona pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct SolverParams {
    /// Quadrature resolution of the outermost (`q = 0`) solves.
    pub resolution: usize,
    /// Resolution for inner solves (`q ≥ 1`); these feed the outer
    /// integrands, so a coarser rule keeps nested cost linear in the outer
    /// node count.
    pub inner_resolution: usize,
    pub kernel: KernelChoice,
    /// Maximum finite-difference `∂̄` of a right-hand side on the witness grid.
    pub closed_tol: f64,
    /// Target for residual reports.
    pub residual_tol: f64,
    /// Step of the `∂̄` probes applied to solver output.
    pub fd_step: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            resolution: 256,
            inner_resolution: 64,
            kernel: KernelChoice::Plain,
            closed_tol: 1e-4,
            residual_tol: 5e-3,
            fd_step: 1e-3,
        }
    }
}

/// `∂̄` of a field of `(0,q)`-forms by central differences: returns `blocks`
/// consecutive `(0,q+1)`-forms.
pub fn form_dbar<F: SampledField + ?Sized>(
    field: &F,
    n: usize,
    q: usize,
    z: &CVector,
    h: f64,
) -> Result<Vec<Complex64>> {
    let lq = form_len(n, q);
    let lk = form_len(n, q + 1);
    if lq == 0 || field.components() % lq != 0 {
        return Err(Error::InvalidArgument(format!(
            "field with {} components is not a stack of (0,{q})-forms on ℂ^{n}",
            field.components()
        )));
    }
    let blocks = field.components() / lq;
    let mut out = vec![zero(); blocks * lk];
    if lk == 0 {
        return Ok(out);
    }
    let d = dbar_probe(field, z, h)?;
    let basis_q = IncIndex::all(n, q);
    let basis_k = IncIndex::all(n, q + 1);
    let pos_k: HashMap<IncIndex, usize> = basis_k
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    for (li, l) in basis_q.iter().enumerate() {
        for m in 0..n {
            if let Some((k, sign)) = IncIndex::single(m).merge(l) {
                let ki = pos_k[&k];
                for b in 0..blocks {
                    out[b * lk + ki] += d[b * lq + li][m] * sign;
                }
            }
        }
    }
    Ok(out)
}

/// One term of the reduced pairing `f ∧ 𝒞`.
#[derive(Clone, Debug)]
struct ReducedTerm {
    i: usize,
    k_pos: usize,
    l_pos: usize,
    sign: f64,
}

fn reduction(n: usize, q: usize) -> Result<Vec<ReducedTerm>> {
    let basis_k: HashMap<IncIndex, usize> = IncIndex::all(n, q + 1)
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    let basis_l: HashMap<IncIndex, usize> = IncIndex::all(n, q)
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    let sign_q = if q % 2 == 0 { 1.0 } else { -1.0 };
    perms(n, q)?
        .into_iter()
        .map(|nu| {
            let (k, _) = IncIndex::single(nu.i).merge(&nu.l).expect("i is not in L");
            let (_, s_kj) = k.merge(&nu.j).expect("K and J are complementary");
            Ok(ReducedTerm {
                i: nu.i,
                k_pos: basis_k[&k],
                l_pos: basis_l[&nu.l],
                sign: sign_q * nu.sign as f64 * s_kj,
            })
        })
        .collect()
}

/// A `∂̄` problem `∂̄u = f` for a stack of `(0,q+1)`-forms `f`.
pub struct DbarProblem {
    n: usize,
    q: usize,
    blocks: usize,
    rhs: Field,
    resolution: usize,
    kernel: KernelChoice,
    terms: Vec<ReducedTerm>,
}

impl DbarProblem {
    /// `rhs` must return `blocks · C(n, q+1)` components.
    pub fn new(
        n: usize,
        q: usize,
        rhs: Field,
        resolution: usize,
        kernel: KernelChoice,
    ) -> Result<Self> {
        let terms = reduction(n, q)?;
        let lk = form_len(n, q + 1);
        if rhs.components() == 0 || rhs.components() % lk != 0 {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has {} components, not a multiple of C({n}, {}) = {lk}",
                rhs.components(),
                q + 1
            )));
        }
        if let KernelChoice::Ameliorated { s, c } = &kernel {
            if !(*s > n as f64) {
                return Err(Error::InvalidArgument(format!("need s > n, got s = {s}")));
            }
            if !c.is_empty() && c.len() != n - q {
                return Err(Error::InvalidArgument(format!(
                    "expected {} constants",
                    n - q
                )));
            }
        }
        Ok(Self {
            n,
            q,
            blocks: rhs.components() / lk,
            rhs,
            resolution,
            kernel,
            terms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Largest `|∂̄f|` over `witness`; zero when `q + 2 > n`.
    pub fn closedness_residual(&self, witness: &[CVector], h: f64) -> Result<f64> {
        if self.q + 2 > self.n {
            return Ok(0.0);
        }
        let vals: Vec<f64> = witness
            .par_iter()
            .map(|z| {
                form_dbar(self.rhs.as_ref(), self.n, self.q + 1, z, h)
                    .map(|v| v.iter().map(|c| c.norm()).fold(0.0, f64::max))
            })
            .collect::<Result<_>>()?;
        Ok(vals.into_iter().fold(0.0, f64::max))
    }

    /// Fails with [`Error::NotClosed`] when the closedness residual on
    /// `witness` exceeds `tol`.
    pub fn check_closed(&self, witness: &[CVector], h: f64, tol: f64) -> Result<f64> {
        let r = self.closedness_residual(witness, h)?;
        if r > tol {
            return Err(Error::NotClosed {
                residual: r,
                tolerance: tol,
            });
        }
        Ok(r)
    }

    /// `∫ f ∧ 𝒞(·, z)` without the constant `c_q`, as `blocks` stacked
    /// `(0,q)`-forms.
    pub fn integrate_raw(&self, z: &CVector) -> Result<Vec<Complex64>> {
        let rule = quad_ball(self.n, self.resolution, Some(z))?;
        let (n, q) = (self.n, self.q);
        let lk = form_len(n, q + 1);
        let lq = form_len(n, q);
        let blocks = self.blocks;
        let ones;
        let amel_c: Option<(f64, &[f64])> = match &self.kernel {
            KernelChoice::Plain => None,
            KernelChoice::Ameliorated { s, c } => {
                if c.is_empty() {
                    ones = vec![1.0; n - q];
                    Some((*s, &ones[..]))
                } else {
                    Some((*s, &c[..]))
                }
            }
        };
        rule.try_integrate_vec(blocks * lq, |w, out| {
            let d = delta(w, z);
            if d == 0.0 {
                return Ok(());
            }
            let f = self.rhs.sample(w)?;
            let mut base = phi_unchecked(n, q, w, z, d);
            if let Some((s, c)) = amel_c {
                base *= amel_factor(n, s, w, z, c)?;
            }
            for t in &self.terms {
                let k = base * t.sign * (w[t.i].conj() - z[t.i].conj());
                for b in 0..blocks {
                    out[b * lq + t.l_pos] += k * f[b * lk + t.k_pos];
                }
            }
            Ok(())
        })
    }

    /// `c_q ∫ f ∧ 𝒞(·, z)`.
    pub fn solve_at(&self, c_q: Complex64, z: &CVector) -> Result<Vec<Complex64>> {
        Ok(self
            .integrate_raw(z)?
            .into_iter()
            .map(|v| v * c_q)
            .collect())
    }
}

fn point_key(z: &CVector) -> Vec<u64> {
    z.to_flat().into_iter().map(f64::to_bits).collect()
}

/// The solution `u` of a [`DbarProblem`] as a field, with a concurrent
/// evaluation cache.
pub struct SolutionField {
    problem: DbarProblem,
    c_q: Complex64,
    cache: RwLock<HashMap<Vec<u64>, Vec<Complex64>>>,
}

impl SolutionField {
    pub fn new(problem: DbarProblem, c_q: Complex64) -> Self {
        Self {
            problem,
            c_q,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn problem(&self) -> &DbarProblem {
        &self.problem
    }

    pub fn c_q(&self) -> Complex64 {
        self.c_q
    }

    pub fn cached_points(&self) -> usize {
        self.cache.read().expect("cache poisoned").len()
    }
}

impl SampledField for SolutionField {
    fn components(&self) -> usize {
        self.problem.blocks * form_len(self.problem.n, self.problem.q)
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        let key = point_key(z);
        if let Some(v) = self.cache.read().expect("cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let v = self.problem.solve_at(self.c_q, z)?;
        // Values are deterministic, so a concurrent duplicate insert is harmless.
        self.cache
            .write()
            .expect("cache poisoned")
            .insert(key, v.clone());
        Ok(v)
    }
}

/// Solves `∂̄u = rhs` at `z` with the calibrated constant for `(n, q)`.
pub fn dbar_solve(problem: &DbarProblem, z: &CVector) -> Result<Vec<Complex64>> {
    let c_q = calibrated_cq(problem.n, problem.q, problem.resolution, &problem.kernel)?;
    problem.solve_at(c_q, z)
}

/// Outcome of [`calibrate_cq`].
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub c_q: Complex64,
    /// `κ = 1/c_q`, the fitted constant in `∂̄∫ f₀ ∧ 𝒞 = κ f₀`.
    pub kappa: Complex64,
    /// Per-pair fitted `κ`.
    pub pair_kappas: Vec<Complex64>,
    /// Largest relative least-squares residual over the pairs.
    pub fit_residual: f64,
    /// `max |κ_pair − κ| / |κ|`.
    pub spread: f64,
}

/// Coefficient functions `c(z)` of the calibration right-hand sides
/// `c(z) dz̄₀ ∧ ⋯ ∧ dz̄_q`. Each depends on `z̄` only through `z̄₀`, so every
/// such form is `∂̄`-closed.
pub fn calibration_library() -> Vec<(&'static str, fn(&CVector) -> Complex64)> {
    vec![
        ("conj(z0)", |z| z[0].conj()),
        ("conj(z0)^2", |z| z[0].conj() * z[0].conj()),
        ("z0*conj(z0)", |z| z[0] * z[0].conj()),
    ]
}

/// Witness points for calibration and closedness checks: a fixed
/// deterministic cloud with `|z| ≤ radius`.
pub fn witness_grid(n: usize, count: usize, radius: f64) -> Vec<CVector> {
    // Golden-ratio sequences give well-spread, reproducible points.
    let phi = 0.618_033_988_749_894_9_f64;
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            let r = radius * t.powf(1.0 / (2 * n) as f64);
            let mut coords = Vec::with_capacity(n);
            let mut rem = 1.0f64;
            for j in 0..n {
                let frac = if j + 1 == n {
                    rem
                } else {
                    let s = ((k as f64 * phi * (j + 2) as f64).fract() * 0.8 + 0.1) * rem;
                    rem -= s;
                    s
                };
                let ang =
                    2.0 * std::f64::consts::PI * (k as f64 * phi * (j + 1) as f64 + 0.1).fract();
                coords.push(Complex64::from_polar(r * frac.sqrt(), ang));
            }
            CVector::new(coords)
        })
        .collect()
}

/// Fits `κ` in `∂̄(∫ f₀ ∧ 𝒞) = κ f₀` over the calibration library and the
/// witness grid, returning `c_q = 1/κ`.
///
/// Fails with [`Error::IllConditioned`] when `κ ≈ 0` or the relative fit
/// residual exceeds `1e−2`.
pub fn calibrate_cq(
    n: usize,
    q: usize,
    resolution: usize,
    kernel: &KernelChoice,
) -> Result<Calibration> {
    if q + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "q = {q} out of range for n = {n}"
        )));
    }
    let lk = form_len(n, q + 1);
    let witness = witness_grid(n, 6, 0.5);
    let h = 1e-3;
    let mut kappas = Vec::new();
    let mut worst: f64 = 0.0;
    for (_, coeff) in calibration_library() {
        let rhs: Field = Arc::new(crate::holo::FnField::new(lk, move |z: &CVector| {
            let mut v = vec![zero(); lk];
            v[0] = coeff(z);
            Ok(v)
        }));
        let problem = DbarProblem::new(n, q, rhs.clone(), resolution, kernel.clone())?;
        let u = SolutionField::new(problem, Complex64::new(1.0, 0.0));
        let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = witness
            .par_iter()
            .map(|z| Ok((form_dbar(&u, n, q, z, h)?, rhs.sample(z)?)))
            .collect::<Result<_>>()?;
        let (mut num, mut den, mut vv) = (zero(), 0.0, 0.0);
        for (v, f) in &rows {
            for (a, b) in v.iter().zip(f) {
                num += b.conj() * a;
                den += b.norm_sqr();
                vv += a.norm_sqr();
            }
        }
        if den == 0.0 || vv == 0.0 {
            return Err(Error::IllConditioned(
                "calibration right-hand side vanished".into(),
            ));
        }
        let kappa = num / den;
        let res: f64 = rows
            .iter()
            .flat_map(|(v, f)| {
                v.iter()
                    .zip(f)
                    .map(move |(a, b)| (a - kappa * b).norm_sqr())
            })
            .sum::<f64>()
            .sqrt()
            / vv.sqrt();
        worst = worst.max(res);
        kappas.push(kappa);
    }
    let kappa = kappas.iter().sum::<Complex64>() / kappas.len() as f64;
    if kappa.norm() < 1e-8 {
        return Err(Error::IllConditioned(format!(
            "fitted κ = {kappa} is near zero"
        )));
    }
    if worst > 1e-2 {
        return Err(Error::IllConditioned(format!(
            "relative fit residual {worst:.3e} exceeds 1e-2"
        )));
    }
    let spread = kappas
        .iter()
        .map(|k| (k - kappa).norm())
        .fold(0.0, f64::max)
        / kappa.norm();
    Ok(Calibration {
        c_q: 1.0 / kappa,
        kappa,
        pair_kappas: kappas,
        fit_residual: worst,
        spread,
    })
}

/// [`calibrate_cq`] memoised per `(n, q, resolution, kernel)`.
pub fn calibrated_cq(
    n: usize,
    q: usize,
    resolution: usize,
    kernel: &KernelChoice,
) -> Result<Complex64> {
    type Key = (usize, usize, usize, String);
    static CACHE: OnceLock<Mutex<HashMap<Key, Complex64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, q, resolution, kernel.key());
    if let Some(c) = cache.lock().expect("calibration cache poisoned").get(&key) {
        return Ok(*c);
    }
    let c = calibrate_cq(n, q, resolution, kernel)?.c_q;
    cache
        .lock()
        .expect("calibration cache poisoned")
        .insert(key, c);
    Ok(c)
}

/// Flattens a tensor to `[I][L]` order over `IncIndex::all`.
pub fn tensor_to_flat(t: &AltTensor) -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in IncIndex::all(t.big_n(), t.rank()) {
        for l in IncIndex::all(t.n(), t.degree()) {
            out.push(t.get(&i, &l));
        }
    }
    out
}

/// Inverse of [`tensor_to_flat`].
pub fn flat_to_tensor(
    big_n: usize,
    n: usize,
    rank: usize,
    degree: usize,
    flat: &[Complex64],
) -> Result<AltTensor> {
    let is = IncIndex::all(big_n, rank);
    let ls = IncIndex::all(n, degree);
    if flat.len() != is.len() * ls.len() {
        return Err(Error::DimensionMismatch {
            expected: is.len() * ls.len(),
            found: flat.len(),
        });
    }
    let mut t = AltTensor::zero(big_n, n, rank, degree)?;
    let mut it = flat.iter();
    for i in &is {
        for l in &ls {
            t.set(i.clone(), l.clone(), *it.next().expect("length checked"));
        }
    }
    Ok(t)
}

/// Per-level diagnostics of a corona solve.
#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub q: usize,
    pub c_q: Complex64,
    pub closedness: f64,
    pub resolution: usize,
}

/// The output of [`corona_solve`]: `f = Ω₀¹h − Λ_gΓ₀²` as a field.
pub struct CoronaSolution {
    data: Arc<CoronaData>,
    h: HoloPoly,
    gamma0: Option<Arc<SolutionField>>,
    levels: Vec<LevelReport>,
}

impl CoronaSolution {
    pub fn data(&self) -> &CoronaData {
        &self.data
    }

    pub fn h(&self) -> &HoloPoly {
        &self.h
    }

    pub fn levels(&self) -> &[LevelReport] {
        &self.levels
    }

    /// `Γ₀²(z)`, or `None` when the chain collapsed (`N = 1`).
    pub fn gamma0(&self, z: &CVector) -> Result<Option<AltTensor>> {
        match &self.gamma0 {
            None => Ok(None),
            Some(f) => {
                let big_n = self.data.big_n();
                Ok(Some(flat_to_tensor(
                    big_n,
                    self.data.n(),
                    2,
                    0,
                    &f.sample(z)?,
                )?))
            }
        }
    }
}

impl SampledField for CoronaSolution {
    fn components(&self) -> usize {
        self.data.big_n()
    }

    fn sample(&self, z: &CVector) -> Result<Vec<Complex64>> {
        let h = self.h.try_eval(z)?;
        let base = omega01(&self.data, z)?.scale(h);
        let f = match self.gamma0(z)? {
            None => base,
            Some(g0) => {
                let (g, _) = self.data.guarded_values(z)?;
                base.sub(&contract_values(&g0, &g)?)?
            }
        };
        Ok(tensor_to_flat(&f))
    }
}

/// Right-hand side `Ω_{q+1}h − Λ_gΓ_{q+1}` of level `q`, flattened.
fn level_rhs(
    data: Arc<CoronaData>,
    h: HoloPoly,
    q: usize,
    upper: Option<Arc<SolutionField>>,
) -> Field {
    let big_n = data.big_n();
    let n = data.n();
    let len = binomial(big_n, q + 2) * form_len(n, q + 1);
    Arc::new(crate::holo::FnField::new(len, move |w: &CVector| {
        let hv = h.try_eval(w)?;
        let mut t = if level_exists(&data, q + 1) {
            omega(q + 1, &data, w)?.scale(hv)
        } else {
            AltTensor::zero(big_n, n, q + 2, q + 1)?
        };
        if let Some(up) = &upper {
            let (g, _) = data.guarded_values(w)?;
            let gamma = flat_to_tensor(big_n, n, q + 3, q + 1, &up.sample(w)?)?;
            t = t.sub(&contract_values(&gamma, &g)?)?;
        }
        Ok(tensor_to_flat(&t))
    }))
}

/// Runs the descending Koszul chain `Γ_{n−1}, …, Γ₀` and returns
/// `f = Ω₀¹h − Λ_gΓ₀²`.
///
/// Levels whose tensor rank exceeds `N` vanish and are skipped. Each
/// right-hand side is checked for `∂̄`-closedness on a witness grid before
/// it is solved.
pub fn corona_solve(
    data: &CoronaData,
    h: &HoloPoly,
    params: &SolverParams,
) -> Result<CoronaSolution> {
    let n = data.n();
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if h.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.dim(),
        });
    }
    let data = Arc::new(data.clone());
    let big_n = data.big_n();
    let witness = witness_grid(n, 8, 0.6);
    let mut upper: Option<Arc<SolutionField>> = None;
    let mut reports = Vec::new();
    for q in (0..n).rev() {
        // Γ_q has rank q + 2 and vanishes once that exceeds N.
        upper = if q + 2 > big_n {
            None
        } else {
            let res = if q == 0 {
                params.resolution
            } else {
                params.inner_resolution
            };
            let rhs = level_rhs(data.clone(), h.clone(), q, upper.clone());
            let problem = DbarProblem::new(n, q, rhs, res, params.kernel.clone())?;
            let closedness = problem.check_closed(&witness, params.fd_step, params.closed_tol)?;
            let c_q = calibrated_cq(n, q, res, &params.kernel)?;
            reports.push(LevelReport {
                q,
                c_q,
                closedness,
                resolution: res,
            });
            Some(Arc::new(SolutionField::new(problem, c_q)))
        };
    }
    Ok(CoronaSolution {
        data,
        h: h.clone(),
        gamma0: upper,
        levels: reports,
    })
}

/// Residual summary of a candidate corona solution on a grid.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ResidualReport {
    pub points: usize,
    /// `max |Σ f_j g_j − h|`.
    pub max_algebraic: f64,
    pub mean_algebraic: f64,
    /// `max_j |∂̄f_j|` with `|·|` the Euclidean norm over `∂/∂z̄_m`.
    pub max_dbar: f64,
    pub mean_dbar: f64,
}

/// Per-point residuals, in grid order.
#[derive(Clone, Debug, Serialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    pub f: Vec<[f64; 2]>,
    pub algebraic: f64,
    pub dbar: f64,
}

/// Evaluates `|f·g − h|` and `|∂̄f_j|` at every grid point.
pub fn point_residuals<F: SampledField + ?Sized>(
    f: &F,
    g: &crate::holo::VecHoloPoly,
    h: &HoloPoly,
    grid: &[CVector],
    fd_step: f64,
) -> Result<Vec<PointResidual>> {
    grid.par_iter()
        .map(|z| {
            let fv = f.sample(z)?;
            let gv = g.eval(z);
            let dot: Complex64 = fv.iter().zip(&gv).map(|(a, b)| a * b).sum();
            let algebraic = (dot - h.try_eval(z)?).norm();
            let d = dbar_probe(f, z, fd_step)?;
            let dbar = d
                .iter()
                .map(|row| row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            Ok(PointResidual {
                point: z.to_flat(),
                f: fv.iter().map(|c| [c.re, c.im]).collect(),
                algebraic,
                dbar,
            })
        })
        .collect()
}

/// Max and mean of the algebraic and `∂̄` residuals over `grid`.
pub fn residuals<F: SampledField + ?Sized>(
    f: &F,
    g: &crate::holo::VecHoloPoly,
    h: &HoloPoly,
    grid: &[CVector],
    fd_step: f64,
) -> Result<ResidualReport> {
    Ok(summarize(&point_residuals(f, g, h, grid, fd_step)?))
}

pub fn summarize(rows: &[PointResidual]) -> ResidualReport {
    if rows.is_empty() {
        return ResidualReport::default();
    }
    let k = rows.len() as f64;
    ResidualReport {
        points: rows.len(),
        max_algebraic: rows.iter().map(|r| r.algebraic).fold(0.0, f64::max),
        mean_algebraic: rows.iter().map(|r| r.algebraic).sum::<f64>() / k,
        max_dbar: rows.iter().map(|r| r.dbar).fold(0.0, f64::max),
        mean_dbar: rows.iter().map(|r| r.dbar).sum::<f64>() / k,
    }
}

/// A polar test grid in the first coordinate plane for `n = 1`, or a
/// witness cloud for `n ≥ 2`, with `|z| ≤ radius`.
pub fn residual_grid(n: usize, count: usize, radius: f64) -> Vec<CVector> {
    if n == 1 {
        let rings = ((count as f64).sqrt().ceil() as usize).max(1);
        let per = count.div_ceil(rings);
        let mut out = Vec::new();
        for a in 0..rings {
            let r = radius * (a as f64 + 1.0) / rings as f64;
            for b in 0..per {
                let th =
                    2.0 * std::f64::consts::PI * (b as f64 + 0.5 * (a % 2) as f64) / per as f64;
                out.push(CVector::new([Complex64::from_polar(r, th)]));
            }
        }
        out.truncate(count);
        out
    } else {
        witness_grid(n, count, radius)
    }
}

/// JSON export of a solution sampled on a grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridDump {
    pub points: Vec<Vec<f64>>,
    pub f: Vec<Vec<[f64; 2]>>,
    pub residuals: Vec<[f64; 2]>,
    pub summary: ResidualReport,
}

pub fn grid_dump(rows: &[PointResidual]) -> GridDump {
    GridDump {
        points: rows.iter().map(|r| r.point.clone()).collect(),
        f: rows.iter().map(|r| r.f.clone()).collect(),
        residuals: rows.iter().map(|r| [r.algebraic, r.dbar]).collect(),
        summary: summarize(rows),
    }
}
