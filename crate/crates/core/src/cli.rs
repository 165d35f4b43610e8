//! The `bmo-corona` batch runner.
//!
//! Each subcommand selects one experiment. A JSON config (see
//! [`ExperimentConfig`]) may replace the experiment list and overrides any
//! flag it sets. Every run writes `results.csv` (one row per check) and
//! `report.json` (rows, runtimes and per-experiment details) into the output
//! directory; the process exits with status 1 when an assertion-level check
//! fails and 2 on configuration errors.
//!
//! The CSV opens with a single `#` line carrying the generation time. Apart
//! from that line it depends only on the config and seed: the `seconds`
//! column is left empty unless `--timings` is given, and wall-clock times
//! always go to `report.json`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball::{delta, mobius_magnitude, pairing, sample_ball, CVector};
use crate::holo::{HoloPoly, VecHoloPoly};
use crate::koszul::{
    convention_factor, koszul_residual, omega_direct, quasimult_constants, wedge_power, CoronaData,
    FD_STEP,
};
use crate::norms::{
    annulus_sweep, bmoa_ratio, cm_norm, multilinear_harness, sampled_bmoa_witness,
    tabc_region_harness, wx_norm, CapGrid, HarnessOptions, SliceRule, TabcParams, TentGrid,
    Verdict,
};
use crate::quadrature::{quad_ball, GradedOptions};
use crate::solver::{
    calibrate_cq, corona_solve, form_dbar, grid_dump, point_residuals, residual_grid, summarize,
    DbarProblem, Field, KernelChoice, SolutionField, SolverParams,
};
use crate::{Error, Result};

/// Version of the `report.json` layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Default `T_{a,b,c}` sweep grid on the disk.
pub const DEFAULT_TABC_GRID: &str = "a=0:2:0.25,b=-0.75:1:0.25,c=-1.5:2:0.5";

#[derive(Parser, Debug)]
#[command(
    name = "bmo-corona",
    version,
    about = "Corona solving and Carleson/BMO norm experiments on the unit ball"
)]
pub struct Cli {
    /// JSON experiment config; its fields override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for results.csv and report.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Quadrature resolution of the solver.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Fill the `seconds` column of the CSV.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Δ, tent, quadrature and Koszul identity checks.
    CheckIdentities {
        /// Dimension; all of 1, 2, 3 when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Random pairs for the Δ identities.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Solve ∂̄u = z̄₁ dz̄₁ and report residuals and convergence.
    Dbar {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Corona solve for the config's g and h.
    Corona,
    /// Map the T_{a,b,c} verdicts over an (a, b, c) grid on the disk.
    TabcSweep {
        #[arg(long)]
        n: Option<usize>,
        /// `a=lo:hi:step,b=…,c=…` (inclusive ranges).
        #[arg(long)]
        grid: Option<String>,
        /// Use the five-depth harness instead of the quick one.
        #[arg(long)]
        full: bool,
    },
    /// BMOA/Carleson comparison and weak-Carleson consistency.
    Norms {
        #[arg(long)]
        n: Option<usize>,
    },
    /// Multilinear estimate harness.
    Multilinear {
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated derivative orders, `h` first.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        members: Option<usize>,
    },
}

impl Command {
    fn experiment(&self) -> &'static str {
        match self {
            Command::CheckIdentities { .. } => "check-identities",
            Command::Dbar { .. } => "dbar",
            Command::Corona => "corona",
            Command::TabcSweep { .. } => "tabc-sweep",
            Command::Norms { .. } => "norms",
            Command::Multilinear { .. } => "multilinear",
        }
    }
}

/// A single polynomial or a list of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(HoloPoly),
    Many(Vec<HoloPoly>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<HoloPoly> {
        match self {
            OneOrMany::One(p) => vec![p],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Check thresholds; every field has a default.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub koszul: f64,
    pub omega_constant: f64,
    /// `max |Σ f_j g_j − h|` of corona solutions.
    pub algebraic: f64,
    /// `max |∂̄f_j|` of corona solutions.
    pub dbar: f64,
    /// `∂̄`-residual of the plain solver demo.
    pub dbar_solver: f64,
    pub calibration_spread: f64,
    pub homogeneity: f64,
    pub multilinear_spread: f64,
    pub bmoa_spread: f64,
    pub wx_cm: f64,
    pub quasimult_spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            koszul: 1e-6,
            omega_constant: 1e-10,
            algebraic: 5e-3,
            dbar: 5e-3,
            dbar_solver: 2e-3,
            calibration_spread: 1e-2,
            homogeneity: 1e-10,
            multilinear_spread: 3.0,
            bmoa_spread: 20.0,
            wx_cm: 0.05,
            quasimult_spread: 2.0,
        }
    }
}

/// The JSON experiment description.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of generators; checked against `g` when both are given.
    #[serde(rename = "N", default)]
    pub big_n: Option<usize>,
    #[serde(default)]
    pub g: Option<VecHoloPoly>,
    #[serde(default)]
    pub h: Option<OneOrMany>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub inner_resolution: Option<usize>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    /// Replaces the subcommand's experiment when present.
    #[serde(default)]
    pub experiments: Option<Vec<String>>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub jobs: Option<usize>,
    /// `T_{a,b,c}` sweep grid.
    #[serde(default)]
    pub grid: Option<String>,
    /// Skip the tent-norm witness of corona solutions.
    #[serde(default)]
    pub skip_witness: Option<bool>,
    /// Residual grid size and radius of corona runs.
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub grid_radius: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if let Some(n) = self.n {
            if !(1..=3).contains(&n) {
                return Err(Error::Config(format!("n must be 1, 2 or 3, got {n}")));
            }
        }
        if let Some(g) = &self.g {
            if let Some(n) = self.n {
                if g.dim() != n {
                    return Err(Error::Config(format!(
                        "g has n = {} but config n = {n}",
                        g.dim()
                    )));
                }
            }
            if let Some(bn) = self.big_n {
                if g.len() != bn {
                    return Err(Error::Config(format!(
                        "g has {} components but N = {bn}",
                        g.len()
                    )));
                }
            }
        }
        if let (Some(h), Some(g)) = (&self.h, &self.g) {
            let hs = h.clone().into_vec();
            if let Some(bad) = hs.iter().find(|p| p.dim() != g.dim()) {
                return Err(Error::Config(format!(
                    "h has n = {} but g has n = {}",
                    bad.dim(),
                    g.dim()
                )));
            }
        }
        if let Some(list) = &self.experiments {
            for e in list {
                if !EXPERIMENTS.contains(&e.as_str()) {
                    return Err(Error::Config(format!(
                        "unknown experiment {e:?}; expected one of {EXPERIMENTS:?}"
                    )));
                }
            }
        }
        if let Some(rad) = self.grid_radius {
            if !(rad > 0.0 && rad < 1.0) {
                return Err(Error::Config(format!(
                    "grid_radius must lie in (0, 1), got {rad}"
                )));
            }
        }
        if self.resolution == Some(0) || self.jobs == Some(0) || self.grid_points == Some(0) {
            return Err(Error::Config("resolution and jobs must be positive".into()));
        }
        Ok(())
    }
}

const EXPERIMENTS: [&str; 6] = [
    "check-identities",
    "dbar",
    "corona",
    "tabc-sweep",
    "norms",
    "multilinear",
];

/// One check: a measured value against a bound.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub check_id: String,
    pub params: String,
    pub value: f64,
    pub bound: String,
    /// `None` for informational rows.
    pub pass: Option<bool>,
    pub seconds: f64,
}

impl CheckRow {
    fn upper(id: &str, params: String, value: f64, bound: f64) -> Self {
        Self {
            check_id: id.into(),
            params,
            value,
            bound: format!("<= {bound:e}"),
            pass: Some(value <= bound),
            seconds: 0.0,
        }
    }

    fn info(id: &str, params: String, value: f64) -> Self {
        Self {
            check_id: id.into(),
            params,
            value,
            bound: String::new(),
            pass: None,
            seconds: 0.0,
        }
    }

    fn assert(id: &str, params: String, value: f64, bound: String, pass: bool) -> Self {
        Self {
            check_id: id.into(),
            params,
            value,
            bound,
            pass: Some(pass),
            seconds: 0.0,
        }
    }

    fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

/// Rows and free-form details of one experiment.
#[derive(Debug, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<CheckRow>,
    pub details: Value,
}

/// Settings after merging flags and config.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub experiments: Vec<String>,
    pub n: Option<usize>,
    pub g: Option<VecHoloPoly>,
    pub h: Vec<HoloPoly>,
    pub resolution: Option<usize>,
    pub inner_resolution: Option<usize>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub grid: String,
    pub full_harness: bool,
    pub pairs: usize,
    pub alpha: Vec<usize>,
    pub members: usize,
    pub skip_witness: bool,
    pub grid_points: Option<usize>,
    pub grid_radius: Option<f64>,
}

fn parse_alpha(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("bad alpha entry {t:?}: {e}")))
        })
        .collect()
}

/// Merges the command line with an optional config (config wins).
pub fn resolve(cli: &Cli) -> Result<Resolved> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let (flag_n, grid, full, pairs, alpha, members) = match &cli.command {
        Command::CheckIdentities { n, pairs } => (*n, None, false, *pairs, None, None),
        Command::Dbar { n } | Command::Norms { n } => (*n, None, false, None, None, None),
        Command::Corona => (None, None, false, None, None, None),
        Command::TabcSweep { n, grid, full } => (*n, grid.clone(), *full, None, None, None),
        Command::Multilinear { n, alpha, members } => {
            (*n, None, false, None, alpha.clone(), *members)
        }
    };
    if let Some(n) = flag_n {
        if !(1..=3).contains(&n) {
            return Err(Error::Config(format!("n must be 1, 2 or 3, got {n}")));
        }
    }
    Ok(Resolved {
        experiments: cfg
            .experiments
            .clone()
            .unwrap_or_else(|| vec![cli.command.experiment().to_string()]),
        n: cfg.n.or(cfg.g.as_ref().map(|g| g.dim())).or(flag_n),
        g: cfg.g.clone(),
        h: cfg.h.clone().map(OneOrMany::into_vec).unwrap_or_default(),
        resolution: cfg.resolution.or(cli.resolution),
        inner_resolution: cfg.inner_resolution,
        tolerances: cfg.tolerances.clone().unwrap_or_default(),
        out: cfg
            .out
            .clone()
            .or(cli.out.clone())
            .unwrap_or_else(|| PathBuf::from("results")),
        seed: cfg.seed.or(cli.seed).unwrap_or(7),
        jobs: cfg.jobs.or(cli.jobs),
        grid: cfg
            .grid
            .clone()
            .or(grid)
            .unwrap_or_else(|| DEFAULT_TABC_GRID.into()),
        full_harness: full,
        pairs: pairs.unwrap_or(10_000),
        alpha: match alpha {
            Some(s) => parse_alpha(&s)?,
            None => vec![0, 1, 1],
        },
        members: members.unwrap_or(20),
        skip_witness: cfg.skip_witness.unwrap_or(false),
        grid_points: cfg.grid_points,
        grid_radius: cfg.grid_radius,
    })
}

/// Runs one named experiment.
pub fn run_experiment(name: &str, r: &Resolved) -> Result<ExperimentOutput> {
    match name {
        "check-identities" => {
            let dims: Vec<usize> = r.n.map(|n| vec![n]).unwrap_or_else(|| vec![1, 2, 3]);
            let mut out = ExperimentOutput::default();
            for n in dims {
                out.rows
                    .extend(identity_suite(n, r.pairs, r.seed, &r.tolerances)?);
            }
            Ok(out)
        }
        "dbar" => dbar_experiment(r.n.unwrap_or(1), r.resolution.unwrap_or(256), &r.tolerances),
        "corona" => corona_experiment(r),
        "tabc-sweep" => tabc_sweep(r.n.unwrap_or(1), &r.grid, r.full_harness),
        "norms" => norms_experiment(r.n.unwrap_or(1), r.seed, &r.tolerances),
        "multilinear" => {
            multilinear_experiment(r.n.unwrap_or(1), &r.alpha, r.members, r.seed, &r.tolerances)
        }
        other => Err(Error::Config(format!("unknown experiment {other:?}"))),
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t0 = Instant::now();
    let v = f()?;
    Ok((v, t0.elapsed().as_secs_f64()))
}

fn with_seconds(mut rows: Vec<CheckRow>, seconds: f64) -> Vec<CheckRow> {
    for r in &mut rows {
        r.seconds = seconds;
    }
    rows
}

/// Δ, tent-chain, quadrature, Koszul and quasi-multiplicativity checks in
/// dimension `n`.
pub fn identity_suite(
    n: usize,
    pairs: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let p = |extra: &str| format!("n={n};seed={seed}{extra}");

    let (deltas, secs) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
        let (mut wz, mut ww, mut oz) = (0.0f64, 0.0f64, 0.0f64);
        let origin = CVector::zeros(n);
        for _ in 0..pairs {
            let w = sample_ball(&mut rng, n, 0.999);
            let z = sample_ball(&mut rng, n, 0.999);
            let lhs = delta(&w, &z);
            let one_minus = (Complex64::new(1.0, 0.0) - pairing(&w, &z)?).norm_sqr();
            wz = wz.max((lhs - one_minus * mobius_magnitude(&w, &z)?.powi(2)).abs());
            ww = ww.max(delta(&w, &w).abs());
            oz = oz.max((delta(&origin, &z) - z.norm_sqr()).abs());
        }
        Ok([wz, ww, oz])
    })?;
    let pp = p(&format!(";pairs={pairs}"));
    rows.extend(with_seconds(
        vec![
            CheckRow::upper(
                "deltawz/mobius_factorization",
                pp.clone(),
                deltas[0],
                tol.identity,
            ),
            CheckRow::upper("deltawz/diagonal", pp.clone(), deltas[1], tol.identity),
            CheckRow::upper("deltawz/origin", pp, deltas[2], tol.identity),
        ],
        secs,
    ));

    let (ann, secs) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        annulus_sweep(n, 20, 100, &mut rng)
    })?;
    let lo = ann
        .iter()
        .map(|a| a.ratio_min)
        .fold(f64::INFINITY, f64::min);
    let hi = ann.iter().map(|a| a.ratio_max).fold(0.0, f64::max);
    let ok = ann.iter().all(|a| a.ratios_within(0.25, 4.0));
    rows.push(CheckRow {
        seconds: secs,
        ..CheckRow::assert(
            "sufftoshow/annulus_ratio_min",
            p(";trials=20;samples=100"),
            lo,
            "[0.25, 4]".into(),
            ok,
        )
    });
    rows.push(CheckRow {
        seconds: secs,
        ..CheckRow::assert(
            "sufftoshow/annulus_ratio_max",
            p(";trials=20;samples=100"),
            hi,
            "[0.25, 4]".into(),
            ok,
        )
    });

    let (vol, secs) = timed(|| {
        let rule = quad_ball(n, 64, None)?;
        Ok(rule.integrate(|_| 1.0))
    })?;
    let want = std::f64::consts::PI.powi(n as i32) / statrs::function::gamma::gamma(n as f64 + 1.0);
    rows.push(CheckRow {
        seconds: secs,
        ..CheckRow::upper(
            "quadrature/ball_volume",
            p(";resolution=64"),
            (vol - want).abs(),
            1e-6,
        )
    });

    let (kz, secs) = timed(|| koszul_checks(n, seed))?;
    rows.extend(with_seconds(
        vec![
            CheckRow::upper(
                "induction/koszul_residual",
                p(";points=20"),
                kz.residual,
                tol.koszul,
            ),
            CheckRow::upper(
                "Omegaform/constant_spread",
                p(";points=20"),
                kz.spread,
                tol.omega_constant,
            ),
            CheckRow::upper(
                "Omegaform/constant_vs_convention",
                p(";points=20"),
                kz.convention_error,
                tol.omega_constant,
            ),
        ],
        secs,
    ));

    if n <= 2 {
        let (qm, secs) = timed(|| {
            [4usize, 8, 16]
                .iter()
                .map(|&bn| quasimult_constants(n, bn, 3, 30, 0.95, seed))
                .collect::<Result<Vec<_>>>()
        })?;
        for ell in 0..qm[0].len() {
            let vals: Vec<f64> = qm.iter().map(|c| c[ell]).collect();
            let hi = vals.iter().copied().fold(0.0, f64::max);
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            rows.push(CheckRow {
                seconds: secs,
                ..CheckRow::upper(
                    &format!("quasimult/C{}_spread", ell + 1),
                    p(";N=4,8,16"),
                    spread,
                    tol.quasimult_spread,
                )
            });
        }
    }
    Ok(rows)
}

struct KoszulSummary {
    residual: f64,
    spread: f64,
    convention_error: f64,
}

/// Three generators with a common-zero-free sum of squares in any dimension.
pub fn standard_generators(n: usize) -> Result<VecHoloPoly> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let mut last = vec![0u32; n];
    last[n - 1] = 2;
    let mut first = vec![0u32; n];
    first[0] = 1;
    VecHoloPoly::new(vec![
        HoloPoly::coordinate(n, 0),
        HoloPoly::from_terms(
            n,
            &[(&vec![0; n], c(1.0, 0.0)), (&first, c(-2.0 / 3.0, 0.0))],
        )?,
        HoloPoly::from_terms(n, &[(&vec![0; n], c(0.5, 0.0)), (&last, c(0.2, 0.3))])?,
    ])
}

fn koszul_checks(n: usize, seed: u64) -> Result<KoszulSummary> {
    let d = CoronaData::from_generators(standard_generators(n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(n as u64));
    let points: Vec<CVector> = (0..20).map(|_| sample_ball(&mut rng, n, 0.8)).collect();
    let mut residual = 0.0f64;
    for z in &points {
        for q in 0..n {
            residual = residual.max(koszul_residual(q, &d, z, FD_STEP)?);
        }
    }
    let (spread, convention_error) = omega_constant(&d, &points)?;
    Ok(KoszulSummary {
        residual,
        spread,
        convention_error,
    })
}

/// Ratio of the permutation formula to `Ω₀¹ ∧ Ω̃^ℓ` over all nonzero entries,
/// levels `ℓ ≥ 1` and points: returns the largest deviation from the first
/// ratio of each level, and the largest deviation of that ratio from
/// `−convention_factor(ℓ)/(ℓ + 1)`.
pub fn omega_constant(d: &CoronaData, points: &[CVector]) -> Result<(f64, f64)> {
    let (mut spread, mut conv) = (0.0f64, 0.0f64);
    for ell in 1..=d.n().min(d.big_n() - 1) {
        let mut reference: Option<Complex64> = None;
        for z in points {
            let direct = omega_direct(ell, d, z)?;
            let wedge = wedge_power(d, ell, z, false)?;
            let scale = wedge.max_abs();
            for (key, w) in wedge.entries() {
                if w.norm() <= 1e-8 * scale {
                    continue;
                }
                let r = direct.get(&key.0, &key.1) / w;
                let r0 = *reference.get_or_insert(r);
                spread = spread.max((r - r0).norm());
            }
        }
        if let Some(r0) = reference {
            let want = -convention_factor(ell) / (ell as f64 + 1.0);
            conv = conv.max((r0 - want).norm());
        }
    }
    Ok((spread, conv))
}

/// `∂̄u = z̄₁ dz̄₁` (a `(0,1)`-form with only its first coefficient set).
fn conj_z_rhs(n: usize) -> Field {
    std::sync::Arc::new(crate::holo::FnField::new(n, move |z: &CVector| {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[0] = z[0].conj();
        Ok(v)
    }))
}

/// Largest `|∂̄u − f|` for the `z̄₁ dz̄₁` problem at `resolution` on the
/// standard residual grid, together with the calibration it used.
pub fn dbar_demo(n: usize, resolution: usize) -> Result<(f64, crate::solver::Calibration)> {
    let cal = calibrate_cq(n, 0, resolution, &KernelChoice::Plain)?;
    let problem = DbarProblem::new(n, 0, conj_z_rhs(n), resolution, KernelChoice::Plain)?;
    let u = SolutionField::new(problem, cal.c_q);
    let grid = residual_grid(n, 48, 0.9);
    let errs: Vec<f64> = grid
        .par_iter()
        .map(|z| {
            let d = form_dbar(&u, n, 0, z, 1e-3)?;
            let mut want = vec![Complex64::new(0.0, 0.0); n];
            want[0] = z[0].conj();
            Ok(d.iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok((errs.into_iter().fold(0.0, f64::max), cal))
}

fn dbar_experiment(n: usize, resolution: usize, tol: &Tolerances) -> Result<ExperimentOutput> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let coarse = (resolution / 2).max(4);
    let ((fine, cal), s1) = timed(|| dbar_demo(n, resolution))?;
    let ((rough, _), s2) = timed(|| dbar_demo(n, coarse))?;
    let p = |res: usize| format!("n={n};q=0;resolution={res}");
    let rate = rough / fine;
    let rows = vec![
        CheckRow {
            seconds: s1,
            ..CheckRow::upper("fis/dbar_residual", p(resolution), fine, tol.dbar_solver)
        },
        CheckRow {
            seconds: s2,
            ..CheckRow::info("fis/dbar_residual", p(coarse), rough)
        },
        CheckRow {
            seconds: s1 + s2,
            ..CheckRow::assert(
                "fis/convergence_factor",
                format!("n={n};from={coarse};to={resolution}"),
                rate,
                ">= 2".into(),
                rate >= 2.0,
            )
        },
        CheckRow {
            seconds: s1,
            ..CheckRow::upper(
                "fis/calibration_spread",
                p(resolution),
                cal.spread,
                tol.calibration_spread,
            )
        },
        CheckRow {
            seconds: s1,
            ..CheckRow::info("fis/calibrated_c0_re", p(resolution), cal.c_q.re)
        },
    ];
    Ok(ExperimentOutput {
        rows,
        details: json!({ "calibration": cal }),
    })
}

/// Tent grid and slice rule used for the BMOA witness of corona solutions.
pub fn witness_rule() -> (TentGrid, SliceRule) {
    let rule = SliceRule {
        angular: 6,
        torus: 6,
        graded: GradedOptions {
            order: 4,
            rel_tol: 1e-3,
            max_panels: 20,
            ..GradedOptions::default()
        },
    };
    (TentGrid::standard(1, 4, 3).expect("valid grid"), rule)
}

fn corona_experiment(r: &Resolved) -> Result<ExperimentOutput> {
    let g =
        r.g.clone()
            .ok_or_else(|| Error::Config("corona needs g in the config".into()))?;
    let n = g.dim();
    let hs = if r.h.is_empty() {
        vec![HoloPoly::constant(n, Complex64::new(1.0, 0.0))]
    } else {
        r.h.clone()
    };
    let data = CoronaData::from_generators(g.clone())?;
    let params = SolverParams {
        resolution: r.resolution.unwrap_or(if n == 1 { 256 } else { 144 }),
        inner_resolution: r.inner_resolution.unwrap_or(64),
        residual_tol: r.tolerances.algebraic,
        ..SolverParams::default()
    };
    // Solver error grows towards the sphere, and the coarse n = 2 rule is
    // only checked on an inner ball.
    let (count, radius) = if n == 1 { (48, 0.9) } else { (12, 0.6) };
    let grid = residual_grid(
        n,
        r.grid_points.unwrap_or(count),
        r.grid_radius.unwrap_or(radius),
    );
    let mut out = ExperimentOutput::default();
    let mut details = Vec::new();
    for h in &hs {
        let p = format!("n={n};N={};h={h};resolution={}", g.len(), params.resolution);
        let t0 = Instant::now();
        let sol = corona_solve(&data, h, &params)?;
        let pts = point_residuals(&sol, &g, h, &grid, params.fd_step)?;
        let rep = summarize(&pts);
        let secs = t0.elapsed().as_secs_f64();
        out.rows.push(CheckRow {
            seconds: secs,
            ..CheckRow::upper(
                "Ngen/max_algebraic",
                p.clone(),
                rep.max_algebraic,
                r.tolerances.algebraic,
            )
        });
        out.rows.push(CheckRow {
            seconds: secs,
            ..CheckRow::upper("antip/max_dbar", p.clone(), rep.max_dbar, r.tolerances.dbar)
        });
        out.rows.push(CheckRow {
            seconds: secs,
            ..CheckRow::info("antip/mean_dbar", p.clone(), rep.mean_dbar)
        });
        let mut witness = Value::Null;
        if n == 1 && !r.skip_witness {
            let (tents, rule) = witness_rule();
            let (cm, s) = timed(|| {
                cm_norm(
                    &sampled_bmoa_witness(&sol, n, params.fd_step),
                    &tents,
                    &rule,
                )
            })?;
            out.rows.push(CheckRow {
                seconds: s,
                ..CheckRow::assert(
                    "accomplishFmu/cm_witness",
                    p.clone(),
                    cm.value,
                    "finite".into(),
                    cm.is_finite(),
                )
            });
            witness = serde_json::to_value(&cm)?;
        }
        details.push(json!({
            "h": h,
            "levels": sol.levels(),
            "residuals": grid_dump(&pts),
            "cm_witness": witness,
        }));
    }
    out.details = json!({ "g": g, "delta": data.delta(), "solves": details });
    Ok(out)
}

/// Parses `a=lo:hi:step,b=…,c=…` into the three inclusive value lists.
pub fn parse_grid(spec: &str) -> Result<[Vec<f64>; 3]> {
    let mut axes: [Option<Vec<f64>>; 3] = [None, None, None];
    for part in spec.split(',') {
        let (name, range) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("grid entry {part:?} lacks '='")))?;
        let slot = match name.trim() {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            other => return Err(Error::Config(format!("unknown grid axis {other:?}"))),
        };
        let nums: Vec<f64> = range
            .split(':')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad number {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let vals = match nums[..] {
            [v] => vec![v],
            [lo, hi, step] if step > 0.0 && hi >= lo => {
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| lo + step * k as f64).collect()
            }
            _ => {
                return Err(Error::Config(format!(
                    "axis {name}: expected v or lo:hi:step with step > 0, got {range:?}"
                )))
            }
        };
        axes[slot] = Some(vals);
    }
    let [a, b, c] = axes;
    match (a, b, c) {
        (Some(a), Some(b), Some(c)) => Ok([a, b, c]),
        _ => Err(Error::Config("grid must set a, b and c".into())),
    }
}

fn tabc_sweep(n: usize, grid: &str, full: bool) -> Result<ExperimentOutput> {
    if n != 1 {
        return Err(Error::Config(format!(
            "tabc-sweep supports n = 1 only, got n = {n}"
        )));
    }
    let [av, bv, cv] = parse_grid(grid)?;
    let mut cells = Vec::with_capacity(av.len() * bv.len() * cv.len());
    for &a in &av {
        for &b in &bv {
            cells.extend(cv.iter().map(|&c| TabcParams::new(a, b, c)));
        }
    }
    let opts = if full {
        HarnessOptions::default()
    } else {
        HarnessOptions::quick()
    };
    let results: Vec<(Result<crate::norms::HarnessReport>, f64)> = cells
        .par_iter()
        .map(|t| {
            let t0 = Instant::now();
            let r = tabc_region_harness(t, n, &opts);
            (r, t0.elapsed().as_secs_f64())
        })
        .collect();
    let mut out = ExperimentOutput::default();
    let mut reports = Vec::new();
    for (t, (rep, secs)) in cells.iter().zip(results) {
        let rep = rep?;
        let consistent = match rep.verdict {
            Verdict::Bounded => rep.in_region,
            Verdict::Unbounded => !rep.in_region,
            Verdict::Inconclusive => true,
        };
        let decided = rep.verdict != Verdict::Inconclusive;
        let params = format!(
            "n={n};a={};b={};c={};in_region={};verdict={}",
            t.a, t.b, t.c, rep.in_region, rep.verdict
        );
        let row = if decided {
            CheckRow::assert(
                "indexcondition/verdict",
                params,
                rep.max_over_median,
                "consistent".into(),
                consistent,
            )
        } else {
            CheckRow::info("indexcondition/verdict", params, rep.max_over_median)
        };
        out.rows.push(CheckRow {
            seconds: secs,
            ..row
        });
        reports.push(rep);
    }
    out.details =
        json!({ "grid": grid, "harness": if full { "full" } else { "quick" }, "cells": reports });
    Ok(out)
}

fn monomial_tuple(n: usize, k: u32) -> Result<VecHoloPoly> {
    let mut e = vec![0u32; n];
    e[0] = k;
    VecHoloPoly::new(vec![HoloPoly::from_terms(
        n,
        &[(&e, Complex64::new(1.0, 0.0))],
    )?])
}

/// Largest over smallest of the `cm/bmo` ratios for `z₁^k`, `k = 1..=kmax`.
pub fn bmoa_spread(n: usize, kmax: u32) -> Result<(f64, Vec<crate::norms::BmoaRatio>)> {
    let tents = TentGrid::default_for(n)?;
    let caps = CapGrid::default_for(n)?;
    let rule = SliceRule::coarse();
    let ratios = (1..=kmax)
        .map(|k| bmoa_ratio(&monomial_tuple(n, k)?, &tents, &caps, &rule))
        .collect::<Result<Vec<_>>>()?;
    let lows: Vec<f64> = ratios.iter().filter_map(|r| r.lower).collect();
    if lows.len() != ratios.len() {
        return Ok((f64::INFINITY, ratios));
    }
    let hi = lows.iter().copied().fold(0.0, f64::max);
    let lo = lows.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((hi / lo, ratios))
}

/// Largest relative gap between `wx_norm(f, 2, n/2, 1)` rescaled to the
/// `(1 − |ζ|)ⁿ` normalizer and the tent norm of the measure `μ_f^1`, over
/// `members` random polynomials.
pub fn wx_cm_gap(n: usize, members: usize, seed: u64) -> Result<f64> {
    use crate::norms::multilinear::random_poly;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TentGrid::standard(n, if n == 1 { 8 } else { 6 }, 4)?;
    let rule = SliceRule::coarse();
    let mut worst = 0.0f64;
    for _ in 0..members {
        let f = random_poly(&mut rng, n, 3, true);
        let wx = wx_norm(&f, 2.0, n as f64 / 2.0, 1, &grid, &rule)?;
        let fv = VecHoloPoly::new(vec![f.clone()])?;
        let mu = crate::norms::carleson::tent_sweep(
            &grid,
            &rule,
            |z| crate::norms::mu_gm_density(&fv, 1, z),
            |t| t.depth().powi(n as i32),
            0.5,
        )?;
        let rescaled = wx
            .per_apex
            .iter()
            .map(|a| a.value * (1.0 + a.apex.norm()).powf(n as f64 / 2.0))
            .fold(0.0, f64::max);
        worst = worst.max((rescaled - mu.value).abs() / mu.value);
    }
    Ok(worst)
}

fn norms_experiment(n: usize, seed: u64, tol: &Tolerances) -> Result<ExperimentOutput> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut out = ExperimentOutput::default();
    let ((spread, ratios), s) = timed(|| bmoa_spread(n, 10))?;
    out.rows.push(CheckRow {
        seconds: s,
        ..CheckRow::upper(
            "twoestimates/bmoa_ratio_spread",
            format!("n={n};g=z^k;k=1..10"),
            spread,
            tol.bmoa_spread,
        )
    });
    for (k, r) in ratios.iter().enumerate() {
        out.rows.push(CheckRow {
            seconds: s,
            ..CheckRow::info(
                "twoestimates/cm_over_bmo",
                format!("n={n};k={}", k + 1),
                r.lower.unwrap_or(f64::NAN),
            )
        });
    }
    let (gap, s) = timed(|| wx_cm_gap(n, 5, seed))?;
    out.rows.push(CheckRow {
        seconds: s,
        ..CheckRow::upper(
            "wcm/wx_vs_cm_relative_gap",
            format!(
                "n={n};p=2;sigma={};m=1;members=5;seed={seed}",
                n as f64 / 2.0
            ),
            gap,
            tol.wx_cm,
        )
    });
    out.details = json!({ "bmoa": ratios });
    Ok(out)
}

fn multilinear_experiment(
    n: usize,
    alpha: &[usize],
    members: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ExperimentOutput> {
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let res = if n == 1 { 256 } else { 100 };
    let (rep, s) = timed(|| {
        let rule = quad_ball(n, res, None)?;
        multilinear_harness(n, alpha, 2.0, n as f64 / 2.0, members, seed, &rule)
    })?;
    let p = format!("n={n};alpha={alpha:?};p=2;members={members};seed={seed}").replace(", ", " ");
    let rows = vec![
        CheckRow {
            seconds: s,
            ..CheckRow::upper(
                "mlin/g_homogeneity",
                p.clone(),
                rep.g_homogeneity_error,
                tol.homogeneity,
            )
        },
        CheckRow {
            seconds: s,
            ..CheckRow::upper(
                "mlin/h_homogeneity",
                p.clone(),
                rep.h_homogeneity_error,
                tol.homogeneity,
            )
        },
        CheckRow {
            seconds: s,
            ..CheckRow::assert(
                "mlin/max_over_median",
                p,
                rep.max_over_median,
                format!("< {}", tol.multilinear_spread),
                rep.max_over_median < tol.multilinear_spread,
            )
        },
    ];
    Ok(ExperimentOutput {
        rows,
        details: serde_json::to_value(&rep)?,
    })
}

/// The versioned `report.json` document.
#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    tool_version: &'static str,
    settings: &'a Resolved,
    passed: bool,
    checks: &'a [CheckRow],
    experiments: Vec<Value>,
}

fn fmt_pass(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "INFO",
    }
}

/// Writes the CSV body (everything after the timestamp line).
pub fn write_csv_rows<W: std::io::Write>(w: W, rows: &[CheckRow], timings: bool) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    wr.write_record(["check_id", "params", "value", "bound", "pass", "seconds"])
        .map_err(io)?;
    for r in rows {
        let secs = if timings {
            format!("{:.3}", r.seconds)
        } else {
            String::new()
        };
        wr.write_record([
            r.check_id.as_str(),
            &r.params,
            &format!("{:.9e}", r.value),
            &r.bound,
            fmt_pass(r.pass),
            &secs,
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Executes every experiment and writes the artifacts. Returns whether all
/// assertion-level checks passed.
pub fn execute(r: &Resolved, timings: bool) -> Result<bool> {
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for name in &r.experiments {
        let out = run_experiment(name, r)?;
        details.push(json!({ "experiment": name, "details": out.details }));
        rows.extend(out.rows);
    }
    let passed = !rows.iter().any(CheckRow::failed);
    std::fs::create_dir_all(&r.out)?;
    let mut csv_bytes = Vec::new();
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    csv_bytes.extend(
        format!(
            "# bmo-corona {} generated at unix time {stamp}\n",
            env!("CARGO_PKG_VERSION")
        )
        .bytes(),
    );
    write_csv_rows(&mut csv_bytes, &rows, timings)?;
    std::fs::write(r.out.join("results.csv"), csv_bytes)?;
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        settings: r,
        passed,
        checks: &rows,
        experiments: details,
    };
    std::fs::write(
        r.out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    // A closed pipe only loses the console summary; the artifacts are written.
    let mut stdout = std::io::stdout().lock();
    for row in &rows {
        let line = format!(
            "{:<4} {:<36} {:>14.6e}  {:<14} {}",
            fmt_pass(row.pass),
            row.check_id,
            row.value,
            row.bound,
            row.params
        );
        if writeln!(stdout, "{line}").is_err() {
            break;
        }
    }
    Ok(passed)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let resolved = match resolve(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(j) = resolved.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
        {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match execute(&resolved, cli.timings) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ (Error::Config(_) | Error::UnsupportedDimension(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
