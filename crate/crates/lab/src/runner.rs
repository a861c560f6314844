//! Evaluates the functionals of an [`ExperimentConfig`] over its degree sweep.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sphere_ls::basis::Basis;
use sphere_ls::concentration::{
    lambda_min_with, random_polynomials, sup_norm_ratios, worst_case_lp, Limits, SearchOptions,
};
use sphere_ls::functionals::{
    harmonic_infimum_with, regularize_set, relative_density, GridOptions, LocalResolution, NetOptions,
};
use sphere_ls::geometry::{CenterGrid, SpherePoint};
use sphere_ls::measures::MeasureSpec;
use sphere_ls::quadrature::{adapted_rule, build_quadrature, QuadratureRule};
use sphere_ls::sets::SetSpec;
use sphere_ls::weights::{ainfty_check, doubling_constant, rhinfty_check, WeightSamples};
use sphere_ls::zonal::{lambda_min_zonal, ZonalSet};

use crate::config::{EigenRoute, ExperimentConfig};
use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Column names of the results CSV, in order.
pub const COLUMNS: [&str; 7] = ["schema_version", "config_hash", "L", "functional", "value", "witness", "wall_time"];

/// One value of one functional at one degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub schema_version: u32,
    pub config_hash: String,
    #[serde(rename = "L")]
    pub degree: usize,
    pub functional: String,
    pub value: f64,
    pub witness: String,
    /// Seconds, when the config asks for timing.
    pub wall_time: Option<f64>,
}

/// Runs the whole sweep on a pool of `workers` threads (0: rayon default).
pub fn run(config: &ExperimentConfig, workers: usize) -> LabResult<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| LabError::Config(format!("worker pool: {e}")))?;
    let hash = config.hash();
    let per_degree: Vec<LabResult<Vec<ResultRow>>> =
        pool.install(|| config.degrees.par_iter().map(|&l| evaluate_degree(config, &hash, l)).collect());
    let mut rows = Vec::new();
    for r in per_degree {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| (a.degree, &a.functional).cmp(&(b.degree, &b.functional)));
    Ok(rows)
}

/// File name `<name>-<hash>.csv` used by [`run_to_dir`].
pub fn results_path(config: &ExperimentConfig, dir: &Path) -> PathBuf {
    dir.join(format!("{}-{}.csv", config.name, config.hash()))
}

/// Runs the sweep and writes the CSV into `dir`; returns the file path and rows.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path, workers: usize) -> LabResult<(PathBuf, Vec<ResultRow>)> {
    let rows = run(config, workers)?;
    std::fs::create_dir_all(dir)?;
    let path = results_path(config, dir);
    write_csv(&rows, &path)?;
    Ok((path, rows))
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> LabResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a results CSV, rejecting files whose header or schema version differ.
pub fn read_csv(path: &Path) -> LabResult<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(LabError::Schema(format!(
            "{}: expected columns {:?}, found {:?}",
            path.display(),
            COLUMNS,
            header
        )));
    }
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let row: ResultRow = rec.map_err(|e| LabError::Schema(format!("{}: {e}", path.display())))?;
        if row.schema_version != SCHEMA_VERSION {
            return Err(LabError::Schema(format!(
                "{}: schema version {} (expected {SCHEMA_VERSION})",
                path.display(),
                row.schema_version
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Short human-readable table of the rows.
pub fn summary(config: &ExperimentConfig, rows: &[ResultRow]) -> String {
    let mut out = format!("{} [{}]\n", config.name, config.hash());
    for r in rows {
        out.push_str(&format!("  L={:<4} {:<12} {:<14.6e} {}\n", r.degree, r.functional, r.value, r.witness));
    }
    out
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    hash: &'a str,
    degree: usize,
    set: SetSpec,
}

impl Context<'_> {
    fn d(&self) -> usize {
        self.config.d
    }

    fn os(&self) -> usize {
        self.config.oversample
    }

    fn mu(&self) -> &MeasureSpec {
        &self.config.measure
    }

    fn fail(&self, functional: &str) -> impl Fn(sphere_ls::Error) -> LabError + '_ {
        let functional = functional.to_owned();
        move |source| LabError::Compute { degree: self.degree, functional: functional.clone(), source }
    }

    fn row(&self, functional: &str, value: f64, witness: String, started: Instant) -> ResultRow {
        ResultRow {
            schema_version: SCHEMA_VERSION,
            config_hash: self.hash.to_owned(),
            degree: self.degree,
            functional: functional.to_owned(),
            value,
            witness,
            wall_time: self.config.record_timing.then(|| started.elapsed().as_secs_f64()),
        }
    }

    /// Adapted rule for sets built from caps, where a global grid would miss them.
    fn set_rule(&self, exact_degree: usize) -> sphere_ls::Result<Option<QuadratureRule>> {
        Ok(match &self.set {
            SetSpec::CapUnion { .. } => Some(adapted_rule(&self.set, self.d(), exact_degree, self.os())?),
            _ => None,
        })
    }
}

fn point(u: &SpherePoint) -> String {
    let c: Vec<String> = u.coords().iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", c.join(","))
}

fn evaluate_degree(config: &ExperimentConfig, hash: &str, degree: usize) -> LabResult<Vec<ResultRow>> {
    let set = config
        .family
        .at_degree(degree)
        .and_then(|s| s.materialize())
        .map_err(|source| LabError::Compute { degree, functional: "family".into(), source })?;
    let cx = Context { config, hash, degree, set };
    let f = &config.functionals;
    let mut rows = Vec::new();
    if let Some(o) = &f.eigen {
        rows.push(eigen(&cx, o.route)?);
    }
    if let Some(o) = &f.harmonic {
        rows.push(harmonic(&cx, o.centers_per_degree)?);
    }
    if let Some(o) = &f.density {
        rows.push(density(&cx, o.r, o.centers_per_degree)?);
    }
    if let Some(o) = &f.pnorm {
        rows.push(pnorm(&cx, o.p, o.restarts, o.max_iterations)?);
    }
    if let Some(o) = &f.supnorm {
        rows.push(supnorm(&cx, o.samples, o.grid_per_degree, o.weighted)?);
    }
    if let Some(o) = &f.weights {
        rows.extend(weights(&cx, &o.radii, o.centers, o.beta)?);
    }
    if let Some(o) = &f.regularize {
        rows.push(regularize(&cx, o.eps, o.delta, o.r)?);
    }
    Ok(rows)
}

fn limits(cx: &Context) -> Limits {
    Limits { max_dim: cx.config.max_dim, ..Limits::default() }
}

fn eigen(cx: &Context, route: EigenRoute) -> LabResult<ResultRow> {
    let t = Instant::now();
    let fail = cx.fail("eigen");
    let (l, d) = (cx.degree, cx.d());
    if route == EigenRoute::Auto && d == 2 && cx.mu().is_lebesgue() {
        if let Some(z) = ZonalSet::from_spec(&cx.set) {
            let r = lambda_min_zonal(2, l, &z).map_err(&fail)?;
            let witness = format!("route=extended order={} bits={} resolved={}", r.order, r.bits, r.resolved);
            return Ok(cx.row("eigen", r.lambda_min, witness, t));
        }
    }
    let basis = Basis::new(d, l).map_err(&fail)?;
    let limits = limits(cx);
    if basis.dim() > limits.max_dim {
        return Err(fail(sphere_ls::Error::Resource(format!(
            "dim Π_L = {} exceeds max_dim = {}",
            basis.dim(),
            limits.max_dim
        ))));
    }
    let full = build_quadrature(d, 2 * l, cx.os()).map_err(&fail)?;
    let set_rule = adapted_rule(&cx.set, d, 2 * l, cx.os()).map_err(&fail)?;
    let r = lambda_min_with(&cx.set, cx.mu(), &basis, &set_rule, &full, &limits).map_err(&fail)?;
    let witness = format!(
        "route=gram nodes={} floor={:.3e} residual={:.3e}",
        r.diagnostics.set_nodes, r.diagnostics.floor, r.diagnostics.residual
    );
    Ok(cx.row("eigen", r.lambda_min, witness, t))
}

fn harmonic(cx: &Context, centers_per_degree: usize) -> LabResult<ResultRow> {
    let t = Instant::now();
    let fail = cx.fail("harmonic");
    let full = build_quadrature(cx.d(), 2 * cx.degree, 4 * cx.os()).map_err(&fail)?;
    let set_rule = cx.set_rule(cx.degree).map_err(&fail)?;
    let r = harmonic_infimum_with(&cx.set, cx.degree, centers_per_degree, &full, set_rule.as_ref()).map_err(&fail)?;
    Ok(cx.row("harmonic", r.delta, format!("center={}", point(&r.argmin_center)), t))
}

fn density_options(centers_per_degree: usize) -> GridOptions {
    GridOptions { centers_per_degree, local: LocalResolution::default() }
}

fn density(cx: &Context, r: f64, centers_per_degree: usize) -> LabResult<ResultRow> {
    let t = Instant::now();
    let rep = relative_density(&cx.set, cx.mu(), cx.d(), cx.degree, r, &density_options(centers_per_degree))
        .map_err(cx.fail("density"))?;
    Ok(cx.row("density", rep.rho_hat, format!("center={} r={r}", point(&rep.argmin_center)), t))
}

fn pnorm(cx: &Context, p: f64, restarts: usize, max_iterations: usize) -> LabResult<ResultRow> {
    let t = Instant::now();
    let fail = cx.fail("pnorm");
    let (l, d) = (cx.degree, cx.d());
    let basis = Basis::new(d, l).map_err(&fail)?;
    let exact = (p.ceil() as usize).max(2) * l;
    let global = build_quadrature(d, exact, cx.os()).map_err(&fail)?;
    // Nodes of an adapted rule on E, global nodes off E.
    let rule = match cx.set_rule(exact).map_err(&fail)? {
        Some(on_set) => {
            let region = cx.set.compile().map_err(&fail)?;
            let off = global.restricted(|u| !region.contains(u));
            QuadratureRule::union(vec![on_set, off], d)
        }
        None => global,
    };
    let hole = relative_density(&cx.set, &MeasureSpec::Lebesgue, d, l, 4.0, &GridOptions::default())
        .map_err(&fail)?
        .argmin_center;
    let seed = cx.config.seed.wrapping_add(l as u64);
    let mut options = SearchOptions::new(restarts, seed);
    options.max_iterations = max_iterations;
    options.peak_centers = vec![hole];
    options.limits = limits(cx);
    let r = worst_case_lp(&cx.set, cx.mu(), &basis, p, &rule, &options).map_err(&fail)?;
    let witness = format!("estimate p={p} restarts={restarts} seed={seed} origin={}", r.origin);
    Ok(cx.row("pnorm", r.ratio, witness, t))
}

fn supnorm(cx: &Context, samples: usize, grid_per_degree: usize, weighted: bool) -> LabResult<ResultRow> {
    let t = Instant::now();
    let fail = cx.fail("supnorm");
    let (l, d) = (cx.degree, cx.d());
    let basis = Basis::new(d, l).map_err(&fail)?;
    let mut grid = CenterGrid::for_degree(d, l, grid_per_degree).points();
    if let Some(rule) = cx.set_rule(l).map_err(&fail)? {
        grid.extend(rule.nodes);
    }
    let seed = cx.config.seed.wrapping_add(l as u64);
    let polys = random_polynomials(&basis, samples, seed);
    let weight = weighted.then(|| cx.mu());
    let ratios = sup_norm_ratios(&polys, &basis, &cx.set, weight, &grid).map_err(&fail)?;
    let (k, v) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
    let witness = format!("poly={k} samples={samples} seed={seed} grid={}", grid.len());
    Ok(cx.row(if weighted { "supnorm_w" } else { "supnorm" }, v, witness, t))
}

fn pole_of(mu: &MeasureSpec) -> Vec<SpherePoint> {
    match mu {
        MeasureSpec::PowerDistance { pole, .. } | MeasureSpec::BandWeight { pole, .. } => vec![pole.clone()],
        MeasureSpec::Product { factors } => factors.iter().flat_map(pole_of).collect(),
        MeasureSpec::Lebesgue => vec![],
    }
}

fn weights(cx: &Context, radii: &[f64], centers: usize, beta: f64) -> LabResult<Vec<ResultRow>> {
    let t = Instant::now();
    let fail = cx.fail("weights");
    let l = cx.degree as f64;
    let scales: Vec<f64> = radii.iter().map(|r| (r / l).min(std::f64::consts::FRAC_PI_2)).collect();
    let samples = WeightSamples::random(cx.d(), centers, scales.clone(), pole_of(cx.mu()), cx.config.seed);
    let doubling = doubling_constant(cx.mu(), &scales, &samples.centers, samples.local).map_err(&fail)?;
    let a = ainfty_check(cx.mu(), beta, &samples).map_err(&fail)?;
    let rh = rhinfty_check(cx.mu(), &samples).map_err(&fail)?;
    Ok(vec![
        cx.row("doubling", doubling.constant, format!("gamma={:.6}", doubling.gamma), t),
        cx.row("ainfty", a.b_constant, format!("beta={beta} passed={}", a.passed), t),
        cx.row("rhinfty", rh.c_constant, format!("passed={}", rh.passed), t),
    ])
}

fn regularize(cx: &Context, eps: f64, delta: f64, r: f64) -> LabResult<ResultRow> {
    let t = Instant::now();
    let fail = cx.fail("regularize");
    let (l, d) = (cx.degree, cx.d());
    let reg = regularize_set(&cx.set, d, l, eps, delta, &NetOptions::for_dim(d)).map_err(&fail)?;
    let rep = relative_density(&reg.set, &MeasureSpec::Lebesgue, d, l, r / 2.0, &GridOptions::default())
        .map_err(&fail)?;
    let witness = format!("net={} good={} overlap={}", reg.net_size, reg.good_caps, reg.max_overlap);
    Ok(cx.row("regularize", rep.rho_hat, witness, t))
}
