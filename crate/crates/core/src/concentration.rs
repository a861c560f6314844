//! Gram matrices of `Π_L` restricted to a set, the best `L^2` comparison
//! constant as a generalized eigenvalue, `L^p` and sup-norm ratios, and the
//! uncertainty-principle ratio.
//!
//! For `Q = Σ c_i Y_i` the quadratic forms `∫_E |Q|^2 dμ = c^T G_E c` and
//! `∫_{S^d} |Q|^2 dμ = c^T G c` give the best constant in
//! `∫ |Q|^2 dμ <= C_2 ∫_E |Q|^2 dμ` as `C_2 = 1 / λ_min(G_E, G)`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, PolyCoeffs};
use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::measures::MeasureSpec;
use crate::quadrature::QuadratureRule;
use crate::sets::{Region, SetSpec};
use crate::special::PeakPolynomial;

/// Size guards for the dense linear algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `dim Π_L` accepted (1089 is `L = 32` on `S^2`).
    pub max_dim: usize,
    /// Largest `nodes × dim` basis table held in memory at once.
    pub max_table: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_dim: 1089, max_table: 40_000_000 }
    }
}

impl Limits {
    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.max_dim {
            return Err(Error::Resource(format!("dim Π_L = {dim} exceeds the limit {}", self.max_dim)));
        }
        Ok(())
    }
}

const CHUNK: usize = 2048;

/// `G_{ij} = Σ_{u_k ∈ E} w_k ω(u_k) Y_i(u_k) Y_j(u_k)`.
pub fn gram_matrix(set: &SetSpec, mu: &MeasureSpec, basis: &Basis, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    gram_matrix_limited(set, mu, basis, rule, &Limits::default())
}

pub fn gram_matrix_limited(
    set: &SetSpec,
    mu: &MeasureSpec,
    basis: &Basis,
    rule: &QuadratureRule,
    limits: &Limits,
) -> Result<DMatrix<f64>> {
    limits.check_dim(basis.dim())?;
    let region = set.compile()?;
    let (nodes, scales): (Vec<&SpherePoint>, Vec<f64>) = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .filter(|(u, _)| region.contains(u))
        .map(|(u, w)| (u, (w * mu.weight(u)).sqrt()))
        .unzip();
    Ok(weighted_gram(basis, &nodes, &scales))
}

/// `Σ_k s_k^2 b(u_k) b(u_k)^T`, accumulated over fixed-size chunks in order.
fn weighted_gram(basis: &Basis, nodes: &[&SpherePoint], scales: &[f64]) -> DMatrix<f64> {
    let dim = basis.dim();
    let mut g = DMatrix::zeros(dim, dim);
    for (chunk_nodes, chunk_scales) in nodes.chunks(CHUNK).zip(scales.chunks(CHUNK)) {
        let b = basis_table(basis, chunk_nodes, chunk_scales);
        // `gemm` takes the blocked kernel; `gemm_tr` does not.
        g.gemm(1.0, &b.transpose(), &b, 1.0);
    }
    symmetrize(&mut g);
    g
}

/// Rows `s_k b(u_k)`, evaluated in parallel.
fn basis_table(basis: &Basis, nodes: &[&SpherePoint], scales: &[f64]) -> DMatrix<f64> {
    let dim = basis.dim();
    let rows: Vec<Vec<f64>> = nodes
        .par_iter()
        .zip(scales.par_iter())
        .map(|(u, s)| {
            let mut row = basis.eval(u);
            row.iter_mut().for_each(|v| *v *= s);
            row
        })
        .collect();
    DMatrix::from_fn(nodes.len(), dim, |i, j| rows[i][j])
}

fn symmetrize(g: &mut DMatrix<f64>) {
    let n = g.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
}

/// Solver diagnostics attached to a [`ConcentrationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub dim: usize,
    /// `‖G_E x - λ G x‖ / (‖G_E‖ ‖x‖)` for the returned pair.
    pub residual: f64,
    /// Condition estimate of `G` from its Cholesky diagonal (1 for `μ = σ`).
    pub full_condition: f64,
    /// Values of `λ_min` below this are rounding noise; see [`crate::zonal`].
    pub floor: f64,
    pub quadrature: String,
    pub set_nodes: usize,
}

/// Smallest eigenpair of the pencil `(G_E, G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub lambda_min: f64,
    pub best_c2: f64,
    /// Minimizing polynomial, normalized to `∫ |Q|^2 dμ = 1`.
    pub witness: PolyCoeffs,
    pub diagnostics: Diagnostics,
}

/// Acceptable relative residual of the returned eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Output of [`smallest_generalized_eigenpair`].
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized to `x^T b x = 1`.
    pub vector: DVector<f64>,
    pub residual: f64,
    pub condition: f64,
    /// Eigenvalues below this are not resolved in double precision.
    pub floor: f64,
}

/// Smallest eigenvalue of `a x = λ b x` (`b = I` when `None`), with `b`
/// reduced by its Cholesky factor to a standard symmetric problem.
pub fn smallest_generalized_eigenpair(a: &DMatrix<f64>, b: Option<&DMatrix<f64>>) -> Result<Eigenpair> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Domain("empty pencil".into()));
    }
    let (c, factor, condition) = match b {
        None => (a.clone(), None, 1.0),
        Some(b) => {
            let chol = Cholesky::new(b.clone()).ok_or(Error::SingularGram)?;
            let l = chol.l();
            let diag: Vec<f64> = (0..n).map(|i| l[(i, i)] * l[(i, i)]).collect();
            let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
            let dmax = diag.iter().copied().fold(0.0, f64::max);
            if !(dmin > 0.0) {
                return Err(Error::SingularGram);
            }
            let x = l.solve_lower_triangular(a).ok_or(Error::SingularGram)?;
            let mut c = l.solve_lower_triangular(&x.transpose()).ok_or(Error::SingularGram)?;
            symmetrize(&mut c);
            (c, Some(l), dmax / dmin)
        }
    };
    let eig = SymmetricEigen::new(c);
    let (k, lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) });
    if !lambda.is_finite() {
        return Err(Error::NonConvergence("non-finite eigenvalue".into()));
    }
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 8.0 * n as f64 * f64::EPSILON * top * condition;
    let y = eig.eigenvectors.column(k).into_owned();
    let mut x = match &factor {
        None => y,
        Some(l) => l.transpose().solve_upper_triangular(&y).ok_or(Error::SingularGram)?,
    };
    let bx = match b {
        None => x.clone(),
        Some(b) => b * &x,
    };
    let bnorm = x.dot(&bx).sqrt();
    x /= bnorm;
    let bx = bx / bnorm;
    let residual = (a * &x - lambda * bx).norm() / (a.norm().max(f64::MIN_POSITIVE) * x.norm());
    if !(residual <= EIGEN_RESIDUAL_TOL) {
        return Err(Error::NonConvergence(format!("residual {residual:e} above {EIGEN_RESIDUAL_TOL:e}")));
    }
    Ok(Eigenpair { value: lambda, vector: x, residual, condition, floor })
}

/// `λ_min` of `(G_E, G)` with both forms assembled on `rule`; for `μ = σ`
/// the full form is the identity by orthonormality of the basis.
pub fn lambda_min(set: &SetSpec, mu: &MeasureSpec, basis: &Basis, rule: &QuadratureRule) -> Result<ConcentrationReport> {
    lambda_min_with(set, mu, basis, rule, rule, &Limits::default())
}

/// As [`lambda_min`], with separate rules for `G_E` (may be adapted to `E`)
/// and for the full form.
pub fn lambda_min_with(
    set: &SetSpec,
    mu: &MeasureSpec,
    basis: &Basis,
    set_rule: &QuadratureRule,
    full_rule: &QuadratureRule,
    limits: &Limits,
) -> Result<ConcentrationReport> {
    mu.validate(basis.d())?;
    let g_set = gram_matrix_limited(set, mu, basis, set_rule, limits)?;
    let g_full = if mu.is_lebesgue() {
        None
    } else {
        Some(gram_matrix_limited(&SetSpec::Full, mu, basis, full_rule, limits)?)
    };
    let set_nodes = count_in(set, set_rule)?;
    let pair = smallest_generalized_eigenpair(&g_set, g_full.as_ref())?;
    let lambda = pair.value;
    Ok(ConcentrationReport {
        lambda_min: lambda,
        best_c2: if lambda > 0.0 { 1.0 / lambda } else { f64::INFINITY },
        witness: PolyCoeffs { spec: basis.spec(), coeffs: pair.vector.iter().copied().collect() },
        diagnostics: Diagnostics {
            dim: basis.dim(),
            residual: pair.residual,
            full_condition: pair.condition,
            floor: pair.floor,
            quadrature: set_rule.descriptor.clone(),
            set_nodes,
        },
    })
}

fn count_in(set: &SetSpec, rule: &QuadratureRule) -> Result<usize> {
    let region = set.compile()?;
    Ok(rule.nodes.iter().filter(|u| region.contains(u)).count())
}

/// A real function on the sphere that can be sampled pointwise.
pub trait SphereFunction: Sync {
    fn value(&self, u: &SpherePoint) -> f64;
}

impl SphereFunction for PeakPolynomial {
    fn value(&self, u: &SpherePoint) -> f64 {
        self.eval(u)
    }
}

/// A polynomial given by coefficients in a basis.
pub struct Expansion<'a> {
    pub basis: &'a Basis,
    pub coeffs: &'a [f64],
}

impl SphereFunction for Expansion<'_> {
    fn value(&self, u: &SpherePoint) -> f64 {
        self.basis.eval(u).iter().zip(self.coeffs).map(|(b, c)| b * c).sum()
    }
}

impl<F: Fn(&SpherePoint) -> f64 + Sync> SphereFunction for F {
    fn value(&self, u: &SpherePoint) -> f64 {
        self(u)
    }
}

/// `∫_E |f|^p dμ / ∫_{S^d} |f|^p dμ`, both on the global `rule`.
pub fn lp_ratio(f: &dyn SphereFunction, set: &SetSpec, mu: &MeasureSpec, p: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")));
    }
    let region = set.compile()?;
    let terms: Vec<(f64, bool)> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(u, w)| (w * mu.weight(u) * f.value(u).abs().powf(p), region.contains(u)))
        .collect();
    let total: f64 = terms.iter().map(|t| t.0).sum();
    let inside: f64 = terms.iter().filter(|t| t.1).map(|t| t.0).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    Ok(inside / total)
}

/// Coefficients of `f` in `basis` by quadrature; exact for `f ∈ Π_L` when the
/// rule is exact to degree `2L`.
pub fn project(f: &dyn SphereFunction, basis: &Basis, rule: &QuadratureRule) -> PolyCoeffs {
    let dim = basis.dim();
    let partial: Vec<Vec<f64>> = rule
        .nodes
        .par_chunks(CHUNK)
        .zip(rule.weights.par_chunks(CHUNK))
        .map(|(nodes, weights)| {
            let mut acc = vec![0.0; dim];
            let mut row = vec![0.0; dim];
            for (u, w) in nodes.iter().zip(weights) {
                basis.eval_into(u, &mut row);
                let fw = w * f.value(u);
                acc.iter_mut().zip(&row).for_each(|(a, b)| *a += fw * b);
            }
            acc
        })
        .collect();
    let mut coeffs = vec![0.0; dim];
    for part in partial {
        coeffs.iter_mut().zip(&part).for_each(|(a, b)| *a += b);
    }
    PolyCoeffs { spec: basis.spec(), coeffs }
}

/// Settings of the adversarial search in [`worst_case_lp`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when a step improves the ratio by less than this (relative).
    pub tolerance: f64,
    /// Centers for zonal peak-polynomial seeds (e.g. density argmin centers).
    pub peak_centers: Vec<SpherePoint>,
    pub limits: Limits,
}

impl SearchOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            max_iterations: 400,
            tolerance: 1e-13,
            peak_centers: Vec::new(),
            limits: Limits::default(),
        }
    }
}

/// Best (smallest) `L^p` ratio found; an upper bound on `1 / C_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseReport {
    pub p: f64,
    pub ratio: f64,
    pub witness: PolyCoeffs,
    pub restarts: usize,
    pub seed: u64,
    pub iterations: usize,
    /// Which seed produced the minimum (`random k` or `peak k`).
    pub origin: String,
}

/// Projected descent of `R(c) = ∫_E |Q_c|^p dμ / ∫ |Q_c|^p dμ` over the unit
/// coefficient sphere, from random and peak-polynomial starting points.
pub fn worst_case_lp(
    set: &SetSpec,
    mu: &MeasureSpec,
    basis: &Basis,
    p: f64,
    rule: &QuadratureRule,
    options: &SearchOptions,
) -> Result<WorstCaseReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must lie in [1, ∞), got {p}")));
    }
    let dim = basis.dim();
    options.limits.check_dim(dim)?;
    if rule.len().saturating_mul(dim) > options.limits.max_table {
        return Err(Error::Resource(format!(
            "basis table {} x {dim} exceeds the limit {}",
            rule.len(),
            options.limits.max_table
        )));
    }
    let region = set.compile()?;
    let objective = LpObjective::new(basis, &region, mu, p, rule);

    let mut starts: Vec<(String, DVector<f64>)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for k in 0..options.restarts {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        starts.push((format!("random {k}"), DVector::from_vec(v)));
    }
    for (k, c) in options.peak_centers.iter().enumerate() {
        let peak = PeakPolynomial::new(basis.d(), basis.degree(), 1, c.clone())?;
        starts.push((format!("peak {k}"), DVector::from_vec(project(&peak, basis, rule).coeffs)));
    }
    if starts.is_empty() {
        return Err(Error::Domain("worst-case search needs at least one starting point".into()));
    }

    let mut best: Option<(f64, DVector<f64>, String)> = None;
    let mut iterations = 0;
    for (origin, start) in starts {
        let (ratio, c, its) = objective.descend(start, options.max_iterations, options.tolerance);
        iterations += its;
        if best.as_ref().is_none_or(|b| ratio < b.0) {
            best = Some((ratio, c, origin));
        }
    }
    let (ratio, c, origin) = best.expect("at least one start");
    Ok(WorstCaseReport {
        p,
        ratio,
        witness: PolyCoeffs { spec: basis.spec(), coeffs: c.iter().copied().collect() },
        restarts: options.restarts,
        seed: options.seed,
        iterations,
        origin,
    })
}

struct LpObjective {
    table: DMatrix<f64>,
    weights: Vec<f64>,
    inside: Vec<f64>,
    p: f64,
}

impl LpObjective {
    fn new(basis: &Basis, region: &Region, mu: &MeasureSpec, p: f64, rule: &QuadratureRule) -> Self {
        let nodes: Vec<&SpherePoint> = rule.nodes.iter().collect();
        let ones = vec![1.0; nodes.len()];
        let table = basis_table(basis, &nodes, &ones);
        let weights = rule.nodes.iter().zip(&rule.weights).map(|(u, w)| w * mu.weight(u)).collect();
        let inside = rule.nodes.iter().map(|u| if region.contains(u) { 1.0 } else { 0.0 }).collect();
        Self { table, weights, inside, p }
    }

    /// Ratio and its gradient at `c`.
    fn eval(&self, c: &DVector<f64>) -> (f64, DVector<f64>) {
        let q = &self.table * c;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..q.len() {
            let m = self.weights[k] * q[k].abs().powf(self.p);
            den += m;
            num += self.inside[k] * m;
        }
        let r = if den > 0.0 { num / den } else { 1.0 };
        let s = DVector::from_fn(q.len(), |k, _| {
            let a = q[k].abs();
            let dq = if a > 0.0 { a.powf(self.p - 1.0) * q[k].signum() } else { 0.0 };
            self.weights[k] * dq * (self.inside[k] - r)
        });
        let g = self.table.tr_mul(&s) * (self.p / den.max(f64::MIN_POSITIVE));
        (r, g)
    }

    fn value(&self, c: &DVector<f64>) -> f64 {
        let q = &self.table * c;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..q.len() {
            let m = self.weights[k] * q[k].abs().powf(self.p);
            den += m;
            num += self.inside[k] * m;
        }
        if den > 0.0 {
            num / den
        } else {
            1.0
        }
    }

    /// Polak–Ribière conjugate gradient on the unit sphere with Armijo
    /// backtracking along the normalized retraction.
    fn descend(&self, start: DVector<f64>, max_iterations: usize, tol: f64) -> (f64, DVector<f64>, usize) {
        let mut c = start.normalize();
        let (mut r, mut g) = self.eval(&c);
        g -= &c * c.dot(&g);
        let mut dir = -g.clone();
        let mut step = 1.0;
        let mut its = 0;
        while its < max_iterations {
            its += 1;
            let slope = g.dot(&dir);
            if slope >= 0.0 {
                dir = -g.clone();
            }
            let slope = g.dot(&dir);
            if slope.abs() < 1e-300 {
                break;
            }
            let mut t = step * 2.0;
            let mut accepted = None;
            for _ in 0..60 {
                let trial = (&c + &dir * t).normalize();
                let rt = self.value(&trial);
                if rt <= r + 1e-4 * t * slope {
                    accepted = Some((trial, rt));
                    break;
                }
                t *= 0.5;
            }
            let Some((next, r_next)) = accepted else { break };
            step = t;
            let improvement = r - r_next;
            c = next;
            let (r_new, mut g_new) = self.eval(&c);
            debug_assert!((r_new - r_next).abs() <= 1e-9 * r_next.abs().max(1e-300) + 1e-15);
            g_new -= &c * c.dot(&g_new);
            let beta = (g_new.dot(&(&g_new - &g)) / g.dot(&g).max(f64::MIN_POSITIVE)).max(0.0);
            // Transport the old direction to the new tangent space.
            let mut moved = dir * beta;
            moved -= &c * c.dot(&moved);
            dir = -&g_new + moved;
            g = g_new;
            r = r_new;
            if improvement <= tol * r.abs().max(1e-300) && improvement >= 0.0 && g.norm() < 1e-12 {
                break;
            }
            if improvement.abs() <= tol * r.abs().max(1e-300) {
                break;
            }
        }
        (r, c, its)
    }
}

/// A function split into its `Π_L` part (coefficients) and the squared
/// norms `‖P_ℓ f‖^2` of its components of degree `ℓ > L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSplit {
    pub head: PolyCoeffs,
    /// `‖P_ℓ f‖^2` for `ℓ = L+1, L+2, ...`.
    pub tail_norms_sq: Vec<f64>,
}

impl SpectralSplit {
    /// Splits coefficients of degree `L_max` at degree `degree`.
    pub fn from_coeffs(f: &PolyCoeffs, degree: usize) -> Result<Self> {
        let full = Basis::new(f.spec.d, f.spec.degree)?;
        if degree > f.spec.degree {
            return Err(Error::Domain("split degree exceeds the polynomial degree".into()));
        }
        let head_basis = Basis::new(f.spec.d, degree)?;
        let head = PolyCoeffs { spec: head_basis.spec(), coeffs: f.coeffs[..head_basis.dim()].to_vec() };
        let mut tail_norms_sq = vec![0.0; f.spec.degree - degree];
        for (i, c) in f.coeffs.iter().enumerate().skip(head_basis.dim()) {
            tail_norms_sq[full.degree_of(i) - degree - 1] += c * c;
        }
        Ok(Self { head, tail_norms_sq })
    }

    pub fn tail(&self) -> f64 {
        self.tail_norms_sq.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.head.coeffs.iter().map(|c| c * c).sum::<f64>() + self.tail()
    }
}

/// `‖f‖^2 / (∫_E |P_L f|^2 dσ + Σ_{ℓ>L} ‖P_ℓ f‖^2)`.
///
/// The set integral is taken over the `Π_L` component, so a pure tail gives
/// exactly 1 and the `Π_L` witness of [`lambda_min`] gives `1/λ_min`.
pub fn uncertainty_check(f: &SpectralSplit, set: &SetSpec, rule: &QuadratureRule) -> Result<f64> {
    let basis = Basis::new(f.head.spec.d, f.head.spec.degree)?;
    let on_set = quadratic_form_on(set, &basis, &f.head.coeffs, rule)?;
    let den = on_set + f.tail();
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(f.norm_sq() / den)
}

/// `‖f‖^2 / (∫_E |f|^2 dσ + Σ_{ℓ>L} ‖P_ℓ f‖^2)` with the set integral over
/// the whole of `f` (given up to its full degree).
pub fn uncertainty_check_exact(f: &PolyCoeffs, degree: usize, set: &SetSpec, rule: &QuadratureRule) -> Result<f64> {
    let split = SpectralSplit::from_coeffs(f, degree)?;
    let basis = Basis::new(f.spec.d, f.spec.degree)?;
    let on_set = quadratic_form_on(set, &basis, &f.coeffs, rule)?;
    let den = on_set + split.tail();
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(split.norm_sq() / den)
}

fn quadratic_form_on(set: &SetSpec, basis: &Basis, coeffs: &[f64], rule: &QuadratureRule) -> Result<f64> {
    let region = set.compile()?;
    let f = Expansion { basis, coeffs };
    Ok(rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .filter(|(u, _)| region.contains(u))
        .map(|(u, w)| w * f.value(u).powi(2))
        .collect::<Vec<f64>>()
        .iter()
        .sum())
}

/// `max_{grid ∩ E} |f| ω / max_{grid} |f| ω`.
pub fn sup_norm_ratio(
    f: &dyn SphereFunction,
    set: &SetSpec,
    weight: Option<&MeasureSpec>,
    grid: &[SpherePoint],
) -> Result<f64> {
    let region = set.compile()?;
    let vals: Vec<(f64, bool)> = grid
        .par_iter()
        .map(|u| {
            let w = weight.map_or(1.0, |m| m.weight(u));
            (f.value(u).abs() * w, region.contains(u))
        })
        .collect();
    sup_ratio_from(&vals)
}

fn sup_ratio_from(vals: &[(f64, bool)]) -> Result<f64> {
    if !vals.iter().any(|v| v.1) {
        return Err(Error::EmptyIntersection);
    }
    let all = vals.iter().map(|v| v.0).fold(0.0, f64::max);
    let on_set = vals.iter().filter(|v| v.1).map(|v| v.0).fold(0.0, f64::max);
    if !(all > 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    Ok(on_set / all)
}

/// [`sup_norm_ratio`] for many polynomials of one basis at once.
pub fn sup_norm_ratios(
    polys: &[PolyCoeffs],
    basis: &Basis,
    set: &SetSpec,
    weight: Option<&MeasureSpec>,
    grid: &[SpherePoint],
) -> Result<Vec<f64>> {
    let region = set.compile()?;
    let dim = basis.dim();
    let coeffs = DMatrix::from_fn(dim, polys.len(), |i, j| polys[j].coeffs[i]);
    let mut best_all = vec![0.0f64; polys.len()];
    let mut best_set = vec![0.0f64; polys.len()];
    let mut any_in = false;
    for chunk in grid.chunks(CHUNK) {
        let refs: Vec<&SpherePoint> = chunk.iter().collect();
        let scales: Vec<f64> = chunk.iter().map(|u| weight.map_or(1.0, |m| m.weight(u))).collect();
        let values = basis_table(basis, &refs, &scales) * &coeffs;
        for (k, u) in chunk.iter().enumerate() {
            let inside = region.contains(u);
            any_in |= inside;
            for j in 0..polys.len() {
                let v = values[(k, j)].abs();
                best_all[j] = best_all[j].max(v);
                if inside {
                    best_set[j] = best_set[j].max(v);
                }
            }
        }
    }
    if !any_in {
        return Err(Error::EmptyIntersection);
    }
    best_set
        .iter()
        .zip(&best_all)
        .map(|(s, a)| if *a > 0.0 { Ok(s / a) } else { Err(Error::ZeroPolynomial) })
        .collect()
}

/// Polynomials with i.i.d. standard normal coefficients.
pub fn random_polynomials(basis: &Basis, count: usize, seed: u64) -> Vec<PolyCoeffs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| PolyCoeffs {
            spec: basis.spec(),
            coeffs: (0..basis.dim()).map(|_| StandardNormal.sample(&mut rng)).collect(),
        })
        .collect()
}
