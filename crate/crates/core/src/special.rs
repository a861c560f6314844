//! Jacobi polynomials, harmonic-space dimensions, the reproducing kernel of
//! `Π_L` in Christoffel–Darboux form and the Szegő asymptotic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, SpherePoint};

/// Degree and indices of a Jacobi polynomial `P_n^{(α,β)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi indices must exceed -1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { n, alpha, beta })
    }

    /// `P_n^{(α,β)}(1) = C(n+α, n)`.
    pub fn value_at_one(&self) -> f64 {
        binomial_real(self.n as f64 + self.alpha, self.n)
    }
}

/// Generalized binomial coefficient `C(a, k) = a (a-1) ... (a-k+1) / k!`.
pub fn binomial_real(a: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (a - (k - j) as f64) / j as f64)
}

/// Evaluates `P_n^{(α,β)}(x)` by the forward three-term recurrence in `n`.
pub fn jacobi_eval(params: JacobiParams, x: f64) -> Result<f64> {
    let JacobiParams { n, alpha, beta } = params;
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi indices must exceed -1, got alpha = {alpha}, beta = {beta}"
        )));
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("Jacobi argument {x} outside [-1, 1]")));
    }
    Ok(jacobi_recurrence(n, alpha, beta, x))
}

/// Unchecked recurrence; callers validate `x` and the indices.
pub(crate) fn jacobi_recurrence(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut p_prev = 1.0;
    let mut p = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = (a2 * p - a3 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    p
}

fn check_dim(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

/// Dimension `h_ℓ` of the spherical harmonics of exact degree `ℓ` on `S^d`.
pub fn dim_harmonic(d: usize, ell: usize) -> Result<usize> {
    check_dim(d)?;
    Ok(match (d, ell) {
        (_, 0) => 1,
        (1, _) => 2,
        _ => 2 * ell + 1,
    })
}

/// Dimension of `Π_L`, the spherical polynomials of degree at most `L`.
pub fn dim_pi(d: usize, degree: usize) -> Result<usize> {
    check_dim(d)?;
    Ok(match d {
        1 => 2 * degree + 1,
        _ => (degree + 1) * (degree + 1),
    })
}

/// `λ = (d - 2) / 2`.
pub fn lambda_index(d: usize) -> f64 {
    (d as f64 - 2.0) / 2.0
}

/// Normalization data of the reproducing kernel of `Π_L` on `S^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: usize,
    pub degree: usize,
    pub kappa: f64,
}

impl KernelSpec {
    /// Pins `κ_{d,L}` through the trace identity `K_L(u,u) σ(S^d) = dim Π_L`.
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        let dim = dim_pi(d, degree)? as f64;
        let half = d as f64 / 2.0;
        let at_one = JacobiParams::new(degree, half, half - 1.0)?.value_at_one();
        Ok(Self { d, degree, kappa: dim / at_one })
    }

    /// Same kernel with `κ` multiplied by `factor`; used for fault injection.
    pub fn with_kappa_scaled(mut self, factor: f64) -> Self {
        self.kappa *= factor;
        self
    }

    pub fn jacobi(&self) -> JacobiParams {
        let half = self.d as f64 / 2.0;
        JacobiParams { n: self.degree, alpha: half, beta: half - 1.0 }
    }
}

/// `K_L(u,v)` as a function of `t = <u, v>`.
pub fn reproducing_kernel(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(spec.kappa > 0.0) {
        return Err(Error::Domain(format!("kernel normalization must be positive, got {}", spec.kappa)));
    }
    let p = jacobi_eval(spec.jacobi(), t)?;
    Ok(spec.kappa / sphere_area(spec.d) * p)
}

/// The leading Szegő term of `P_L^{(1+λ,λ)}(cos θ)` and its envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoApprox {
    pub degree: usize,
    pub lambda: f64,
    pub theta: f64,
    pub main_term: f64,
    pub envelope: f64,
}

/// Default window constant `c` in `c/L <= θ <= π - c/L`.
pub const SZEGO_WINDOW: f64 = 4.0;

/// `k(θ) = π^{-1/2} (sin θ/2)^{-λ-3/2} (cos θ/2)^{-λ-1/2}`.
pub fn szego_k(lambda: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    let c = (0.5 * theta).cos();
    PI.powf(-0.5) * s.powf(-lambda - 1.5) * c.powf(-lambda - 0.5)
}

/// Szegő approximation with the default window constant.
pub fn szego_estimate(degree: usize, lambda: f64, theta: f64) -> Result<SzegoApprox> {
    szego_estimate_with(degree, lambda, theta, SZEGO_WINDOW)
}

pub fn szego_estimate_with(degree: usize, lambda: f64, theta: f64, window: f64) -> Result<SzegoApprox> {
    if degree == 0 {
        return Err(Error::Domain("Szegő asymptotic needs L >= 1".into()));
    }
    let l = degree as f64;
    let lo = window / l;
    let hi = PI - window / l;
    if !(theta >= lo && theta <= hi) {
        return Err(Error::Window { theta, lo, hi });
    }
    // (d + 1) π / 4 with d = 2λ + 2.
    let phase = (2.0 * lambda + 3.0) * PI / 4.0;
    let envelope = szego_k(lambda, theta) / l.sqrt();
    let main_term = envelope * ((l + lambda + 1.0) * theta - phase).cos();
    Ok(SzegoApprox { degree, lambda, theta, main_term, envelope })
}

/// Zonal peak polynomial `v ↦ P_L^{(1+λ,λ)}(<v, pole>)^ℓ`, an element of
/// `Π_{ℓL}` maximal at the pole.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakPolynomial {
    pub d: usize,
    pub degree: usize,
    pub power: u32,
    pub pole: SpherePoint,
    params: JacobiParams,
}

impl PeakPolynomial {
    pub fn new(d: usize, degree: usize, power: u32, pole: SpherePoint) -> Result<Self> {
        check_dim(d)?;
        if power == 0 {
            return Err(Error::Domain("peak polynomial power must be >= 1".into()));
        }
        if pole.dim() != d {
            return Err(Error::Domain(format!("pole lives on S^{} but d = {d}", pole.dim())));
        }
        let lambda = lambda_index(d);
        let params = JacobiParams::new(degree, 1.0 + lambda, lambda)?;
        Ok(Self { d, degree, power, pole, params })
    }

    /// Total degree `ℓ L`.
    pub fn total_degree(&self) -> usize {
        self.degree * self.power as usize
    }

    pub fn eval(&self, v: &SpherePoint) -> f64 {
        let t = self.pole.dot(v).clamp(-1.0, 1.0);
        jacobi_recurrence(self.params.n, self.params.alpha, self.params.beta, t).powi(self.power as i32)
    }

    /// Value at the pole, `C(L+1+λ, L)^ℓ`.
    pub fn peak_value(&self) -> f64 {
        self.params.value_at_one().powi(self.power as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_values() {
        let p0 = JacobiParams::new(0, 2.5, -0.3).unwrap();
        assert_eq!(jacobi_eval(p0, 0.37).unwrap(), 1.0);
        let p2 = JacobiParams::new(2, 0.0, 0.0).unwrap();
        assert_relative_eq!(jacobi_eval(p2, 0.5).unwrap(), -0.125, epsilon = 1e-15);
        let p3 = JacobiParams::new(3, 1.0, 0.0).unwrap();
        assert_relative_eq!(jacobi_eval(p3, 1.0).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(JacobiParams::new(3, -1.0, 0.0).is_err());
        let p = JacobiParams { n: 3, alpha: 0.0, beta: -1.5 };
        assert!(matches!(jacobi_eval(p, 0.0), Err(Error::Domain(_))));
        let p = JacobiParams::new(3, 0.0, 0.0).unwrap();
        assert!(matches!(jacobi_eval(p, 1.0 + 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_harmonic(2, 0).unwrap(), 1);
        assert_eq!(dim_harmonic(2, 2).unwrap(), 5);
        assert_eq!(dim_harmonic(1, 0).unwrap(), 1);
        assert_eq!(dim_harmonic(1, 7).unwrap(), 2);
        assert_eq!(dim_pi(2, 3).unwrap(), 16);
        assert_eq!(dim_pi(1, 5).unwrap(), 11);
        assert_eq!(dim_pi(3, 1), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn kernel_on_diagonal_is_dim_over_area() {
        let spec = KernelSpec::new(2, 1).unwrap();
        let k = reproducing_kernel(&spec, 1.0).unwrap();
        assert_relative_eq!(k, 4.0 / (4.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(k, 0.318_309_886_183_790_7, max_relative = 1e-12);
        // d = 2: κ = L + 1 since P_L^{(1,0)}(1) = L + 1.
        assert_relative_eq!(KernelSpec::new(2, 9).unwrap().kappa, 10.0, max_relative = 1e-14);
    }

    #[test]
    fn circle_kernel_is_dirichlet() {
        let spec = KernelSpec::new(1, 3).unwrap();
        for &theta in &[0.1f64, 0.7, 1.9, 3.0] {
            let dirichlet = (3.5 * theta).sin() / (0.5 * theta).sin() / (2.0 * PI);
            let k = reproducing_kernel(&spec, theta.cos()).unwrap();
            assert_relative_eq!(k, dirichlet, max_relative = 1e-12);
        }
    }

    #[test]
    fn szego_envelope_at_equator() {
        assert_relative_eq!(szego_k(0.0, PI / 2.0), 2.0 / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(2.0 / PI.sqrt(), 1.128_379_167_095_512_6, max_relative = 1e-15);
        let a = szego_estimate(16, 0.0, PI / 2.0).unwrap();
        assert_relative_eq!(a.envelope, 2.0 / PI.sqrt() / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn szego_window_error() {
        let l = 32;
        let theta = SZEGO_WINDOW / (2.0 * l as f64);
        assert!(matches!(szego_estimate(l, 0.0, theta), Err(Error::Window { .. })));
        assert!(matches!(szego_estimate(l, 0.0, PI - theta), Err(Error::Window { .. })));
    }

    #[test]
    fn szego_error_at_equator_is_lower_order() {
        let l = 128;
        let theta = PI / 2.0;
        let a = szego_estimate(l, 0.0, theta).unwrap();
        let p = jacobi_eval(JacobiParams::new(l, 1.0, 0.0).unwrap(), theta.cos()).unwrap();
        let normalized = (p - a.main_term).abs() * l as f64 * theta.sin() / a.envelope;
        assert!(normalized < 1.0, "normalized error {normalized}");
    }

    #[test]
    fn peak_polynomial_values() {
        let n = SpherePoint::north(2);
        let q = PeakPolynomial::new(2, 16, 2, n.clone()).unwrap();
        assert_relative_eq!(q.eval(&n), 17.0f64.powi(2), max_relative = 1e-13);
        assert_relative_eq!(q.peak_value(), 289.0, max_relative = 1e-13);
        let eq = SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap();
        let p = jacobi_eval(JacobiParams::new(16, 1.0, 0.0).unwrap(), 0.0).unwrap();
        assert_relative_eq!(q.eval(&eq), p * p, max_relative = 1e-13);
        assert_eq!(q.total_degree(), 32);
        assert!(PeakPolynomial::new(2, 4, 0, n).is_err());
    }
}
