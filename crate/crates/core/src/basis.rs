//! Orthonormal bases of `Π_L` in `L^2(σ)`.
//!
//! Functions are ordered by degree `ℓ`, and within a degree as
//! `m = 0, (cos 1, sin 1), (cos 2, sin 2), ...`. On `S^2` the zonal part uses
//! normalized associated Legendre functions without the Condon–Shortley phase;
//! on `S^1` the basis is `1/√(2π), cos kθ/√π, sin kθ/√π`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::special::dim_pi;

/// Real orthonormal basis of `Π_L` on `S^d`.
#[derive(Debug, Clone)]
pub struct Basis {
    d: usize,
    degree: usize,
    dim: usize,
    /// Recurrence coefficients `(a_{ℓm}, b_{ℓm})` indexed by `ℓ(ℓ+1)/2 + m`.
    recur: Vec<(f64, f64)>,
    /// `q_m^m` starting values.
    diag: Vec<f64>,
}

/// Serializable description of a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub d: usize,
    pub degree: usize,
}

impl Basis {
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        let dim = dim_pi(d, degree)?;
        let mut recur = Vec::new();
        let mut diag = Vec::new();
        if d == 2 {
            let mut c = (0.5f64).sqrt();
            for m in 0..=degree {
                if m > 0 {
                    c *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
                }
                diag.push(c);
            }
            for l in 0..=degree {
                for m in 0..=l {
                    let (lf, mf) = (l as f64, m as f64);
                    let a = if l > m { ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt() } else { 0.0 };
                    let b = if l > m + 1 {
                        (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt()
                    } else {
                        0.0
                    };
                    recur.push((a, b));
                }
            }
        }
        Ok(Self { d, degree, dim, recur, diag })
    }

    pub fn spec(&self) -> BasisSpec {
        BasisSpec { d: self.d, degree: self.degree }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `dim Π_L`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree `ℓ` of the basis function with index `i`.
    pub fn degree_of(&self, i: usize) -> usize {
        match self.d {
            1 => i.div_ceil(2),
            _ => (i as f64).sqrt().floor() as usize,
        }
    }

    /// Index of the first basis function of degree `ℓ`.
    pub fn degree_offset(&self, ell: usize) -> usize {
        match self.d {
            1 => {
                if ell == 0 {
                    0
                } else {
                    2 * ell - 1
                }
            }
            _ => ell * ell,
        }
    }

    /// All basis values at `u`.
    pub fn eval(&self, u: &SpherePoint) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(u, &mut out);
        out
    }

    /// Writes all basis values at `u` into `out` (length `dim`).
    pub fn eval_into(&self, u: &SpherePoint, out: &mut [f64]) {
        let v = u.vector();
        let (x, y) = (v.x, v.y);
        match self.d {
            1 => {
                let s = 1.0 / PI.sqrt();
                out[0] = 1.0 / (2.0 * PI).sqrt();
                // (x + iy)^k = cos kθ + i sin kθ.
                let (mut re, mut im) = (1.0, 0.0);
                for k in 1..=self.degree {
                    let nre = re * x - im * y;
                    im = re * y + im * x;
                    re = nre;
                    out[2 * k - 1] = s * re;
                    out[2 * k] = s * im;
                }
            }
            _ => self.eval_sphere(v.z, x, y, out),
        }
    }

    fn eval_sphere(&self, z: f64, x: f64, y: f64, out: &mut [f64]) {
        let l_max = self.degree;
        let c0 = 1.0 / (2.0 * PI).sqrt();
        let cm = 1.0 / PI.sqrt();
        // Re/Im of (x + iy)^m carry the (1 - z^2)^{m/2} factor of P_l^m.
        let (mut re, mut im) = (1.0, 0.0);
        for m in 0..=l_max {
            if m > 0 {
                let nre = re * x - im * y;
                im = re * y + im * x;
                re = nre;
            }
            let mut q_prev = 0.0;
            let mut q = self.diag[m];
            for l in m..=l_max {
                if l > m {
                    let (a, b) = self.recur[l * (l + 1) / 2 + m];
                    let next = a * (z * q - b * q_prev);
                    q_prev = q;
                    q = next;
                }
                let base = l * l;
                if m == 0 {
                    out[base] = c0 * q;
                } else {
                    out[base + 2 * m - 1] = cm * q * re;
                    out[base + 2 * m] = cm * q * im;
                }
            }
        }
    }

    /// Matrix whose row `k` is `scale_k · basis(u_k)`.
    pub fn matrix(&self, nodes: &[SpherePoint], scale: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(nodes.len(), self.dim);
        let mut row = vec![0.0; self.dim];
        for (k, u) in nodes.iter().enumerate() {
            self.eval_into(u, &mut row);
            for (j, v) in row.iter().enumerate() {
                m[(k, j)] = scale[k] * v;
            }
        }
        m
    }
}

/// Coefficients of a polynomial in the ordering of [`Basis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub spec: BasisSpec,
    pub coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(spec: BasisSpec, coeffs: Vec<f64>) -> Result<Self> {
        let dim = dim_pi(spec.d, spec.degree)?;
        if coeffs.len() != dim {
            return Err(Error::Domain(format!("expected {dim} coefficients, got {}", coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(Self { spec, coeffs })
    }

    /// `L^2(σ)` norm, which is the Euclidean norm of the coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, basis: &Basis, u: &SpherePoint) -> f64 {
        debug_assert_eq!(basis.dim(), self.coeffs.len());
        basis.eval(u).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_quadrature;
    use crate::special::{reproducing_kernel, KernelSpec};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gram_defect(d: usize, degree: usize) -> f64 {
        let basis = Basis::new(d, degree).unwrap();
        let rule = build_quadrature(d, 2 * degree, 1).unwrap();
        let scale: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
        let b = basis.matrix(&rule.nodes, &scale);
        let g = b.transpose() * &b;
        (g - DMatrix::identity(basis.dim(), basis.dim())).abs().max()
    }

    #[test]
    fn orthonormal_on_sphere_and_circle() {
        for degree in [0, 1, 2, 5, 12] {
            assert!(gram_defect(2, degree) < 1e-13, "d=2 L={degree}");
        }
        for degree in [0, 1, 7, 40] {
            assert!(gram_defect(1, degree) < 1e-13, "d=1 L={degree}");
        }
    }

    #[test]
    fn constant_function() {
        let basis = Basis::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let u = SpherePoint::random(2, &mut rng);
            assert_relative_eq!(basis.eval(&u)[0], 1.0 / (4.0 * PI).sqrt(), max_relative = 1e-15);
        }
    }

    #[test]
    fn circle_basis_values() {
        let basis = Basis::new(1, 3).unwrap();
        let theta = 0.83;
        let v = basis.eval(&SpherePoint::from_angle(theta));
        assert_relative_eq!(v[0], 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-15);
        for k in 1..=3 {
            let kf = k as f64;
            assert_relative_eq!(v[2 * k - 1], (kf * theta).cos() / PI.sqrt(), epsilon = 1e-14);
            assert_relative_eq!(v[2 * k], (kf * theta).sin() / PI.sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn addition_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [1, 2] {
            for degree in [3, 10] {
                let basis = Basis::new(d, degree).unwrap();
                let kernel = KernelSpec::new(d, degree).unwrap();
                for _ in 0..10 {
                    let u = SpherePoint::random(d, &mut rng);
                    let s: f64 = basis.eval(&u).iter().map(|b| b * b).sum();
                    assert_relative_eq!(s, reproducing_kernel(&kernel, 1.0).unwrap(), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn degree_bookkeeping() {
        let b2 = Basis::new(2, 4).unwrap();
        assert_eq!(b2.degree_of(0), 0);
        assert_eq!(b2.degree_of(3), 1);
        assert_eq!(b2.degree_of(4), 2);
        assert_eq!(b2.degree_offset(3), 9);
        let b1 = Basis::new(1, 4).unwrap();
        assert_eq!(b1.degree_of(0), 0);
        assert_eq!(b1.degree_of(1), 1);
        assert_eq!(b1.degree_of(2), 1);
        assert_eq!(b1.degree_of(3), 2);
        assert_eq!(b1.degree_offset(2), 3);
        assert!(PolyCoeffs::new(b1.spec(), vec![0.0; 3]).is_err());
    }
}
