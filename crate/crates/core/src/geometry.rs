//! Points, caps and rotations on `S^1` and `S^2`.
//!
//! Both spheres are embedded in `R^3`; points of `S^1` have a vanishing third
//! coordinate, so inner products and rotations share one code path.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector of `R^{d+1}`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    xyz: Vector3<f64>,
    dim: usize,
}

impl SpherePoint {
    /// Builds a point from `d + 1` coordinates whose norm must be 1.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let p = Self::from_coords_unchecked(coords)?;
        let norm = p.xyz.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("point {coords:?} has norm {norm}, expected 1")));
        }
        Ok(p)
    }

    /// Builds a point from any nonzero vector by normalizing it.
    pub fn normalized(coords: &[f64]) -> Result<Self> {
        let mut p = Self::from_coords_unchecked(coords)?;
        let norm = p.xyz.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain(format!("cannot normalize {coords:?}")));
        }
        p.xyz /= norm;
        Ok(p)
    }

    fn from_coords_unchecked(coords: &[f64]) -> Result<Self> {
        match coords {
            [x, y] => Ok(Self { xyz: Vector3::new(*x, *y, 0.0), dim: 1 }),
            [x, y, z] => Ok(Self { xyz: Vector3::new(*x, *y, *z), dim: 2 }),
            _ => Err(Error::UnsupportedDimension(coords.len().saturating_sub(1))),
        }
    }

    pub(crate) fn from_vector(xyz: Vector3<f64>, dim: usize) -> Self {
        Self { xyz, dim }
    }

    /// Point of `S^1` at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Self { xyz: Vector3::new(theta.cos(), theta.sin(), 0.0), dim: 1 }
    }

    /// Point of `S^2` with polar angle `theta` (from the north pole) and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        Self { xyz: Vector3::new(s * phi.cos(), s * phi.sin(), theta.cos()), dim: 2 }
    }

    /// Distinguished pole `N`: `(0,0,1)` on `S^2`, `(1,0)` on `S^1`.
    pub fn north(d: usize) -> Self {
        match d {
            1 => Self::from_angle(0.0),
            _ => Self { xyz: Vector3::new(0.0, 0.0, 1.0), dim: 2 },
        }
    }

    /// Antipode of [`SpherePoint::north`].
    pub fn south(d: usize) -> Self {
        Self::north(d).antipode()
    }

    pub fn antipode(&self) -> Self {
        Self { xyz: -self.xyz, dim: self.dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.xyz
    }

    /// The `d + 1` ambient coordinates.
    pub fn coords(&self) -> Vec<f64> {
        self.xyz.as_slice()[..self.dim + 1].to_vec()
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.xyz.dot(&other.xyz)
    }

    /// Angle on `S^1`, in `(-π, π]`.
    pub fn angle(&self) -> f64 {
        self.xyz.y.atan2(self.xyz.x)
    }

    /// Uniformly distributed point (normalized Gaussian vector).
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let g: Vec<f64> = (0..=d).map(|_| StandardNormal.sample(rng)).collect();
            if let Ok(p) = Self::normalized(&g) {
                return p;
            }
        }
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        SpherePoint::normalized(&coords).map_err(D::Error::custom)
    }
}

/// `d(u, v) = arccos <u, v>`, with the inner product clamped into `[-1, 1]`.
pub fn geodesic_distance(u: &SpherePoint, v: &SpherePoint) -> f64 {
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// `σ(S^d)`: `2π` for the circle, `4π` for the sphere.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// Surface measure of a geodesic ball of the given radius.
pub fn cap_measure(d: usize, radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius <= PI) {
        return Err(Error::Domain(format!("cap radius {radius} outside (0, π]")));
    }
    match d {
        1 => Ok(2.0 * radius),
        2 => Ok(2.0 * PI * (1.0 - radius.cos())),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Closed geodesic ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= PI) {
            return Err(Error::Domain(format!("cap radius {radius} outside (0, π]")));
        }
        Ok(Self { center, radius })
    }

    pub fn measure(&self) -> f64 {
        cap_measure(self.center.dim(), self.radius).unwrap_or(0.0)
    }

    pub fn contains(&self, u: &SpherePoint) -> bool {
        self.center.dot(u) >= self.radius.cos() - BOUNDARY_TOL
    }
}

/// Slack used for the closed-set convention on cap boundaries.
pub(crate) const BOUNDARY_TOL: f64 = 1e-12;

/// An orthogonal map of `R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    m: Matrix3<f64>,
    dim: usize,
}

impl Rotation {
    pub fn identity(d: usize) -> Self {
        Self { m: Matrix3::identity(), dim: d }
    }

    /// Validates `R^T R = I` within `1e-10`. Accepts `2x2` (row-major, for
    /// `S^1`) or `3x3` matrices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if !(n == 2 || n == 3) || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("rotation must be a 2x2 or 3x3 matrix".into()));
        }
        let mut m = Matrix3::identity();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rows[i][j];
            }
        }
        let defect = (m.transpose() * m - Matrix3::identity()).abs().max();
        if defect > 1e-10 {
            return Err(Error::NonOrthogonal(defect));
        }
        Ok(Self { m, dim: n - 1 })
    }

    /// Rotation about the origin of `S^1` by `angle`.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { m: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0), dim: 1 }
    }

    /// A rotation mapping `from` to `to` (Rodrigues' formula about `from × to`).
    pub fn taking(from: &SpherePoint, to: &SpherePoint) -> Self {
        let d = from.dim();
        if d == 1 {
            return Self::planar(to.angle() - from.angle());
        }
        let a = from.vector();
        let b = to.vector();
        let c = a.dot(b);
        let axis = a.cross(b);
        let s = axis.norm();
        if s < 1e-14 {
            if c > 0.0 {
                return Self::identity(2);
            }
            // Half-turn about any axis orthogonal to `a`.
            let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            let k = a.cross(&helper).normalize();
            let m = 2.0 * k * k.transpose() - Matrix3::identity();
            return Self { m, dim: 2 };
        }
        let k = axis / s;
        let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
        let m = Matrix3::identity() + s * kx + (1.0 - c) * kx * kx;
        Self { m, dim: 2 }
    }

    /// Haar-random rotation of `S^d`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        if d == 1 {
            return Self::planar(rng.random::<f64>() * 2.0 * PI);
        }
        let a = SpherePoint::random(2, rng);
        let to_a = Self::taking(&SpherePoint::north(2), &a);
        let spin = rng.random::<f64>() * 2.0 * PI;
        let (s, c) = spin.sin_cos();
        let rz = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        Self { m: to_a.m * rz, dim: 2 }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(self.m * p.vector(), p.dim())
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.transpose(), dim: self.dim }
    }

    pub fn compose(&self, inner: &Rotation) -> Self {
        Self { m: self.m * inner.m, dim: self.dim }
    }

    /// For `S^1` rotations: the angle added to every point (reflections
    /// are reported as `None`).
    pub fn planar_angle(&self) -> Option<f64> {
        let det = self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)];
        (det > 0.0).then(|| self.m[(1, 0)].atan2(self.m[(0, 0)]))
    }
}

/// Candidate centers for infima over `S^d`: a uniform grid on `S^1`, a
/// Fibonacci lattice on `S^2`, with `per_circle` points per great circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterGrid {
    pub d: usize,
    pub per_circle: usize,
}

impl CenterGrid {
    /// Grid with `factor · L` points per great circle.
    pub fn for_degree(d: usize, degree: usize, factor: usize) -> Self {
        Self { d, per_circle: (factor * degree.max(1)).max(4) }
    }

    /// Typical spacing `2π / per_circle` between neighbouring centers.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.per_circle as f64
    }

    pub fn len(&self) -> usize {
        match self.d {
            1 => self.per_circle,
            _ => {
                let s = self.spacing();
                ((4.0 * PI / (s * s)).ceil() as usize).max(2)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<SpherePoint> {
        match self.d {
            1 => (0..self.per_circle)
                .map(|k| SpherePoint::from_angle(2.0 * PI * k as f64 / self.per_circle as f64))
                .collect(),
            _ => fibonacci_sphere(self.len()),
        }
    }
}

/// Fibonacci lattice with `n` points on `S^2`.
pub fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            SpherePoint::from_vector(Vector3::new(r * phi.cos(), r * phi.sin(), z), 2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distances() {
        let n = SpherePoint::north(2);
        assert_eq!(geodesic_distance(&n, &n), 0.0);
        assert_relative_eq!(geodesic_distance(&n, &n.antipode()), PI);
        let e = SpherePoint::new(&[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(geodesic_distance(&n, &e), PI / 2.0);
        // Rounding past 1 must not produce NaN.
        let almost = SpherePoint::from_vector(Vector3::new(0.0, 0.0, 1.0 + 1e-16), 2);
        assert_eq!(geodesic_distance(&n, &almost), 0.0);
    }

    #[test]
    fn cap_measures() {
        assert_relative_eq!(cap_measure(2, PI).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(cap_measure(2, PI / 2.0).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(cap_measure(1, 0.3).unwrap(), 0.6);
        assert!(cap_measure(2, 0.0).is_err());
        assert!(cap_measure(2, 3.5).is_err());
        // Complement of a cap is the antipodal cap of the supplementary radius.
        for &r in &[0.2, 1.0, 2.5] {
            for d in [1, 2] {
                let lhs = cap_measure(d, PI).unwrap() - cap_measure(d, r).unwrap();
                assert_relative_eq!(lhs, cap_measure(d, PI - r).unwrap(), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn rejects_non_unit_and_bad_rotations() {
        assert!(SpherePoint::new(&[1.0, 1.0, 0.0]).is_err());
        assert!(SpherePoint::new(&[1.0, 0.0, 0.0, 0.0]).is_err());
        let bad = vec![vec![1.0, 0.1], vec![0.0, 1.0]];
        assert!(matches!(Rotation::from_rows(&bad), Err(Error::NonOrthogonal(_))));
    }

    #[test]
    fn rotation_taking_maps_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1, 2] {
            for _ in 0..20 {
                let a = SpherePoint::random(d, &mut rng);
                let b = SpherePoint::random(d, &mut rng);
                let r = Rotation::taking(&a, &b);
                assert!((r.apply(&a).vector() - b.vector()).norm() < 1e-12);
            }
        }
        let n = SpherePoint::north(2);
        let r = Rotation::taking(&n, &n.antipode());
        assert!((r.apply(&n).vector() - n.antipode().vector()).norm() < 1e-12);
        assert_eq!(Rotation::identity(2).apply(&n), n);
    }

    #[test]
    fn center_grid_sizes() {
        let g = CenterGrid::for_degree(2, 8, 6);
        assert_eq!(g.per_circle, 48);
        let pts = g.points();
        assert_eq!(pts.len(), g.len());
        assert!(pts.iter().all(|p| (p.vector().norm() - 1.0).abs() < 1e-14));
        assert_eq!(CenterGrid::for_degree(1, 8, 6).points().len(), 48);
    }

    #[test]
    fn serde_roundtrip_point() {
        let p = SpherePoint::from_spherical(0.3, 1.1);
        let s = serde_json::to_string(&p).unwrap();
        let q: SpherePoint = serde_json::from_str(&s).unwrap();
        assert!((p.vector() - q.vector()).norm() < 1e-15);
        let c: SpherePoint = serde_json::from_str("[0.0, 2.0]").unwrap();
        assert_eq!(c.dim(), 1);
        assert_relative_eq!(c.angle(), PI / 2.0);
    }

    proptest! {
        #[test]
        fn triangle_inequality(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = SpherePoint::random(d, &mut rng);
            let b = SpherePoint::random(d, &mut rng);
            let c = SpherePoint::random(d, &mut rng);
            let ab = geodesic_distance(&a, &b);
            let bc = geodesic_distance(&b, &c);
            let ac = geodesic_distance(&a, &c);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((0.0..=PI).contains(&ab));
        }

        #[test]
        fn rotations_are_isometries(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = Rotation::random(d, &mut rng);
            let a = SpherePoint::random(d, &mut rng);
            let b = SpherePoint::random(d, &mut rng);
            let before = geodesic_distance(&a, &b);
            let after = geodesic_distance(&r.apply(&a), &r.apply(&b));
            prop_assert!((before - after).abs() < 1e-7);
            prop_assert!((r.apply(&a).vector().norm() - 1.0).abs() < 1e-12);
        }
    }
}
