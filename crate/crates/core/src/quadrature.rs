//! Quadrature rules on `S^1` and `S^2` with declared polynomial exactness.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Cap, Rotation, SpherePoint};
use crate::sets::{CapIndex, SetSpec};

/// Largest rule [`build_quadrature`] will allocate unless told otherwise.
pub const DEFAULT_MAX_NODES: usize = 4_000_000;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        w[n - 1 - i] = wi;
        x[i] = -z;
        w[i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|t| half * t).collect())
}

/// Nodes and positive weights approximating `∫ · dσ` over a region of `S^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub d: usize,
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly over the region the rule covers.
    pub exact_degree: usize,
    pub descriptor: String,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(u, w)| w * f(u)).sum()
    }

    /// Image of the rule under `rotation`; weights are unchanged.
    pub fn rotated(&self, rotation: &Rotation) -> Self {
        Self {
            d: self.d,
            nodes: self.nodes.iter().map(|u| rotation.apply(u)).collect(),
            weights: self.weights.clone(),
            exact_degree: self.exact_degree,
            descriptor: format!("{} rotated", self.descriptor),
        }
    }

    /// Keeps the nodes for which `keep` holds.
    pub fn restricted(&self, keep: impl Fn(&SpherePoint) -> bool) -> Self {
        let (nodes, weights) = self
            .nodes
            .iter()
            .zip(&self.weights)
            .filter(|(u, _)| keep(u))
            .map(|(u, w)| (u.clone(), *w))
            .unzip();
        Self {
            d: self.d,
            nodes,
            weights,
            exact_degree: self.exact_degree,
            descriptor: format!("{} restricted", self.descriptor),
        }
    }

    /// Concatenation of rules over disjoint regions.
    pub fn union(parts: Vec<QuadratureRule>, d: usize) -> Self {
        let exact_degree = parts.iter().map(|r| r.exact_degree).min().unwrap_or(0);
        let descriptor = parts.iter().map(|r| r.descriptor.as_str()).collect::<Vec<_>>().join(" + ");
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for r in parts {
            nodes.extend(r.nodes);
            weights.extend(r.weights);
        }
        Self { d, nodes, weights, exact_degree, descriptor }
    }
}

/// Global rule on `S^d` exact for polynomials of degree `exact_degree`.
///
/// `d = 1`: uniform trapezoid with `(exact_degree + 1) · oversample` nodes.
/// `d = 2`: Gauss–Legendre in `cos θ` times a uniform azimuthal grid.
pub fn build_quadrature(d: usize, exact_degree: usize, oversample: usize) -> Result<QuadratureRule> {
    build_quadrature_limited(d, exact_degree, oversample, DEFAULT_MAX_NODES)
}

pub fn build_quadrature_limited(
    d: usize,
    exact_degree: usize,
    oversample: usize,
    max_nodes: usize,
) -> Result<QuadratureRule> {
    let os = oversample.max(1);
    match d {
        1 => {
            let n = (exact_degree + 1) * os;
            guard(n, max_nodes)?;
            let w = 2.0 * PI / n as f64;
            let nodes = (0..n).map(|k| SpherePoint::from_angle(2.0 * PI * k as f64 / n as f64)).collect();
            Ok(QuadratureRule {
                d,
                nodes,
                weights: vec![w; n],
                exact_degree,
                descriptor: format!("trapezoid(n={n})"),
            })
        }
        2 => {
            let n_z = (exact_degree + 2) / 2 * os;
            let n_phi = (exact_degree + 1) * os;
            guard(n_z * n_phi, max_nodes)?;
            let mut rule = zonal_rule(&SpherePoint::north(2), -1.0, 1.0, n_z, n_phi);
            rule.exact_degree = exact_degree;
            rule.descriptor = format!("gauss-legendre x uniform ({n_z}x{n_phi})");
            Ok(rule)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

fn guard(n: usize, max_nodes: usize) -> Result<()> {
    if n > max_nodes {
        Err(Error::Resource(format!("quadrature needs {n} nodes, limit is {max_nodes}")))
    } else {
        Ok(())
    }
}

/// Product rule on `{u ∈ S^2 : z_lo <= <u, pole> <= z_hi}`.
fn zonal_rule(pole: &SpherePoint, z_lo: f64, z_hi: f64, n_z: usize, n_phi: usize) -> QuadratureRule {
    let (zs, wz) = gauss_legendre_on(n_z, z_lo, z_hi);
    let rotation = Rotation::taking(&SpherePoint::north(2), pole);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_z * n_phi);
    let mut weights = Vec::with_capacity(n_z * n_phi);
    for (z, w) in zs.iter().zip(&wz) {
        let r = (1.0 - z * z).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = dphi * (k as f64 + 0.5);
            let v = Vector3::new(r * phi.cos(), r * phi.sin(), *z);
            nodes.push(rotation.apply(&SpherePoint::from_vector(v, 2)));
            weights.push(w * dphi);
        }
    }
    QuadratureRule { d: 2, nodes, weights, exact_degree: 0, descriptor: String::new() }
}

/// Gauss–Legendre rule in the angle over the arc `[a, b]` of `S^1`.
fn arc_rule(a: f64, b: f64, n: usize) -> QuadratureRule {
    let (ts, ws) = gauss_legendre_on(n, a, b);
    QuadratureRule {
        d: 1,
        nodes: ts.iter().map(|&t| SpherePoint::from_angle(t)).collect(),
        weights: ws,
        exact_degree: 0,
        descriptor: String::new(),
    }
}

/// Node count for Gauss–Legendre on an arc of length `len` so that trigonometric
/// polynomials of degree `degree` are integrated to rounding accuracy.
fn arc_nodes(degree: usize, len: f64, oversample: usize) -> usize {
    ((0.5 * degree as f64 * len).ceil() as usize + 24) * oversample.max(1)
}

/// Rule over the zone `{u : inner <= d(u, pole) <= outer}`.
///
/// On `S^2` the rule is exact for polynomials of degree `exact_degree`; on
/// `S^1` (one or two arcs) it is Gauss–Legendre in the angle, sized so that
/// trigonometric polynomials of that degree are integrated to rounding.
pub fn zonal_band_rule(
    pole: &SpherePoint,
    inner: f64,
    outer: f64,
    exact_degree: usize,
    oversample: usize,
) -> Result<QuadratureRule> {
    check_band(inner, outer)?;
    let os = oversample.max(1);
    let mut rule = match pole.dim() {
        1 => {
            let parts = band_arcs(pole.angle(), inner, outer)
                .into_iter()
                .map(|(a, b)| arc_rule(a, b, arc_nodes(exact_degree, b - a, os)))
                .collect();
            QuadratureRule::union(parts, 1)
        }
        _ => {
            let n_z = (exact_degree + 2) / 2 * os;
            let n_phi = (exact_degree + 1) * os;
            zonal_rule(pole, outer.cos(), inner.cos(), n_z, n_phi)
        }
    };
    rule.exact_degree = exact_degree;
    rule.descriptor = format!("zonal band [{inner:.6}, {outer:.6}] degree {exact_degree} x{os}");
    Ok(rule)
}

/// Rule over the zone with explicit node counts (`n_radial` Gauss nodes across
/// the zone, `n_azimuth` around it on `S^2`; ignored on `S^1`).
pub fn zonal_band_rule_sized(
    pole: &SpherePoint,
    inner: f64,
    outer: f64,
    n_radial: usize,
    n_azimuth: usize,
) -> Result<QuadratureRule> {
    check_band(inner, outer)?;
    let mut rule = match pole.dim() {
        1 => {
            let parts = band_arcs(pole.angle(), inner, outer)
                .into_iter()
                .map(|(a, b)| arc_rule(a, b, n_radial.max(1)))
                .collect();
            QuadratureRule::union(parts, 1)
        }
        _ => zonal_rule(pole, outer.cos(), inner.cos(), n_radial.max(1), n_azimuth.max(1)),
    };
    rule.exact_degree = if pole.dim() == 2 { 2 * n_radial.max(1) - 1 } else { 0 };
    rule.descriptor = format!("zonal band [{inner:.6}, {outer:.6}] ({n_radial}x{n_azimuth})");
    Ok(rule)
}

/// Rule over the closed cap `B(center, radius)`.
pub fn cap_rule(center: &SpherePoint, radius: f64, exact_degree: usize, oversample: usize) -> Result<QuadratureRule> {
    zonal_band_rule(center, 0.0, radius, exact_degree, oversample)
}

/// Rule supported on `set`, for integrands of degree `exact_degree`.
///
/// Caps of `S^2` with `degree · radius` large get the exact zonal rule; small
/// caps get a local polar rule sized by `degree · radius`, where the integrand
/// is close to a low-degree polynomial. Nodes covered by several caps have
/// their weight split evenly. Sets without a special form fall back to the
/// global rule of [`build_quadrature`].
pub fn adapted_rule(set: &SetSpec, d: usize, exact_degree: usize, oversample: usize) -> Result<QuadratureRule> {
    let os = oversample.max(1);
    let set = set.materialize()?;
    let mut rule = match &set {
        SetSpec::Empty => QuadratureRule::union(vec![], d),
        SetSpec::CapUnion { caps } if caps.is_empty() => QuadratureRule::union(vec![], d),
        SetSpec::CapUnion { caps } => {
            let parts = caps.iter().map(|c| cap_piece(c, exact_degree, os)).collect::<Result<Vec<_>>>()?;
            let mut rule = QuadratureRule::union(parts, d);
            if caps.len() > 1 {
                let index = CapIndex::new(caps.clone());
                let counts: Vec<usize> = rule.nodes.iter().map(|u| index.count(u)).collect();
                for (w, c) in rule.weights.iter_mut().zip(counts) {
                    *w /= c.max(1) as f64;
                }
            }
            rule
        }
        SetSpec::Band { pole, inner, outer } => zonal_band_rule(pole, *inner, *outer, exact_degree, os)?,
        SetSpec::Complement { of } => match of.as_ref() {
            SetSpec::CapUnion { caps } if caps.len() == 1 => {
                zonal_band_rule(&caps[0].center, caps[0].radius, PI, exact_degree, os)?
            }
            SetSpec::Band { pole, inner, outer } => QuadratureRule::union(
                vec![
                    zonal_band_rule(pole, 0.0, *inner, exact_degree, os)?,
                    zonal_band_rule(pole, *outer, PI, exact_degree, os)?,
                ],
                d,
            ),
            _ => build_quadrature(d, exact_degree, os)?,
        },
        SetSpec::Arcs { arcs } => {
            let arcs: Vec<(f64, f64)> = arcs.iter().map(|[a, b]| (*a, *b)).collect();
            arcs_rule(&arcs, exact_degree, os)
        }
        SetSpec::Full | SetSpec::RandomCaps { .. } => build_quadrature(d, exact_degree, os)?,
    };
    rule.exact_degree = exact_degree;
    rule.descriptor = format!("adapted to {} degree {exact_degree} x{os}", set_label(&set));
    Ok(rule)
}

fn set_label(set: &SetSpec) -> String {
    match set {
        SetSpec::CapUnion { caps } => format!("{} caps", caps.len()),
        SetSpec::Arcs { arcs } => format!("{} arcs", arcs.len()),
        SetSpec::Band { .. } => "band".into(),
        SetSpec::Complement { .. } => "complement".into(),
        SetSpec::Full => "full sphere".into(),
        SetSpec::Empty => "empty set".into(),
        SetSpec::RandomCaps { .. } => "random caps".into(),
    }
}

fn cap_piece(cap: &Cap, exact_degree: usize, os: usize) -> Result<QuadratureRule> {
    let (center, r) = (&cap.center, cap.radius);
    let scale = exact_degree as f64 * r;
    if center.dim() == 1 || scale > 0.5 * exact_degree as f64 {
        return zonal_band_rule(center, 0.0, r, exact_degree, os);
    }
    let n_radial = ((0.5 * scale).ceil() as usize + 6) * os;
    let n_azimuth = ((1.5 * exact_degree as f64 * r.sin()).ceil() as usize + 12) * os;
    zonal_band_rule_sized(center, 0.0, r, n_radial, n_azimuth)
}

/// Rule over a union of disjoint arcs `[a_i, b_i]` (angles) of `S^1`.
pub fn arcs_rule(arcs: &[(f64, f64)], exact_degree: usize, oversample: usize) -> QuadratureRule {
    let parts = arcs
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| arc_rule(a, b, arc_nodes(exact_degree, b - a, oversample)))
        .collect();
    let mut rule = QuadratureRule::union(parts, 1);
    rule.exact_degree = exact_degree;
    rule.descriptor = format!("arcs x{} degree {exact_degree}", arcs.len());
    rule
}

fn check_band(inner: f64, outer: f64) -> Result<()> {
    if !(inner >= 0.0 && inner < outer && outer <= PI) {
        return Err(Error::Domain(format!("band radii must satisfy 0 <= {inner} < {outer} <= π")));
    }
    Ok(())
}

/// Angle intervals of `S^1` at distance `[inner, outer]` from angle `center`.
pub(crate) fn band_arcs(center: f64, inner: f64, outer: f64) -> Vec<(f64, f64)> {
    if inner <= 0.0 {
        vec![(center - outer, center + outer)]
    } else if outer >= PI {
        vec![(center + inner, center + 2.0 * PI - inner)]
    } else {
        vec![(center - outer, center - inner), (center + inner, center + outer)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in [1, 2, 5, 17, 64, 200] {
            let (x, w) = gauss_legendre(n);
            assert!(w.iter().all(|&w| w > 0.0));
            for k in 0..(2 * n).min(40) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} k={k}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn circle_rule_totals() {
        let r = build_quadrature(1, 8, 1).unwrap();
        assert!(r.len() >= 9);
        assert_relative_eq!(r.total_weight(), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn degree_zero_sphere_rule_is_one_ring() {
        let r = build_quadrature(2, 0, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r.total_weight(), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn sphere_rule_integrates_polynomials() {
        let r = build_quadrature(2, 10, 1).unwrap();
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert_relative_eq!(r.total_weight(), 4.0 * PI, max_relative = 1e-13);
        // ∫ x^4 y^2 z^4 dσ = 4π · (3·1·3) / (3·5·7·9·11).
        let exact = 4.0 * PI * 9.0 / 10395.0;
        let got = r.integrate(|u| {
            let v = u.vector();
            v.x.powi(4) * v.y.powi(2) * v.z.powi(4)
        });
        assert_relative_eq!(got, exact, max_relative = 1e-12);
    }

    #[test]
    fn cap_rule_measure() {
        let c = SpherePoint::from_spherical(0.7, 2.0);
        let r = cap_rule(&c, 0.4, 6, 1).unwrap();
        assert_relative_eq!(r.total_weight(), 2.0 * PI * (1.0 - 0.4f64.cos()), max_relative = 1e-13);
        assert!(r.nodes.iter().all(|u| u.dot(&c) >= 0.4f64.cos()));
        let arc = cap_rule(&SpherePoint::from_angle(1.0), 0.4, 6, 1).unwrap();
        assert_relative_eq!(arc.total_weight(), 0.8, max_relative = 1e-13);
    }

    #[test]
    fn band_rules_cover_complement() {
        let p = SpherePoint::north(2);
        let cap = cap_rule(&p, 1.0, 8, 1).unwrap();
        let rest = zonal_band_rule(&p, 1.0, PI, 8, 1).unwrap();
        assert_relative_eq!(cap.total_weight() + rest.total_weight(), 4.0 * PI, max_relative = 1e-13);
        let p1 = SpherePoint::from_angle(0.5);
        let mid = zonal_band_rule(&p1, 0.3, 1.2, 8, 1).unwrap();
        assert_relative_eq!(mid.total_weight(), 1.8, max_relative = 1e-13);
        assert!(zonal_band_rule(&p, 1.0, 0.5, 4, 1).is_err());
    }

    #[test]
    fn node_limit_is_a_resource_error() {
        let e = build_quadrature_limited(2, 200, 4, 10_000).unwrap_err();
        assert!(e.is_resource());
    }
}
