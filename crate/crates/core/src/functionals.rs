//! Set functionals: measures of sets, relative density at scale `r/L`,
//! harmonic measure seen from `|x| = 1 - 1/L`, the cap-averaged measure
//! `μ_L`, and the good-cap regularization `E*`.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cap_measure, sphere_area, Cap, CenterGrid, Rotation, SpherePoint};
use crate::measures::MeasureSpec;
use crate::quadrature::{zonal_band_rule_sized, QuadratureRule};
use crate::sets::{net_points, CapIndex, Region, SetSpec};

/// `μ(E) = Σ_{u_k ∈ E} w_k ω(u_k)`.
pub fn set_measure(set: &SetSpec, mu: &MeasureSpec, rule: &QuadratureRule) -> Result<f64> {
    let region = set.compile()?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .filter(|(u, _)| region.contains(u))
        .map(|(u, w)| w * mu.weight(u))
        .sum())
}

/// Node counts of the cap-local rule used for ball averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalResolution {
    /// Gauss nodes across the radius (`cos t` on `S^2`, `t` on `S^1`).
    pub radial: usize,
    /// Uniform azimuthal nodes (`S^2` only).
    pub azimuthal: usize,
}

impl Default for LocalResolution {
    fn default() -> Self {
        Self { radial: 24, azimuthal: 96 }
    }
}

/// A cap rule centered at the north pole, moved to arbitrary centers.
#[derive(Debug, Clone)]
pub struct LocalRule {
    d: usize,
    radius: f64,
    template: QuadratureRule,
}

impl LocalRule {
    pub fn new(d: usize, radius: f64, resolution: LocalResolution) -> Result<Self> {
        let pole = SpherePoint::north(d);
        let radial = if d == 1 { 2 * resolution.radial } else { resolution.radial };
        let template = zonal_band_rule_sized(&pole, 0.0, radius, radial, resolution.azimuthal)?;
        Ok(Self { d, radius, template })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.template.len()
    }

    pub fn is_empty(&self) -> bool {
        self.template.is_empty()
    }

    /// Calls `f(node, weight)` for every node of the rule moved to `center`.
    pub fn for_each_at(&self, center: &SpherePoint, mut f: impl FnMut(&SpherePoint, f64)) {
        let rot = Rotation::taking(&SpherePoint::north(self.d), center);
        for (u, w) in self.template.nodes.iter().zip(&self.template.weights) {
            f(&rot.apply(u), *w);
        }
    }

    /// `(μ(E ∩ B), μ(B))` for the ball of this rule centered at `center`.
    pub fn masses(&self, center: &SpherePoint, region: &Region, mu: &MeasureSpec) -> (f64, f64) {
        let mut inside = 0.0;
        let mut total = 0.0;
        self.for_each_at(center, |u, w| {
            let m = w * mu.weight(u);
            total += m;
            if region.contains(u) {
                inside += m;
            }
        });
        (inside, total)
    }

    /// `μ(B(center, radius))`.
    pub fn mass(&self, center: &SpherePoint, mu: &MeasureSpec) -> f64 {
        let mut total = 0.0;
        self.for_each_at(center, |u, w| total += w * mu.weight(u));
        total
    }
}

/// Grid minimum of the local density ratio `μ(E ∩ B(u, r/L)) / μ(B(u, r/L))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub rho_hat: f64,
    pub argmin_center: SpherePoint,
    pub r: f64,
    pub degree: usize,
    pub resolution: CenterGrid,
    pub local: LocalResolution,
}

/// Options shared by the infimum-over-centers functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Candidate centers per great circle, as a multiple of `L`.
    pub centers_per_degree: usize,
    pub local: LocalResolution,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { centers_per_degree: 6, local: LocalResolution::default() }
    }
}

pub fn relative_density(
    set: &SetSpec,
    mu: &MeasureSpec,
    d: usize,
    degree: usize,
    r: f64,
    options: &GridOptions,
) -> Result<DensityReport> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("scale r must be positive, got {r}")));
    }
    if degree == 0 {
        return Err(Error::Domain("relative density needs L >= 1".into()));
    }
    let scale = r / degree as f64;
    let grid = CenterGrid::for_degree(d, degree, options.centers_per_degree);
    if grid.spacing() > scale {
        return Err(Error::Resolution(format!(
            "center spacing {:.4} exceeds cap scale r/L = {scale:.4}; raise centers_per_degree",
            grid.spacing()
        )));
    }
    let region = set.compile()?;
    let local = LocalRule::new(d, scale.min(std::f64::consts::PI), options.local)?;
    let centers = grid.points();
    let ratios = centers
        .par_iter()
        .map(|c| {
            let (inside, total) = local.masses(c, &region, mu);
            if total > 0.0 {
                Ok(inside / total)
            } else {
                Err(Error::DegenerateMeasure(format!("μ(B(u, {scale})) = 0 at u = {:?}", c.coords())))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let (k, rho_hat) = argmin(&ratios);
    Ok(DensityReport {
        rho_hat: rho_hat.clamp(0.0, 1.0),
        argmin_center: centers[k].clone(),
        r,
        degree,
        resolution: grid,
        local: options.local,
    })
}

/// First index of the minimum; ties resolved by position so results do not
/// depend on evaluation order.
fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) })
}

/// Poisson integrals of the indicator of a fixed set against a fixed rule.
///
/// Values are normalized by the discrete mass of the kernel, which equals 1
/// for the exact integral; this makes `h_x(E) + h_x(E^c) = 1` hold exactly.
#[derive(Debug, Clone)]
pub struct HarmonicEvaluator {
    d: usize,
    nodes: Vec<[f64; 4]>,
    in_set: Vec<bool>,
    /// Nodes of a rule adapted to `E`, used for the numerator when present.
    set_nodes: Option<Vec<[f64; 4]>>,
}

fn packed(rule: &QuadratureRule, keep: impl Fn(&SpherePoint) -> bool) -> Vec<[f64; 4]> {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .filter(|(u, _)| keep(u))
        .map(|(u, w)| {
            let v = u.vector();
            [v.x, v.y, v.z, *w]
        })
        .collect()
}

impl HarmonicEvaluator {
    pub fn new(set: &SetSpec, rule: &QuadratureRule) -> Result<Self> {
        let region = set.compile()?;
        let nodes = packed(rule, |_| true);
        let in_set = rule.nodes.iter().map(|u| region.contains(u)).collect();
        Ok(Self { d: rule.d, nodes, in_set, set_nodes: None })
    }

    /// Numerator on `set_rule` (restricted to `E`), kernel mass on `full_rule`.
    pub fn with_set_rule(set: &SetSpec, set_rule: &QuadratureRule, full_rule: &QuadratureRule) -> Result<Self> {
        let region = set.compile()?;
        Ok(Self {
            d: full_rule.d,
            nodes: packed(full_rule, |_| true),
            in_set: vec![false; full_rule.len()],
            set_nodes: Some(packed(set_rule, |u| region.contains(u))),
        })
    }

    fn kernel(&self, v: &nalgebra::Vector3<f64>, radius: f64, n: &[f64; 4]) -> f64 {
        let rho2 = radius * radius;
        let t = v.x * n[0] + v.y * n[1] + v.z * n[2];
        let s = (1.0 + rho2 - 2.0 * radius * t).max(f64::MIN_POSITIVE);
        let p = match self.d {
            1 => (1.0 - rho2) / s,
            _ => (1.0 - rho2) / (s * s.sqrt()),
        };
        n[3] * p
    }

    /// `h_x(E)` for `x = radius · direction`, `0 <= radius < 1`.
    pub fn at(&self, direction: &SpherePoint, radius: f64) -> f64 {
        let v = direction.vector();
        let mut inside = 0.0;
        let mut total = 0.0;
        for (n, &hit) in self.nodes.iter().zip(&self.in_set) {
            let m = self.kernel(v, radius, n);
            total += m;
            if hit {
                inside += m;
            }
        }
        if let Some(set_nodes) = &self.set_nodes {
            inside = set_nodes.iter().map(|n| self.kernel(v, radius, n)).sum();
        }
        if total > 0.0 {
            (inside / total).min(1.0)
        } else {
            0.0
        }
    }
}

/// Harmonic measure `h_x(E)` of `E` seen from the interior point `x`.
pub fn harmonic_measure(set: &SetSpec, x: &[f64], rule: &QuadratureRule) -> Result<f64> {
    let (direction, radius) = split_interior_point(x, rule.d)?;
    Ok(HarmonicEvaluator::new(set, rule)?.at(&direction, radius))
}

fn split_interior_point(x: &[f64], d: usize) -> Result<(SpherePoint, f64)> {
    if x.len() != d + 1 {
        return Err(Error::Domain(format!("interior point must have {} coordinates", d + 1)));
    }
    let radius = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(radius < 1.0) {
        return Err(Error::Domain(format!("|x| = {radius} is not inside the unit ball")));
    }
    let direction = if radius > 0.0 { SpherePoint::normalized(x)? } else { SpherePoint::north(d) };
    Ok((direction, radius))
}

/// Grid minimum of `h_x(E_L)` over `|x| = 1 - 1/L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    pub delta: f64,
    pub argmin_center: SpherePoint,
    pub degree: usize,
    pub resolution: CenterGrid,
    pub rule: String,
}

pub fn harmonic_infimum(
    set: &SetSpec,
    degree: usize,
    centers_per_degree: usize,
    rule: &QuadratureRule,
) -> Result<HarmonicReport> {
    harmonic_infimum_with(set, degree, centers_per_degree, rule, None)
}

/// As [`harmonic_infimum`], optionally taking the numerator from a rule
/// adapted to `E` (see [`HarmonicEvaluator::with_set_rule`]).
pub fn harmonic_infimum_with(
    set: &SetSpec,
    degree: usize,
    centers_per_degree: usize,
    rule: &QuadratureRule,
    set_rule: Option<&QuadratureRule>,
) -> Result<HarmonicReport> {
    if degree == 0 {
        return Err(Error::Domain("harmonic infimum needs L >= 1".into()));
    }
    let d = rule.d;
    let l = degree as f64;
    let grid = CenterGrid::for_degree(d, degree, centers_per_degree);
    // The Poisson kernel at |x| = 1 - 1/L varies on the scale 1/L.
    if grid.spacing() > 2.0 / l {
        return Err(Error::Resolution(format!(
            "center spacing {:.4} exceeds 2/L = {:.4}",
            grid.spacing(),
            2.0 / l
        )));
    }
    let node_spacing = match d {
        1 => sphere_area(1) / rule.len() as f64,
        _ => (sphere_area(2) / rule.len() as f64).sqrt(),
    };
    if node_spacing > 1.0 / l {
        return Err(Error::Resolution(format!(
            "quadrature spacing {node_spacing:.4} does not resolve the Poisson scale 1/L = {:.4}",
            1.0 / l
        )));
    }
    let eval = match set_rule {
        None => HarmonicEvaluator::new(set, rule)?,
        Some(sr) => HarmonicEvaluator::with_set_rule(set, sr, rule)?,
    };
    let radius = 1.0 - 1.0 / l;
    let centers = grid.points();
    let values: Vec<f64> = centers.par_iter().map(|c| eval.at(c, radius)).collect();
    let (k, delta) = argmin(&values);
    Ok(HarmonicReport {
        delta,
        argmin_center: centers[k].clone(),
        degree,
        resolution: grid,
        rule: match set_rule {
            None => rule.descriptor.clone(),
            Some(sr) => format!("{} / {}", sr.descriptor, rule.descriptor),
        },
    })
}

/// `μ_L(u) = μ(B(u, 1/L)) / σ(B(u, 1/L))`.
pub fn regularized_measure(
    mu: &MeasureSpec,
    degree: usize,
    u: &SpherePoint,
    local: LocalResolution,
) -> Result<f64> {
    if degree == 0 {
        return Err(Error::Domain("regularized measure needs L >= 1".into()));
    }
    let rule = LocalRule::new(u.dim(), (1.0 / degree as f64).min(std::f64::consts::PI), local)?;
    let mut weighted = 0.0;
    let mut area = 0.0;
    rule.for_each_at(u, |v, w| {
        weighted += w * mu.weight(v);
        area += w;
    });
    Ok(weighted / area)
}

/// Output of [`regularize_set`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedSet {
    pub set: SetSpec,
    pub net_size: usize,
    pub good_caps: usize,
    /// Largest number of net caps covering a sampled point.
    pub max_overlap: usize,
}

/// Covering parameters for [`regularize_set`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetOptions {
    /// Bound `C_d` on the number of net caps containing any point.
    pub max_overlap: usize,
    /// Points per great circle, as a multiple of `L / eps`, for the covering check.
    pub check_density: usize,
    pub local: LocalResolution,
}

impl NetOptions {
    pub fn for_dim(d: usize) -> Self {
        Self {
            max_overlap: if d == 1 { 3 } else { 10 },
            check_density: 3,
            local: LocalResolution { radial: 8, azimuthal: 24 },
        }
    }
}

/// Union of the net caps `B(v, eps/L)` in which `E` has density at least `delta`.
pub fn regularize_set(
    set: &SetSpec,
    d: usize,
    degree: usize,
    eps: f64,
    delta: f64,
    options: &NetOptions,
) -> Result<RegularizedSet> {
    if degree == 0 || !(eps > 0.0) {
        return Err(Error::Domain("regularization needs L >= 1 and eps > 0".into()));
    }
    let radius = (eps / degree as f64).min(std::f64::consts::PI);
    // Mean spacing equal to the radius keeps the covering radius below it.
    let net = net_points(d, radius)?;
    let caps: Vec<Cap> = net.iter().map(|v| Cap::new(v.clone(), radius)).collect::<Result<_>>()?;
    let max_overlap = check_net(&caps, d, radius, options)?;
    let region = set.compile()?;
    let local = LocalRule::new(d, radius, options.local)?;
    let lebesgue = MeasureSpec::Lebesgue;
    let good: Vec<bool> = net
        .par_iter()
        .map(|v| {
            let (inside, total) = local.masses(v, &region, &lebesgue);
            inside >= delta * total
        })
        .collect();
    let good_caps: Vec<Cap> = caps.into_iter().zip(&good).filter(|(_, g)| **g).map(|(c, _)| c).collect();
    Ok(RegularizedSet {
        net_size: net.len(),
        good_caps: good_caps.len(),
        set: SetSpec::CapUnion { caps: good_caps },
        max_overlap,
    })
}

/// Verifies covering and bounded overlap of the net on a finer check grid.
fn check_net(caps: &[Cap], d: usize, radius: f64, options: &NetOptions) -> Result<usize> {
    let index = CapIndex::new(caps.to_vec());
    let per_circle = ((2.0 * std::f64::consts::PI / radius).ceil() as usize * options.check_density).max(8);
    let probes = CenterGrid { d, per_circle }.points();
    let counts: Vec<usize> = probes.par_iter().map(|u| index.count(u)).collect();
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(Error::NetConstruction(format!(
            "point {:?} is not covered by the net of radius {radius}",
            probes[k].coords()
        )));
    }
    let worst = counts.iter().copied().max().unwrap_or(0);
    if worst > options.max_overlap {
        return Err(Error::NetConstruction(format!(
            "overlap {worst} exceeds the bound {}",
            options.max_overlap
        )));
    }
    Ok(worst)
}

/// Ambient coordinates of `radius · direction`.
pub fn interior_point(direction: &SpherePoint, radius: f64) -> Vec<f64> {
    let v: Vector3<f64> = direction.vector() * radius;
    v.as_slice()[..direction.dim() + 1].to_vec()
}

/// `σ(B(u, radius))` for the ball of a [`LocalRule`]; exact formula.
pub fn ball_area(d: usize, radius: f64) -> Result<f64> {
    cap_measure(d, radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_quadrature, cap_rule};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn measure_of_full_and_hemisphere() {
        let rule = build_quadrature(2, 16, 4).unwrap();
        let full = set_measure(&SetSpec::Full, &MeasureSpec::Lebesgue, &rule).unwrap();
        assert_relative_eq!(full, 4.0 * PI, max_relative = 1e-12);
        let hemi = SetSpec::cap(SpherePoint::north(2), PI / 2.0).unwrap();
        let h = set_measure(&hemi, &MeasureSpec::Lebesgue, &rule).unwrap();
        assert_relative_eq!(h, 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn density_of_trivial_sets() {
        let opts = GridOptions::default();
        let mu = MeasureSpec::Lebesgue;
        for d in [1, 2] {
            let full = relative_density(&SetSpec::Full, &mu, d, 8, 2.0, &opts).unwrap();
            assert_eq!(full.rho_hat, 1.0);
            let empty = relative_density(&SetSpec::Empty, &mu, d, 8, 2.0, &opts).unwrap();
            assert_eq!(empty.rho_hat, 0.0);
        }
        let cap = SetSpec::cap(SpherePoint::north(2), PI / 3.0).unwrap();
        assert_eq!(relative_density(&cap, &mu, 2, 16, 2.0, &opts).unwrap().rho_hat, 0.0);
    }

    #[test]
    fn density_resolution_error() {
        let e = relative_density(&SetSpec::Full, &MeasureSpec::Lebesgue, 2, 8, 0.5, &GridOptions::default());
        assert!(matches!(e, Err(Error::Resolution(_))));
    }

    #[test]
    fn harmonic_measure_basics() {
        let rule = build_quadrature(2, 32, 4).unwrap();
        let x = interior_point(&SpherePoint::from_spherical(1.0, 2.0), 0.9);
        assert_relative_eq!(harmonic_measure(&SetSpec::Full, &x, &rule).unwrap(), 1.0, epsilon = 1e-15);
        let cap = SetSpec::cap(SpherePoint::from_spherical(0.4, 0.1), 0.8).unwrap();
        let at_origin = harmonic_measure(&cap, &[0.0, 0.0, 0.0], &rule).unwrap();
        let area = set_measure(&cap, &MeasureSpec::Lebesgue, &rule).unwrap() / (4.0 * PI);
        assert_relative_eq!(at_origin, area, max_relative = 1e-12);
        let h = harmonic_measure(&cap, &x, &rule).unwrap();
        let hc = harmonic_measure(&cap.complement(), &x, &rule).unwrap();
        // The cap boundary carries rule nodes only with probability zero.
        assert_relative_eq!(h + hc, 1.0, epsilon = 1e-9);
        assert!(harmonic_measure(&SetSpec::Full, &[0.0, 0.0, 1.0], &rule).is_err());
    }

    #[test]
    fn regularized_lebesgue_is_one() {
        let u = SpherePoint::from_spherical(0.3, 0.2);
        let v = regularized_measure(&MeasureSpec::Lebesgue, 16, &u, LocalResolution::default()).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn local_rule_areas() {
        for d in [1, 2] {
            let lr = LocalRule::new(d, 0.3, LocalResolution::default()).unwrap();
            let c = SpherePoint::random(d, &mut rand::rng());
            let area = lr.mass(&c, &MeasureSpec::Lebesgue);
            assert_relative_eq!(area, ball_area(d, 0.3).unwrap(), max_relative = 1e-13);
        }
        let exact = cap_rule(&SpherePoint::north(2), 0.3, 4, 1).unwrap().total_weight();
        assert_relative_eq!(exact, ball_area(2, 0.3).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn regularize_trivial_sets() {
        let opts = NetOptions::for_dim(2);
        let full = regularize_set(&SetSpec::Full, 2, 4, 0.5, 1.0, &opts).unwrap();
        assert_eq!(full.good_caps, full.net_size);
        let empty = regularize_set(&SetSpec::Empty, 2, 4, 0.5, 0.1, &opts).unwrap();
        assert_eq!(empty.good_caps, 0);
        assert!(matches!(empty.set, SetSpec::CapUnion { ref caps } if caps.is_empty()));
        let circle = regularize_set(&SetSpec::Full, 1, 8, 0.5, 1.0, &NetOptions::for_dim(1)).unwrap();
        assert_eq!(circle.good_caps, circle.net_size);
    }
}
