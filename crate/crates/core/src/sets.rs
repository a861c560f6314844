//! Subsets of `S^d` and the families `{E_L}` built from them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fibonacci_sphere, sphere_area, Cap, Rotation, SpherePoint, BOUNDARY_TOL};

/// A measurable subset of `S^d`, closed by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    Full,
    Empty,
    CapUnion { caps: Vec<Cap> },
    /// `{u : inner <= d(u, pole) <= outer}`.
    Band { pole: SpherePoint, inner: f64, outer: f64 },
    /// Closure of the complement.
    Complement { of: Box<SetSpec> },
    /// `count` caps of equal radius with area-uniform centers drawn from `seed`.
    RandomCaps { d: usize, seed: u64, count: usize, radius: f64 },
    /// Arcs `[start, end]` (angles, `end - start <= 2π`) of `S^1`.
    Arcs { arcs: Vec<[f64; 2]> },
}

impl SetSpec {
    pub fn cap(center: SpherePoint, radius: f64) -> Result<Self> {
        Ok(SetSpec::CapUnion { caps: vec![Cap::new(center, radius)?] })
    }

    pub fn complement(self) -> Self {
        SetSpec::Complement { of: Box::new(self) }
    }

    /// Arc `[-a, a]` of `S^1` around angle 0.
    pub fn symmetric_arc(a: f64) -> Self {
        SetSpec::Arcs { arcs: vec![[-a, a]] }
    }

    /// Compiles the set into a form with fast membership queries.
    pub fn compile(&self) -> Result<Region> {
        Ok(match self {
            SetSpec::Full => Region::Full,
            SetSpec::Empty => Region::Empty,
            SetSpec::CapUnion { caps } => {
                if caps.is_empty() {
                    Region::Empty
                } else {
                    Region::Caps(CapIndex::new(caps.clone()))
                }
            }
            SetSpec::Band { pole, inner, outer } => {
                if !(*inner >= 0.0 && inner <= outer && *outer <= PI) {
                    return Err(Error::Domain(format!("invalid band [{inner}, {outer}]")));
                }
                Region::Band { pole: pole.clone(), inner: *inner, outer: *outer }
            }
            SetSpec::Complement { of } => Region::Complement(Box::new(of.compile()?)),
            SetSpec::RandomCaps { .. } => return self.materialize()?.compile(),
            SetSpec::Arcs { arcs } => {
                for [a, b] in arcs {
                    if !(b >= a && b - a <= 2.0 * PI) {
                        return Err(Error::Domain(format!("invalid arc [{a}, {b}]")));
                    }
                }
                Region::Arcs(arcs.iter().map(|[a, b]| (*a, *b)).collect())
            }
        })
    }

    /// Replaces seeded random kinds by explicit cap unions.
    pub fn materialize(&self) -> Result<SetSpec> {
        Ok(match self {
            SetSpec::RandomCaps { d, seed, count, radius } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let caps = (0..*count)
                    .map(|_| Cap::new(SpherePoint::random(*d, &mut rng), *radius))
                    .collect::<Result<Vec<_>>>()?;
                SetSpec::CapUnion { caps }
            }
            SetSpec::Complement { of } => SetSpec::Complement { of: Box::new(of.materialize()?) },
            other => other.clone(),
        })
    }

    /// Image of the set under `rotation`.
    pub fn rotated(&self, rotation: &Rotation) -> Result<SetSpec> {
        Ok(match self.materialize()? {
            SetSpec::Full => SetSpec::Full,
            SetSpec::Empty => SetSpec::Empty,
            SetSpec::CapUnion { caps } => SetSpec::CapUnion {
                caps: caps
                    .into_iter()
                    .map(|c| Cap { center: rotation.apply(&c.center), radius: c.radius })
                    .collect(),
            },
            SetSpec::Band { pole, inner, outer } => SetSpec::Band { pole: rotation.apply(&pole), inner, outer },
            SetSpec::Complement { of } => SetSpec::Complement { of: Box::new(of.rotated(rotation)?) },
            SetSpec::Arcs { arcs } => {
                let orientation_preserving = rotation.planar_angle().is_some();
                SetSpec::Arcs {
                    arcs: arcs
                        .into_iter()
                        .map(|[a, b]| {
                            let len = b - a;
                            let anchor = if orientation_preserving { a } else { b };
                            let start = rotation.apply(&SpherePoint::from_angle(anchor)).angle();
                            [start, start + len]
                        })
                        .collect(),
                }
            }
            SetSpec::RandomCaps { .. } => unreachable!("materialized above"),
        })
    }

    /// Membership test; compiles the set on every call.
    pub fn indicator(&self, u: &SpherePoint) -> Result<u8> {
        Ok(self.compile()?.contains(u) as u8)
    }
}

/// Rule producing `E_L` from the degree `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFamily {
    /// The same set for every degree.
    Fixed { set: SetSpec },
    /// Caps of radius `cap_radius / L` centered on a net of spacing `spacing / L`
    /// (uniform on `S^1`, Fibonacci on `S^2`).
    CapNet { d: usize, cap_radius: f64, spacing: f64 },
    /// Caps of radius `cap_radius / L`, `count(L) = σ(S^d) / (spacing / L)^d`
    /// centers drawn from `seed`.
    RandomNet { d: usize, seed: u64, cap_radius: f64, spacing: f64 },
}

impl SetFamily {
    pub fn at_degree(&self, degree: usize) -> Result<SetSpec> {
        let l = degree.max(1) as f64;
        match self {
            SetFamily::Fixed { set } => Ok(set.clone()),
            SetFamily::CapNet { d, cap_radius, spacing } => {
                let radius = (cap_radius / l).min(PI);
                let caps = net_points(*d, spacing / l)?
                    .into_iter()
                    .map(|c| Cap::new(c, radius))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SetSpec::CapUnion { caps })
            }
            SetFamily::RandomNet { d, seed, cap_radius, spacing } => {
                let count = net_count(*d, spacing / l)?;
                Ok(SetSpec::RandomCaps {
                    d: *d,
                    seed: seed.wrapping_add(degree as u64),
                    count,
                    radius: (cap_radius / l).min(PI),
                })
            }
        }
    }
}

fn net_count(d: usize, spacing: f64) -> Result<usize> {
    if !(spacing > 0.0) {
        return Err(Error::Domain(format!("net spacing must be positive, got {spacing}")));
    }
    Ok(match d {
        1 => (2.0 * PI / spacing).ceil() as usize,
        2 => (sphere_area(2) / (spacing * spacing)).ceil() as usize,
        _ => return Err(Error::UnsupportedDimension(d)),
    })
}

/// Near-uniform points with mean spacing `spacing`.
pub fn net_points(d: usize, spacing: f64) -> Result<Vec<SpherePoint>> {
    let n = net_count(d, spacing)?.max(1);
    Ok(match d {
        1 => (0..n).map(|k| SpherePoint::from_angle(2.0 * PI * k as f64 / n as f64)).collect(),
        _ => fibonacci_sphere(n),
    })
}

/// A compiled [`SetSpec`].
#[derive(Debug, Clone)]
pub enum Region {
    Full,
    Empty,
    Caps(CapIndex),
    Band { pole: SpherePoint, inner: f64, outer: f64 },
    Complement(Box<Region>),
    Arcs(Vec<(f64, f64)>),
}

impl Region {
    /// Membership in the closed set.
    pub fn contains(&self, u: &SpherePoint) -> bool {
        match self {
            Region::Full => true,
            Region::Empty => false,
            Region::Caps(index) => index.contains(u, BOUNDARY_TOL),
            Region::Band { pole, inner, outer } => {
                let t = pole.dot(u);
                t <= inner.cos() + BOUNDARY_TOL && t >= outer.cos() - BOUNDARY_TOL
            }
            Region::Complement(inner) => !inner.contains_interior(u),
            Region::Arcs(arcs) => arcs_contain(arcs, u.angle(), BOUNDARY_TOL),
        }
    }

    /// Membership in the interior (boundary points excluded).
    pub fn contains_interior(&self, u: &SpherePoint) -> bool {
        match self {
            Region::Full => true,
            Region::Empty => false,
            Region::Caps(index) => index.contains(u, -BOUNDARY_TOL),
            Region::Band { pole, inner, outer } => {
                let t = pole.dot(u);
                (*inner <= 0.0 || t < inner.cos() - BOUNDARY_TOL) && (*outer >= PI || t > outer.cos() + BOUNDARY_TOL)
            }
            Region::Complement(inner) => !inner.contains(u),
            Region::Arcs(arcs) => arcs_contain(arcs, u.angle(), -BOUNDARY_TOL),
        }
    }
}

fn arcs_contain(arcs: &[(f64, f64)], angle: f64, slack: f64) -> bool {
    arcs.iter().any(|&(a, b)| {
        if b - a >= 2.0 * PI - 1e-15 {
            return true;
        }
        let offset = (angle - a).rem_euclid(2.0 * PI);
        let len = b - a;
        if slack >= 0.0 {
            // Points just before `a` wrap to offsets near 2π.
            offset <= len + slack || offset >= 2.0 * PI - slack
        } else {
            offset >= -slack && offset <= len + slack
        }
    })
}

/// Spatial hash over cap centers: a uniform grid on `[-1, 1]^3` with every cap
/// registered in each cell its chordal bounding box touches.
#[derive(Debug, Clone)]
pub struct CapIndex {
    caps: Vec<Cap>,
    cos_radius: Vec<f64>,
    cells_per_axis: usize,
    cell: f64,
    starts: Vec<u32>,
    entries: Vec<u32>,
    /// Caps too large to bucket; checked for every query.
    large: Vec<u32>,
}

const MAX_CELLS_PER_AXIS: usize = 96;

impl CapIndex {
    pub fn new(caps: Vec<Cap>) -> Self {
        let cos_radius: Vec<f64> = caps.iter().map(|c| c.radius.cos()).collect();
        let chord = |r: f64| 2.0 * (0.5 * r).sin();
        // Cell size chosen from the typical (median) cap; much larger caps go to `large`.
        let mut radii: Vec<f64> = caps.iter().map(|c| c.radius).collect();
        radii.sort_by(f64::total_cmp);
        let typical = radii.get(radii.len() / 2).copied().unwrap_or(PI);
        let cells_per_axis = ((2.0 / (2.0 * chord(typical))).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS);
        let cell = 2.0 / cells_per_axis as f64;
        let n = cells_per_axis;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); n * n * n];
        let mut large = Vec::new();
        for (i, cap) in caps.iter().enumerate() {
            let h = chord(cap.radius) + 1e-9;
            if h > 4.0 * cell && n > 1 {
                large.push(i as u32);
                continue;
            }
            let v = cap.center.vector();
            let lo = |x: f64| Self::axis_cell(x - h, cell, n);
            let hi = |x: f64| Self::axis_cell(x + h, cell, n);
            for ix in lo(v.x)..=hi(v.x) {
                for iy in lo(v.y)..=hi(v.y) {
                    for iz in lo(v.z)..=hi(v.z) {
                        buckets[(ix * n + iy) * n + iz].push(i as u32);
                    }
                }
            }
        }
        let mut starts = Vec::with_capacity(buckets.len() + 1);
        let mut entries = Vec::new();
        starts.push(0);
        for b in buckets {
            entries.extend(b);
            starts.push(entries.len() as u32);
        }
        Self { caps, cos_radius, cells_per_axis, cell, starts, entries, large }
    }

    fn axis_cell(x: f64, cell: f64, n: usize) -> usize {
        (((x + 1.0) / cell).floor().max(0.0) as usize).min(n - 1)
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    /// True when `<u, c> >= cos r - slack` for some cap.
    pub fn contains(&self, u: &SpherePoint, slack: f64) -> bool {
        let v = u.vector();
        let n = self.cells_per_axis;
        let cell_of = |x: f64| Self::axis_cell(x, self.cell, n);
        let idx = (cell_of(v.x) * n + cell_of(v.y)) * n + cell_of(v.z);
        let range = self.starts[idx] as usize..self.starts[idx + 1] as usize;
        let hit = |i: u32| {
            let i = i as usize;
            self.caps[i].center.vector().dot(v) >= self.cos_radius[i] - slack
        };
        self.entries[range].iter().any(|&i| hit(i)) || self.large.iter().any(|&i| hit(i))
    }

    /// Number of caps containing `u` (closed convention).
    pub fn count(&self, u: &SpherePoint) -> usize {
        let v = u.vector();
        let n = self.cells_per_axis;
        let cell_of = |x: f64| Self::axis_cell(x, self.cell, n);
        let idx = (cell_of(v.x) * n + cell_of(v.y)) * n + cell_of(v.z);
        let range = self.starts[idx] as usize..self.starts[idx + 1] as usize;
        let hit = |&i: &u32| {
            let i = i as usize;
            self.caps[i].center.vector().dot(v) >= self.cos_radius[i] - BOUNDARY_TOL
        };
        self.entries[range].iter().filter(|i| hit(i)).count() + self.large.iter().filter(|i| hit(i)).count()
    }
}

/// Samples `count` uniform points, for tests and random set constructions.
pub fn random_points<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R) -> Vec<SpherePoint> {
    (0..count).map(|_| SpherePoint::random(d, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_indicators() {
        let n = SpherePoint::north(2);
        assert_eq!(SetSpec::Full.indicator(&n).unwrap(), 1);
        assert_eq!(SetSpec::Empty.indicator(&n).unwrap(), 0);
        let hemi = SetSpec::cap(n.clone(), PI / 2.0).unwrap();
        assert_eq!(hemi.indicator(&n).unwrap(), 1);
        assert_eq!(hemi.indicator(&n.antipode()).unwrap(), 0);
        // Boundary belongs to the closed set and to the closed complement.
        let eq = SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(hemi.indicator(&eq).unwrap(), 1);
        assert_eq!(hemi.clone().complement().indicator(&eq).unwrap(), 1);
        let comp = SetSpec::cap(n.clone(), PI / 3.0).unwrap().complement();
        assert_eq!(comp.indicator(&n).unwrap(), 0);
        assert_eq!(comp.indicator(&n.antipode()).unwrap(), 1);
    }

    #[test]
    fn arcs_wrap_around() {
        let arc = SetSpec::Arcs { arcs: vec![[3.0, 3.5]] };
        assert_eq!(arc.indicator(&SpherePoint::from_angle(-3.0)).unwrap(), 1);
        assert_eq!(arc.indicator(&SpherePoint::from_angle(3.1)).unwrap(), 1);
        assert_eq!(arc.indicator(&SpherePoint::from_angle(0.0)).unwrap(), 0);
        let sym = SetSpec::symmetric_arc(0.5);
        assert_eq!(sym.indicator(&SpherePoint::from_angle(-0.5)).unwrap(), 1);
        assert_eq!(sym.indicator(&SpherePoint::from_angle(-0.51)).unwrap(), 0);
        assert_eq!(sym.clone().complement().indicator(&SpherePoint::from_angle(-0.5)).unwrap(), 1);
        assert_eq!(sym.complement().indicator(&SpherePoint::from_angle(0.2)).unwrap(), 0);
    }

    #[test]
    fn band_membership() {
        let band = SetSpec::Band { pole: SpherePoint::north(2), inner: 0.5, outer: 1.0 };
        assert_eq!(band.indicator(&SpherePoint::from_spherical(0.7, 0.3)).unwrap(), 1);
        assert_eq!(band.indicator(&SpherePoint::from_spherical(0.2, 0.3)).unwrap(), 0);
        assert_eq!(band.indicator(&SpherePoint::from_spherical(1.2, 0.3)).unwrap(), 0);
    }

    #[test]
    fn cap_net_family_scales() {
        let fam = SetFamily::CapNet { d: 2, cap_radius: 0.5, spacing: 2.0 };
        let SetSpec::CapUnion { caps } = fam.at_degree(16).unwrap() else { panic!() };
        assert_eq!(caps.len(), (4.0 * PI * 64.0f64).ceil() as usize);
        assert!((caps[0].radius - 0.5 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_moves_cap_centers() {
        let n = SpherePoint::north(2);
        let v = SpherePoint::from_spherical(1.0, 2.0);
        let r = Rotation::taking(&n, &v);
        let SetSpec::CapUnion { caps } = SetSpec::cap(n, 0.3).unwrap().rotated(&r).unwrap() else { panic!() };
        assert!((caps[0].center.vector() - v.vector()).norm() < 1e-12);
        assert_eq!(caps[0].radius, 0.3);
        let arc = SetSpec::symmetric_arc(0.4).rotated(&Rotation::planar(1.0)).unwrap();
        assert_eq!(arc.indicator(&SpherePoint::from_angle(1.35)).unwrap(), 1);
        assert_eq!(arc.indicator(&SpherePoint::from_angle(0.5)).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn cap_index_matches_brute_force(seed in any::<u64>(), count in 1usize..200, radius in 0.01f64..1.5) {
            let set = SetSpec::RandomCaps { d: 2, seed, count, radius }.materialize().unwrap();
            let SetSpec::CapUnion { caps } = &set else { unreachable!() };
            let region = set.compile().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
            for u in random_points(2, 200, &mut rng) {
                let brute = caps.iter().any(|c| c.contains(&u));
                prop_assert_eq!(region.contains(&u), brute);
            }
        }
    }
}
