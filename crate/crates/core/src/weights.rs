//! Sampled diagnostics for weighted measures: doubling constant and exponent,
//! `A_∞` and `RH_∞` constants.
//!
//! Each check is a lower bound for the true constant (a supremum over all
//! balls and subsets); reports record the sample that attains it.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{LocalResolution, LocalRule};
use crate::geometry::{cap_measure, geodesic_distance, Rotation, SpherePoint};
use crate::measures::MeasureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport {
    /// `max μ(B(u, 2δ)) / μ(B(u, δ))` over the samples; at least 1.
    pub constant: f64,
    /// Exponent with `(r/r')^{1/γ} <= μ(B(u,r))/μ(B(u,r')) <= (r/r')^γ` on all
    /// sampled pairs `r > r'`.
    pub gamma: f64,
    pub witness_center: SpherePoint,
    pub witness_scale: f64,
    pub samples: usize,
}

/// Doubling constant and two-sided growth exponent over `centers × scales`.
pub fn doubling_constant(
    mu: &MeasureSpec,
    scales: &[f64],
    centers: &[SpherePoint],
    local: LocalResolution,
) -> Result<DoublingReport> {
    let Some(first) = centers.first() else {
        return Err(Error::Domain("doubling check needs at least one center".into()));
    };
    let d = first.dim();
    if scales.is_empty() || scales.iter().any(|&s| !(s > 0.0 && s <= PI / 2.0)) {
        return Err(Error::Domain("doubling scales must lie in (0, π/2]".into()));
    }
    let mut sorted = scales.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    // Ball masses at δ and 2δ for every scale.
    let mut radii: Vec<f64> = sorted.iter().flat_map(|&s| [s, 2.0 * s]).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let rules = radii.iter().map(|&r| LocalRule::new(d, r, local)).collect::<Result<Vec<_>>>()?;
    let mass_at = |c: &SpherePoint, r: f64| -> Result<f64> {
        let k = radii.iter().position(|&x| x == r).expect("radius registered");
        let m = rules[k].mass(c, mu);
        if m > 0.0 {
            Ok(m)
        } else {
            Err(Error::DegenerateMeasure(format!("μ(B(u, {r})) = 0 at u = {:?}", c.coords())))
        }
    };

    let mut constant = 1.0f64;
    let mut witness = (first.clone(), sorted[0]);
    let (mut q_min, mut q_max) = (f64::INFINITY, 0.0f64);
    let mut samples = 0;
    for c in centers {
        let masses = radii.iter().map(|&r| mass_at(c, r)).collect::<Result<Vec<_>>>()?;
        for &s in &sorted {
            let ratio = mass_at(c, 2.0 * s)? / mass_at(c, s)?;
            samples += 1;
            if ratio > constant {
                constant = ratio;
                witness = (c.clone(), s);
            }
        }
        for i in 0..radii.len() {
            for j in 0..i {
                let q = (masses[i] / masses[j]).ln() / (radii[i] / radii[j]).ln();
                q_min = q_min.min(q);
                q_max = q_max.max(q);
            }
        }
    }
    let gamma = if q_min > 0.0 { q_max.max(1.0 / q_min) } else { f64::INFINITY };
    Ok(DoublingReport { constant, gamma, witness_center: witness.0, witness_scale: witness.1, samples })
}

/// Balls and subsets sampled by the `A_∞` and `RH_∞` checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSamples {
    pub centers: Vec<SpherePoint>,
    pub radii: Vec<f64>,
    /// Random sub-caps drawn per ball and per sub-radius (`δ/2`, `δ/4`).
    pub subcaps_per_ball: usize,
    pub seed: u64,
    pub local: LocalResolution,
}

impl WeightSamples {
    /// Random centers plus the given extra centers (e.g. a weight's pole).
    pub fn random(d: usize, count: usize, radii: Vec<f64>, extra: Vec<SpherePoint>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut centers = extra;
        centers.extend((0..count).map(|_| SpherePoint::random(d, &mut rng)));
        Self { centers, radii, subcaps_per_ball: 4, seed, local: LocalResolution { radial: 16, azimuthal: 48 } }
    }
}

/// Description of the sample attaining a reported constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightWitness {
    pub center: SpherePoint,
    pub radius: f64,
    pub subset: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AinftyReport {
    pub beta: f64,
    /// Smallest `B` with `ω(B) <= B (σ(B)/σ(E))^β ω(E)` on every sample.
    pub b_constant: f64,
    pub passed: bool,
    pub witness: Option<WeightWitness>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhinftyReport {
    /// Smallest `C` with `sup_B ω <= C · avg_B ω` on every sampled ball.
    pub c_constant: f64,
    pub passed: bool,
    pub witness: Option<WeightWitness>,
    pub samples: usize,
}

/// Constants above this bound are reported as failures.
pub const WEIGHT_CONSTANT_BOUND: f64 = 1e6;

/// `A_∞` check with fixed exponent `β` over sub-caps of radius `δ/2`, `δ/4`
/// and the annular differences `B \ sub-cap`.
pub fn ainfty_check(w: &MeasureSpec, beta: f64, samples: &WeightSamples) -> Result<AinftyReport> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("A∞ exponent must be positive, got {beta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(samples.seed);
    let mut b_constant = 0.0f64;
    let mut witness = None;
    let mut passed = true;
    let mut count = 0;
    for c in &samples.centers {
        let d = c.dim();
        for &delta in &samples.radii {
            let ball = LocalRule::new(d, delta, samples.local)?;
            let w_ball = ball.mass(c, w);
            let s_ball = cap_measure(d, delta)?;
            for fraction in [0.5, 0.25] {
                let sub_r = delta * fraction;
                let sub = LocalRule::new(d, sub_r, samples.local)?;
                let s_sub = cap_measure(d, sub_r)?;
                for _ in 0..samples.subcaps_per_ball {
                    let sub_center = point_within(c, delta - sub_r, &mut rng);
                    let w_sub = sub.mass(&sub_center, w);
                    let candidates = [
                        (s_sub, w_sub, format!("sub-cap radius {sub_r:.4}")),
                        (s_ball - s_sub, (w_ball - w_sub).max(0.0), format!("ball minus sub-cap radius {sub_r:.4}")),
                    ];
                    for (s_e, w_e, label) in candidates {
                        count += 1;
                        let ratio = if w_e > 0.0 {
                            w_ball / ((s_ball / s_e).powf(beta) * w_e)
                        } else if w_ball > 0.0 {
                            f64::INFINITY
                        } else {
                            0.0
                        };
                        if ratio > b_constant {
                            b_constant = ratio;
                            witness = Some(WeightWitness { center: c.clone(), radius: delta, subset: label });
                        }
                        if !ratio.is_finite() {
                            passed = false;
                        }
                    }
                }
            }
        }
    }
    passed &= b_constant <= WEIGHT_CONSTANT_BOUND;
    Ok(AinftyReport { beta, b_constant, passed, witness, samples: count })
}

/// `RH_∞` check: `sup_B ω / avg_B ω` over the sampled balls, with the supremum
/// taken over the ball's quadrature nodes and center.
pub fn rhinfty_check(w: &MeasureSpec, samples: &WeightSamples) -> Result<RhinftyReport> {
    let mut c_constant = 0.0f64;
    let mut witness = None;
    let mut count = 0;
    for c in &samples.centers {
        for &delta in &samples.radii {
            let ball = LocalRule::new(c.dim(), delta, samples.local)?;
            let mut weighted = 0.0;
            let mut area = 0.0;
            let mut sup = w.weight(c);
            ball.for_each_at(c, |u, wt| {
                let x = w.weight(u);
                weighted += wt * x;
                area += wt;
                sup = sup.max(x);
            });
            count += 1;
            let avg = weighted / area;
            let ratio = if avg > 0.0 { sup / avg } else if sup > 0.0 { f64::INFINITY } else { 1.0 };
            if ratio > c_constant {
                c_constant = ratio;
                witness = Some(WeightWitness { center: c.clone(), radius: delta, subset: "ball".into() });
            }
        }
    }
    let passed = c_constant.is_finite() && c_constant <= WEIGHT_CONSTANT_BOUND;
    Ok(RhinftyReport { c_constant, passed, witness, samples: count })
}

/// Area-uniform random point of the closed ball `B(center, radius)`.
fn point_within<R: Rng + ?Sized>(center: &SpherePoint, radius: f64, rng: &mut R) -> SpherePoint {
    let d = center.dim();
    if radius <= 0.0 {
        return center.clone();
    }
    if d == 1 {
        let t = (2.0 * rng.random::<f64>() - 1.0) * radius;
        return SpherePoint::from_angle(center.angle() + t);
    }
    let z_min = radius.cos();
    let z = z_min + (1.0 - z_min) * rng.random::<f64>();
    let phi = 2.0 * PI * rng.random::<f64>();
    let local = SpherePoint::from_spherical(z.clamp(-1.0, 1.0).acos(), phi);
    let p = Rotation::taking(&SpherePoint::north(2), center).apply(&local);
    debug_assert!(geodesic_distance(&p, center) <= radius + 1e-9);
    p
}
