//! Weighted measures `ω dσ` on `S^d`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{geodesic_distance, Rotation, SpherePoint};

/// Surface measure or a weighted measure `ω dσ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Lebesgue,
    /// `ω(u) = (d(u, pole) / π)^exponent`; integrable for `exponent > -d`.
    PowerDistance { pole: SpherePoint, exponent: f64 },
    /// `ω = inside` on `{inner <= d(u, pole) <= outer}`, `outside` elsewhere.
    BandWeight { pole: SpherePoint, inner: f64, outer: f64, inside: f64, outside: f64 },
    Product { factors: Vec<MeasureSpec> },
}

impl MeasureSpec {
    pub fn is_lebesgue(&self) -> bool {
        match self {
            MeasureSpec::Lebesgue => true,
            MeasureSpec::Product { factors } => factors.iter().all(MeasureSpec::is_lebesgue),
            _ => false,
        }
    }

    /// Checks integrability and sign constraints on `S^d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            MeasureSpec::Lebesgue => Ok(()),
            MeasureSpec::PowerDistance { pole, exponent } => {
                if pole.dim() != d {
                    return Err(Error::Domain(format!("weight pole lives on S^{}, not S^{d}", pole.dim())));
                }
                if !(*exponent > -(d as f64)) {
                    return Err(Error::Domain(format!(
                        "power weight exponent {exponent} is not integrable on S^{d} (need > -{d})"
                    )));
                }
                Ok(())
            }
            MeasureSpec::BandWeight { pole, inner, outer, inside, outside } => {
                if pole.dim() != d {
                    return Err(Error::Domain(format!("weight pole lives on S^{}, not S^{d}", pole.dim())));
                }
                if !(*inside >= 0.0 && *outside >= 0.0) || !(0.0 <= *inner && inner <= outer && *outer <= PI) {
                    return Err(Error::Domain("band weight needs nonnegative values and 0 <= inner <= outer <= π".into()));
                }
                Ok(())
            }
            MeasureSpec::Product { factors } => factors.iter().try_for_each(|f| f.validate(d)),
        }
    }

    /// Density `ω(u)` with respect to `σ`.
    pub fn weight(&self, u: &SpherePoint) -> f64 {
        match self {
            MeasureSpec::Lebesgue => 1.0,
            MeasureSpec::PowerDistance { pole, exponent } => (geodesic_distance(u, pole) / PI).powf(*exponent),
            MeasureSpec::BandWeight { pole, inner, outer, inside, outside } => {
                let t = geodesic_distance(u, pole);
                if t >= *inner && t <= *outer {
                    *inside
                } else {
                    *outside
                }
            }
            MeasureSpec::Product { factors } => factors.iter().map(|f| f.weight(u)).product(),
        }
    }

    /// Image measure under `rotation`: `ω'(R u) = ω(u)`.
    pub fn rotated(&self, rotation: &Rotation) -> Self {
        match self {
            MeasureSpec::Lebesgue => MeasureSpec::Lebesgue,
            MeasureSpec::PowerDistance { pole, exponent } => {
                MeasureSpec::PowerDistance { pole: rotation.apply(pole), exponent: *exponent }
            }
            MeasureSpec::BandWeight { pole, inner, outer, inside, outside } => MeasureSpec::BandWeight {
                pole: rotation.apply(pole),
                inner: *inner,
                outer: *outer,
                inside: *inside,
                outside: *outside,
            },
            MeasureSpec::Product { factors } => {
                MeasureSpec::Product { factors: factors.iter().map(|f| f.rotated(rotation)).collect() }
            }
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            MeasureSpec::Lebesgue => "lebesgue".into(),
            MeasureSpec::PowerDistance { exponent, .. } => format!("power_distance(a={exponent})"),
            MeasureSpec::BandWeight { inside, outside, .. } => format!("band_weight({inside}/{outside})"),
            MeasureSpec::Product { factors } => {
                factors.iter().map(MeasureSpec::label).collect::<Vec<_>>().join("*")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights() {
        let n = SpherePoint::north(2);
        let w = MeasureSpec::PowerDistance { pole: n.clone(), exponent: 2.0 };
        assert_eq!(w.weight(&n), 0.0);
        assert_relative_eq!(w.weight(&n.antipode()), 1.0);
        assert_relative_eq!(w.weight(&SpherePoint::from_spherical(PI / 2.0, 0.0)), 0.25, max_relative = 1e-14);
        let b = MeasureSpec::BandWeight { pole: n.clone(), inner: 0.0, outer: 1.0, inside: 3.0, outside: 0.5 };
        let p = MeasureSpec::Product { factors: vec![w.clone(), b] };
        assert_relative_eq!(p.weight(&SpherePoint::from_spherical(PI / 2.0, 0.0)), 0.125, max_relative = 1e-14);
        assert!(MeasureSpec::Product { factors: vec![MeasureSpec::Lebesgue] }.is_lebesgue());
        assert!(!w.is_lebesgue());
    }

    #[test]
    fn validation() {
        let n = SpherePoint::north(2);
        assert!(MeasureSpec::PowerDistance { pole: n.clone(), exponent: -1.5 }.validate(2).is_ok());
        assert!(MeasureSpec::PowerDistance { pole: n.clone(), exponent: -2.0 }.validate(2).is_err());
        assert!(MeasureSpec::PowerDistance { pole: n, exponent: 1.0 }.validate(1).is_err());
    }

    #[test]
    fn rotation_equivariance() {
        let n = SpherePoint::north(2);
        let w = MeasureSpec::PowerDistance { pole: n, exponent: 1.3 };
        let r = Rotation::taking(&SpherePoint::north(2), &SpherePoint::from_spherical(0.9, 0.4));
        let u = SpherePoint::from_spherical(2.0, 1.0);
        assert_relative_eq!(w.rotated(&r).weight(&r.apply(&u)), w.weight(&u), max_relative = 1e-10);
    }
}
