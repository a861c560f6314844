//! Experiment configuration files (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sphere_ls::measures::MeasureSpec;
use sphere_ls::sets::SetFamily;

use crate::error::{LabError, LabResult};

/// One experiment: a set family and measure swept over degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Sphere dimension `d` (1 or 2).
    pub d: usize,
    /// Degrees `L` to sweep.
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Multiplier on the node counts of every quadrature rule.
    #[serde(default = "one")]
    pub oversample: usize,
    /// Fill the `wall_time` column (off by default, so outputs are reproducible).
    #[serde(default)]
    pub record_timing: bool,
    /// Largest `dim Π_L` for dense linear algebra.
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    pub family: SetFamily,
    #[serde(default = "lebesgue")]
    pub measure: MeasureSpec,
    pub functionals: Functionals,
}

/// Functionals to evaluate at every degree; absent tables are skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Functionals {
    pub eigen: Option<EigenOptions>,
    pub harmonic: Option<HarmonicOptions>,
    pub density: Option<DensityOptions>,
    pub pnorm: Option<PnormOptions>,
    pub supnorm: Option<SupnormOptions>,
    pub weights: Option<WeightOptions>,
    pub regularize: Option<RegularizeOptions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenRoute {
    /// Extended precision for axisymmetric sets under `σ` on `S^2`, Gram otherwise.
    #[default]
    Auto,
    Gram,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenOptions {
    #[serde(default)]
    pub route: EigenRoute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicOptions {
    #[serde(default = "four")]
    pub centers_per_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityOptions {
    pub r: f64,
    #[serde(default = "six")]
    pub centers_per_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnormOptions {
    pub p: f64,
    #[serde(default = "four")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupnormOptions {
    /// Random polynomials per degree.
    #[serde(default = "fifty")]
    pub samples: usize,
    /// Grid points per great circle, as a multiple of `L`.
    #[serde(default = "six")]
    pub grid_per_degree: usize,
    /// Multiply by the measure's density `ω`.
    #[serde(default)]
    pub weighted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOptions {
    /// Random ball centers (the weight's pole is always added).
    #[serde(default = "default_centers")]
    pub centers: usize,
    /// Ball radii as multiples of `1/L`.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "half")]
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizeOptions {
    pub eps: f64,
    pub delta: f64,
    /// The output is scored by its relative density at scale `r/2`.
    pub r: f64,
}

fn one() -> usize {
    1
}
fn four() -> usize {
    4
}
fn six() -> usize {
    6
}
fn fifty() -> usize {
    50
}
fn half() -> f64 {
    0.5
}
fn default_iterations() -> usize {
    400
}
fn default_centers() -> usize {
    32
}
fn default_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}
fn default_max_dim() -> usize {
    1089
}
fn lebesgue() -> MeasureSpec {
    MeasureSpec::Lebesgue
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let config: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn validate(&self) -> LabResult<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if !(self.d == 1 || self.d == 2) {
            return bad(format!("field `d`: expected 1 or 2, got {}", self.d));
        }
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return bad("field `degrees`: expected a non-empty list of positive degrees".into());
        }
        if self.oversample == 0 {
            return bad("field `oversample`: must be at least 1".into());
        }
        if let Err(e) = self.measure.validate(self.d) {
            return bad(format!("field `measure`: {e}"));
        }
        let f = &self.functionals;
        if let Some(o) = &f.density {
            if !(o.r > 0.0) {
                return bad("field `functionals.density.r`: must be positive".into());
            }
        }
        if let Some(o) = &f.pnorm {
            if !(o.p >= 1.0 && o.p.is_finite()) {
                return bad("field `functionals.pnorm.p`: must lie in [1, ∞)".into());
            }
        }
        if let Some(o) = &f.regularize {
            if !(o.eps > 0.0 && o.delta > 0.0 && o.delta <= 1.0 && o.r > 0.0) {
                return bad("field `functionals.regularize`: need eps > 0, 0 < delta <= 1, r > 0".into());
            }
        }
        if let Some(o) = &f.weights {
            if o.radii.is_empty() || o.radii.iter().any(|r| !(*r > 0.0)) {
                return bad("field `functionals.weights.radii`: need positive multiples of 1/L".into());
            }
        }
        if f == &Functionals::default() {
            return bad("table `functionals`: nothing to compute".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
name = "cap"
d = 2
degrees = [4, 8]

[family]
kind = "fixed"
[family.set]
kind = "cap_union"
caps = [{ center = [0.0, 0.0, 1.0], radius = 1.0 }]

[functionals.eigen]
[functionals.density]
r = 4.0
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::parse(TEXT).unwrap();
        assert_eq!(c.oversample, 1);
        assert_eq!(c.measure, MeasureSpec::Lebesgue);
        assert_eq!(c.functionals.density.as_ref().unwrap().centers_per_degree, 6);
        assert_eq!(c.functionals.eigen, Some(EigenOptions::default()));
        assert!(c.functionals.harmonic.is_none());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let c = ExperimentConfig::parse(TEXT).unwrap();
        let once = c.to_toml();
        let twice = ExperimentConfig::parse(&once).unwrap().to_toml();
        assert_eq!(once, twice);
        assert_eq!(c.hash(), ExperimentConfig::parse(&once).unwrap().hash());
    }

    #[test]
    fn errors_name_the_field() {
        let e = ExperimentConfig::parse(&TEXT.replace("d = 2", "d = 3")).unwrap_err();
        assert!(e.to_string().contains("`d`"), "{e}");
        let e = ExperimentConfig::parse(&TEXT.replace("r = 4.0", "r = -1.0")).unwrap_err();
        assert!(e.to_string().contains("density.r"), "{e}");
        let e = ExperimentConfig::parse(&TEXT.replace("degrees", "degres")).unwrap_err();
        assert!(e.to_string().contains("degres"), "{e}");
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::parse(TEXT).unwrap();
        let b = ExperimentConfig::parse(&TEXT.replace("[4, 8]", "[4, 8, 16]")).unwrap();
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }
}
