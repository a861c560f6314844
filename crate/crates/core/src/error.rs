use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported sphere dimension d = {0} (only d = 1 and d = 2 are implemented)")]
    UnsupportedDimension(usize),

    #[error("angle {theta} outside the asymptotic window [{lo}, {hi}]")]
    Window { theta: f64, lo: f64, hi: f64 },

    #[error("resource guard: {0}")]
    Resource(String),

    #[error("matrix is not orthogonal (max |R^T R - I| = {0:e})")]
    NonOrthogonal(f64),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("full-sphere Gram matrix is not positive definite")]
    SingularGram,

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("zero polynomial has no norm ratio")]
    ZeroPolynomial,

    #[error("no evaluation node lies in the set")]
    EmptyIntersection,

    #[error("denominator vanishes: f is zero on E and has no tail")]
    ZeroDenominator,

    #[error("net construction failed: {0}")]
    NetConstruction(String),
}

impl Error {
    /// True for errors raised by size guards (node counts, matrix sizes).
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
