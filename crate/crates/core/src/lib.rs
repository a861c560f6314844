//! Numerical laboratory for norm equivalence of spherical polynomials on
//! subsets of `S^1` and `S^2`.
//!
//! The crate computes best `L^2` comparison constants between the full sphere
//! and a set `E_L` (as generalized eigenvalues of Gram matrices), the geometric
//! functionals that characterize when those constants stay bounded in `L`
//! (relative density and harmonic measure), and diagnostics for weighted
//! measures (doubling, `A_∞`, `RH_∞`).

pub mod basis;
pub mod concentration;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod measures;
pub mod quadrature;
pub mod sets;
pub mod special;
pub mod weights;
pub mod zonal;

pub use error::{Error, Result};
