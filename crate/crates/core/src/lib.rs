//! Reduced-rank set-membership LCMV beamforming.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: small dense complex vectors/matrices and the rank-1
//!   inverse-correlation update shared by every RLS recursion.
//! - [`signal`]: uniform linear array steering vectors, BPSK sources and
//!   seeded snapshot streams.
//! - [`bound`]: the set-membership bound, either parameter dependent
//!   (time varying) or fixed.
//! - [`jio`]: the joint iterative projection/filter recursion with
//!   data-selective updates.
//! - [`baselines`]: MVDR oracle and full-rank constrained RLS variants.
//! - [`harness`]: Monte-Carlo experiments, output SINR and CSV artifacts.

pub mod baselines;
pub mod bound;
pub mod error;
pub mod harness;
pub mod jio;
pub mod linalg;
pub mod signal;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Numerical guards used throughout the recursions.
pub mod tol {
    /// Smallest denominator magnitude accepted in a gain or constraint normalisation.
    pub const SINGULAR: f64 = 1e-12;
    /// Post-update distortionless constraint tolerance.
    pub const CONSTRAINT: f64 = 1e-8;
    /// Hermitian symmetry tolerance for flagged matrices.
    pub const HERMITIAN: f64 = 1e-12;
}
