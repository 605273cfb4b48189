//! Numerical calculus of generalized densities on Minkowski space.
//!
//! Every distribution in this crate — mass-shell Leray densities, principal
//! values, Fourier transforms, the Klein–Gordon/Weyl/Dirac propagator family —
//! is realized as a *pairing functional* against a concrete, analytically
//! closed family of test functions ([`testfns::TestFn`]): complex polynomials
//! times anisotropic Gaussians times plane-wave phases.
//!
//! Conventions (fixed, not configurable):
//! - metric signature `(+,−,−,−)`, natural units `c = ħ = 1`;
//! - Fourier kernel `F^±u(y) = (2π)^{−d/2} ∫ u(x) e^{∓i⟨y,x⟩} dx` with the plain
//!   dual pairing `⟨y,x⟩ = Σ y_λ x^λ`;
//! - distributional transforms by adjointness, `⟨F^±θ, u⟩ = ⟨θ, F^±u⟩`.
//!
//! The [`fock`] module provides a graded emission/absorption algebra on a
//! finite momentum lattice whose field commutators reproduce the propagators.

// `!(x > 0.0)`-style guards deliberately reject NaN; index loops mirror the
// tensor notation of the matrix and quadrature kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod densities_1d;
pub mod dirac;
pub mod fock;
pub mod fourier;
mod kernels;
pub mod kinematics;
pub mod mass_shell;
pub mod parallel;
pub mod propagators;
pub mod quadrature;
pub mod report;
mod shell;
pub mod testfns;

pub use kinematics::{energy_on_shell, minkowski_square, FourVector, Mass, Metric};
pub use quadrature::{PairingResult, QuadConfig};
pub use testfns::{Sign, TestFn};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument is outside the supported domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A test function of the wrong dimension was supplied.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// An adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    /// A limit extrapolation diverged (signals a non-integrable input).
    #[error("extrapolation diverged: {0}")]
    Extrapolation(String),
    /// The requested combination is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An operator-algebra invariant was violated.
    #[error("operator algebra: {0}")]
    Algebra(String),
    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, Error>;
