//! Delay-stability intervals and delay margins for operator-valued retarded
//! delay systems
//!
//! ```text
//! G(s) = (P(s) I + Q(s) e^{-sh} A)^{-1},   deg P > deg Q
//! ```
//!
//! The operator `A` enters only through its spectrum (a matrix, a finite point
//! set, or a disk/circle/annulus region). For each spectral value `λ` the scalar
//! quasipolynomial `P(s) + λ Q(s) e^{-sh}` is swept in `h` with the
//! Walton–Marshall crossing analysis; the operator verdict is the worst case over
//! the spectrum. Verdicts can be cross-checked with an independent boundary
//! H∞-norm certificate.
//!
//! The [`zen`] module is a numerical harness for weighted Hardy/Bergman
//! ("Zen") spaces on the right half-plane: induced weights, the Laplace-transform
//! isometry, reproducing kernels and multiplier norms.

pub mod error;
pub mod linalg;
pub mod poly;
pub mod spectrum;
pub mod stability;
pub mod walton_marshall;
pub mod zen;

mod par;
mod serde_util;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use poly::{Polynomial, RootSet};
pub use spectrum::{ModulusRange, SpectrumDescriptor};
pub use stability::{DelaySystem, GridConfig, HinfCertificate, MarginConfig, StabilityReport};
pub use walton_marshall::{CrossingEvent, LambdaStabilityResult, Status, Window};

/// Default relative tolerance used throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-9;
