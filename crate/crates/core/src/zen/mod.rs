//! Weighted spaces of analytic functions on the right half-plane.
//!
//! A measure `ν` on `[0, ∞)` induces the weight `w(t) = 2π ∫ e^{-2rt} dν(r)`;
//! the Laplace transform maps `L²(0, ∞; w)` isometrically onto the space with
//! norm `∫∫ ‖F(x + iy)‖² dν(x) dy`. `ν = δ₀` gives the Hardy space and Lebesgue
//! measure the Bergman space. Everything here is a numerical check of those
//! identities on closed-form test functions.

mod measure;
mod multiplier;
mod norms;
mod quad;
mod signal;

pub use measure::{
    doubling_constant, log_grid, weight_from_measure, DensityPiece, LebesgueTail,
    MeasureDescriptor, Weight, WeightKind, DOUBLING_CAP,
};
pub use multiplier::{
    adjoint_samples, norm_attainment, sup_norm, verify_multiplier, MultiplierCheck,
};
pub use norms::{
    frequency_norm, inner_product, kernel, kernel_pairing, time_norm, verify_isometry,
    IsometryCheck, Kernel, KernelTransform,
};
pub use quad::{integrate, integrate_real_line, integrate_to_infinity, Integrand, QuadConfig};
pub use signal::{
    Product, RationalFunction, RationalMatrix, SignalTerm, SignalTransform, TestSignal, Transform,
};
