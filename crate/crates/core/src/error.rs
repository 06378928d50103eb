use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("polynomial coefficients are not real to within tolerance")]
    NotReal,

    #[error("system is not retarded: deg P = {deg_p}, deg Q = {deg_q} (need deg P > deg Q)")]
    RetardedAssumptionViolated { deg_p: usize, deg_q: usize },

    #[error("crossing polynomial vanishes identically (continuum of crossings)")]
    IdenticallyZero,

    #[error("degenerate crossing: {0}")]
    DegenerateCrossing(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid spectrum descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("hole structure of descriptor cannot be derived: {0}")]
    UnsupportedDescriptor(String),

    #[error("operator is numerically singular on the boundary grid at omega = {omega}")]
    SingularOnGrid { omega: f64 },

    #[error("measure does not look doubling (ratio {ratio:e} exceeds cap)")]
    NotDoubling { ratio: f64 },

    #[error("weight integral diverges")]
    DivergentWeight,

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("reproducing kernel at z is not certified to lie in the space")]
    KernelNotInSpace,

    #[error("symbol is unbounded on the closed right half-plane: {0}")]
    UnboundedSymbol(String),

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
