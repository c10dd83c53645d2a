use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {z} lies on the branch cut [0, inf); use the boundary values instead")]
    OnBranchCut { z: Complex64 },

    #[error("point {z} is not in the open lower half-plane")]
    NotLowerHalfPlane { z: Complex64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error:e})")]
    QuadratureFailed {
        estimate: Complex64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand is not finite at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("form factor is not square integrable on [0, inf): {0}")]
    NotIntegrable(String),

    #[error("tabulated form factors have no analytic continuation off the real axis")]
    NoContinuation,

    #[error("Newton iteration did not converge in {iterations} iterations (last z = {last}, |eta| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("converged to {z}, which is not a decaying second-sheet pole")]
    SpuriousPole { z: Complex64 },

    #[error("function nearly vanishes on the contour at {z} (|value| = {magnitude:e})")]
    BoundaryZero { z: Complex64, magnitude: f64 },

    #[error("negative duration {0}; decaying modes only evolve forward in time")]
    NegativeDuration(f64),

    #[error("label {alpha} is not real; time overlaps are only defined for real labels")]
    NonRealLabel { alpha: Complex64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trace is degenerate: no decay relative to its asymptote")]
    DegenerateTrace,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
