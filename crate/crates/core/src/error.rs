use std::fmt;

use serde::{Deserialize, Serialize};

pub type Result<T> = std::result::Result<T, Error>;

/// The singular locus responsible for a divergent integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    /// Two factors of an affine factorization whose zero loci meet where the
    /// test function is bounded away from zero (0-based indices).
    Factors { first: usize, second: usize },
    /// The hyperplane `u_first = u_second` of the A-family.
    ARoots { first: usize, second: usize },
    /// The hyperplane `v_first = v_second` of the B-family.
    BRoots { first: usize, second: usize },
    /// Detected numerically: the integral kept growing as the exclusion
    /// window around the singular set shrank.
    Trend,
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Singularity::Factors { first, second } => {
                write!(f, "pair {},{}", first + 1, second + 1)
            }
            Singularity::ARoots { first, second } => {
                write!(f, "u{} = u{}", first + 1, second + 1)
            }
            Singularity::BRoots { first, second } => {
                write!(f, "v{} = v{}", first + 1, second + 1)
            }
            Singularity::Trend => f.write_str("non-converging exclusion trend"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("roots {first} and {second} coincide within tolerance")]
    RepeatedRoot { first: usize, second: usize },
    #[error("expected a polynomial of degree {expected}, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("numerator is not exactly divisible by (v{} - v{})", .first + 1, .second + 1)]
    DivisibilityFailure { first: usize, second: usize },
    #[error("factors {} and {} are proportional", .first + 1, .second + 1)]
    ProportionalFactors { first: usize, second: usize },
    #[error("factor {} has a zero gradient", .0 + 1)]
    ZeroGradient(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integral diverges ({0})")]
    Divergent(Singularity),
    #[error("point is not on the support hyperplane u{} = v{}", .alpha + 1, .beta + 1)]
    OffSupport { alpha: usize, beta: usize },
    #[error("degree-2 certificate failed: residual {residual:e}")]
    DegreeCertificateFailure { residual: f64 },
    #[error("resultant has a tangential zero at phi = {phi}, psi = {psi}")]
    DivergentPoint { phi: f64, psi: f64 },
    #[error("method not supported for this input: {0}")]
    Unsupported(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
