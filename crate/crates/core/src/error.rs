use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not diagonalizable within tolerance (cond(V) = {cond:.3e})")]
    NotDiagonalizable { cond: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("exponential sum would exceed the term budget ({budget} terms)")]
    TermBudgetExceeded { budget: usize },
    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("overflow: |F| = exp({log_magnitude:.6e})")]
    Overflow { log_magnitude: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("characteristic function vanishes identically: the spectrum is the whole plane")]
    SpectrumIsWholePlane,
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("zero of F on or too close to the contour after {attempts} attempts")]
    BoundaryZero { attempts: usize },
    #[error("{z} is not an eigenvalue (relative smallest singular value {sigma:.3e})")]
    NotAnEigenvalue { z: String, sigma: f64 },
    #[error("kernel at {z} has dimension > 1")]
    DegenerateKernel { z: String },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("non-generic zero pattern: {0}")]
    NonGenericPattern(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

impl Error {
    /// Numerical failures as opposed to bad input; the CLI maps these to
    /// exit code 2.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
                | Error::UnknownExample(_)
                | Error::DimensionTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
