use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HbError>;

#[derive(Debug, Error)]
pub enum HbError {
    #[error("denominator vanishes at z = {z} (|den(z)| = {modulus:e})")]
    PoleAt { z: Complex64, modulus: f64 },

    #[error("root finder did not converge after {iterations} iterations (max residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        partial: Vec<Complex64>,
    },

    #[error("root finding needs a polynomial of degree >= 1")]
    ConstantPolynomial,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("function is not in the closed unit ball of H^inf: sup |b| = {sup}")]
    NotInUnitBall { sup: f64 },

    #[error("b is an extreme point of the unit ball (1 - |b|^2 vanishes on the circle)")]
    Extreme,

    #[error("spectral factorization failed: {0}")]
    Factorization(String),

    #[error("1 - |b|^2 is negative on the circle (min {min:e})")]
    NegativeDensity { min: f64 },

    #[error("pole inside the open unit disk at {0}")]
    PoleInDisk(Complex64),

    #[error("singular back-substitution: a(0) = 0")]
    SingularSystem,

    #[error("derivative kernel order {order} too high at a boundary point (must be < {limit})")]
    OrderTooHigh { order: usize, limit: usize },

    #[error("forbidden phase: |e^(-it) b0(1) - 1| = {distance:e}")]
    ForbiddenPhase { distance: f64 },

    #[error("extension parameter omega must be nonzero")]
    DegenerateOmega,

    #[error("extension requires b0(0) = 0, got {0}")]
    NotNormalized(Complex64),

    #[error("model verification failed: expected strict order {expected}, found {found:?}")]
    VerificationFailure { expected: usize, found: Option<usize> },

    #[error("the zero function generates the zero subspace")]
    ZeroFunction,

    #[error("Gram block is rank deficient (pivot ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("ladder spaces need a single boundary zero, found {0}")]
    MultipleBoundaryZeros(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl HbError {
    /// Numerical failures map to exit code 3, validation failures to 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HbError::NoConvergence { .. }
                | HbError::Factorization(_)
                | HbError::SingularSystem
                | HbError::VerificationFailure { .. }
                | HbError::RankDeficient { .. }
        )
    }
}

impl From<serde_json::Error> for HbError {
    fn from(e: serde_json::Error) -> Self {
        HbError::Parse(e.to_string())
    }
}
