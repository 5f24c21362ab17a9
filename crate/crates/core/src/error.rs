use thiserror::Error;

/// Coarse classification of failures, used by the CLI and the C ABI to pick exit / status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input violates a mathematical precondition (not a self-map, point outside the ball, ...).
    Domain,
    /// A computation broke down numerically (overflow, singular system, eigensolver failure).
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space parameters: {0}")]
    InvalidParams(String),
    #[error("series parameters do not match")]
    ParamsMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel exponents differ: {0} vs {1}")]
    GammaMismatch(f64, f64),
    #[error("value out of floating-point range: {0}")]
    Range(String),
    #[error("constant term {0:e} is below the nonvanishing tolerance")]
    VanishingConstantTerm(f64),
    #[error("real power of a series with constant term {0} is ambiguous (non-integer exponent)")]
    BranchAmbiguity(String),
    #[error("point has norm {0} but must lie in the open unit ball")]
    NotInBall(f64),
    #[error("denominator may vanish on the closed ball")]
    DenominatorVanishes,
    #[error("map is not a self-map of the ball (sup |phi| = {0})")]
    NotSelfMap(f64),
    #[error("map is not an automorphism of the ball")]
    NotAutomorphism,
    #[error("|lambda| = {0} but a unimodular constant is required")]
    NotUnimodular(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not normal (commutator {0:e})")]
    NotNormal(f64),
    #[error("matrix is not a contraction (norm {0})")]
    NotContraction(f64),
    #[error("constant must be real (imaginary part {0:e})")]
    NotReal(f64),
    #[error("constant must be nonzero")]
    ZeroConstant,
    #[error("weight is not of the form alpha * K_c required here: {0}")]
    WeightNotKernelForm(String),
    #[error("parabolic parameter must have nonnegative real part (got {0})")]
    NegativeParabolic(f64),
    #[error("operation requires dimension n = 1")]
    RequiresOneDimension,
    #[error("symbol does not have the required structure: {0}")]
    Unclassified(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Range(_) | Error::VanishingConstantTerm(_) | Error::LinearAlgebra(_) => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
