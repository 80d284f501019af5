use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the simulator.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("propagated state underflowed to the zero vector")]
    ZeroNorm,
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),
    #[error("spectrum is degenerate (E_max - E_min = {spread:e})")]
    DegenerateSpectrum { spread: f64 },
    #[error("operation requires open boundary conditions")]
    BoundaryMismatch,
    #[error("no sign change of the breaking indicator in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGround { gap: f64 },
    #[error("invalid density operator: {0}")]
    InvalidState(String),
    #[error("no eigenvalue with positive imaginary part (unbroken regime)")]
    NoDominantMode,
    #[error("leading imaginary parts are degenerate (gap {gap:e})")]
    DegenerateTop { gap: f64 },
    #[error("trace has {len} points, at least {min} required")]
    TraceTooShort { len: usize, min: usize },
    #[error("asymptotic value is missing or non-finite")]
    MissingAsymptote,
    #[error("regime precondition violated: {0}")]
    RegimeViolation(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid time arguments: {0}")]
    InvalidTime(String),
    #[error("at gamma = {gamma}: {source}")]
    AtGamma { gamma: f64, source: Box<Error> },
}

impl Error {
    /// Variant name, used by the command-line front end when reporting domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Overflow => "Overflow",
            Error::ZeroNorm => "ZeroNorm",
            Error::InvalidParams(_) => "InvalidParams",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::BoundaryMismatch => "BoundaryMismatch",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::DegenerateGround { .. } => "DegenerateGround",
            Error::InvalidState(_) => "InvalidState",
            Error::NoDominantMode => "NoDominantMode",
            Error::DegenerateTop { .. } => "DegenerateTop",
            Error::TraceTooShort { .. } => "TraceTooShort",
            Error::MissingAsymptote => "MissingAsymptote",
            Error::RegimeViolation(_) => "RegimeViolation",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidTime(_) => "InvalidTime",
            Error::AtGamma { source, .. } => source.name(),
        }
    }
}
