use thiserror::Error;

/// Every failure the library can report. Variants map one-to-one onto the
/// error conditions of the individual operations so that the CLI can emit a
/// machine-readable record with a stable `kind`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("negative power of the zero mode: |coeff(0)| = {0:e}")]
    NegativePowerOfZeroMode(f64),
    #[error("unsupported integrability exponent p = {0}; expected one of 1, 2, 4, inf")]
    UnsupportedP(f64),
    #[error("Chemin-Lerner norm needs at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("radial quadrature did not converge (relative change {0:e})")]
    QuadratureNotConverged(f64),
    #[error("gas density too close to vacuum: min(1 + a) = {0}")]
    VacuumGas(f64),
    #[error("mixture density degenerate: min = {0}")]
    DegenerateMixture(f64),
    #[error("asymptotic profile tail not converged: ||div(rho u)|| = {0:e} at final time")]
    TailNotConverged(f64),
    #[error("step rejected: {0}")]
    StepRejected(String),
    #[error("solution diverged at t = {time}: max |field| = {value:e}")]
    Diverged { time: f64, value: f64 },
    #[error("fit window too short: {0} samples")]
    WindowTooShort(usize),
    #[error("rate fit needs positive data: {0}")]
    NonPositiveData(String),
    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("format version mismatch: expected {expected}, found {found}")]
    FormatVersionMismatch { expected: String, found: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidParams(_) => "InvalidParams",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NegativePowerOfZeroMode(_) => "NegativePowerOfZeroMode",
            Error::UnsupportedP(_) => "UnsupportedP",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::QuadratureNotConverged(_) => "QuadratureNotConverged",
            Error::VacuumGas(_) => "VacuumGas",
            Error::DegenerateMixture(_) => "DegenerateMixture",
            Error::TailNotConverged(_) => "TailNotConverged",
            Error::StepRejected(_) => "StepRejected",
            Error::Diverged { .. } => "Diverged",
            Error::WindowTooShort(_) => "WindowTooShort",
            Error::NonPositiveData(_) => "NonPositiveData",
            Error::TooFewPoints(_) => "TooFewPoints",
            Error::FormatVersionMismatch { .. } => "FormatVersionMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
