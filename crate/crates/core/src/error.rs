use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-physical input: {0}")]
    NonPhysicalInput(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:.3e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid constellation order {0}")]
    InvalidOrder(usize),

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("target mean energy {target} unreachable: attainable range is [{min}, {max}] for nu >= 0")]
    Unreachable { target: f64, min: f64, max: f64 },

    #[error("truncation too severe: deficit {deficit:.3e} at dim {dim} exceeds {limit:.0e}; increase the Fock cutoff")]
    TruncationTooSevere { deficit: f64, dim: usize, limit: f64 },

    #[error("reference spectrum is degenerate at branch {0}; eigenprojector is not identifiable")]
    DegenerateSpectrum(usize),

    #[error("invalid security target: {0}")]
    InvalidTarget(String),

    #[error("insufficient test data: {0}")]
    InsufficientTestData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used to label CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPhysicalInput(_) => "NonPhysicalInput",
            Error::NotHermitian(_) => "NotHermitian",
            Error::NotPsd(_) => "NotPsd",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::InvalidConstellation(_) => "InvalidConstellation",
            Error::Unreachable { .. } => "Unreachable",
            Error::TruncationTooSevere { .. } => "TruncationTooSevere",
            Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
            Error::InvalidTarget(_) => "InvalidTarget",
            Error::InsufficientTestData(_) => "InsufficientTestData",
        }
    }
}
