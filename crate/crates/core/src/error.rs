//! Error type shared by all modules.

/// Errors produced by constructors and chart-level operations.
///
/// Numerical *diagnostics* (defect metrics, precondition reports) never use
/// this type; they are returned as values so that a failed tolerance can be
/// inspected rather than unwound.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different charts")]
    ChartMismatch,

    #[error("kernel is not Hermitian under nu-reflection: defect {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("non-finite sample encountered: {0}")]
    NonFinite(String),

    #[error("state has zero (or non-positive) norm under the chart quadrature")]
    ZeroNorm,

    #[error("energy {0} outside the open interval (0, e_max)")]
    EnergyOutOfRange(f64),

    #[error("point (E={0}, E'={1}) outside the energy square [0, e_max]^2")]
    OutsideEnergySquare(f64, f64),

    #[error("invalid age mode: {0}")]
    InvalidMode(String),

    #[error("invalid age profile: {0}")]
    InvalidProfile(String),

    #[error("invalid time list: {0}")]
    InvalidTimes(String),
}

pub type Result<T> = std::result::Result<T, Error>;
