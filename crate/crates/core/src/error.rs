use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("Hilbert space dimension {requested} exceeds the cap {cap}")]
    ResourceCap { requested: u128, cap: u128 },

    #[error(
        "truncation leakage {leakage:.3e} exceeds {threshold:.3e}; \
         mean photon number {mean_photons:.3}, suggested photon truncation {suggested_truncation}"
    )]
    Truncation {
        leakage: f64,
        threshold: f64,
        mean_photons: f64,
        suggested_truncation: usize,
    },

    #[error("Krylov propagation did not converge: residual estimate {residual:.3e}")]
    KrylovNonConvergence { residual: f64 },

    #[error("numerical instability at t = {time}: {detail}")]
    Instability { time: f64, detail: String },

    #[error("operator is not hermitian: max deviation {deviation:.3e}")]
    NonHermitian { deviation: f64 },

    #[error("field has a longitudinal component of size {residual:.3e}")]
    Longitudinal { residual: f64 },

    #[error("unknown photon mode {0}")]
    UnknownMode(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownMode(_)
            | Error::DimensionMismatch { .. }
            | Error::Json(_) => 2,
            Error::ResourceCap { .. } => 3,
            Error::Truncation { .. }
            | Error::KrylovNonConvergence { .. }
            | Error::Instability { .. }
            | Error::NonHermitian { .. }
            | Error::Longitudinal { .. } => 4,
            Error::Checkpoint(_) | Error::Io(_) | Error::Csv(_) => 4,
        }
    }

    /// Short machine readable tag written into summaries.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::ResourceCap { .. } => "resource_cap",
            Error::Truncation { .. } => "truncation_leakage",
            Error::KrylovNonConvergence { .. } => "krylov_nonconvergence",
            Error::Instability { .. } => "instability",
            Error::NonHermitian { .. } => "non_hermitian",
            Error::Longitudinal { .. } => "longitudinal_field",
            Error::UnknownMode(_) => "unknown_mode",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Checkpoint(_) => "checkpoint",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
