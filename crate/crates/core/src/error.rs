use thiserror::Error;

#[derive(Debug, Error)]
pub enum OtocError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel is not unital in the Heisenberg picture (defect ||E(I) - I||_2 = {defect:.3e})")]
    NotUnital { defect: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("matrix is not unitary (defect ||U^dag U - I||_2 = {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("basis is not orthonormal (Gram defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("phase profile is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("integrator failed to converge at t = {t}: {reason}")]
    NonConvergence { t: f64, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, OtocError>;
