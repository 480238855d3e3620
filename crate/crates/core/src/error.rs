//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("mesh too coarse for gap: gap {gap:.4} < 2h = {:.4}", 2.0 * h)]
    MeshTooCoarse { gap: f64, h: f64 },

    #[error("integration failed: step size underflow at r = {r:.6e}")]
    StepUnderflow { r: f64 },

    #[error("eigenvalue bracketing failed: {reason} (last bracket [{lo:.6e}, {hi:.6e}])")]
    Bracket { reason: String, lo: f64, hi: f64 },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("computed first eigenfunction changes sign ({negative} negative of {interior} interior vertices); this indicates a solver defect")]
    SignChanging { negative: usize, interior: usize },

    #[error("postcondition violated: {0}")]
    Postcondition(String),

    #[error("reflection construction failed: {0}")]
    Reflection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
