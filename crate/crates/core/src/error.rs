use thiserror::Error;

/// Errors raised by the simulator and its I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate sphere: v - u = {0} must be positive")]
    DegenerateSphere(f64),
    #[error("horizon-breach: r <= 0 at (u={u}, v={v})")]
    HorizonBreach { u: f64, v: f64 },
    #[error("blowup: field {field} exceeds ceiling at (u={u}, v={v})")]
    Blowup { u: f64, v: f64, field: &'static str },
    #[error("non-finite field {field} at (u={u}, v={v})")]
    NonFinite { u: f64, v: f64, field: &'static str },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sig(#[from] crate::sigcalc::SigError),
    #[error("image error: {0}")]
    Image(String),
}

pub type Result<T> = std::result::Result<T, Error>;
