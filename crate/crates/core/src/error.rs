use thiserror::Error;

/// Errors raised by the transform, its oracles and the command line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("transform size {size} is not a power of two")]
    NotPowerOfTwo { size: usize },

    #[error("transform size {size} is smaller than the signal length {len}")]
    SizeTooSmall { size: usize, len: usize },

    #[error("aliasing leak {leak:.4} exceeds tolerance {tolerance} at subsampling factor {factor}")]
    Aliasing { leak: f64, tolerance: f64, factor: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frame condition violated: A(omega) drops to {value:.3e} at {omega:.3} rad/s")]
    FrameCondition { omega: f64, value: f64 },

    #[error("singular frame: A(omega) = 0 at {omega:.3} rad/s")]
    SingularFrame { omega: f64 },

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("residual energy was not tracked for this transform")]
    MissingResidual,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("model precondition violated: {0}")]
    Precondition(String),

    #[error("log-frequency grid is irregular: {0}")]
    IrregularGrid(String),

    #[error(
        "timing spread {spread:.2} exceeds {threshold:.2}; rerun on an idle machine or raise the repetition count"
    )]
    TimingVariance { spread: f64, threshold: f64 },

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("feature file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
