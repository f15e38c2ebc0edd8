use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Overlap is only defined when the ground truth has at least one 1-bit.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// `p_S = 0`, so every read is a zero and the rate constant is infinite.
    #[error("degenerate channel: effective positive-read probability is zero")]
    DegenerateChannel,

    /// The threshold interpolation needs `m > ln(1/p) / L`.
    #[error("threshold undefined: m = {m} does not exceed ln(1/p)/L = {floor:.6}")]
    ThresholdUndefined { m: u64, floor: f64 },

    #[error("simplification failed after {attempts} swap attempts ({remaining} duplicate edges left)")]
    SimplificationFailed { attempts: u64, remaining: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
