use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: rejected row: {msg}")]
    RejectedRow { line: usize, msg: String },

    #[error("orderbook row {row}: {msg}")]
    InvalidBook { row: usize, msg: String },

    #[error("stream length mismatch: {events} events vs {snapshots} snapshots")]
    LengthMismatch { events: usize, snapshots: usize },

    #[error("time regression at event {index}: {prev_ns} ns followed by {time_ns} ns")]
    TimeRegression {
        index: usize,
        prev_ns: i64,
        time_ns: i64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular normal equations: {0}")]
    Singular(String),

    #[error("simulation halted at t={time_ns} ns: {msg}")]
    SimulationHalt { time_ns: i64, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }
}
