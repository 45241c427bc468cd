use thiserror::Error;

/// Errors raised by instance handling, solvers and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("entry {value} at ({row}, {col}) exceeds lambda = {lambda}")]
    EntryAboveLambda { row: usize, col: usize, value: f64, lambda: f64 },
    #[error("eps = {eps} outside the allowed range {range}")]
    EpsOutOfRange { eps: f64, range: &'static str },
    #[error("matrix has no rows or no columns")]
    EmptyMatrix,
    #[error("non-monotone update at ({row}, {col}): {old} -> {new}")]
    NonMonotoneUpdate { row: usize, col: usize, old: f64, new: f64 },
    #[error("index ({row}, {col}) out of range for {m}x{n}")]
    IndexOutOfRange { row: usize, col: usize, m: usize, n: usize },
    #[error("certificate violation: {0}")]
    CertificateViolation(String),
    #[error("step-size precondition violated: row {row} residual {residual}")]
    PreconditionViolated { row: usize, residual: f64 },
    #[error("update after terminal dual; the frozen dual still stands")]
    UpdateAfterTerminal,
    #[error("stream exhausted in the middle of row {row}")]
    StreamExhaustedMidRow { row: usize },
    #[error("row inserted after the online solver terminated")]
    RowAfterTermination,
    #[error("scale factor {which}[{index}] is not strictly positive")]
    ZeroScaleFactor { which: &'static str, index: usize },
    #[error("coordinate {0} has no covering entries")]
    UnboundedCost(usize),
    #[error("coordinate {0} is not cheap")]
    NotCheap(usize),
    #[error("solver has not declared infeasibility")]
    NotInfeasibleYet,
    #[error("instance too large for the exact oracle ({m}x{n})")]
    TooLarge { m: usize, n: usize },
    #[error("invalid value {value} for {what}")]
    InvalidValue { what: &'static str, value: f64 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
