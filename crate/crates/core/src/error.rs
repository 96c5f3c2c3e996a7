use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The CLI maps each variant to an exit code through [`Error::exit_code`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map is not CPTP: {0}")]
    NotCPTP(String),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("block too large: {0}")]
    BlockTooLarge(String),

    #[error("dimension too large: {0}")]
    DimensionTooLarge(String),

    #[error("distortion {0} outside the admissible range")]
    InvalidDistortion(f64),

    #[error("rate {0} outside [0, log2 d]")]
    RateOutOfRange(f64),

    #[error("solver did not converge: {0}")]
    SolverDiverged(String),

    #[error("source type does not match theorem {0}")]
    SourceTypeMismatch(String),

    #[error("theorem {0} requires a distortion value")]
    MissingDistortion(String),

    #[error("theorem {0} does not take a distortion value")]
    UnexpectedDistortion(String),

    #[error("verdict is infeasible (margin {margin:.6})")]
    InfeasiblePlan { margin: f64 },

    #[error("channel capacity {0} is too small to plan a transmission")]
    DegenerateCapacity(f64),

    #[error("curve shape check failed: {0}")]
    CurveShape(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Exit code used by the command-line front end.
    ///
    /// 1 parse/input error, 2 numerical failure, 3 infeasible verdict,
    /// 4 resource cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::NonHermitianInput { .. }
            | Error::DimensionMismatch(_)
            | Error::NotCPTP(_)
            | Error::InvalidState(_)
            | Error::InvalidParameter(_)
            | Error::IndexOutOfRange { .. }
            | Error::InvalidDistortion(_)
            | Error::RateOutOfRange(_)
            | Error::SourceTypeMismatch(_)
            | Error::MissingDistortion(_)
            | Error::UnexpectedDistortion(_) => 1,
            Error::SolverDiverged(_) | Error::CurveShape(_) | Error::DegenerateCapacity(_) => 2,
            Error::InfeasiblePlan { .. } => 3,
            Error::BlockTooLarge(_) | Error::DimensionTooLarge(_) => 4,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotCPTP(_) => "NotCPTP",
            Error::InvalidState(_) => "InvalidState",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::BlockTooLarge(_) => "BlockTooLarge",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::InvalidDistortion(_) => "InvalidDistortion",
            Error::RateOutOfRange(_) => "RateOutOfRange",
            Error::SolverDiverged(_) => "SolverDiverged",
            Error::SourceTypeMismatch(_) => "SourceTypeMismatch",
            Error::MissingDistortion(_) => "MissingDistortion",
            Error::UnexpectedDistortion(_) => "UnexpectedDistortion",
            Error::InfeasiblePlan { .. } => "InfeasiblePlan",
            Error::DegenerateCapacity(_) => "DegenerateCapacity",
            Error::CurveShape(_) => "CurveShape",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
