use crate::catalog::CourseKey;
use thiserror::Error;

/// How an error should be classified when reporting it from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration: unknown cohort, invalid parameter, malformed config file.
    Config,
    /// Bad or missing input data.
    Data,
    /// Numerical failure (non-convergence, singular system).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed row at row {row}: {detail}")]
    MalformedRow { row: u64, detail: String },

    #[error("grade out of range at row {row}: {value}")]
    GradeOutOfRange { row: u64, value: String },

    #[error("unknown classification at row {row}: {value}")]
    UnknownClassification { row: u64, value: String },

    #[error("missing column {name:?} in header")]
    MissingColumn { name: &'static str },

    #[error("course {course} not found in catalog")]
    UnknownCourse { course: CourseKey },

    #[error("no grades")]
    NoGrades,

    #[error("input length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample too small: n = {n}, minimum is {min}")]
    SampleTooSmall { n: usize, min: usize },

    #[error("undefined correlation (zero variance)")]
    ZeroVariance,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("sub-cohort taking {courses} has {n} students, need at least {min}")]
    SubCohortTooSmall {
        courses: String,
        n: usize,
        min: usize,
    },

    #[error("missing grade for course {course}")]
    MissingGrade { course: CourseKey },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown cohort {0:?}")]
    UnknownCohort(String),

    #[error("solver did not converge within {0} sweeps")]
    NotConverged(usize),

    #[error("cannot read {path}: {source}")]
    PathIo {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_)
            | Error::Config(_)
            | Error::UnknownCohort(_) => ErrorKind::Config,
            Error::SingularSystem(_) | Error::NotConverged(_) => ErrorKind::Numerical,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
