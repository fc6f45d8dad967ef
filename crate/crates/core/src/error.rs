use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised by the estimation and inference routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: cannot parse date `{value}` (expected YYYY-MM-DD)")]
    BadDate { row: usize, value: String },
    #[error("row {row}: cannot parse value `{value}`")]
    BadValue { row: usize, value: String },
    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: NaiveDate },
    #[error("series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },
    #[error("domain error in `{name}` at {date}: {reason}")]
    Domain {
        name: String,
        date: NaiveDate,
        reason: String,
    },
    #[error("size error: {0}")]
    Size(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-finite likelihood contribution at observation {t}")]
    Likelihood { t: usize },
    #[error("non-positive conditional variance at observation {t}")]
    VarianceUnderflow { t: usize },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("rank-deficient design: `{0}` is collinear with earlier columns")]
    RankDeficient(String),
    #[error("insufficient observations: need more than {needed}, have {have}")]
    InsufficientObservations { needed: usize, have: usize },
    #[error("objective is non-finite at every vertex of the initial simplex")]
    NonFiniteObjective,
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("regression spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
