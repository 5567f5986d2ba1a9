use chrono::NaiveDate;
use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// Each variant has a stable snake_case [`Error::code`] used by the CLI's
/// machine-readable error records, so renaming a variant is fine but changing
/// a code is a breaking change.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate cell for geo {geo:?} on {date}")]
    DuplicateCell { geo: String, date: NaiveDate },

    #[error("non-finite value for geo {geo:?} on {date}")]
    NonFinite { geo: String, date: NaiveDate },

    #[error("sample size {value} for geo {geo:?} on {date} is below 1")]
    BadSampleSize { geo: String, date: NaiveDate, value: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("population standard deviation is zero")]
    ZeroDifficulty,

    #[error("census (n = N) with nonzero error: data defect correlation is undefined")]
    FullSample,

    #[error("{0} has zero variance")]
    DegenerateVariance(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("rank correlation undefined: all values tied")]
    AllTies,

    #[error("no date or geo has enough overlapping observations")]
    NoOverlap,

    #[error("all {replications} replications were degenerate")]
    AllReplicationsDropped { replications: u32 },

    #[error("target tau {target} not reached: mean tau at n = {n_hi} is {achieved}")]
    TargetUnreachable { target: f64, achieved: f64, n_hi: u64 },

    #[error("invalid search bracket: {0}")]
    BracketInvalid(String),

    #[error("simulated population produced no respondents")]
    NoRespondents,

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DuplicateCell { .. } => "duplicate_cell",
            Error::NonFinite { .. } => "non_finite",
            Error::BadSampleSize { .. } => "bad_sample_size",
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain { .. } => "domain_error",
            Error::ZeroDifficulty => "zero_difficulty",
            Error::FullSample => "full_sample",
            Error::DegenerateVariance(_) => "degenerate_variance",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::TooFewObservations { .. } => "too_few_observations",
            Error::AllTies => "all_ties",
            Error::NoOverlap => "no_overlap",
            Error::AllReplicationsDropped { .. } => "all_replications_dropped",
            Error::TargetUnreachable { .. } => "target_unreachable",
            Error::BracketInvalid(_) => "bracket_invalid",
            Error::NoRespondents => "no_respondents",
            Error::MissingColumn(_) => "missing_column",
            Error::Parse { .. } => "parse_error",
            Error::Csv(_) => "csv_error",
            Error::Io(_) => "io_error",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
