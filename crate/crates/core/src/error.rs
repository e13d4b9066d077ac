use std::path::PathBuf;

use chrono::{NaiveDate, NaiveDateTime};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    MalformedRow { path: PathBuf, line: u64, message: String },

    #[error("{}: {source}", path.display())]
    Config {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },

    #[error("hourly load gap: expected {expected}, found {found}")]
    LoadGap {
        expected: NaiveDateTime,
        found: NaiveDateTime,
    },

    #[error("hourly load must start at {expected} (first hour of the sample year), found {found}")]
    LoadMisaligned {
        expected: NaiveDateTime,
        found: NaiveDateTime,
    },

    #[error("hourly load has {found} points, sample year needs {expected}")]
    LoadCoverage { expected: usize, found: usize },

    #[error("travel data missing day {0}")]
    MissingDay(NaiveDate),

    #[error("travel data lists day {0} more than once")]
    DuplicateDay(NaiveDate),

    #[error("travel data for {date} lacks bin `{bin}`")]
    MissingBin { date: NaiveDate, bin: &'static str },

    #[error("charging profile fractions sum to {sum}, expected 1")]
    ProfileNotNormalized { sum: f64 },

    #[error("charging profile fraction at hour {hour} is {value}")]
    ProfileNegative { hour: usize, value: f64 },

    #[error("series timestamp grids differ")]
    GridMismatch,

    #[error("series is empty")]
    EmptySeries,

    #[error("combined load below baseline at index {index}")]
    NegativeIncrease { index: usize },

    #[error("no sample has a non-zero EV percentage")]
    NoNonzeroSamples,

    #[error("year {year} outside {start}..={end}")]
    YearOutOfRange { year: i32, start: i32, end: i32 },

    #[error("target year {target_year} is not after {current_year}")]
    TargetInPast { target_year: i32, current_year: i32 },

    #[error("{what} must be non-negative and finite, got {value}")]
    NegativeInput { what: &'static str, value: f64 },

    #[error("EV stock {ev} exceeds LDV stock {ldv} in {year}")]
    StockExceedsFleet { year: i32, ev: f64, ldv: f64 },

    #[error("compare needs at least 2 scenarios, got {0}")]
    TooFewScenarios(usize),

    #[error("scenario `{name}` horizon {start}..{end} differs from {expected_start}..{expected_end}")]
    MismatchedHorizons {
        name: String,
        start: i32,
        end: i32,
        expected_start: i32,
        expected_end: i32,
    },

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("scenario `{scenario}`{}: {source}", year.map(|y| format!(", year {y}")).unwrap_or_default())]
    Scenario {
        scenario: String,
        year: Option<i32>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn in_scenario(self, scenario: &str, year: Option<i32>) -> Self {
        match self {
            e @ Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: scenario.to_owned(),
                year,
                source: Box::new(e),
            },
        }
    }

    /// True when the failure is a filesystem problem rather than bad content.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Scenario { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub(crate) fn non_negative<T: crate::Scalar>(what: &'static str, value: T) -> Result<T> {
    if value.is_finite() && value >= T::zero() {
        Ok(value)
    } else {
        Err(Error::NegativeInput {
            what,
            value: value.as_f64(),
        })
    }
}
