use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or state value violates one of its invariants.
    #[error("invalid value for `{field}`: {value} (requires {constraint})")]
    Range {
        field: String,
        value: String,
        constraint: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("state component `{component}` left its bounds at t = {t}: {value}")]
    BoundViolation {
        component: &'static str,
        value: f64,
        t: f64,
    },

    #[error("capacity shock magnitude {0} outside [0, 1]")]
    InvalidShock(f64),

    #[error("empty run record list")]
    EmptyRecords,

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn range(field: impl Into<String>, value: f64, constraint: &'static str) -> Self {
        Error::Range {
            field: field.into(),
            value: value.to_string(),
            constraint,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
