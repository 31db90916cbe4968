use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants are grouped by [`ErrorClass`] so front ends can map them onto
/// distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a supported prime modulus")]
    InvalidField(u32),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {field}: {message}")]
    InvalidScenario { field: String, message: String },

    #[error("sensors {a} and {b} coincide at t = {t}")]
    CoincidentSensors { a: String, b: String, t: f64 },

    #[error("time {0} outside [0, 1]")]
    TimeOutOfRange(f64),

    #[error("coincident points {0} and {1}")]
    CoincidentPoints(usize, usize),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-generic event at t = {t}: {message}")]
    NonGenericEvent { t: f64, message: String },

    #[error("invalid event stream: {0}")]
    InvalidStream(String),

    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("map is not a chain map: {0}")]
    NotAChainMap(String),

    #[error("fence subcomplex is empty")]
    EmptyFence,

    #[error("brute-force decomposition limit exceeded: {0}")]
    SizeLimit(String),

    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),

    #[error("covered region is disconnected at t = {t} ({components} components)")]
    Disconnected { t: f64, components: usize },

    #[error("event inconsistent with the current complex: {0}")]
    InconsistentEvent(String),

    #[error("unknown boundary cycle: {0}")]
    UnknownCycle(String),

    #[error("oracle did not stabilise after {halvings} halvings")]
    NonConvergence { halvings: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Coarse classification of [`Error`] values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Validation,
    Genericity,
    Algebra,
    Connectivity,
    Convergence,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse { .. } | InvalidParameter(_) | InvalidField(_) => ErrorClass::Input,
            InvalidScenario { .. }
            | CoincidentSensors { .. }
            | TimeOutOfRange(_)
            | CoincidentPoints(..)
            | InvalidStream(_)
            | EmptyFence
            | UnknownCycle(_)
            | MalformedRotation(_) => ErrorClass::Validation,
            Degenerate(_) | NonGenericEvent { .. } | InconsistentEvent(_) => ErrorClass::Genericity,
            MalformedComplex(_) | NotAChainMap(_) | SizeLimit(_) => ErrorClass::Algebra,
            Disconnected { .. } => ErrorClass::Connectivity,
            NonConvergence { .. } => ErrorClass::Convergence,
        }
    }

    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidScenario {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
