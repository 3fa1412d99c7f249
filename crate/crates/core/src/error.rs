use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unknown species `{name}` (known: {known})")]
    UnknownSpecies { name: String, known: String },

    #[error("unknown rate constant `{0}`")]
    UnknownRate(String),

    #[error("parent set of `{component}` does not cover variables {missing:?} used in its right-hand side")]
    ParentsTooSmall {
        component: String,
        missing: Vec<String>,
    },

    #[error("Michaelis-Menten denominator is {value} for variable {variable} (state must keep c2 + x > 0)")]
    NonPositiveDenominator { variable: usize, value: f64 },

    #[error("possible solvability violation: |{component}| = {value:e} exceeds bound {bound:e} at t = {time}")]
    BlowUp {
        component: String,
        value: f64,
        bound: f64,
        time: f64,
    },

    #[error("non-finite state in component {component} at t = {time}")]
    NonFinite { component: String, time: f64 },

    #[error("solvability assumption violated: fixed-point iteration did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("graph contains a cycle through `{0}`")]
    Cyclic(String),

    #[error("environment `{environment}`, repetition {repetition}: {source}")]
    Experiment {
        environment: String,
        repetition: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("environments required: {0}")]
    EnvironmentsRequired(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// True for failures that come from the numerics (blow-up, non-convergence)
    /// rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonPositiveDenominator { .. }
            | Error::BlowUp { .. }
            | Error::NonFinite { .. }
            | Error::NotConverged { .. } => true,
            Error::Experiment { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
