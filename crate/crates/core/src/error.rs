use std::fmt;

use thiserror::Error;

/// Which box invariant a candidate probability table failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite {
        index: [usize; 4],
    },
    Negative {
        index: [usize; 4],
        value: f64,
    },
    AboveOne {
        index: [usize; 4],
        value: f64,
    },
    Normalization {
        inputs: [usize; 2],
        sum: f64,
    },
    SignalingAlice {
        input: usize,
        output: usize,
        spread: f64,
    },
    SignalingBob {
        input: usize,
        output: usize,
        spread: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { index } => {
                write!(f, "nonnegativity: entry {index:?} is not finite")
            }
            Violation::Negative { index, value } => {
                write!(f, "nonnegativity: entry {index:?} = {value:e}")
            }
            Violation::AboveOne { index, value } => {
                write!(f, "nonnegativity: entry {index:?} = {value} exceeds 1")
            }
            Violation::Normalization { inputs, sum } => {
                write!(f, "normalization: block (i,j) = {inputs:?} sums to {sum}")
            }
            Violation::SignalingAlice {
                input,
                output,
                spread,
            } => write!(
                f,
                "nonsignaling: Alice's marginal (i,m) = ({input},{output}) depends on Bob's input (spread {spread:e})"
            ),
            Violation::SignalingBob {
                input,
                output,
                spread,
            } => write!(
                f,
                "nonsignaling: Bob's marginal (j,n) = ({input},{output}) depends on Alice's input (spread {spread:e})"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a box: {0}")]
    NotABox(Violation),

    #[error("invalid mixture weights: {0}")]
    BadWeights(String),

    #[error("measurement direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    #[error("canonical residual is not a valid local box: {0}")]
    ResidualInvalid(String),

    #[error("simplex stalled after {iterations} iterations")]
    SolverStalled { iterations: usize },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("unknown scenario `{name}`; valid names: {valid}")]
    UnknownScenario { name: String, valid: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit codes shared by the command-line tool and the C interface.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const INVARIANT: i32 = 3;
    pub const UNKNOWN_NAME: i32 = 4;
    pub const SOLVER: i32 = 5;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Io(_)
            | Error::BadWeights(_)
            | Error::OutOfRange { .. } => exit::PARSE,
            Error::NotABox(_)
            | Error::NotUnit { .. }
            | Error::InvalidState(_)
            | Error::ResidualInvalid(_) => exit::INVARIANT,
            Error::UnknownScenario { .. } => exit::UNKNOWN_NAME,
            Error::SolverStalled { .. } | Error::Unbounded => exit::SOLVER,
        }
    }

    pub(crate) fn out_of_range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Error::OutOfRange {
            name: name.to_string(),
            value,
            lo,
            hi,
        }
    }
}
