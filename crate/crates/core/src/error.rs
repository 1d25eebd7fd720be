use thiserror::Error;

use crate::bang::AffineViolation;
use crate::syntax::Calculus;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{construct} is not part of the {calculus} calculus")]
    ForeignConstructor {
        construct: &'static str,
        calculus: Calculus,
    },

    #[error("term is not affine: {}", display_violations(.0))]
    NotAffine(Vec<AffineViolation>),

    #[error("reserved name `{0}` may not appear free in the input")]
    ReservedName(String),

    #[error("total mass {0} exceeds 1")]
    MassOverflow(String),

    #[error("invalid probability `{0}`")]
    InvalidProbability(String),

    #[error("invalid redex{}: {detail}", entry.map(|i| format!(" for entry {i}")).unwrap_or_default())]
    InvalidRedex {
        entry: Option<usize>,
        detail: String,
    },

    #[error("lift choice has {got} decisions for {expected} entries")]
    ChoiceArity { expected: usize, got: usize },

    #[error("strategy `{strategy}` is not available in the {calculus} calculus")]
    IncompatibleStrategy {
        strategy: String,
        calculus: Calculus,
    },

    #[error("observation set `{obs}` does not belong to the {calculus} calculus")]
    IncompatibleObservation { obs: String, calculus: Calculus },

    #[error("cannot compare limits over `{0}` and `{1}`")]
    ObservationMismatch(String, String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error("malformed JSON: {0}")]
    Json(String),
}

fn display_violations(v: &[AffineViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
