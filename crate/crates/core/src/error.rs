use thiserror::Error;

/// Errors raised across the laboratory.
///
/// Variants that mirror a hypothesis of the underlying theorems carry the
/// hypothesis in `hypothesis` so reports can name what was violated.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("points belong to different model spaces")]
    MismatchedSpaces,

    #[error("coincident points: {0}")]
    CoincidentPoints(&'static str),

    #[error("antipodal points have no unique minimizing geodesic")]
    Antipodal,

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid pole set: {0}")]
    InvalidPoleSet(String),

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("field is not admissible: {0}")]
    FieldNotAdmissible(String),

    #[error("{what} (hypothesis: {hypothesis})")]
    HypothesisViolated {
        what: String,
        hypothesis: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn hypothesis(what: impl Into<String>, hypothesis: &'static str) -> Self {
        Error::HypothesisViolated {
            what: what.into(),
            hypothesis,
        }
    }
}
