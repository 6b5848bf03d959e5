use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into input-validation failures (bad files, violated
/// preconditions) and internal failures; see [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty subset")]
    EmptySubset,

    #[error("dilatation undefined: source has fewer than two points")]
    DilatationUndefined,

    #[error("invalid metric space: {0}")]
    InvalidMetric(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("gh bisection did not converge: best interval [{lower}, {upper}]")]
    GhNonConvergence { lower: f64, upper: f64 },

    #[error("instance too large for exact {what}: {detail}")]
    TooLarge { what: &'static str, detail: String },

    #[error("duplicate vertex {vertex} in facet {facet:?}")]
    DuplicateVertex { vertex: u32, facet: Vec<u32> },

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("not a closed pseudomanifold: {0}")]
    NotPseudomanifold(String),

    #[error("non-orientable")]
    NonOrientable,

    #[error("coefficient ring mismatch")]
    RingMismatch,

    #[error("boundary mismatch, unmatched cells: {0:?}")]
    BoundaryMismatch(Vec<String>),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("locality check too large: {0}")]
    LocalityTooLarge(String),

    #[error("exhaustion family is not nested: {0}")]
    NonNested(String),

    #[error("invalid subdivision: {0}")]
    InvalidSubdivision(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a failure inside a
    /// computation. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::GhNonConvergence { .. } | Error::Numerical(_) | Error::Io(_)
        )
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
