use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// A cluster lost all of its members. `iteration` is the assignment
    /// index at which it happened, when known.
    #[error("cluster {} is empty{}", .cluster + 1, fmt_iteration(.iteration))]
    EmptyCluster {
        cluster: usize,
        iteration: Option<usize>,
    },

    #[error("degenerate contrast: the two cluster centroids coincide")]
    DegenerateContrast,

    #[error("truncation support carries zero probability mass")]
    DegenerateSupport,

    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

fn fmt_iteration(iteration: &Option<usize>) -> String {
    match iteration {
        Some(t) => format!(" at iteration {t}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
