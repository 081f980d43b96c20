use thiserror::Error;

/// Errors surfaced by the library. Data problems (`NonFinite`, `Parse`,
/// `TiesViolation`, `Io`) are distinguishable from usage problems (`Domain`,
/// `EmptyGrid`) so callers can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tied value {value} appears more than once in the pooled sample; rerun with ties=jitter to break ties")]
    TiesViolation { value: f64 },

    #[error("non-finite value {value} at row {row}")]
    NonFinite { row: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{context}: root find did not converge on [{lo}, {hi}] (cdf {flo}..{fhi}, target {target})")]
    RootFind {
        context: &'static str,
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
        target: f64,
    },

    #[error("comparison density diverges at p = {p}")]
    Divergent { p: f64 },

    #[error("{what} is not implemented: {detail}")]
    NotImplemented {
        what: &'static str,
        detail: &'static str,
    },

    #[error("no grid points inside ({0}, {1})")]
    EmptyGrid(f64, f64),

    #[error("cache file {path}: {message}")]
    Cache { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the input data rather than by how the
    /// library was called.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::TiesViolation { .. }
                | Error::NonFinite { .. }
                | Error::Parse { .. }
                | Error::Io(_)
                | Error::Cache { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
