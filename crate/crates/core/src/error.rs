use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of zeta at s = 1")]
    Pole,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "precision target {target:e} not reached within {max_terms} terms (attained bound {attained:e})"
    )]
    Precision {
        target: f64,
        attained: f64,
        max_terms: u64,
    },

    #[error("Gram entry {variant} ({j}, {k}): {source}")]
    GramEntry {
        variant: String,
        j: u64,
        k: u64,
        source: Box<Error>,
    },

    #[error(
        "Gram matrix of size {n} has condition estimate {condition:e} above the limit {limit:e}; \
         rerun with extended precision or override the refusal"
    )]
    Conditioning { n: usize, condition: f64, limit: f64 },

    #[error(
        "Cholesky factorization lost positive definiteness at pivot {pivot} of {n}; \
         rerun with extended (double-double) precision"
    )]
    NotPositiveDefinite { n: usize, pivot: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag, used by the CLI error record and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole => "pole",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Precision { .. } => "precision",
            Error::GramEntry { source, .. } => source.kind(),
            Error::Conditioning { .. } => "conditioning",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
