use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value violated a documented range or invariant.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    /// The requested evaluation is not supported by the chosen backend.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Probability mass reached the edge of the lattice.
    #[error("boundary mass {mass:.3e} exceeds {limit:.1e} ({context})")]
    BoundaryMass { mass: f64, limit: f64, context: String },

    /// A measurement branch with vanishing probability was asked for its reduced state.
    #[error("zero-probability measurement branch (p = {probability:.3e})")]
    ZeroProbability { probability: f64 },

    #[error("scenario document error at `{path}`: {message}")]
    Document { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Prefixes the field path of an [`Error::Invalid`].
    pub(crate) fn within(self, prefix: &str) -> Self {
        match self {
            Error::Invalid { field, reason } => Error::Invalid {
                field: format!("{prefix}.{field}"),
                reason,
            },
            other => other,
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::BoundaryMass { .. } | Error::ZeroProbability { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
