use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A configuration field violates an invariant. Carries the dotted
    /// field path and a human-readable message.
    #[error("invalid config `{path}`: {message}")]
    InvalidConfig { path: String, message: String },

    /// Several configuration violations reported together.
    #[error("configuration invalid:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    ConfigReport(Vec<Error>),

    /// Adaptive quadrature exhausted its subdivision budget before
    /// reaching the requested tolerance.
    #[error("quadrature did not converge: error {achieved:.3e} > tolerance {required:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        achieved: f64,
        required: f64,
        subdivisions: usize,
    },

    /// A link with zero transmitter-receiver distance.
    #[error("degenerate link: zero distance between endpoints")]
    DegenerateLink,

    /// An unknown dotted parameter path.
    #[error("unknown parameter path `{0}`")]
    UnknownPath(String),
}

impl Error {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
