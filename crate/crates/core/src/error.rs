use thiserror::Error;

/// Errors raised by the numerical core and the command-line shell.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlitError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("node: |psi|^2 = {intensity:e} below floor {floor:e} at ({x}, {y})")]
    Node {
        x: f64,
        y: f64,
        intensity: f64,
        floor: f64,
    },

    #[error("quadrature did not reach the requested accuracy: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("config error at \"{path}\": {reason}")]
    Config { path: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl SlitError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        SlitError::Domain(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        SlitError::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            SlitError::Domain(_) => "domain",
            SlitError::Node { .. } => "node",
            SlitError::Quadrature { .. } => "quadrature",
            SlitError::Resolution(_) => "resolution",
            SlitError::Config { .. } => "config",
            SlitError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for SlitError {
    fn from(e: std::io::Error) -> Self {
        SlitError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SlitError>;
