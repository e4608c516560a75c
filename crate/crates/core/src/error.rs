use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profile support outside grid: {0}")]
    Domain(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("profile truncated by grid: {what} (lost mass {deficit:.3e})")]
    Truncation { what: String, deficit: f64 },

    #[error("invalid spectrum: {0}")]
    Spectrum(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("shift {alpha} is not a whole number of grid cells (h = {h})")]
    Snapping { alpha: f64, h: f64 },

    #[error("translation by {alpha} pushes mass {lost:.3e} off the grid")]
    DomainOverflow { alpha: f64, lost: f64 },

    #[error("state annihilated at {tau}: norm {norm:.3e}")]
    Annihilation { tau: String, norm: f64 },

    #[error("point ({t}, {x}) lies outside the grid")]
    OutOfGrid { t: f64, x: f64 },

    #[error("detector window does not intersect the grid: {0}")]
    WindowOutsideGrid(String),

    #[error("invalid region: {0}")]
    Region(String),

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },

    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for usage, configuration and I/O
    /// problems, 3 for failures of the physics itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Truncation { .. } | Error::DomainOverflow { .. } | Error::Annihilation { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
