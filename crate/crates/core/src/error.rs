//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry, meshing, assembly, solvers and studies.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-supplied configuration (resolutions, eps lists, schemas).
    #[error("configuration error: {0}")]
    Config(String),

    /// A coordinate or index outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A geometrically degenerate input (zero-height profile, inverted cell).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Internal contract violation between modules.
    #[error("logic error: {0}")]
    Logic(String),

    /// Eigensolver breakdown or non-convergence. Carries the best residuals
    /// reached when convergence was the problem.
    #[error("solver error: {message}")]
    Solver {
        message: String,
        best_residuals: Vec<f64>,
    },

    /// Filesystem failure, annotated with the path involved.
    #[error("io error ({path}): {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn solver(message: impl Into<String>) -> Self {
        Error::Solver {
            message: message.into(),
            best_residuals: Vec::new(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Re-wrap with the pipeline stage that failed, keeping the variant.
    pub fn with_stage(self, stage: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{stage}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{stage}: {m}")),
            Error::Geometry(m) => Error::Geometry(format!("{stage}: {m}")),
            Error::Logic(m) => Error::Logic(format!("{stage}: {m}")),
            Error::Solver {
                message,
                best_residuals,
            } => Error::Solver {
                message: format!("{stage}: {message}"),
                best_residuals,
            },
            Error::Io { path, source } => Error::Io {
                path: format!("{stage}: {path}"),
                source,
            },
        }
    }

    /// Process exit code for the CLI contract: 2 for anything the user can
    /// fix in a config, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Geometry(_) | Error::Logic(_) => 2,
            Error::Solver { .. } => 3,
            Error::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
