use thiserror::Error;

/// Errors produced by grid construction, transforms, solvers and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: operands live on different polar grids")]
    GridMismatch,

    #[error("function is not supported inside the disk: nonzero value at radius index {index} beyond support index {support}")]
    SupportViolation { index: usize, support: usize },

    #[error("coefficient h_2 at the origin is {value:e}; it must vanish for the zero-radius Hilbert coefficient to exist")]
    OriginHarmonic { value: f64 },

    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Beltrami coefficient sup norm {0} is not below 1")]
    NotContracting(f64),

    #[error("scheme/representation mismatch: {0}")]
    SchemeMismatch(String),

    #[error("iteration diverged: delta grew for {growth_steps} consecutive steps (last delta {delta:e} at step {step})")]
    Diverged {
        step: usize,
        delta: f64,
        growth_steps: usize,
    },

    #[error("polynomial term count {count} exceeds the ceiling {ceiling}")]
    TermCeiling { count: usize, ceiling: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input (files, flags, parameters) as
    /// opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::GridMismatch
                | Error::SupportViolation { .. }
                | Error::OriginHarmonic { .. }
                | Error::InvalidStencil(_)
                | Error::Domain(_)
                | Error::NotContracting(_)
                | Error::SchemeMismatch(_)
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
