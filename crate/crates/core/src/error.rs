use thiserror::Error;

/// Errors raised by the segmentation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("numerical blow-up: non-finite level-set value after iteration {iteration}")]
    Blowup { iteration: usize },

    #[error("stability error: heat step {dt} exceeds the explicit bound 0.25")]
    Stability { dt: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
