use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input does not form a valid weighted sample.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// A parameter lies outside the range where a bound is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The weights do not satisfy the regime a bound requires.
    #[error("regime error: {0}")]
    Regime(String),

    /// Data is not ordered the way a bound requires.
    #[error("order error: {0}")]
    Order(String),

    #[error("degenerate window {k}:{j}: mass {mass} is not above the tolerance")]
    DegenerateWindow { k: usize, j: usize, mass: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
