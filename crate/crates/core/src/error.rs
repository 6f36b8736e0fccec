use thiserror::Error;

use crate::spectral::Side;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("expected a {expected}-side function, got {found}-side")]
    SideMismatch { expected: Side, found: Side },

    #[error("functions belong to different groups")]
    GroupMismatch,

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid base set: {0}")]
    InvalidBaseSet(String),

    #[error("peak function is not admissible for this point set: {0}")]
    InvalidPeak(String),

    #[error("operator does not extend: {0}")]
    NotAnExtension(String),

    #[error("phase grid resolution {0} is below the minimum of 4")]
    Resolution(u32),

    #[error("enumeration of {requested} points exceeds the budget of {budget}")]
    Budget { requested: f64, budget: f64 },

    #[error("point count must be positive")]
    NonPositiveCount,
}
