use thiserror::Error;

use crate::polymap::MapFileError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis index {index} out of range for a basis of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("boundary is not star-like: {0}")]
    NotStarLike(String),

    #[error("point with norm {norm} lies outside the admissible region")]
    OutsideBall { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("constraint matrix is rank deficient ({context}): sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e}")]
    RankDeficient {
        context: String,
        sigma_min: f64,
        sigma_max: f64,
    },

    #[error("interpolation point set rejected: smallest singular value {sigma_min} is below {threshold}")]
    IllConditionedPoints { sigma_min: f64, threshold: f64 },

    #[error("objective is not finite at the initial point; choose a different initial guess")]
    NonFiniteObjective,

    #[error("point file: {0}")]
    PointFile(String),

    #[error(transparent)]
    MapFile(#[from] MapFileError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
