use thiserror::Error;

use crate::diffpoly::DiffPolyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
    #[error("no transformation with index {0} (expected 1, 2 or 3)")]
    UnknownTransformation(u8),
    #[error("could not derive the inverse of {transform}: {reason}")]
    DerivationFailed { transform: String, reason: String },
}
