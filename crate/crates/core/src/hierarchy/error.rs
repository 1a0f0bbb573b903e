use thiserror::Error;

use crate::diffpoly::DiffPolyError;
use crate::model3wave::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("density {density} is not conserved: variational derivative of its rate is {witness}")]
    NotConserved { density: String, witness: String },
    #[error("identity `{name}` failed; residual {witness}")]
    IdentityFailed { name: String, witness: String },
    #[error("no sign convention makes the family contain its named specialization")]
    SignUnresolved,
}
