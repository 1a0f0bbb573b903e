//! The six-field three-wave system, its discrete transformations and the
//! symmetry condition that ties them together.

mod error;
mod frechet;
mod raw;
mod substitution;
mod system;

pub use error::ModelError;
pub use frechet::FrechetOperator;
pub use raw::{on_shell_reduce, raw_transformation, RawExpr, TransformId};
pub use substitution::{
    compose, delta, inverse_of, inverse_transformation, symmetry_residual, transformation,
    transformation_for, Substitution,
};
pub use system::{base_system, evolution_derivative, shift_flow, EvolutionSystem};
