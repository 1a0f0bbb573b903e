//! Floating-point integration of the flows on a periodic grid, conserved
//! functional monitoring, closed-form seeds and chains of transformed solutions.

mod chain;
mod compile;
mod error;
mod export;
mod grid;
mod init;
mod integrate;
mod sampler;
mod spectral;

pub use chain::{chain_generate, ChainOptions, ChainResult, ChainStep};
pub use compile::{CompiledExpr, JetPoint};
pub use error::NumericsError;
pub use export::{write_monitor_csv, write_snapshot_csv};
pub use grid::{Grid, GridState};
pub use init::{offset_state, smooth_random_state};
pub use integrate::{
    functional_monitor, integrate_flow, relative_drift, stability_bound, GridEvaluator,
    IntegratorOptions, Trajectory,
};
pub use sampler::{
    apply_transformation_numeric, pde_residual, sample_state, sampler_distance, seed_solution,
    PdeResidual, ScaledSampler, SeedKind, SeedParams, SharedSampler, SolutionSampler,
    TransformedSampler, Window,
};
pub use spectral::{Differentiator, SpatialScheme};
