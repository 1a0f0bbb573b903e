use crate::model3wave::{base_system, transformation, TransformId};

use super::error::NumericsError;
use super::sampler::{apply_transformation_numeric, pde_residual, SharedSampler, Window};

/// Settings for building and checking a chain of solutions.
#[derive(Clone, Debug)]
pub struct ChainOptions {
    pub window: Window,
    pub tau: f64,
    pub floor: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            window: Window::uniform((0.0, std::f64::consts::TAU), (0.2, 0.8), 9, 4),
            tau: 1e-2,
            floor: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    /// 1-based position in the chain.
    pub index: usize,
    pub transform: TransformId,
    pub residual: f64,
}

pub struct ChainResult {
    pub sampler: SharedSampler,
    pub steps: Vec<ChainStep>,
}

/// Apply `T1` `n1` times, then `T2` `n2` times, checking each intermediate
/// solution against the three-wave system on the window.
pub fn chain_generate(
    n1: usize,
    n2: usize,
    seed: SharedSampler,
    opts: &ChainOptions,
) -> Result<ChainResult, NumericsError> {
    let sys = base_system();
    let plan = std::iter::repeat(TransformId::T1)
        .take(n1)
        .chain(std::iter::repeat(TransformId::T2).take(n2));
    let mut current = seed;
    let mut steps = Vec::new();
    for (i, t) in plan.enumerate() {
        let index = i + 1;
        current = apply_transformation_numeric(&transformation(t)?, current, opts.floor);
        let r = pde_residual(current.as_ref(), &sys, &opts.window, opts.tau, opts.floor)
            .map_err(|e| e.at_step(index))?;
        log::debug!("chain step {index} ({t}): residual {:e}", r.max);
        steps.push(ChainStep {
            index,
            transform: t,
            residual: r.max,
        });
    }
    Ok(ChainResult {
        sampler: current,
        steps,
    })
}
