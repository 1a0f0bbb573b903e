use thiserror::Error;

use crate::diffpoly::DiffPolyError;
use crate::model3wave::ModelError;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("grid needs a power-of-two size of at least 16, got {0}")]
    InvalidGrid(usize),
    #[error("non-finite value in {field} at t = {t}")]
    NaNDetected { field: &'static str, t: f64 },
    #[error("time step {dt} exceeds the stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },
    #[error("denominator {factor} fell to {magnitude:e}, below the floor{}", step_suffix(.step))]
    DenominatorUnderflow {
        factor: String,
        magnitude: f64,
        step: Option<usize>,
    },
    #[error("seed exponents coincide (k = m = {0}); the closed form divides by m - k")]
    ResonantParameters(f64),
    #[error("expression still contains parameter `{0}`")]
    UnresolvedParameter(String),
    #[error("jet of order {requested} requested, sampler provides up to {available}")]
    JetOrderUnavailable { requested: u8, available: u8 },
    #[error(transparent)]
    Algebra(#[from] DiffPolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn step_suffix(step: &Option<usize>) -> String {
    step.map(|s| format!(" at chain step {s}")).unwrap_or_default()
}

impl NumericsError {
    /// Attach a chain step index to an underflow.
    pub fn at_step(self, s: usize) -> Self {
        match self {
            NumericsError::DenominatorUnderflow { factor, magnitude, .. } => {
                NumericsError::DenominatorUnderflow {
                    factor,
                    magnitude,
                    step: Some(s),
                }
            }
            other => other,
        }
    }
}
