use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::FieldId;

use super::grid::{Grid, GridState};

/// Random trigonometric polynomial data with modes `|k| ≤ modes`, each field
/// scaled so its largest modulus equals `amplitude`.
pub fn smooth_random_state(grid: Grid, amplitude: f64, modes: usize, seed: u64) -> GridState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = std::f64::consts::TAU / grid.length();
    let mut state = GridState::zeros(grid);
    for f in FieldId::ALL {
        let coeffs: Vec<(f64, Complex64)> = (-(modes as i64)..=modes as i64)
            .map(|k| {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (k as f64 * base, z)
            })
            .collect();
        let vals: Vec<Complex64> = grid
            .points()
            .map(|x| {
                coeffs
                    .iter()
                    .map(|&(k, z)| z * Complex64::from_polar(1.0, k * x))
                    .sum()
            })
            .collect();
        let peak = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = if peak > 0.0 { amplitude / peak } else { 0.0 };
        *state.field_mut(f) = vals.into_iter().map(|z| z * scale).collect();
    }
    state
}

/// Fields shifted by constants, for flows that divide by the state.
pub fn offset_state(mut state: GridState, offset: Complex64) -> GridState {
    for f in FieldId::ALL {
        for z in state.field_mut(f) {
            *z += offset;
        }
    }
    state
}
