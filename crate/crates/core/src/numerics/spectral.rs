use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

/// How spatial derivatives are taken on the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpatialScheme {
    #[default]
    Spectral,
    /// Fourth-order central differences.
    FiniteDifference4,
}

impl SpatialScheme {
    pub fn name(self) -> &'static str {
        match self {
            SpatialScheme::Spectral => "spectral",
            SpatialScheme::FiniteDifference4 => "fd4",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "spectral" => Some(SpatialScheme::Spectral),
            "fd4" => Some(SpatialScheme::FiniteDifference4),
            _ => None,
        }
    }
}

/// Periodic differentiation on a fixed grid.
pub struct Differentiator {
    grid: Grid,
    scheme: SpatialScheme,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl Differentiator {
    pub fn new(grid: Grid, scheme: SpatialScheme) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let base = std::f64::consts::TAU / grid.length();
        let wavenumbers = (0..n)
            .map(|j| {
                let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                base * k
            })
            .collect();
        Differentiator {
            grid,
            scheme,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn scheme(&self) -> SpatialScheme {
        self.scheme
    }

    /// `u, u', …, u^(order)` on the grid.
    pub fn jets(&self, u: &[Complex64], order: u8) -> Vec<Vec<Complex64>> {
        let mut out = vec![u.to_vec()];
        if order == 0 {
            return out;
        }
        match self.scheme {
            SpatialScheme::Spectral => {
                let mut hat = u.to_vec();
                self.forward.process(&mut hat);
                let scale = 1.0 / self.grid.n() as f64;
                for k in 1..=order {
                    let mut d: Vec<Complex64> = hat
                        .iter()
                        .zip(&self.wavenumbers)
                        .enumerate()
                        .map(|(j, (h, &w))| {
                            // The Nyquist mode has no well-defined odd derivative.
                            if k % 2 == 1 && j == self.grid.n() / 2 {
                                Complex64::new(0.0, 0.0)
                            } else {
                                h * Complex64::new(0.0, w).powu(k as u32) * scale
                            }
                        })
                        .collect();
                    self.inverse.process(&mut d);
                    out.push(d);
                }
            }
            SpatialScheme::FiniteDifference4 => {
                let h = self.grid.spacing();
                for k in 1..=order as usize {
                    let next = if k % 2 == 0 {
                        second_difference(&out[k - 2], h)
                    } else {
                        first_difference(&out[k - 1], h)
                    };
                    out.push(next);
                }
            }
        }
        out
    }

    pub fn derivative(&self, u: &[Complex64], order: u8) -> Vec<Complex64> {
        self.jets(u, order).pop().expect("at least the values")
    }
}

fn first_difference(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| u[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + at(1) * 8.0 - at(-1) * 8.0 + at(-2)) / (12.0 * h)
        })
        .collect()
}

fn second_difference(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| u[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + at(1) * 16.0 - at(0) * 30.0 + at(-1) * 16.0 - at(-2)) / (12.0 * h * h)
        })
        .collect()
}
