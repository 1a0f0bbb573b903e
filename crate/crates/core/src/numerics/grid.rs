use num_complex::Complex64;

use crate::diffpoly::FieldId;

use super::error::NumericsError;

/// Uniform periodic grid `x_j = j·L/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self, NumericsError> {
        if n < 16 || !n.is_power_of_two() {
            return Err(NumericsError::InvalidGrid(n));
        }
        Ok(Grid { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.x(j))
    }

    /// Largest resolved wavenumber.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }
}

/// Six sampled fields at time `t`, stored in the canonical field order.
#[derive(Clone, Debug)]
pub struct GridState {
    pub grid: Grid,
    pub t: f64,
    pub fields: [Vec<Complex64>; 6],
}

impl GridState {
    pub fn zeros(grid: Grid) -> Self {
        GridState {
            grid,
            t: 0.0,
            fields: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); grid.n()]),
        }
    }

    /// Sample `f(field, x)` at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(FieldId, f64) -> Complex64) -> Self {
        let mut s = GridState::zeros(grid);
        for field in FieldId::ALL {
            for (j, x) in grid.points().enumerate() {
                s.fields[field.index()][j] = f(field, x);
            }
        }
        s
    }

    pub fn field(&self, f: FieldId) -> &[Complex64] {
        &self.fields[f.index()]
    }

    pub fn field_mut(&mut self, f: FieldId) -> &mut Vec<Complex64> {
        &mut self.fields[f.index()]
    }

    pub fn check_finite(&self) -> Result<(), NumericsError> {
        for f in FieldId::ALL {
            if self.field(f).iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(NumericsError::NaNDetected {
                    field: f.name(),
                    t: self.t,
                });
            }
        }
        Ok(())
    }

    /// Largest pointwise distance to another state on the same grid.
    pub fn max_distance(&self, other: &GridState) -> f64 {
        FieldId::ALL
            .iter()
            .flat_map(|&f| self.field(f).iter().zip(other.field(f)).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
    }

    /// Overwrite every minus field with the conjugate of its plus partner.
    pub fn enforce_reality(&mut self) {
        for f in FieldId::ALL.into_iter().filter(|f| f.is_plus()) {
            let conj: Vec<_> = self.field(f).iter().map(|z| z.conj()).collect();
            *self.field_mut(f.conjugate()) = conj;
        }
    }
}
