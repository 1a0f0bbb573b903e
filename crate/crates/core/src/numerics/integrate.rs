use num_complex::Complex64;

use crate::diffpoly::{FieldId, JetVar, RatExpr};
use crate::model3wave::EvolutionSystem;

use super::compile::{CompiledExpr, JetPoint};
use super::error::NumericsError;
use super::grid::{Grid, GridState};
use super::spectral::{Differentiator, SpatialScheme};

/// Largest `|λ|·dt` on the imaginary axis inside the RK4 stability region, with margin.
const RK4_REACH: f64 = 2.78;

#[derive(Clone, Debug)]
pub struct IntegratorOptions {
    pub scheme: SpatialScheme,
    pub floor: f64,
    /// Keep every `snapshot_every`-th state; the final state is always kept.
    pub snapshot_every: usize,
    /// Project onto `f⁻ = conj(f⁺)` after every step.
    pub reality: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            scheme: SpatialScheme::Spectral,
            floor: 1e-6,
            snapshot_every: 1,
            reality: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<GridState>,
}

impl Trajectory {
    pub fn first(&self) -> &GridState {
        &self.states[0]
    }

    pub fn last(&self) -> &GridState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Evaluates jet expressions at every grid point.
pub struct GridEvaluator {
    diff: Differentiator,
    exprs: Vec<CompiledExpr>,
    order: u8,
    floor: f64,
}

impl GridEvaluator {
    pub fn new(
        grid: Grid,
        scheme: SpatialScheme,
        exprs: &[RatExpr],
        floor: f64,
    ) -> Result<Self, NumericsError> {
        let exprs: Vec<CompiledExpr> = exprs
            .iter()
            .map(CompiledExpr::new)
            .collect::<Result<_, _>>()?;
        let order = exprs.iter().map(CompiledExpr::max_order).max().unwrap_or(0);
        Ok(GridEvaluator {
            diff: Differentiator::new(grid, scheme),
            exprs,
            order,
            floor,
        })
    }

    pub fn eval(&self, fields: &[Vec<Complex64>; 6]) -> Result<Vec<Vec<Complex64>>, NumericsError> {
        let jets: Vec<Vec<Vec<Complex64>>> =
            fields.iter().map(|u| self.diff.jets(u, self.order)).collect();
        let n = self.diff.grid().n();
        let mut out = vec![Vec::with_capacity(n); self.exprs.len()];
        let mut at = JetPoint::zeros(self.order);
        for j in 0..n {
            for f in FieldId::ALL {
                for k in 0..=self.order {
                    at.set(JetVar::new(f, k), jets[f.index()][k as usize][j]);
                }
            }
            for (e, col) in self.exprs.iter().zip(out.iter_mut()) {
                col.push(e.eval(&at, self.floor)?);
            }
        }
        Ok(out)
    }
}

/// Largest stable time step for `sys` on `grid`.
///
/// Only terms linear in a top-order jet count towards the stiffness estimate.
pub fn stability_bound(sys: &EvolutionSystem, grid: Grid) -> f64 {
    let order = sys.order();
    let mut scale: f64 = 0.0;
    for f in FieldId::ALL {
        let e = sys.rhs(f);
        if !e.is_polynomial() {
            continue;
        }
        for (m, c) in e.numerator().terms() {
            if let [(v, 1)] = m.factors() {
                if v.order == order {
                    let c = c
                        .as_constant()
                        .and_then(|c| num_traits::ToPrimitive::to_f64(&c))
                        .unwrap_or(0.0);
                    scale = scale.max(c.abs());
                }
            }
        }
    }
    if scale == 0.0 {
        return f64::INFINITY;
    }
    RK4_REACH / (scale * grid.k_max().powi(order as i32))
}

/// Classical RK4 in time with spatial derivatives from `opts.scheme`.
pub fn integrate_flow(
    sys: &EvolutionSystem,
    s0: &GridState,
    dt: f64,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory, NumericsError> {
    let bound = stability_bound(sys, s0.grid);
    if !(dt > 0.0) || dt > bound {
        return Err(NumericsError::StabilityViolation { dt, bound });
    }
    let rhs: Vec<RatExpr> = FieldId::ALL.iter().map(|&f| sys.rhs(f).clone()).collect();
    let eval = GridEvaluator::new(s0.grid, opts.scheme, &rhs, opts.floor)?;
    let f = |u: &[Vec<Complex64>; 6]| -> Result<[Vec<Complex64>; 6], NumericsError> {
        Ok(eval.eval(u)?.try_into().expect("six right-hand sides"))
    };

    let mut state = s0.clone();
    state.check_finite()?;
    let mut states = vec![state.clone()];
    let steps = ((t_end - s0.t) / dt - 1e-9).ceil().max(0.0) as usize;
    for i in 1..=steps {
        let h = if i == steps { t_end - state.t } else { dt };
        let u = &state.fields;
        let k1 = f(u)?;
        let k2 = f(&axpy(u, &k1, h / 2.0))?;
        let k3 = f(&axpy(u, &k2, h / 2.0))?;
        let k4 = f(&axpy(u, &k3, h))?;
        for c in 0..6 {
            for j in 0..k1[c].len() {
                let inc = (k1[c][j] + (k2[c][j] + k3[c][j]) * 2.0 + k4[c][j]) * (h / 6.0);
                state.fields[c][j] += inc;
            }
        }
        state.t = if i == steps { t_end } else { state.t + h };
        if opts.reality {
            state.enforce_reality();
        }
        state.check_finite()?;
        if i % opts.snapshot_every.max(1) == 0 || i == steps {
            states.push(state.clone());
        }
    }
    Ok(Trajectory { states })
}

fn axpy(u: &[Vec<Complex64>; 6], k: &[Vec<Complex64>; 6], h: f64) -> [Vec<Complex64>; 6] {
    std::array::from_fn(|c| u[c].iter().zip(&k[c]).map(|(a, b)| a + b * h).collect())
}

/// `∫ density dx` for every state, by the periodic trapezoid rule.
pub fn functional_monitor(
    traj: &Trajectory,
    density: &RatExpr,
    scheme: SpatialScheme,
    floor: f64,
) -> Result<Vec<(f64, Complex64)>, NumericsError> {
    let grid = traj.first().grid;
    let eval = GridEvaluator::new(grid, scheme, std::slice::from_ref(density), floor)?;
    traj.states
        .iter()
        .map(|s| {
            let vals = eval.eval(&s.fields)?;
            let sum: Complex64 = vals[0].iter().sum();
            Ok((s.t, sum * grid.spacing()))
        })
        .collect()
}

/// `max_t |I(t) − I(0)| / |I(0)|`, or the absolute drift when `I(0)` vanishes.
pub fn relative_drift(series: &[(f64, Complex64)]) -> f64 {
    let Some(&(_, first)) = series.first() else {
        return 0.0;
    };
    let scale = if first.norm() > 0.0 { first.norm() } else { 1.0 };
    series
        .iter()
        .map(|(_, v)| (v - first).norm() / scale)
        .fold(0.0, f64::max)
}
