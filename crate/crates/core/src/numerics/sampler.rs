use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::diffpoly::{FieldId, JetVar, RatExpr};
use crate::model3wave::{EvolutionSystem, Substitution};

use super::compile::{CompiledExpr, JetPoint};
use super::error::NumericsError;

/// A solution known at arbitrary `(x, t)` together with its spatial jets.
pub trait SolutionSampler: Send + Sync {
    /// All six fields and their spatial derivatives up to `order`.
    fn jets(&self, x: f64, t: f64, order: u8) -> Result<JetPoint, NumericsError>;

    fn label(&self) -> String;
}

pub type SharedSampler = Arc<dyn SolutionSampler>;

/// Closed-form seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedKind {
    /// All plus fields vanish; the minus fields are exponentials.
    PlusVacuum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedParams {
    pub k: f64,
    pub m: f64,
    pub c: f64,
}

impl Default for SeedParams {
    fn default() -> Self {
        SeedParams { k: 1.0, m: -1.0, c: 10.0 }
    }
}

/// `m10 = e^{k(x−t)}`, `m01 = e^{m(x+t)}`, `m11 = C − e^{(k+m)x + (m−k)t}/(2(m−k))`.
#[derive(Clone, Copy, Debug)]
struct PlusVacuum(SeedParams);

impl SolutionSampler for PlusVacuum {
    fn jets(&self, x: f64, t: f64, order: u8) -> Result<JetPoint, NumericsError> {
        let SeedParams { k, m, c } = self.0;
        let mut out = JetPoint::zeros(order);
        let e10 = (k * (x - t)).exp();
        let e01 = (m * (x + t)).exp();
        let e11 = ((k + m) * x + (m - k) * t).exp() / (2.0 * (m - k));
        for j in 0..=order {
            let p = j as i32;
            out.set(JetVar::new(FieldId::M10, j), re(k.powi(p) * e10));
            out.set(JetVar::new(FieldId::M01, j), re(m.powi(p) * e01));
            let m11 = if j == 0 { c - e11 } else { -(k + m).powi(p) * e11 };
            out.set(JetVar::new(FieldId::M11, j), re(m11));
        }
        Ok(out)
    }

    fn label(&self) -> String {
        let SeedParams { k, m, c } = self.0;
        format!("plus-vacuum(k={k}, m={m}, C={c})")
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Closed-form solution of the three-wave system.
pub fn seed_solution(kind: SeedKind, params: SeedParams) -> Result<SharedSampler, NumericsError> {
    match kind {
        SeedKind::PlusVacuum => {
            if params.k == params.m {
                return Err(NumericsError::ResonantParameters(params.k));
            }
            Ok(Arc::new(PlusVacuum(params)))
        }
    }
}

/// Image of a sampler under a substitution; jets of the image come from
/// symbolic derivatives of the field images, compiled on first use.
pub struct TransformedSampler {
    inner: SharedSampler,
    name: String,
    images: [RatExpr; 6],
    floor: f64,
    compiled: Mutex<Vec<Arc<[CompiledExpr; 6]>>>,
}

impl TransformedSampler {
    fn derivatives(&self, order: u8) -> Result<Vec<Arc<[CompiledExpr; 6]>>, NumericsError> {
        let mut cache = self.compiled.lock().expect("cache lock");
        while cache.len() <= order as usize {
            let j = cache.len() as u32;
            let row: Vec<CompiledExpr> = self
                .images
                .iter()
                .map(|e| CompiledExpr::new(&e.total_x_derivative(j)?))
                .collect::<Result<_, NumericsError>>()?;
            cache.push(Arc::new(row.try_into().expect("six fields")));
        }
        Ok(cache[..=order as usize].to_vec())
    }
}

impl SolutionSampler for TransformedSampler {
    fn jets(&self, x: f64, t: f64, order: u8) -> Result<JetPoint, NumericsError> {
        let rows = self.derivatives(order)?;
        let need = rows
            .iter()
            .flat_map(|r| r.iter().map(CompiledExpr::max_order))
            .max()
            .unwrap_or(0);
        let base = self.inner.jets(x, t, need)?;
        let mut out = JetPoint::zeros(order);
        for (j, row) in rows.iter().enumerate() {
            for f in FieldId::ALL {
                out.set(JetVar::new(f, j as u8), row[f.index()].eval(&base, self.floor)?);
            }
        }
        Ok(out)
    }

    fn label(&self) -> String {
        format!("{}({})", self.name, self.inner.label())
    }
}

/// Evaluate a substitution pointwise on a sampler.
pub fn apply_transformation_numeric(
    t: &Substitution,
    s: SharedSampler,
    floor: f64,
) -> SharedSampler {
    let images = FieldId::ALL.map(|f| t.image(f).clone());
    Arc::new(TransformedSampler {
        inner: s,
        name: t.provenance().to_string(),
        images,
        floor,
        compiled: Mutex::new(Vec::new()),
    })
}

/// One field of a sampler multiplied by a constant, as a negative control.
pub struct ScaledSampler {
    inner: SharedSampler,
    field: FieldId,
    factor: f64,
}

impl ScaledSampler {
    pub fn new(inner: SharedSampler, field: FieldId, factor: f64) -> SharedSampler {
        Arc::new(ScaledSampler { inner, field, factor })
    }
}

impl SolutionSampler for ScaledSampler {
    fn jets(&self, x: f64, t: f64, order: u8) -> Result<JetPoint, NumericsError> {
        let mut p = self.inner.jets(x, t, order)?;
        for k in 0..=order {
            let v = JetVar::new(self.field, k);
            p.set(v, p.get(v)? * self.factor);
        }
        Ok(p)
    }

    fn label(&self) -> String {
        format!("{} with {} scaled by {}", self.inner.label(), self.field, self.factor)
    }
}

/// Rectangular sample of space-time points.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Window {
    /// `nx × nt` points spread evenly over `[x0, x1] × [t0, t1]`, endpoints included.
    pub fn uniform(x: (f64, f64), t: (f64, f64), nx: usize, nt: usize) -> Self {
        let spread = |(a, b): (f64, f64), n: usize| -> Vec<f64> {
            if n <= 1 {
                return vec![a];
            }
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        Window {
            xs: spread(x, nx),
            ts: spread(t, nt),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts
            .iter()
            .flat_map(move |&t| self.xs.iter().map(move |&x| (x, t)))
    }
}

/// Largest pointwise difference of two samplers' jets over a window.
pub fn sampler_distance(
    a: &dyn SolutionSampler,
    b: &dyn SolutionSampler,
    window: &Window,
    order: u8,
) -> Result<f64, NumericsError> {
    let mut worst: f64 = 0.0;
    for (x, t) in window.points() {
        worst = worst.max(a.jets(x, t, order)?.max_distance(&b.jets(x, t, order)?));
    }
    Ok(worst)
}

/// Where a sampler fails a system of evolution equations most.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeResidual {
    pub max: f64,
    pub field: FieldId,
    pub x: f64,
    pub t: f64,
}

/// Max-norm of `∂_t f − rhs` with fourth-order central differences in `t` of step `tau`.
pub fn pde_residual(
    s: &dyn SolutionSampler,
    sys: &EvolutionSystem,
    window: &Window,
    tau: f64,
    floor: f64,
) -> Result<PdeResidual, NumericsError> {
    let rhs: Vec<CompiledExpr> = FieldId::ALL
        .iter()
        .map(|&f| CompiledExpr::new(sys.rhs(f)))
        .collect::<Result<_, _>>()?;
    let order = sys.order();
    let mut worst = PdeResidual {
        max: 0.0,
        field: FieldId::P11,
        x: f64::NAN,
        t: f64::NAN,
    };
    for (x, t) in window.points() {
        let at = s.jets(x, t, order)?;
        let shifted: Vec<JetPoint> = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|o| s.jets(x, t + o * tau, 0))
            .collect::<Result<_, _>>()?;
        for f in FieldId::ALL {
            let v = |i: usize| shifted[i].value(f);
            let dt = (v(0) - v(1) * 8.0 + v(2) * 8.0 - v(3)) / (12.0 * tau);
            let r = (dt - rhs[f.index()].eval(&at, floor)?).norm();
            if r > worst.max || worst.x.is_nan() {
                worst = PdeResidual { max: r, field: f, x, t };
            }
        }
    }
    Ok(worst)
}

/// Sample a sampler onto a grid at time `t`.
pub fn sample_state(
    s: &dyn SolutionSampler,
    grid: super::grid::Grid,
    t: f64,
) -> Result<super::grid::GridState, NumericsError> {
    let mut state = super::grid::GridState::zeros(grid);
    state.t = t;
    for (j, x) in grid.points().enumerate() {
        let p = s.jets(x, t, 0)?;
        for f in FieldId::ALL {
            state.field_mut(f)[j] = p.value(f);
        }
    }
    Ok(state)
}
