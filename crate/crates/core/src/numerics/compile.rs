use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::diffpoly::{DiffPoly, FieldId, JetVar, Monomial, RatExpr};

use super::error::NumericsError;

/// Values of all six fields and their first `order` spatial derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    order: u8,
    values: Vec<Complex64>,
}

impl JetPoint {
    pub fn zeros(order: u8) -> Self {
        JetPoint {
            order,
            values: vec![Complex64::new(0.0, 0.0); 6 * (order as usize + 1)],
        }
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    fn slot(&self, v: JetVar) -> usize {
        v.field.index() * (self.order as usize + 1) + v.order as usize
    }

    pub fn get(&self, v: JetVar) -> Result<Complex64, NumericsError> {
        if v.order > self.order {
            return Err(NumericsError::JetOrderUnavailable {
                requested: v.order,
                available: self.order,
            });
        }
        Ok(self.values[self.slot(v)])
    }

    pub fn set(&mut self, v: JetVar, z: Complex64) {
        let i = self.slot(v);
        self.values[i] = z;
    }

    pub fn value(&self, f: FieldId) -> Complex64 {
        self.values[self.slot(JetVar::new(f, 0))]
    }

    /// Largest distance over every stored jet value.
    pub fn max_distance(&self, other: &JetPoint) -> f64 {
        let order = self.order.min(other.order);
        FieldId::ALL
            .iter()
            .flat_map(|&f| (0..=order).map(move |k| JetVar::new(f, k)))
            .map(|v| (self.values[self.slot(v)] - other.values[other.slot(v)]).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<(JetVar, u32)>)>,
}

impl CompiledPoly {
    fn new(p: &DiffPoly) -> Result<Self, NumericsError> {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let c = c.as_constant().ok_or_else(|| unresolved(c.symbols()))?;
                Ok((c.to_f64().unwrap_or(f64::NAN), m.factors().to_vec()))
            })
            .collect::<Result<_, NumericsError>>()?;
        Ok(CompiledPoly { terms })
    }

    fn eval(&self, at: &JetPoint) -> Result<Complex64, NumericsError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, factors) in &self.terms {
            acc += eval_monomial(factors, at)? * c;
        }
        Ok(acc)
    }
}

fn unresolved(symbols: impl IntoIterator<Item = crate::diffpoly::ParamSymbol>) -> NumericsError {
    let name = symbols
        .into_iter()
        .next()
        .map(|s| s.name().to_string())
        .unwrap_or_default();
    NumericsError::UnresolvedParameter(name)
}

fn eval_monomial(factors: &[(JetVar, u32)], at: &JetPoint) -> Result<Complex64, NumericsError> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &(v, e) in factors {
        acc *= at.get(v)?.powu(e);
    }
    Ok(acc)
}

/// A rational jet expression with numeric coefficients, ready for pointwise evaluation.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: CompiledPoly,
    den_vars: Vec<(JetVar, u32)>,
    den_factors: Vec<(CompiledPoly, u32, String)>,
    max_order: u8,
}

impl CompiledExpr {
    pub fn new(e: &RatExpr) -> Result<Self, NumericsError> {
        let den = e.denominator();
        let den_factors = den
            .factors()
            .iter()
            .map(|(f, k)| Ok((CompiledPoly::new(f)?, *k, f.to_display())))
            .collect::<Result<_, NumericsError>>()?;
        Ok(CompiledExpr {
            num: CompiledPoly::new(e.numerator())?,
            den_vars: monomial_factors(den.monomial()),
            den_factors,
            max_order: e.max_order().unwrap_or(0),
        })
    }

    /// Highest derivative order the expression reads.
    pub fn max_order(&self) -> u8 {
        self.max_order
    }

    /// Evaluate, failing when any denominator factor is smaller than `floor` in modulus.
    pub fn eval(&self, at: &JetPoint, floor: f64) -> Result<Complex64, NumericsError> {
        let mut den = Complex64::new(1.0, 0.0);
        for &(v, e) in &self.den_vars {
            let z = at.get(v)?;
            check_floor(z, floor, || v.to_string())?;
            den *= z.powu(e);
        }
        for (p, e, text) in &self.den_factors {
            let z = p.eval(at)?;
            check_floor(z, floor, || text.clone())?;
            den *= z.powu(*e);
        }
        Ok(self.num.eval(at)? / den)
    }
}

fn monomial_factors(m: &Monomial) -> Vec<(JetVar, u32)> {
    m.factors().to_vec()
}

fn check_floor(z: Complex64, floor: f64, name: impl FnOnce() -> String) -> Result<(), NumericsError> {
    if z.norm() < floor || !z.norm().is_finite() {
        return Err(NumericsError::DenominatorUnderflow {
            factor: name(),
            magnitude: z.norm(),
            step: None,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::parse_expr;

    fn point(vals: &[(FieldId, u8, f64)]) -> JetPoint {
        let mut p = JetPoint::zeros(2);
        for &(f, k, v) in vals {
            p.set(JetVar::new(f, k), Complex64::new(v, 0.0));
        }
        p
    }

    #[test]
    fn evaluates_quotients() {
        use FieldId::*;
        let e = CompiledExpr::new(&parse_expr("(p10' + 1/2)/(m11^2*(m01 + 1))").unwrap()).unwrap();
        let p = point(&[(P10, 1, 3.0), (M11, 0, 2.0), (M01, 0, 1.0)]);
        let v = e.eval(&p, 1e-6).unwrap();
        assert!((v.re - 3.5 / 8.0).abs() < 1e-15);
        assert_eq!(e.max_order(), 1);
    }

    #[test]
    fn floor_is_enforced() {
        let e = CompiledExpr::new(&parse_expr("1/m10").unwrap()).unwrap();
        let p = point(&[(FieldId::M10, 0, 1e-9)]);
        assert!(matches!(
            e.eval(&p, 1e-6),
            Err(NumericsError::DenominatorUnderflow { .. })
        ));
    }

    #[test]
    fn parameters_must_be_resolved() {
        let e = parse_expr("nu11*p11'").unwrap();
        assert!(matches!(
            CompiledExpr::new(&e),
            Err(NumericsError::UnresolvedParameter(n)) if n == "nu11"
        ));
    }
}
