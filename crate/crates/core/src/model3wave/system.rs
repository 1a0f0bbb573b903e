use std::collections::BTreeMap;
use std::fmt;

use crate::diffpoly::{
    rat, DiffPoly, DiffPolyError, FieldId, FieldImages, ParamPoly, ParamSymbol, Prolongation,
    RatExpr,
};

/// `∂ₜ f = rhs(f)` for the six fields, with right-hand sides in x-jet variables.
#[derive(Clone, Debug)]
pub struct EvolutionSystem {
    name: String,
    rhs: FieldImages,
}

impl EvolutionSystem {
    /// Build from a right-hand side per field; absent fields evolve trivially.
    pub fn new(name: impl Into<String>, rhs: impl IntoIterator<Item = (FieldId, RatExpr)>) -> Self {
        let mut map: FieldImages = FieldId::ALL.iter().map(|&f| (f, RatExpr::zero())).collect();
        map.extend(rhs);
        EvolutionSystem {
            name: name.into(),
            rhs: map,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rhs(&self, f: FieldId) -> &RatExpr {
        &self.rhs[&f]
    }

    pub fn rhs_map(&self) -> &FieldImages {
        &self.rhs
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        EvolutionSystem {
            name: name.into(),
            rhs: self.rhs.clone(),
        }
    }

    pub fn with_rhs(&self, f: FieldId, e: RatExpr) -> Self {
        let mut out = self.clone();
        out.rhs.insert(f, e);
        out
    }

    /// Negate the nonlinear (degree ≥ 2) part of one right-hand side.
    pub fn with_flipped_coupling(&self, f: FieldId) -> Self {
        let e = self.rhs(f);
        let mut linear = RatExpr::zero();
        let mut coupling = RatExpr::zero();
        if e.is_polynomial() {
            for (m, c) in e.numerator().terms() {
                let t = RatExpr::from(DiffPoly::term(m.clone(), c.clone()));
                if m.degree() >= 2 {
                    coupling = coupling.add_ref(&t);
                } else {
                    linear = linear.add_ref(&t);
                }
            }
        } else {
            coupling = e.clone();
        }
        self.with_rhs(f, linear.sub_ref(&coupling))
            .renamed(format!("{} (flipped {f})", self.name))
    }

    pub fn substitute_params(
        &self,
        map: &BTreeMap<ParamSymbol, ParamPoly>,
    ) -> Result<Self, DiffPolyError> {
        let mut rhs = FieldImages::new();
        for (f, e) in &self.rhs {
            rhs.insert(*f, e.substitute_params(map)?);
        }
        Ok(EvolutionSystem {
            name: self.name.clone(),
            rhs,
        })
    }

    /// Highest jet order on any right-hand side.
    pub fn order(&self) -> u8 {
        self.rhs.values().filter_map(|e| e.max_order()).max().unwrap_or(0)
    }

    /// Componentwise canonical equality.
    pub fn equals(&self, other: &EvolutionSystem) -> bool {
        FieldId::ALL.iter().all(|f| self.rhs(*f).equals(other.rhs(*f)))
    }
}

impl fmt::Display for EvolutionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fid) in FieldId::ALL.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{fid}_t = {}", self.rhs(*fid))?;
        }
        Ok(())
    }
}

/// The six-field three-wave system in characteristic time/space variables.
pub fn base_system() -> EvolutionSystem {
    use FieldId::*;
    let f = RatExpr::field;
    let half = rat(1, 2);
    EvolutionSystem::new(
        "three-wave",
        [
            (P11, f(P01).mul_ref(&f(P10)).scale_rational(&-half.clone())),
            (P10, RatExpr::jet(P10, 1).neg_ref().add_ref(&f(P11).mul_ref(&f(M01)))),
            (P01, RatExpr::jet(P01, 1).add_ref(&f(P11).mul_ref(&f(M10)))),
            (M01, RatExpr::jet(M01, 1).add_ref(&f(M11).mul_ref(&f(P10)))),
            (M10, RatExpr::jet(M10, 1).neg_ref().add_ref(&f(M11).mul_ref(&f(P01)))),
            (M11, f(M01).mul_ref(&f(M10)).scale_rational(&-half)),
        ],
    )
}

/// `ḟ = f′` for every field.
pub fn shift_flow() -> EvolutionSystem {
    EvolutionSystem::new(
        "shift",
        FieldId::ALL.iter().map(|&f| (f, RatExpr::jet(f, 1))),
    )
}

/// Time derivative of `e` along `sys`: `Σ ∂e/∂f^(k) · D^k(rhs(f))`.
pub fn evolution_derivative(e: &RatExpr, sys: &EvolutionSystem) -> Result<RatExpr, DiffPolyError> {
    let mut prolong = Prolongation::new(sys.rhs_map());
    let mut parts = Vec::new();
    for v in e.vars() {
        let rhs = prolong.image(v)?;
        if rhs.is_zero() {
            continue;
        }
        let rhs = rhs.clone();
        parts.push(e.partial(v).mul_ref(&rhs));
    }
    Ok(RatExpr::sum(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::parse_expr;

    fn p(s: &str) -> RatExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn base_system_matches_expected_rows() {
        let s = base_system();
        assert!(s.rhs(FieldId::P11).is_identical(&p("-(1/2)*p10*p01")));
        assert!(s.rhs(FieldId::M01).is_identical(&p("m01' + p10*m11")));
        assert!(s.order() <= 1);
    }

    #[test]
    fn evolution_derivative_examples() {
        let s = base_system();
        let e = evolution_derivative(&p("p11*m11"), &s).unwrap();
        assert!(e.equals(&p("-(1/2)*p01*p10*m11 - (1/2)*p11*m01*m10")));
        assert!(evolution_derivative(&RatExpr::integer(7), &s).unwrap().is_zero());
        let e = evolution_derivative(&p("p10"), &s).unwrap();
        assert!(e.equals(&p("-p10' + p11*m01")));
    }

    #[test]
    fn flipping_negates_only_the_coupling() {
        let s = base_system().with_flipped_coupling(FieldId::P10);
        assert!(s.rhs(FieldId::P10).equals(&p("-p10' - p11*m01")));
        assert!(s.rhs(FieldId::M10).equals(base_system().rhs(FieldId::M10)));
    }
}
