use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use super::error::ModelError;
use super::raw::{on_shell_reduce, raw_transformation, TransformId};
use super::system::{base_system, evolution_derivative, EvolutionSystem};
use crate::diffpoly::{
    identity_images, substitute_fields, FieldId, FieldImages, JetVar, RatExpr,
};

/// A field map `f ↦ image(f)` in x-jet variables.
#[derive(Clone, Debug)]
pub struct Substitution {
    images: FieldImages,
    provenance: String,
}

impl Substitution {
    /// Build from six images; panics if a field is missing.
    pub fn new(images: FieldImages, provenance: impl Into<String>) -> Self {
        assert!(
            FieldId::ALL.iter().all(|f| images.contains_key(f)),
            "substitution needs an image for every field"
        );
        let s = Substitution {
            images,
            provenance: provenance.into(),
        };
        s.warn_on_non_monomial_denominators();
        s
    }

    pub fn identity() -> Self {
        Substitution {
            images: identity_images(),
            provenance: "identity".into(),
        }
    }

    pub fn image(&self, f: FieldId) -> &RatExpr {
        &self.images[&f]
    }

    pub fn images(&self) -> &FieldImages {
        &self.images
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn apply(&self, e: &RatExpr) -> Result<RatExpr, ModelError> {
        Ok(substitute_fields(e, &self.images)?)
    }

    pub fn has_monomial_denominators(&self) -> bool {
        self.images.values().all(RatExpr::has_monomial_denominator)
    }

    fn warn_on_non_monomial_denominators(&self) {
        for (f, e) in &self.images {
            if !e.has_monomial_denominator() {
                log::warn!(
                    "{}: image of {f} has a non-monomial denominator factor",
                    self.provenance
                );
            }
        }
    }

    /// Componentwise canonical equality.
    pub fn equals(&self, other: &Substitution) -> bool {
        FieldId::ALL
            .iter()
            .all(|f| self.image(*f).equals(other.image(*f)))
    }

    /// Fields whose images differ, with `self − other` for each.
    pub fn differences(&self, other: &Substitution) -> Vec<(FieldId, RatExpr)> {
        FieldId::ALL
            .iter()
            .filter_map(|f| {
                let d = self.image(*f).sub_ref(other.image(*f));
                (!d.is_zero()).then_some((*f, d))
            })
            .collect()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (fid, e)) in self.images.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{fid} -> {e}")?;
        }
        Ok(())
    }
}

/// On-shell transformation reduced against an arbitrary system.
pub fn transformation_for(t: TransformId, sys: &EvolutionSystem) -> Result<Substitution, ModelError> {
    let raw = raw_transformation(t);
    let mut images = FieldImages::new();
    for (f, r) in &raw {
        images.insert(*f, on_shell_reduce(r, sys)?);
    }
    Ok(Substitution::new(images, format!("{t} on {}", sys.name())))
}

/// On-shell transformation against the three-wave system; computed once.
pub fn transformation(t: TransformId) -> Result<Substitution, ModelError> {
    static CACHE: [OnceLock<Result<Substitution, ModelError>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[t.index() as usize - 1]
        .get_or_init(|| transformation_for(t, &base_system()))
        .clone()
}

/// `(outer ∘ inner)(u) = outer(inner(u))`.
pub fn compose(outer: &Substitution, inner: &Substitution) -> Result<Substitution, ModelError> {
    let mut images = FieldImages::new();
    for f in FieldId::ALL {
        images.insert(f, substitute_fields(outer.image(f), inner.images())?);
    }
    Ok(Substitution::new(
        images,
        format!("({}) after ({})", outer.provenance, inner.provenance),
    ))
}

/// `substitute(e, T_i) − e`.
pub fn delta(e: &RatExpr, t: TransformId) -> Result<RatExpr, ModelError> {
    Ok(transformation(t)?.apply(e)?.sub_ref(e))
}

/// `evolution_derivative(T(g), F) − F(g)|_{u→T(u)}` for every field `g`.
///
/// `t` must be on-shell with respect to the system whose solutions it maps.
pub fn symmetry_residual(
    flow: &EvolutionSystem,
    t: &Substitution,
) -> Result<BTreeMap<FieldId, RatExpr>, ModelError> {
    let mut out = BTreeMap::new();
    for g in FieldId::ALL {
        let lhs = evolution_derivative(t.image(g), flow)?;
        let rhs = t.apply(flow.rhs(g))?;
        out.insert(g, lhs.sub_ref(&rhs));
    }
    Ok(out)
}

/// Invert a transformation by solving its image equations for the old fields.
///
/// An equation `new_f = image_f(u)` is usable once exactly one old field is
/// still unknown in it, that field occurs only undifferentiated, and the
/// dependence is `A·u + B` or `A/u + B`.
pub fn inverse_of(s: &Substitution) -> Result<Substitution, ModelError> {
    let mut solved: FieldImages = FieldImages::new();
    let mut pending: BTreeSet<FieldId> = FieldId::ALL.into_iter().collect();
    let fail = |reason: String| ModelError::DerivationFailed {
        transform: s.provenance.clone(),
        reason,
    };
    while !pending.is_empty() {
        let mut progress = false;
        for new_f in pending.clone() {
            let eq = s.image(new_f);
            let unknown: BTreeSet<FieldId> = eq
                .fields()
                .into_iter()
                .filter(|g| !solved.contains_key(g))
                .collect();
            if unknown.len() != 1 {
                continue;
            }
            let g = *unknown.iter().next().expect("one");
            if eq.max_order_of(g) != Some(0) {
                continue;
            }
            let Some(sol) = solve_for(eq, g, new_f, &solved)? else {
                continue;
            };
            solved.insert(g, sol);
            pending.remove(&new_f);
            progress = true;
        }
        if !progress {
            let left: Vec<String> = pending.iter().map(|f| f.to_string()).collect();
            return Err(fail(format!("no solvable equation among {}", left.join(", "))));
        }
    }
    if solved.len() != 6 {
        return Err(fail("equations do not determine every field".into()));
    }
    Ok(Substitution::new(
        solved,
        format!("inverse of ({})", s.provenance),
    ))
}

/// Solve `new_f = eq(u)` for `g`, or `None` if `eq` is not of the supported shape.
fn solve_for(
    eq: &RatExpr,
    g: FieldId,
    new_f: FieldId,
    known: &FieldImages,
) -> Result<Option<RatExpr>, ModelError> {
    let v = JetVar::new(g, 0);
    let gexpr = RatExpr::field(g);
    let mentions = |e: &RatExpr| e.vars().contains(&v);
    let slope = eq.partial(v);
    let target = RatExpr::field(new_f);
    if !mentions(&slope) {
        // new = A·g + B
        let b = eq.sub_ref(&slope.mul_ref(&gexpr));
        if mentions(&b) {
            return Ok(None);
        }
        let a = substitute_fields(&slope, known)?;
        let b = substitute_fields(&b, known)?;
        return Ok(Some(target.sub_ref(&b).div_ref(&a)?));
    }
    // new = A/g + B  ⇔  A = −g²·∂eq/∂g
    let a = slope.mul_ref(&gexpr.pow(2)?).neg_ref();
    if mentions(&a) {
        return Ok(None);
    }
    let b = eq.sub_ref(&a.div_ref(&gexpr)?);
    if mentions(&b) {
        return Ok(None);
    }
    let a = substitute_fields(&a, known)?;
    let b = substitute_fields(&b, known)?;
    Ok(Some(a.div_ref(&target.sub_ref(&b))?))
}

/// Derived inverse of the on-shell transformation `t`; computed once.
pub fn inverse_transformation(t: TransformId) -> Result<Substitution, ModelError> {
    static CACHE: [OnceLock<Result<Substitution, ModelError>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[t.index() as usize - 1]
        .get_or_init(|| inverse_of(&transformation(t)?))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::parse_expr;
    use crate::model3wave::system::shift_flow;

    fn p(s: &str) -> RatExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn t3_algebraic_and_derivative_images() {
        let t3 = transformation(TransformId::T3).unwrap();
        assert!(t3.image(FieldId::P10).equals(&p("-m01/m11")));
        assert!(t3
            .image(FieldId::M10)
            .equals(&p("-2*m10' + m11*p01 + (1/2)*m10^2*m01/m11 + m11'*m10/m11")));
        let t2 = transformation(TransformId::T2).unwrap();
        assert!(t2.image(FieldId::P11).equals(&p("p10/m01")));
        assert!(t3.has_monomial_denominators());
    }

    #[test]
    fn base_system_is_invariant_under_t3() {
        let t3 = transformation(TransformId::T3).unwrap();
        let res = symmetry_residual(&base_system(), &t3).unwrap();
        assert!(res.values().all(RatExpr::is_zero));
    }

    #[test]
    fn shift_flow_is_a_symmetry() {
        for t in TransformId::ALL {
            let res = symmetry_residual(&shift_flow(), &transformation(t).unwrap()).unwrap();
            assert!(res.values().all(RatExpr::is_zero), "{t}");
        }
    }

    #[test]
    fn identity_composition() {
        let t3 = transformation(TransformId::T3).unwrap();
        assert!(compose(&Substitution::identity(), &t3).unwrap().equals(&t3));
        assert!(compose(&t3, &Substitution::identity()).unwrap().equals(&t3));
    }

    #[test]
    fn t3_inverse_starts_from_algebraic_rows() {
        let inv = inverse_transformation(TransformId::T3).unwrap();
        assert!(inv.image(FieldId::M11).equals(&p("1/p11")));
        assert!(inv.image(FieldId::M01).equals(&p("-p10/p11")));
        assert!(inv.image(FieldId::M10).equals(&p("p01/p11")));
    }

    #[test]
    fn delta_of_zero_is_zero() {
        assert!(delta(&RatExpr::zero(), TransformId::T1).unwrap().is_zero());
    }

    #[test]
    fn underdetermined_inverse_fails() {
        let mut images = identity_images();
        images.insert(FieldId::P10, p("p10*p01"));
        images.insert(FieldId::P01, p("p10 + p01"));
        let err = inverse_of(&Substitution::new(images, "toy")).unwrap_err();
        assert!(matches!(err, ModelError::DerivationFailed { .. }));
    }
}
