use std::collections::BTreeMap;

use super::error::DiffPolyError;
use super::field::{FieldId, JetVar, DEFAULT_MAX_ORDER};
use super::param::rat;
use super::poly::{DiffPoly, Monomial};
use super::rational::RatExpr;

/// Field images for a substitution; a missing entry means "no image".
pub type FieldImages = BTreeMap<FieldId, RatExpr>;

/// Lazily computed prolongations `D^k(image)` of each field image.
pub struct Prolongation<'a> {
    images: &'a FieldImages,
    cache: BTreeMap<FieldId, Vec<RatExpr>>,
    max_order: u8,
}

impl<'a> Prolongation<'a> {
    pub fn new(images: &'a FieldImages) -> Self {
        Self::with_cap(images, DEFAULT_MAX_ORDER)
    }

    pub fn with_cap(images: &'a FieldImages, max_order: u8) -> Self {
        Prolongation {
            images,
            cache: BTreeMap::new(),
            max_order,
        }
    }

    /// Image of the jet variable `v`, i.e. `D^order(images[field])`.
    pub fn image(&mut self, v: JetVar) -> Result<&RatExpr, DiffPolyError> {
        let base = self
            .images
            .get(&v.field)
            .ok_or(DiffPolyError::MissingFieldImage(v.field))?;
        let chain = self.cache.entry(v.field).or_insert_with(|| vec![base.clone()]);
        while chain.len() <= v.order as usize {
            let next = chain
                .last()
                .expect("nonempty")
                .total_x_derivative_capped(1, self.max_order)?;
            chain.push(next);
        }
        Ok(&chain[v.order as usize])
    }

    fn monomial(&mut self, m: &Monomial) -> Result<RatExpr, DiffPolyError> {
        let mut out = RatExpr::one();
        for &(v, e) in m.factors() {
            let img = self.image(v)?.pow(e as i32)?;
            out = out.mul_ref(&img);
        }
        Ok(out)
    }

    pub fn poly(&mut self, p: &DiffPoly) -> Result<RatExpr, DiffPolyError> {
        let mut parts = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            parts.push(self.monomial(m)?.scale(c));
        }
        Ok(RatExpr::sum(&parts))
    }

    pub fn apply(&mut self, e: &RatExpr) -> Result<RatExpr, DiffPolyError> {
        let num = self.poly(e.numerator())?;
        if e.is_polynomial() {
            return Ok(num);
        }
        let den = e.denominator();
        let mut d = self.monomial(den.monomial())?;
        for (f, k) in den.factors() {
            d = d.mul_ref(&self.poly(f)?.pow(*k as i32)?);
        }
        num.div_ref(&d)
    }
}

/// Replace every jet variable `(f, k)` by `D^k(images[f])`.
pub fn substitute_fields(e: &RatExpr, images: &FieldImages) -> Result<RatExpr, DiffPolyError> {
    Prolongation::new(images).apply(e)
}

/// Identity images for all six fields.
pub fn identity_images() -> FieldImages {
    FieldId::ALL.iter().map(|&f| (f, RatExpr::field(f))).collect()
}

/// Variational derivative `Σ_k (−D)^k ∂e/∂f^(k)`.
pub fn euler_operator(e: &RatExpr, field: FieldId) -> Result<RatExpr, DiffPolyError> {
    let Some(top) = e.max_order_of(field) else {
        return Ok(RatExpr::zero());
    };
    let mut parts = Vec::new();
    for k in 0..=top {
        let p = e.partial(JetVar::new(field, k));
        if p.is_zero() {
            continue;
        }
        let mut d = p.total_x_derivative(k as u32)?;
        if k % 2 == 1 {
            d = d.neg_ref();
        }
        parts.push(d);
    }
    Ok(RatExpr::sum(&parts))
}

/// First field whose Euler image does not vanish, with that image.
pub fn euler_witness(e: &RatExpr) -> Result<Option<(FieldId, RatExpr)>, DiffPolyError> {
    for f in FieldId::ALL {
        let img = euler_operator(e, f)?;
        if !img.is_zero() {
            return Ok(Some((f, img)));
        }
    }
    Ok(None)
}

/// True iff `e` has vanishing variational derivative in every field.
pub fn is_total_x_derivative(e: &RatExpr) -> bool {
    matches!(euler_witness(e), Ok(None))
}

/// Find `G` with `D(G) = e`.
///
/// Polynomial inputs are integrated constructively; rational inputs need a
/// candidate, which is checked.
pub fn antiderivative_x(e: &RatExpr, candidate: Option<&RatExpr>) -> Result<RatExpr, DiffPolyError> {
    if let Some((field, img)) = euler_witness(e)? {
        return Err(DiffPolyError::NotExact {
            field,
            witness: img.to_text(),
        });
    }
    if let Some(c) = candidate {
        let residual = c.dx()?.sub_ref(e);
        if !residual.is_zero() {
            return Err(DiffPolyError::CandidateMismatch {
                residual: residual.to_text(),
            });
        }
        return Ok(c.clone());
    }
    if !e.is_polynomial() {
        return Err(DiffPolyError::NoConstructivePotential);
    }
    homotopy_integral(e.numerator()).map(RatExpr::from)
}

/// Homotopy formula, applied per homogeneous degree `d` of the input:
/// `G_d = (1/d) Σ_f Σ_{k≥1} Σ_{j<k} f^(j) (−D)^{k−1−j} ∂e_d/∂f^(k)`.
fn homotopy_integral(p: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    let mut by_degree: BTreeMap<u32, DiffPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        by_degree
            .entry(m.degree())
            .or_insert_with(DiffPoly::zero)
            .add_term(m.clone(), c.clone());
    }
    let mut out = DiffPoly::zero();
    for (deg, part) in by_degree {
        if deg == 0 {
            continue;
        }
        let mut g = DiffPoly::zero();
        for v in part.vars() {
            if v.order == 0 {
                continue;
            }
            let dp = part.partial(v);
            for j in 0..v.order {
                let mut t = dp.clone();
                let times = v.order - 1 - j;
                for _ in 0..times {
                    t = t.total_derivative(DEFAULT_MAX_ORDER)?;
                }
                if times % 2 == 1 {
                    t = -&t;
                }
                g.add_assign_ref(&t.mul_ref(&DiffPoly::var(JetVar::new(v.field, j))));
            }
        }
        out.add_assign_ref(&g.scale_rational(&rat(1, deg as i64)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::param::int;
    use FieldId::*;

    fn f(x: FieldId) -> RatExpr {
        RatExpr::field(x)
    }
    fn j(x: FieldId, k: u8) -> RatExpr {
        RatExpr::jet(x, k)
    }

    #[test]
    fn prolongation_of_reciprocal() {
        let mut images = identity_images();
        images.insert(P10, f(M10).recip().unwrap());
        let out = substitute_fields(&j(P10, 1), &images).unwrap();
        let expect = &j(M10, 1).neg_ref() / &f(M10).pow(2).unwrap();
        assert!(out.is_identical(&expect));
    }

    #[test]
    fn identity_substitution_is_identity() {
        let e = &(&j(P11, 2) * &f(M01)) / &(&f(M11) + &f(P10));
        let out = substitute_fields(&e, &identity_images()).unwrap();
        assert!(out.is_identical(&e));
    }

    #[test]
    fn missing_image_is_reported() {
        let mut images = identity_images();
        images.remove(&M11);
        assert_eq!(
            substitute_fields(&f(M11), &images),
            Err(DiffPolyError::MissingFieldImage(M11))
        );
    }

    #[test]
    fn substitution_can_zero_a_denominator() {
        let mut images = identity_images();
        images.insert(M11, RatExpr::zero());
        assert_eq!(
            substitute_fields(&f(P11).div_ref(&f(M11)).unwrap(), &images),
            Err(DiffPolyError::DivisionByZeroExpr)
        );
    }

    #[test]
    fn euler_examples() {
        assert!(euler_operator(&(&f(P10) * &j(P10, 1)), P10).unwrap().is_zero());
        let sq = f(P10).pow(2).unwrap();
        assert!(euler_operator(&sq, P10)
            .unwrap()
            .is_identical(&f(P10).scale_rational(&int(2))));
        let e = &j(P10, 1) * &f(M10);
        assert!(euler_operator(&e, M10).unwrap().is_identical(&j(P10, 1)));
        assert!(euler_operator(&e, P10)
            .unwrap()
            .is_identical(&j(M10, 1).neg_ref()));
    }

    #[test]
    fn exactness_examples() {
        let e = &(&j(P11, 1) * &f(M11)) + &(&f(P11) * &j(M11, 1));
        assert!(is_total_x_derivative(&e));
        assert!(!is_total_x_derivative(&(&f(P10) * &f(M10))));
    }

    #[test]
    fn antiderivative_of_product_rule() {
        let e = &(&j(P11, 1) * &f(M11)) + &(&f(P11) * &j(M11, 1));
        let g = antiderivative_x(&e, None).unwrap();
        assert!(g.is_identical(&(&f(P11) * &f(M11))));
    }

    #[test]
    fn antiderivative_of_higher_order_terms() {
        let g = &(&j(P10, 2) * &f(M01).pow(3).unwrap()) + &j(M11, 1).scale_rational(&rat(3, 5));
        let e = g.dx().unwrap();
        let back = antiderivative_x(&e, None).unwrap();
        assert!(back.is_identical(&g));
    }

    #[test]
    fn antiderivative_rejects_non_exact_and_rational() {
        let err = antiderivative_x(&(&f(P10) * &f(M10)), None).unwrap_err();
        assert!(matches!(err, DiffPolyError::NotExact { .. }));
        let e = (&j(M11, 1) / &f(M11)).dx().unwrap();
        assert_eq!(
            antiderivative_x(&e, None),
            Err(DiffPolyError::NoConstructivePotential)
        );
        let good = &j(M11, 1) / &f(M11);
        assert!(antiderivative_x(&e, Some(&good)).unwrap().is_identical(&good));
        let bad = &j(M11, 1) / &f(M01);
        assert!(matches!(
            antiderivative_x(&e, Some(&bad)),
            Err(DiffPolyError::CandidateMismatch { .. })
        ));
    }
}
