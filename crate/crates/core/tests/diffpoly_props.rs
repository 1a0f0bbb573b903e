use proptest::prelude::*;
use threewave_core::diffpoly::{
    euler_operator, format_expr, identity_images, int, parse_expr, substitute_fields, FieldId,
    ParamPoly, ParamSymbol, RatExpr,
};

fn jet() -> impl Strategy<Value = RatExpr> {
    (0usize..6, 0u8..3).prop_map(|(f, k)| RatExpr::jet(FieldId::ALL[f], k))
}

fn coeff() -> impl Strategy<Value = RatExpr> {
    prop_oneof![
        4 => (-4i64..5).prop_map(RatExpr::integer),
        1 => Just(RatExpr::param(ParamSymbol::new("b").unwrap())),
        1 => (1i64..4).prop_map(|n| RatExpr::rational(threewave_core::diffpoly::rat(1, n))),
    ]
}

fn monomial_term() -> impl Strategy<Value = RatExpr> {
    (coeff(), prop::collection::vec(jet(), 0..3)).prop_map(|(c, vs)| {
        vs.iter().fold(c, |acc, v| acc.mul_ref(v))
    })
}

fn poly() -> impl Strategy<Value = RatExpr> {
    prop::collection::vec(monomial_term(), 1..4).prop_map(|ts| RatExpr::sum(&ts))
}

/// Polynomial, polynomial over a field power, or polynomial over a binomial factor.
fn expr() -> impl Strategy<Value = RatExpr> {
    prop_oneof![
        2 => poly(),
        2 => (poly(), 3usize..6, 1i32..3).prop_map(|(p, f, k)| {
            p.mul_ref(&RatExpr::field(FieldId::ALL[f]).pow(-k).unwrap())
        }),
        1 => (poly(), 0usize..3).prop_map(|(p, f)| {
            let den = RatExpr::field(FieldId::ALL[f]).add_ref(&RatExpr::field(FieldId::M11));
            p.div_ref(&den.add_ref(&RatExpr::integer(1))).unwrap()
        }),
    ]
}

fn images() -> impl Strategy<Value = threewave_core::diffpoly::FieldImages> {
    (0usize..6, poly(), 3usize..6).prop_map(|(target, p, d)| {
        let mut m = identity_images();
        let img = p.div_ref(&RatExpr::field(FieldId::ALL[d])).unwrap();
        m.insert(FieldId::ALL[target], img);
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_is_associative(a in expr(), b in expr(), c in expr()) {
        let l = a.add_ref(&b).add_ref(&c);
        let r = a.add_ref(&b.add_ref(&c));
        prop_assert!(l.equals(&r));
    }

    #[test]
    fn multiplication_distributes(a in expr(), b in expr(), c in expr()) {
        let l = a.mul_ref(&b.add_ref(&c));
        let r = a.mul_ref(&b).add_ref(&a.mul_ref(&c));
        prop_assert!(l.equals(&r));
    }

    #[test]
    fn d_is_a_derivation(a in expr(), b in expr()) {
        let l = a.mul_ref(&b).dx().unwrap();
        let r = a.dx().unwrap().mul_ref(&b).add_ref(&a.mul_ref(&b.dx().unwrap()));
        prop_assert!(l.equals(&r));
    }

    #[test]
    fn substitution_commutes_with_d(e in expr(), s in images()) {
        let l = substitute_fields(&e.dx().unwrap(), &s);
        let r = substitute_fields(&e, &s).and_then(|x| x.dx());
        match (l, r) {
            (Ok(l), Ok(r)) => prop_assert!(l.equals(&r)),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (l, r) => prop_assert!(false, "mismatch {:?} vs {:?}", l, r),
        }
    }

    #[test]
    fn euler_annihilates_total_derivatives(g in expr()) {
        let dg = g.dx().unwrap();
        for f in FieldId::ALL {
            prop_assert!(euler_operator(&dg, f).unwrap().is_zero());
        }
    }

    #[test]
    fn cross_multiplication_is_an_equivalence(a in expr(), b in poly(), c in poly()) {
        // b/b and c/c give differently presented copies of a.
        prop_assume!(!b.is_zero() && !c.is_zero());
        let a1 = a.mul_ref(&b).div_ref(&b).unwrap();
        let a2 = a.mul_ref(&c).div_ref(&c).unwrap();
        prop_assert!(a.equals(&a));
        prop_assert_eq!(a1.equals(&a2), a2.equals(&a1));
        prop_assert!(a.equals(&a1) && a1.equals(&a2) && a.equals(&a2));
    }

    #[test]
    fn parse_format_round_trip(e in expr()) {
        let text = format_expr(&e);
        let back = parse_expr(&text).unwrap();
        prop_assert!(back.is_identical(&e), "{} reparsed as {}", text, format_expr(&back));
    }

    #[test]
    fn identity_substitution_fixes_everything(e in expr()) {
        prop_assert!(substitute_fields(&e, &identity_images()).unwrap().is_identical(&e));
    }

    #[test]
    fn subtraction_from_self_is_zero(e in expr()) {
        prop_assert!(e.sub_ref(&e).is_zero());
        let scaled = e.scale(&ParamPoly::constant(int(3)));
        prop_assert!(scaled.sub_ref(&e).sub_ref(&e).sub_ref(&e).is_zero());
    }
}
