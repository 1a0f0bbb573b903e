use std::collections::BTreeMap;
use std::sync::OnceLock;

use threewave_core::diffpoly::{int, parse_expr, rat, AffineSpace, ParamPoly, ParamSymbol, Rational};
use threewave_core::hierarchy::*;
use threewave_core::model3wave::{
    base_system, evolution_derivative, shift_flow, symmetry_residual, transformation, TransformId,
};

fn sym(n: &str) -> ParamSymbol {
    ParamSymbol::new(n).unwrap()
}

fn second_degree_space() -> &'static AffineSpace {
    static SPACE: OnceLock<AffineSpace> = OnceLock::new();
    SPACE.get_or_init(|| {
        derive_parameter_constraints(&second_degree_family(), &TransformId::ALL).unwrap()
    })
}

/// Second-degree solution worked out independently by hand elimination,
/// as a function of the two free parameters.
fn second_degree_oracle(b10: i64, c10: i64) -> BTreeMap<ParamSymbol, Rational> {
    let (b, c) = (b10, c10);
    [
        ("a11", -2 * c),
        ("a10", b + c),
        ("a01", -b - 3 * c),
        ("b11", b + c),
        ("b10", b),
        ("b01", c),
        ("c11", -b - 3 * c),
        ("c10", c),
        ("c01", -b - 4 * c),
        ("delta10", 4 * c),
        ("delta11", b + c),
        ("delta01", -4 * c),
        ("gamma10", -2 * (b + c)),
        ("gamma11", b + 3 * c),
        ("gamma01", -2 * b - 6 * c),
        ("nu11", -2 * c),
        ("nu10", 2 * b),
        ("nu01", 2 * (-b - 4 * c)),
    ]
    .into_iter()
    .map(|(n, v)| (sym(n), int(v)))
    .collect()
}

#[test]
fn first_degree_space_matches_stated_relations() {
    let res = resolve_first_degree(&TransformId::ALL).unwrap();
    assert_eq!(res.convention, SignConvention::AsWritten);
    assert_eq!(res.space.dimension(), 2);
    let stated = space_from_relations(&FIRST_DEGREE_RELATIONS, res.family.params()).unwrap();
    assert!(res.space.equals(&stated));

    let daa = res.family.specialize_numeric(&[
        ("nu01", int(1)),
        ("nu10", int(-1)),
        ("nu11", int(0)),
        ("gamma10", int(1)),
        ("gamma01", int(1)),
        ("gamma11", rat(-1, 2)),
    ]);
    assert!(daa.unwrap().equals(&base_system()));
    assert!(res.space.contains_point(&three_wave_point()));
    assert!(res.space.contains_point(&shift_point()));
    let shift = res
        .family
        .specialize(&shift_point().into_iter().map(|(k, v)| (k, ParamPoly::constant(v))).collect())
        .unwrap();
    assert!(shift.equals(&shift_flow()));
}

#[test]
fn first_degree_generic_point_is_a_symmetry() {
    let res = resolve_first_degree(&TransformId::ALL).unwrap();
    let flow = res.family.specialize(&res.space.parametrization()).unwrap();
    for t in TransformId::ALL {
        let r = symmetry_residual(&flow, &transformation(t).unwrap()).unwrap();
        assert!(r.values().all(|e| e.is_zero()), "{t}");
    }
}

#[test]
fn second_degree_space_matches_stated_relations() {
    let space = second_degree_space();
    assert_eq!(space.dimension(), 2);
    let free: Vec<&str> = space.free_parameters().iter().map(|p| p.name()).collect();
    assert_eq!(free, ["b10", "c10"]);

    let relations: Vec<&str> = HM_RELATIONS
        .iter()
        .chain(GD_RELATIONS.iter())
        .chain(NU_RELATIONS.iter())
        .copied()
        .collect();
    let stated = space_from_relations(&relations, second_degree_family().params()).unwrap();
    assert!(space.equals(&stated));

    for (b, c) in [(1, 0), (0, 1), (3, -2)] {
        assert!(space.contains_point(&second_degree_oracle(b, c)), "({b}, {c})");
    }
    assert!(is_symmetric(&hm_matrix(space)));
}

#[test]
fn second_degree_generic_point_is_a_symmetry() {
    let fam = second_degree_family();
    let flow = fam.specialize(&second_degree_space().parametrization()).unwrap();
    for t in TransformId::ALL {
        let r = symmetry_residual(&flow, &transformation(t).unwrap()).unwrap();
        assert!(r.values().all(|e| e.is_zero()), "{t}");
    }
}

#[test]
fn hamiltonian_orientation_is_recorded() {
    let res = resolve_first_degree(&TransformId::ALL).unwrap();
    let check = check_hamiltonian(&res).unwrap();
    assert_eq!(check.sign, Some(-1));
    assert!(check.mismatches.is_empty());
}

#[test]
fn densities_are_conserved_under_three_wave() {
    let one = conservation_check(&density_one(), &base_system()).unwrap();
    let two = conservation_check(&density_two(), &base_system()).unwrap();
    assert!(one.flux_matches(&parse_expr("-p10*m10").unwrap()).unwrap());
    assert!(two.flux_matches(&parse_expr("p01*m01").unwrap()).unwrap());
}

#[test]
fn densities_are_conserved_under_second_degree() {
    let space = second_degree_space();
    let flow = second_degree_family().specialize(&space.parametrization()).unwrap();
    for (rho, flux) in [
        (density_one(), second_degree_flux_one()),
        (density_two(), second_degree_flux_two()),
    ] {
        let pair = conservation_check(&rho, &flow).unwrap();
        assert!(pair.flux_matches(&on_space(&flux, space).unwrap()).unwrap());
    }
}

#[test]
fn cross_density_is_rejected() {
    let e = conservation_check(&parse_expr("p10*m01").unwrap(), &base_system()).unwrap_err();
    assert!(matches!(e, HierarchyError::NotConserved { .. }));
}

#[test]
fn appendix_identities_hold_with_corrected_reading() {
    for o in verify_appendix_identities(AppendixReading::Corrected).unwrap() {
        assert!(o.ok, "{o}");
    }
}

#[test]
fn sec63_potential_rate_matches_shifted_flux() {
    // Direct recomputation at a numeric point of the constrained space.
    let point: BTreeMap<_, _> = second_degree_oracle(2, -1)
        .into_iter()
        .map(|(k, v)| (k, ParamPoly::constant(v)))
        .collect();
    let flow = second_degree_family().specialize(&point).unwrap();
    let g = parse_expr("m10*m01/m11 + 2*m11'/m11").unwrap();
    let flux = second_degree_flux_one().substitute_params(&point).unwrap();
    let shifted = threewave_core::model3wave::delta(&flux, TransformId::T3).unwrap();
    let rate = evolution_derivative(&g, &flow).unwrap();
    assert!(rate.sub_ref(&shifted).is_zero());
}

#[test]
fn perturbed_rig3_is_rejected() {
    let o = rig3_perturbed().unwrap();
    assert!(!o.ok);
    assert!(o.require().is_err());
}
