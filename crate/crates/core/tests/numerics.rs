use std::f64::consts::TAU;

use num_complex::Complex64;
use threewave_core::diffpoly::{FieldId, JetVar, RatExpr};
use threewave_core::model3wave::{
    base_system, inverse_transformation, transformation, EvolutionSystem, Substitution,
    TransformId,
};
use threewave_core::numerics::*;

const FLOOR: f64 = 1e-6;

fn seed() -> SharedSampler {
    seed_solution(SeedKind::PlusVacuum, SeedParams::default()).unwrap()
}

fn window() -> Window {
    Window::uniform((0.0, TAU), (0.2, 0.8), 9, 4)
}

fn residual(s: &dyn SolutionSampler, tau: f64) -> f64 {
    pde_residual(s, &base_system(), &window(), tau, FLOOR).unwrap().max
}

#[test]
fn advection_converges_at_fourth_order() {
    let grid = Grid::new(16, TAU).unwrap();
    let sys = EvolutionSystem::new("advection", [(FieldId::P01, RatExpr::jet(FieldId::P01, 1))]);
    let s0 = GridState::from_fn(grid, |f, x| {
        Complex64::new(if f == FieldId::P01 { x.sin() } else { 0.0 }, 0.0)
    });
    let error = |dt: f64| {
        let traj = integrate_flow(&sys, &s0, dt, 2.0, &IntegratorOptions::default()).unwrap();
        let end = traj.last();
        let sq: f64 = grid
            .points()
            .zip(end.field(FieldId::P01))
            .map(|(x, z)| (z - Complex64::new((x + 2.0).sin(), 0.0)).norm_sqr())
            .sum();
        (sq * grid.spacing()).sqrt()
    };
    let (e1, e2, e3) = (error(0.2), error(0.1), error(0.05));
    for r in [e1 / e2, e2 / e3] {
        assert!((r - 16.0).abs() <= 3.2, "ratio {r}");
    }
}

#[test]
fn seed_satisfies_three_wave_in_closed_form() {
    // Time derivatives written out by hand from the closed form.
    let SeedParams { k, m, c } = SeedParams::default();
    let s = seed();
    for (x, t) in window().points() {
        let p = s.jets(x, t, 1).unwrap();
        let e = ((k + m) * x + (m - k) * t).exp();
        let dt_m10 = -k * (k * (x - t)).exp();
        let dt_m01 = m * (m * (x + t)).exp();
        let dt_m11 = -0.5 * e;
        assert!((p.get(JetVar::new(FieldId::M10, 1)).unwrap().re + dt_m10).abs() < 1e-12);
        assert!((p.get(JetVar::new(FieldId::M01, 1)).unwrap().re - dt_m01).abs() < 1e-12);
        let rhs = -0.5 * p.value(FieldId::M01) * p.value(FieldId::M10);
        assert!((rhs.re - dt_m11).abs() < 1e-12);
        assert!((p.value(FieldId::M11).re - (c - e / (2.0 * (m - k)))).abs() < 1e-12);
    }
}

#[test]
fn seed_keeps_m11_away_from_zero() {
    let s = seed();
    let w = Window::uniform((0.0, TAU), (0.0, 1.0), 33, 11);
    let min = w
        .points()
        .map(|(x, t)| s.jets(x, t, 0).unwrap().value(FieldId::M11).norm())
        .fold(f64::INFINITY, f64::min);
    assert!(min > 5.0, "{min}");
}

#[test]
fn resonant_seed_is_rejected() {
    let p = SeedParams { k: 2.0, m: 2.0, c: 1.0 };
    assert!(matches!(
        seed_solution(SeedKind::PlusVacuum, p),
        Err(NumericsError::ResonantParameters(_))
    ));
}

#[test]
fn t3_image_inverts_m11() {
    let s = seed();
    let img = apply_transformation_numeric(&transformation(TransformId::T3).unwrap(), s.clone(), FLOOR);
    for (x, t) in window().points() {
        let a = img.jets(x, t, 0).unwrap().value(FieldId::P11);
        let b = s.jets(x, t, 0).unwrap().value(FieldId::M11);
        assert!((a - b.inv()).norm() < 1e-14);
    }
}

#[test]
fn identity_substitution_preserves_samples() {
    let s = seed();
    let same = apply_transformation_numeric(&Substitution::identity(), s.clone(), FLOOR);
    assert_eq!(sampler_distance(same.as_ref(), s.as_ref(), &window(), 2).unwrap(), 0.0);
}

#[test]
fn inverse_t3_restores_the_seed() {
    let s = seed();
    let there = apply_transformation_numeric(&transformation(TransformId::T3).unwrap(), s.clone(), FLOOR);
    let back = apply_transformation_numeric(&inverse_transformation(TransformId::T3).unwrap(), there, FLOOR);
    let d = sampler_distance(back.as_ref(), s.as_ref(), &window(), 0).unwrap();
    assert!(d < 1e-10, "{d}");
}

#[test]
fn seed_residual_is_fourth_order_in_tau() {
    let s = seed();
    let ratio = residual(s.as_ref(), 0.1) / residual(s.as_ref(), 0.05);
    assert!((ratio - 16.0).abs() <= 3.2, "ratio {ratio}");
}

#[test]
fn t3_image_residual_is_fourth_order_in_tau() {
    let img = apply_transformation_numeric(&transformation(TransformId::T3).unwrap(), seed(), FLOOR);
    let ratio = residual(img.as_ref(), 0.1) / residual(img.as_ref(), 0.05);
    assert!((ratio - 16.0).abs() <= 3.2, "ratio {ratio}");
}

#[test]
fn corrupted_sampler_is_flagged() {
    let img = apply_transformation_numeric(&transformation(TransformId::T3).unwrap(), seed(), FLOOR);
    let clean = residual(img.as_ref(), 0.01);
    let bad = ScaledSampler::new(img, FieldId::P10, 1.01);
    let r = residual(bad.as_ref(), 0.01);
    assert!(r > 1e-4 && r > 100.0 * clean, "{r} vs {clean}");
}

#[test]
fn empty_chain_returns_the_seed() {
    let s = seed();
    let out = chain_generate(0, 0, s.clone(), &ChainOptions::default()).unwrap();
    assert!(out.steps.is_empty());
    assert_eq!(sampler_distance(out.sampler.as_ref(), s.as_ref(), &window(), 1).unwrap(), 0.0);
}

#[test]
fn chain_one_one_matches_t3() {
    let s = seed();
    let out = chain_generate(1, 1, s.clone(), &ChainOptions::default()).unwrap();
    assert_eq!(out.steps.len(), 2);
    assert!(out.steps.iter().all(|st| st.residual < 1e-6), "{:?}", out.steps);
    let direct = apply_transformation_numeric(&transformation(TransformId::T3).unwrap(), s, FLOOR);
    let d = sampler_distance(out.sampler.as_ref(), direct.as_ref(), &window(), 0).unwrap();
    assert!(d < 1e-10, "{d}");
}

#[test]
fn double_t1_on_the_vacuum_divides_by_zero() {
    // T1 sends m10 of this seed to zero, and the next T1 divides by m10.
    let e = chain_generate(2, 0, seed(), &ChainOptions::default()).err().unwrap();
    assert!(
        matches!(e, NumericsError::DenominatorUnderflow { step: Some(2), .. }),
        "{e}"
    );
}

#[test]
fn three_wave_densities_are_conserved_and_cross_density_drifts() {
    use threewave_core::diffpoly::parse_expr;
    use threewave_core::hierarchy::{density_one, density_two};
    let grid = Grid::new(64, TAU).unwrap();
    let s0 = smooth_random_state(grid, 0.1, 4, 11);
    let opts = IntegratorOptions {
        snapshot_every: 20,
        ..Default::default()
    };
    let traj = integrate_flow(&base_system(), &s0, 2e-3, 0.5, &opts).unwrap();
    let drift = |e: &RatExpr| {
        relative_drift(&functional_monitor(&traj, e, SpatialScheme::Spectral, FLOOR).unwrap())
    };
    assert!(drift(&density_one()) < 1e-8);
    assert!(drift(&density_two()) < 1e-8);
    assert!(drift(&parse_expr("p10*m01").unwrap()) > 1e-3);
}

#[test]
fn reality_mode_keeps_minus_fields_conjugate() {
    let grid = Grid::new(32, TAU).unwrap();
    let mut s0 = smooth_random_state(grid, 0.1, 3, 5);
    s0.enforce_reality();
    let opts = IntegratorOptions {
        reality: true,
        ..Default::default()
    };
    let end = integrate_flow(&base_system(), &s0, 1e-2, 0.2, &opts).unwrap();
    let s = end.last();
    for (a, b) in s.field(FieldId::P10).iter().zip(s.field(FieldId::M10)) {
        assert_eq!(a.conj(), *b);
    }
}
