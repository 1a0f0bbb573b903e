use crate::diffpoly::{antiderivative_x, euler_witness, parse_expr, AffineSpace, RatExpr};
use crate::model3wave::{evolution_derivative, EvolutionSystem};

use super::error::HierarchyError;

/// A density together with a flux satisfying `ρ_t = D(J)` along `flow`.
#[derive(Clone, Debug)]
pub struct DensityFluxPair {
    pub density: RatExpr,
    pub flux: RatExpr,
    pub flow: String,
}

impl DensityFluxPair {
    /// True when `other` differs from the flux by a constant.
    pub fn flux_matches(&self, other: &RatExpr) -> Result<bool, HierarchyError> {
        Ok(self.flux.sub_ref(other).dx()?.is_zero())
    }
}

/// Check that `density` is conserved and recover its flux.
///
/// Rational rates need a `candidate` flux; polynomial rates are integrated.
pub fn conservation_check_with(
    density: &RatExpr,
    flow: &EvolutionSystem,
    candidate: Option<&RatExpr>,
) -> Result<DensityFluxPair, HierarchyError> {
    let rate = evolution_derivative(density, flow)?;
    if let Some((_, witness)) = euler_witness(&rate)? {
        return Err(HierarchyError::NotConserved {
            density: density.to_text(),
            witness: witness.to_text(),
        });
    }
    let flux = antiderivative_x(&rate, candidate)?;
    Ok(DensityFluxPair {
        density: density.clone(),
        flux,
        flow: flow.name().to_string(),
    })
}

pub fn conservation_check(
    density: &RatExpr,
    flow: &EvolutionSystem,
) -> Result<DensityFluxPair, HierarchyError> {
    conservation_check_with(density, flow, None)
}

/// `2·p11·m11 + p10·m10`.
pub fn density_one() -> RatExpr {
    parse_expr("2*p11*m11 + p10*m10").expect("parses")
}

/// `2·p11·m11 + p01·m01`.
pub fn density_two() -> RatExpr {
    parse_expr("2*p11*m11 + p01*m01").expect("parses")
}

/// Flux of the first density under the second-degree flow, in its parameters.
pub fn second_degree_flux_one() -> RatExpr {
    parse_expr(
        "2*a11*(p11'*m11 - p11*m11') + 2*b10*(p10'*m10 - p10*m10') \
         + gamma10*(m01*m10*p11 - p01*p10*m11)",
    )
    .expect("parses")
}

/// Flux of the second density under the second-degree flow, in its parameters.
pub fn second_degree_flux_two() -> RatExpr {
    parse_expr(
        "2*a11*(p11'*m11 - p11*m11') + 2*c01*(p01'*m01 - p01*m01') \
         + gamma01*(m01*m10*p11 - p01*p10*m11)",
    )
    .expect("parses")
}

/// Rewrite a parametrised expression on a solved constraint space.
pub fn on_space(e: &RatExpr, space: &AffineSpace) -> Result<RatExpr, HierarchyError> {
    Ok(e.substitute_params(&space.parametrization())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model3wave::base_system;

    #[test]
    fn three_wave_fluxes() {
        let sys = base_system();
        let one = conservation_check(&density_one(), &sys).unwrap();
        assert!(one.flux.equals(&parse_expr("-p10*m10").unwrap()));
        let two = conservation_check(&density_two(), &sys).unwrap();
        assert!(two.flux.equals(&parse_expr("p01*m01").unwrap()));
    }

    #[test]
    fn cross_density_is_not_conserved() {
        let err = conservation_check(&parse_expr("p10*m01").unwrap(), &base_system()).unwrap_err();
        assert!(matches!(err, HierarchyError::NotConserved { .. }));
    }
}
