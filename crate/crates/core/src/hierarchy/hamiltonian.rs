use crate::diffpoly::{euler_operator, rat, FieldId, RatExpr, Rational};
use crate::model3wave::EvolutionSystem;

use super::derive::SignResolution;
use super::error::HierarchyError;

/// Constant ultralocal pairing `{p_ij, m_ij}` with an orientation sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    sign: i8,
}

impl PoissonStructure {
    /// `sign` must be `1` or `-1`.
    pub fn new(sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        PoissonStructure { sign }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `{f, conjugate(f)}` for a plus-field `f`; antisymmetric in the other order.
    pub fn pairing(&self, f: FieldId) -> Rational {
        let c = match f {
            FieldId::P11 | FieldId::M11 => rat(1, 2),
            _ => rat(1, 1),
        };
        if f.is_plus() {
            c
        } else {
            -c
        }
    }
}

/// `ḟ = σ·{f, f*}·δH/δf*` for each field and its conjugate `f*`.
pub fn hamiltonian_flow(
    density: &RatExpr,
    poisson: &PoissonStructure,
) -> Result<EvolutionSystem, HierarchyError> {
    let sigma = Rational::from_integer(poisson.sign.into());
    let mut rows = Vec::new();
    for f in FieldId::ALL {
        let var = euler_operator(density, f.conjugate())?;
        let coeff = &sigma * poisson.pairing(f);
        rows.push((f, var.scale_rational(&coeff)));
    }
    Ok(EvolutionSystem::new("hamiltonian", rows))
}

/// The first-degree Hamiltonian density with symbolic ν and γ11.
pub fn first_degree_hamiltonian() -> RatExpr {
    let text = "nu11*(p11*m11' - p11'*m11) + (1/2)*nu10*(p10*m10' - p10'*m10) \
                + (1/2)*nu01*(p01*m01' - p01'*m01) + 2*gamma11*(p11*m10*m01 - p01*p10*m11)";
    crate::diffpoly::parse_expr(text).expect("built-in density parses")
}

/// Result of comparing the Hamiltonian flow against the constrained family.
#[derive(Clone, Debug)]
pub struct HamiltonianCheck {
    pub sign: Option<i8>,
    /// Per-field difference for the best sign tried (empty when it matches).
    pub mismatches: Vec<(FieldId, RatExpr)>,
}

/// Try both orientations and keep the one reproducing the constrained family.
pub fn check_hamiltonian(first: &SignResolution) -> Result<HamiltonianCheck, HierarchyError> {
    let param = first.space.parametrization();
    let target = first.family.specialize(&param)?;
    let h = first_degree_hamiltonian().substitute_params(&param)?;
    let mut best: Option<HamiltonianCheck> = None;
    for sign in [1i8, -1] {
        let flow = hamiltonian_flow(&h, &PoissonStructure::new(sign))?;
        let mismatches: Vec<(FieldId, RatExpr)> = FieldId::ALL
            .iter()
            .filter_map(|f| {
                let d = flow.rhs(*f).sub_ref(target.rhs(*f));
                (!d.is_zero()).then_some((*f, d))
            })
            .collect();
        if mismatches.is_empty() {
            return Ok(HamiltonianCheck {
                sign: Some(sign),
                mismatches,
            });
        }
        if best.as_ref().map_or(true, |b| mismatches.len() < b.mismatches.len()) {
            best = Some(HamiltonianCheck {
                sign: None,
                mismatches,
            });
        }
    }
    Ok(best.expect("two signs tried"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::parse_expr;
    use crate::hierarchy::derive::resolve_first_degree;
    use crate::model3wave::TransformId;

    #[test]
    fn zero_density_gives_zero_flow() {
        let flow = hamiltonian_flow(&RatExpr::zero(), &PoissonStructure::new(1)).unwrap();
        assert!(FieldId::ALL.iter().all(|f| flow.rhs(*f).is_zero()));
    }

    #[test]
    fn number_density_generates_phase_flow() {
        let h = parse_expr("p10*m10").unwrap();
        for s in [1i8, -1] {
            let flow = hamiltonian_flow(&h, &PoissonStructure::new(s)).unwrap();
            let sf = RatExpr::integer(s as i64);
            assert!(flow.rhs(FieldId::P10).equals(&sf.mul_ref(&RatExpr::field(FieldId::P10))));
            assert!(flow
                .rhs(FieldId::M10)
                .equals(&sf.mul_ref(&RatExpr::field(FieldId::M10)).neg_ref()));
        }
    }

    #[test]
    fn first_degree_flow_is_hamiltonian() {
        let res = resolve_first_degree(&TransformId::ALL).unwrap();
        let check = check_hamiltonian(&res).unwrap();
        assert_eq!(check.sign, Some(-1), "{:?}", check.mismatches);
    }
}
