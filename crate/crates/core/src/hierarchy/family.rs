use std::collections::BTreeMap;

use crate::diffpoly::{FieldId, ParamPoly, ParamSymbol, RatExpr, Rational};
use crate::model3wave::EvolutionSystem;

use super::error::HierarchyError;

/// A flow whose right-hand sides depend polynomially on symbolic parameters.
#[derive(Clone, Debug)]
pub struct FlowFamily {
    name: String,
    params: Vec<ParamSymbol>,
    system: EvolutionSystem,
    degree: u8,
}

impl FlowFamily {
    pub fn new(
        name: impl Into<String>,
        params: Vec<ParamSymbol>,
        system: EvolutionSystem,
        degree: u8,
    ) -> Self {
        let fam = FlowFamily {
            name: name.into(),
            params,
            system,
            degree,
        };
        debug_assert_eq!(fam.system.order(), fam.degree);
        fam
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Parameters in solving order: the ones listed last are preferred free.
    pub fn params(&self) -> &[ParamSymbol] {
        &self.params
    }

    pub fn system(&self) -> &EvolutionSystem {
        &self.system
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn rhs(&self, f: FieldId) -> &RatExpr {
        self.system.rhs(f)
    }

    /// Substitute parameter values (numbers or polynomials in other parameters).
    pub fn specialize(
        &self,
        values: &BTreeMap<ParamSymbol, ParamPoly>,
    ) -> Result<EvolutionSystem, HierarchyError> {
        Ok(self.system.substitute_params(values)?)
    }

    pub fn specialize_numeric(
        &self,
        values: &[(&str, Rational)],
    ) -> Result<EvolutionSystem, HierarchyError> {
        let map = values
            .iter()
            .map(|(n, v)| (sym(n), ParamPoly::constant(v.clone())))
            .collect();
        self.specialize(&map)
    }
}

pub(crate) fn sym(name: &str) -> ParamSymbol {
    ParamSymbol::new(name).expect("valid built-in parameter name")
}

fn var(name: &str) -> RatExpr {
    RatExpr::param(sym(name))
}

/// How the f⁻ rows of the first-degree ansatz are signed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    /// f⁻ rows mirror the f⁺ rows with the same signs.
    AsWritten,
    /// f⁻ rows carry an overall minus sign.
    Negated,
}

impl SignConvention {
    pub fn name(self) -> &'static str {
        match self {
            SignConvention::AsWritten => "as-written",
            SignConvention::Negated => "negated",
        }
    }
}

/// `((c+b)·p11, b·p10, c·p01, −c·m01, −b·m10, −(c+b)·m11)`.
pub fn zero_degree_family() -> FlowFamily {
    use FieldId::*;
    let (b, c) = (var("b"), var("c"));
    let bc = b.add_ref(&c);
    let f = RatExpr::field;
    let sys = EvolutionSystem::new(
        "zero-degree",
        [
            (P11, bc.mul_ref(&f(P11))),
            (P10, b.mul_ref(&f(P10))),
            (P01, c.mul_ref(&f(P01))),
            (M01, c.mul_ref(&f(M01)).neg_ref()),
            (M10, b.mul_ref(&f(M10)).neg_ref()),
            (M11, bc.mul_ref(&f(M11)).neg_ref()),
        ],
    );
    FlowFamily::new("zero-degree", vec![sym("b"), sym("c")], sys, 0)
}

pub fn first_degree_family() -> FlowFamily {
    first_degree_family_with(SignConvention::AsWritten)
}

/// First-degree ansatz: transport plus one quadratic coupling per field.
pub fn first_degree_family_with(conv: SignConvention) -> FlowFamily {
    use FieldId::*;
    let f = RatExpr::field;
    let j = |x| RatExpr::jet(x, 1);
    let row = |nu: &str, own: FieldId, gamma: &str, a: FieldId, b: FieldId| {
        var(nu)
            .mul_ref(&j(own))
            .add_ref(&var(gamma).mul_ref(&f(a)).mul_ref(&f(b)))
    };
    let minus = |e: RatExpr| match conv {
        SignConvention::AsWritten => e,
        SignConvention::Negated => e.neg_ref(),
    };
    let sys = EvolutionSystem::new(
        format!("first-degree ({})", conv.name()),
        [
            (P11, row("nu11", P11, "gamma11", P10, P01)),
            (P10, row("nu10", P10, "gamma10", M01, P11)),
            (P01, row("nu01", P01, "gamma01", M10, P11)),
            (M01, minus(row("nu01", M01, "gamma01", P10, M11))),
            (M10, minus(row("nu10", M10, "gamma10", P01, M11))),
            (M11, minus(row("nu11", M11, "gamma11", M10, M01))),
        ],
    );
    let params = ["gamma11", "gamma10", "gamma01", "nu11", "nu01", "nu10"]
        .map(sym)
        .to_vec();
    FlowFamily::new("first-degree", params, sys, 1)
}

/// Parameter order for the second-degree family; `b10`, `c10` come last so they
/// end up free.
pub const SECOND_DEGREE_PARAMS: [&str; 18] = [
    "nu11", "nu10", "nu01", "gamma11", "gamma10", "gamma01", "delta11", "delta10", "delta01",
    "a11", "a10", "a01", "b11", "b01", "c11", "c01", "b10", "c10",
];

/// The 18-parameter second-degree ansatz.
pub fn second_degree_family() -> FlowFamily {
    use FieldId::*;
    let f = RatExpr::field;
    let j = RatExpr::jet;
    let r = |s: &str| {
        var(&format!("a{s}"))
            .scale_rational(&crate::diffpoly::int(2))
            .mul_ref(&f(P11))
            .mul_ref(&f(M11))
            .add_ref(&var(&format!("b{s}")).mul_ref(&f(P10)).mul_ref(&f(M10)))
            .add_ref(&var(&format!("c{s}")).mul_ref(&f(P01)).mul_ref(&f(M01)))
    };
    // ν·u'' + γ·x·y' + δ·z·w' + R·u
    let row = |s: &str, u: FieldId, x: FieldId, y: FieldId, z: FieldId, w: FieldId| {
        RatExpr::sum(&[
            var(&format!("nu{s}")).mul_ref(&j(u, 2)),
            var(&format!("gamma{s}")).mul_ref(&f(x)).mul_ref(&j(y, 1)),
            var(&format!("delta{s}")).mul_ref(&f(z)).mul_ref(&j(w, 1)),
            r(s).mul_ref(&f(u)),
        ])
    };
    let sys = EvolutionSystem::new(
        "second-degree",
        [
            (P11, row("11", P11, P10, P01, P01, P10)),
            (P10, row("10", P10, M01, P11, P11, M01)),
            (P01, row("01", P01, M10, P11, P11, M10)),
            (M01, row("01", M01, P10, M11, M11, P10).neg_ref()),
            (M10, row("10", M10, P01, M11, M11, P01).neg_ref()),
            (M11, row("11", M11, M10, M01, M01, M10).neg_ref()),
        ],
    );
    FlowFamily::new(
        "second-degree",
        SECOND_DEGREE_PARAMS.map(sym).to_vec(),
        sys,
        2,
    )
}
