use std::collections::BTreeMap;

use crate::diffpoly::{
    collect_parameter_constraints, parse_expr, solve_linear_constraints_in, AffineSpace,
    DiffPolyError, ParamPoly, ParamSymbol, Rational,
};
use crate::model3wave::{symmetry_residual, transformation, TransformId};

use super::error::HierarchyError;
use super::family::{first_degree_family_with, sym, FlowFamily, SignConvention};

/// Constraints from requiring every residual of every requested transformation
/// to vanish, and their solution space.
pub fn derive_parameter_constraints(
    fam: &FlowFamily,
    transforms: &[TransformId],
) -> Result<AffineSpace, HierarchyError> {
    let mut all: Vec<ParamPoly> = Vec::new();
    for &t in transforms {
        let res = symmetry_residual(fam.system(), &transformation(t)?)?;
        for r in res.values() {
            for c in collect_parameter_constraints(r) {
                if !all.contains(&c) {
                    all.push(c);
                }
            }
        }
    }
    Ok(solve_linear_constraints_in(&all, fam.params())?)
}

/// Outcome of trying both sign conventions of the first-degree ansatz.
#[derive(Clone, Debug)]
pub struct SignResolution {
    pub convention: SignConvention,
    pub family: FlowFamily,
    pub space: AffineSpace,
    /// Dimension of the rejected convention's space, for the report.
    pub rejected_dimension: Option<usize>,
}

/// Parameter values at which the first-degree family is the three-wave system.
pub fn three_wave_point() -> BTreeMap<ParamSymbol, Rational> {
    use crate::diffpoly::{int, rat};
    [
        ("nu01", int(1)),
        ("nu10", int(-1)),
        ("nu11", int(0)),
        ("gamma10", int(1)),
        ("gamma01", int(1)),
        ("gamma11", rat(-1, 2)),
    ]
    .into_iter()
    .map(|(n, v)| (sym(n), v))
    .collect()
}

/// Parameter values at which the first-degree family is the shift flow.
pub fn shift_point() -> BTreeMap<ParamSymbol, Rational> {
    use crate::diffpoly::int;
    [
        ("nu01", int(1)),
        ("nu10", int(1)),
        ("nu11", int(1)),
        ("gamma10", int(0)),
        ("gamma01", int(0)),
        ("gamma11", int(0)),
    ]
    .into_iter()
    .map(|(n, v)| (sym(n), v))
    .collect()
}

/// Keep the convention whose derived space contains the three-wave point.
pub fn resolve_first_degree(transforms: &[TransformId]) -> Result<SignResolution, HierarchyError> {
    let mut rejected = None;
    let mut found = None;
    for conv in [SignConvention::AsWritten, SignConvention::Negated] {
        let fam = first_degree_family_with(conv);
        let space = match derive_parameter_constraints(&fam, transforms) {
            Ok(s) => s,
            Err(HierarchyError::Algebra(DiffPolyError::Inconsistent)) => continue,
            Err(e) => return Err(e),
        };
        if found.is_none() && space.contains_point(&three_wave_point()) {
            found = Some((conv, fam, space));
        } else {
            rejected = Some(space.dimension());
        }
    }
    let (convention, family, space) = found.ok_or(HierarchyError::SignUnresolved)?;
    Ok(SignResolution {
        convention,
        family,
        space,
        rejected_dimension: rejected,
    })
}

/// Parse `lhs = rhs` into the parameter polynomial `lhs − rhs`.
pub fn parse_relation(text: &str) -> Result<ParamPoly, HierarchyError> {
    let (l, r) = text.split_once('=').ok_or_else(|| DiffPolyError::SyntaxError {
        line: 1,
        column: text.len() + 1,
        message: "relation needs `=`".into(),
    })?;
    let as_param = |s: &str| -> Result<ParamPoly, HierarchyError> {
        let e = parse_expr(s)?;
        e.as_constant().ok_or_else(|| {
            HierarchyError::Algebra(DiffPolyError::SyntaxError {
                line: 1,
                column: 1,
                message: format!("`{s}` mentions field variables"),
            })
        })
    };
    Ok(&as_param(l)? - &as_param(r)?)
}

/// Relations among the first-degree parameters as stated in the text.
pub const FIRST_DEGREE_RELATIONS: [&str; 4] = [
    "nu01 - nu10 = 2*gamma10",
    "nu01 + nu10 = 2*nu11",
    "-2*gamma11 = gamma10",
    "gamma10 = gamma01",
];

/// The R-coefficient matrix relations.
pub const HM_RELATIONS: [&str; 7] = [
    "a11 = -2*c10",
    "b11 = a10",
    "c11 = -3*c10 - b10",
    "a10 = c10 + b10",
    "a01 = -3*c10 - b10",
    "b01 = c10",
    "c01 = -b10 - 4*c10",
];

/// The derivative-coupling relations.
pub const GD_RELATIONS: [&str; 6] = [
    "delta10 = 4*c10",
    "gamma10 = -2*(c10 + b10)",
    "2*gamma11 = delta10 - gamma10",
    "2*delta11 = -gamma10",
    "delta01 = -delta10",
    "gamma01 = gamma10 - delta10",
];

/// Leading-order relations tying ν to the R coefficients.
pub const NU_RELATIONS: [&str; 3] = ["nu11 = a11", "nu10 = 2*b10", "nu01 = 2*c01"];

/// Affine space cut out by a list of textual relations over `ambient`.
pub fn space_from_relations(
    relations: &[&str],
    ambient: &[ParamSymbol],
) -> Result<AffineSpace, HierarchyError> {
    let polys = relations
        .iter()
        .map(|r| parse_relation(r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(solve_linear_constraints_in(&polys, ambient)?)
}

/// Rows (11, 10, 01) by columns (a, b, c) of the R coefficients, expressed on `space`.
pub fn hm_matrix(space: &AffineSpace) -> [[ParamPoly; 3]; 3] {
    let param = space.parametrization();
    let entry = |name: String| -> ParamPoly {
        let s = sym(&name);
        param.get(&s).cloned().unwrap_or_else(|| ParamPoly::var(s))
    };
    let rows = ["11", "10", "01"];
    rows.map(|r| ["a", "b", "c"].map(|c| entry(format!("{c}{r}"))))
}

pub fn is_symmetric(m: &[[ParamPoly; 3]; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| m[i][j] == m[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::family::zero_degree_family;

    #[test]
    fn relation_parsing() {
        let p = parse_relation("2*gamma11 = delta10 - gamma10").unwrap();
        assert_eq!(p.to_string(), "-delta10 + gamma10 + 2*gamma11");
        assert!(parse_relation("a11").is_err());
        assert!(parse_relation("a11 = p10").is_err());
    }

    #[test]
    fn zero_degree_family_is_unconstrained() {
        let fam = zero_degree_family();
        let space = derive_parameter_constraints(&fam, &TransformId::ALL).unwrap();
        assert_eq!(space.dimension(), 2);
    }

    #[test]
    fn first_degree_resolution_keeps_written_signs() {
        let res = resolve_first_degree(&TransformId::ALL).unwrap();
        assert_eq!(res.convention, SignConvention::AsWritten);
        assert_eq!(res.space.dimension(), 2);
        assert_eq!(res.rejected_dimension, Some(0));
    }
}
