use std::collections::BTreeMap;
use std::fmt;

use super::error::ModelError;
use super::system::{evolution_derivative, EvolutionSystem};
use crate::diffpoly::{Ast, FieldId, RatExpr, RawOp};

/// Expression tree that may contain time derivatives.
///
/// The directional operators `D10 = Dt + Dx`, `D01 = Dt − Dx` and `D11 = 2·Dt`
/// are expanded when constructed.
#[derive(Clone, Debug)]
pub enum RawExpr {
    Leaf(RatExpr),
    Add(Vec<RawExpr>),
    Mul(Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, i32),
    Dx(Box<RawExpr>),
    Dt(Box<RawExpr>),
}

impl RawExpr {
    pub fn leaf(e: RatExpr) -> Self {
        RawExpr::Leaf(e)
    }

    pub fn field(f: FieldId) -> Self {
        RawExpr::Leaf(RatExpr::field(f))
    }

    pub fn integer(n: i64) -> Self {
        RawExpr::Leaf(RatExpr::integer(n))
    }

    pub fn add(self, rhs: RawExpr) -> Self {
        RawExpr::Add(vec![self, rhs])
    }

    pub fn sub(self, rhs: RawExpr) -> Self {
        RawExpr::Add(vec![self, rhs.neg()])
    }

    pub fn mul(self, rhs: RawExpr) -> Self {
        RawExpr::Mul(vec![self, rhs])
    }

    pub fn div(self, rhs: RawExpr) -> Self {
        RawExpr::Div(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        RawExpr::Neg(Box::new(self))
    }

    pub fn pow(self, k: i32) -> Self {
        RawExpr::Pow(Box::new(self), k)
    }

    pub fn dx(self) -> Self {
        RawExpr::Dx(Box::new(self))
    }

    pub fn dt(self) -> Self {
        RawExpr::Dt(Box::new(self))
    }

    pub fn d10(self) -> Self {
        self.clone().dt().add(self.dx())
    }

    pub fn d01(self) -> Self {
        self.clone().dt().sub(self.dx())
    }

    pub fn d11(self) -> Self {
        RawExpr::integer(2).mul(self.dt())
    }

    /// Convert a parsed raw-mode expression.
    pub fn from_ast(ast: &Ast) -> RawExpr {
        match ast {
            Ast::Num(r) => RawExpr::Leaf(RatExpr::rational(r.clone())),
            Ast::Param(p) => RawExpr::Leaf(RatExpr::param(p.clone())),
            Ast::Jet(v) => RawExpr::Leaf(RatExpr::jet(v.field, v.order)),
            Ast::Neg(a) => RawExpr::from_ast(a).neg(),
            Ast::Add(a, b) => RawExpr::from_ast(a).add(RawExpr::from_ast(b)),
            Ast::Sub(a, b) => RawExpr::from_ast(a).sub(RawExpr::from_ast(b)),
            Ast::Mul(a, b) => RawExpr::from_ast(a).mul(RawExpr::from_ast(b)),
            Ast::Div(a, b) => RawExpr::from_ast(a).div(RawExpr::from_ast(b)),
            Ast::Pow(a, k) => RawExpr::from_ast(a).pow(*k),
            Ast::Apply(RawOp::Dt, a) => RawExpr::from_ast(a).dt(),
            Ast::Apply(RawOp::Dx, a) => RawExpr::from_ast(a).dx(),
        }
    }
}

impl fmt::Display for RawExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawExpr::Leaf(e) => write!(f, "({e})"),
            RawExpr::Add(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            RawExpr::Mul(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            RawExpr::Neg(a) => write!(f, "-{a}"),
            RawExpr::Div(a, b) => write!(f, "{a}/{b}"),
            RawExpr::Pow(a, k) => write!(f, "{a}^{k}"),
            RawExpr::Dx(a) => write!(f, "dx({a})"),
            RawExpr::Dt(a) => write!(f, "dt({a})"),
        }
    }
}

/// Eliminate every time derivative using `sys`, leaving an x-jet expression.
pub fn on_shell_reduce(e: &RawExpr, sys: &EvolutionSystem) -> Result<RatExpr, ModelError> {
    Ok(match e {
        RawExpr::Leaf(x) => x.clone(),
        RawExpr::Add(xs) => {
            let parts = xs
                .iter()
                .map(|x| on_shell_reduce(x, sys))
                .collect::<Result<Vec<_>, _>>()?;
            RatExpr::sum(&parts)
        }
        RawExpr::Mul(xs) => {
            let mut acc = RatExpr::one();
            for x in xs {
                acc = acc.mul_ref(&on_shell_reduce(x, sys)?);
            }
            acc
        }
        RawExpr::Neg(a) => on_shell_reduce(a, sys)?.neg_ref(),
        RawExpr::Div(a, b) => on_shell_reduce(a, sys)?.div_ref(&on_shell_reduce(b, sys)?)?,
        RawExpr::Pow(a, k) => on_shell_reduce(a, sys)?.pow(*k)?,
        RawExpr::Dx(a) => on_shell_reduce(a, sys)?.dx()?,
        RawExpr::Dt(a) => evolution_derivative(&on_shell_reduce(a, sys)?, sys)?,
    })
}

/// The three transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformId {
    T1,
    T2,
    T3,
}

impl TransformId {
    pub const ALL: [TransformId; 3] = [TransformId::T1, TransformId::T2, TransformId::T3];

    pub fn from_index(i: u8) -> Result<Self, ModelError> {
        match i {
            1 => Ok(TransformId::T1),
            2 => Ok(TransformId::T2),
            3 => Ok(TransformId::T3),
            other => Err(ModelError::UnknownTransformation(other)),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            TransformId::T1 => 1,
            TransformId::T2 => 2,
            TransformId::T3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformId::T1 => "t1",
            TransformId::T2 => "t2",
            TransformId::T3 => "t3",
        }
    }
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Transformation formulas before on-shell reduction.
pub fn raw_transformation(t: TransformId) -> BTreeMap<FieldId, RawExpr> {
    use FieldId::*;
    let f = RawExpr::field;
    let one = || RawExpr::integer(1);
    let images: [(FieldId, RawExpr); 6] = match t {
        TransformId::T3 => [
            (P11, one().div(f(M11))),
            (P10, f(M01).div(f(M11)).neg()),
            (P01, f(M10).div(f(M11))),
            (M01, f(M11).mul(f(M01).div(f(M11)).d10()).neg()),
            (M10, f(M11).mul(f(M10).div(f(M11)).d01())),
            (
                M11,
                f(M11).mul(f(P11).mul(f(M11)).sub(f(M11).d01().div(f(M11)).d10())),
            ),
        ],
        TransformId::T2 => [
            (P01, one().div(f(M01))),
            (M10, f(M11).div(f(M01)).neg()),
            (P11, f(P10).div(f(M01))),
            (P10, f(M01).mul(f(P10).div(f(M01)).d11()).neg()),
            (M11, f(M01).mul(f(M11).div(f(M01)).d10()).neg()),
            (
                M01,
                f(M01).mul(f(P01).mul(f(M01)).add(f(M01).d11().div(f(M01)).d10())),
            ),
        ],
        TransformId::T1 => [
            (P10, one().div(f(M10))),
            (M01, f(M11).div(f(M10))),
            (P11, f(P01).div(f(M10)).neg()),
            (P01, f(M10).mul(f(P01).div(f(M10)).d11())),
            (M11, f(M10).mul(f(M11).div(f(M10)).d01())),
            (
                M10,
                f(M10).mul(f(P10).mul(f(M10)).add(f(M10).d11().div(f(M10)).d01())),
            ),
        ],
    };
    images.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::{parse_expr, parse_raw, ParamRegistry};
    use crate::model3wave::system::base_system;

    fn p(s: &str) -> RatExpr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn raw_algebraic_images() {
        let sys = base_system();
        let t3 = raw_transformation(TransformId::T3);
        assert!(on_shell_reduce(&t3[&FieldId::P11], &sys).unwrap().equals(&p("1/m11")));
        let t2 = raw_transformation(TransformId::T2);
        assert!(on_shell_reduce(&t2[&FieldId::M10], &sys).unwrap().equals(&p("-m11/m01")));
        let t1 = raw_transformation(TransformId::T1);
        assert!(on_shell_reduce(&t1[&FieldId::P11], &sys).unwrap().equals(&p("-p01/m10")));
    }

    #[test]
    fn reduces_time_derivative_of_field() {
        let e = RawExpr::field(FieldId::P11).dt();
        assert!(on_shell_reduce(&e, &base_system())
            .unwrap()
            .equals(&p("-(1/2)*p01*p10")));
    }

    #[test]
    fn reduction_is_idempotent_on_reduced_input() {
        let e = p("m01'/m11 + p10*p11");
        let r = on_shell_reduce(&RawExpr::leaf(e.clone()), &base_system()).unwrap();
        assert!(r.is_identical(&e));
    }

    #[test]
    fn parsed_raw_expression_reduces() {
        let ast = parse_raw("dt(p10) + dx(p10)", &ParamRegistry::open()).unwrap();
        let r = on_shell_reduce(&RawExpr::from_ast(&ast), &base_system()).unwrap();
        assert!(r.equals(&p("p11*m01")));
    }

    #[test]
    fn unknown_index_is_rejected() {
        assert_eq!(
            TransformId::from_index(4),
            Err(ModelError::UnknownTransformation(4))
        );
    }
}
