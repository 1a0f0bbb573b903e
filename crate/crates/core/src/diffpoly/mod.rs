//! Exact differential-polynomial and differential-rational algebra over the
//! six-field jet space.

mod error;
mod field;
mod param;
mod poly;
mod rational;
mod calculus;
mod constraints;
mod parse;

pub use error::DiffPolyError;
pub use field::{FieldId, JetVar, DEFAULT_MAX_ORDER};
pub use param::{int, rat, ParamMonomial, ParamPoly, ParamRegistry, ParamSymbol, Rational};
pub use poly::{DiffPoly, Monomial};
pub use rational::{Denominator, RatExpr};
pub use calculus::{
    antiderivative_x, euler_operator, euler_witness, identity_images, is_total_x_derivative,
    substitute_fields, FieldImages, Prolongation,
};
pub use constraints::{
    collect_parameter_constraints, solve_linear_constraints, solve_linear_constraints_in,
    AffineSpace, LinearConstraint,
};
pub use parse::{format_expr, parse_expr, parse_expr_with, parse_raw, Ast, RawOp};
