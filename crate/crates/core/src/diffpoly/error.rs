use thiserror::Error;

use super::field::FieldId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffPolyError {
    #[error("division by an expression that is identically zero")]
    DivisionByZeroExpr,
    #[error("jet order {order} of {field} exceeds the cap {max}")]
    JetOrderOverflow { field: FieldId, order: u32, max: u8 },
    #[error("substitution has no image for field {0}")]
    MissingFieldImage(FieldId),
    #[error("expression is not a total x-derivative (nonzero Euler image for {field}: {witness})")]
    NotExact { field: FieldId, witness: String },
    #[error("rational expression needs a candidate potential")]
    NoConstructivePotential,
    #[error("D(candidate) differs from the input by {residual}")]
    CandidateMismatch { residual: String },
    #[error("constraint of degree {degree} in parameters: {constraint}")]
    NonlinearConstraint { constraint: String, degree: u32 },
    #[error("constraint system is inconsistent")]
    Inconsistent,
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at {line}:{column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("invalid parameter name `{0}`")]
    InvalidParameter(String),
}
