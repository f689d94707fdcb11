use thiserror::Error;

use crate::symexpr::Coord;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported function `{0}`")]
    UnsupportedFunction(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point does not carry coordinate {0}")]
    IncompletePoint(Coord),

    #[error("operation would exceed the jet order cap of 3")]
    OrderOverflow,

    #[error("operation is not defined for jet order {0}")]
    UnsupportedOrder(usize),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("vector weight {weight} cannot be raised past m = {m}")]
    WeightOverflow { weight: usize, m: usize },

    #[error("group element is not invertible")]
    NotInvertible,

    #[error("substitution map has no entry for {0}")]
    IncompleteMap(String),

    #[error("degenerate form: {0}")]
    DegenerateForm(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("curve is not an immersion at t = {0:?}")]
    Regularity(Vec<f64>),

    #[error("reparametrization is not orientation preserving at t = {0:?}")]
    Orientation(Vec<f64>),

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
