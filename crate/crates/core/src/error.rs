use thiserror::Error;

use crate::qseries::Symbol;

/// Errors raised anywhere in the series / form / invariant pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent denominators differ ({0} vs {1})")]
    DenominatorMismatch(u32, u32),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("cannot invert the zero series")]
    ZeroSeries,

    #[error("leading coefficient {0} is not invertible in the coefficient ring")]
    NonInvertible(String),

    #[error("product of two symbolic coefficients is not a linear form")]
    SymbolicProduct,

    #[error("coefficient {0} is not available; rerun in symbolic mode or extend the data table")]
    MissingCoefficient(Symbol),

    #[error("lambda^2 = {0} is not negative, so lambda does not define a wall")]
    NotAWall(String),

    #[error("wall-crossing term has non-zero imaginary residue {0}")]
    ImaginaryResidue(String),

    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
