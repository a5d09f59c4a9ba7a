use thiserror::Error;

use crate::map::GradedMap;
use crate::report::Report;

#[derive(Debug, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    CtxMismatch(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },

    #[error("differential does not square to the stated curvature")]
    NotAComplex { residual: GradedMap },

    #[error("Maurer-Cartan equation fails for the given twist")]
    MaurerCartan { residual: GradedMap },

    #[error("curvature mismatch between source and target")]
    CurvatureMismatch,

    #[error("morphism is not closed")]
    NotClosed { residual: GradedMap },

    #[error("map is not a contracting homotopy")]
    NotAContraction { residual: GradedMap },

    #[error("homotopy data fails its defining equations:\n{report}")]
    InvalidData { report: Report },

    #[error("operand lies outside the chosen ideal: {0}")]
    NotInIdeal(String),

    #[error("Neumann series did not terminate within {cap} iterations")]
    NeumannCap { cap: usize },

    #[error("input contains z-monomials; substitution requires an eps-only series")]
    ZMonomialPresent,

    #[error(
        "eps truncation order {neps} is below the z order {nz}; substitution would lose terms"
    )]
    TruncationInsufficient { nz: u32, neps: u32 },

    #[error("homology is only defined for curvature zero")]
    CurvedInput,

    #[error("invalid poset: {0}")]
    BadPoset(String),

    #[error("unresolved reference: {0}")]
    Reference(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
