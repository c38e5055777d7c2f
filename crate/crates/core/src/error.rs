use thiserror::Error;

use crate::dsl::{EvalError, ParseError};

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} components")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point is not on the unit sphere (|z|^2 deviates by {deviation:.3e})")]
    NotOnSphere { deviation: f64 },

    #[error("operation requires session dimension n = {expected}, got n = {got}")]
    WrongSessionDimension { expected: usize, got: usize },

    #[error("surface expression has {got} components, session n = {n} needs {expected}")]
    ComponentCount { n: usize, expected: usize, got: usize },

    #[error("degenerate induced metric at u = ({u1:.6}, {u2:.6}): det g = {det:.3e}")]
    DegenerateMetric { u1: f64, u2: f64, det: f64 },

    #[error("tangent plane lies in the contact distribution at u = ({u1:.6}, {u2:.6}); e1 is ambiguous in strict mode")]
    LegendrianAmbiguity { u1: f64, u2: f64 },

    #[error("degenerate frame at u = ({u1:.6}, {u2:.6}): {detail}")]
    DegenerateFrame { u1: f64, u2: f64, detail: String },

    #[error("grid resolution {n} outside supported range [{min}, {max}]")]
    GridResolution { n: usize, min: usize, max: usize },

    #[error("beta = {beta} is outside the domain (tan beta singular at pi/2)")]
    BetaDomain { beta: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("evaluation failed at u = ({u1:.6}, {u2:.6}): {source}")]
    Eval {
        u1: f64,
        u2: f64,
        #[source]
        source: EvalError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
