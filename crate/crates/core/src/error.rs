use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tabulated input rejected at row {row}: {reason}")]
    InvalidTable { row: usize, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(
        "quadrature did not converge on [{lower}, {upper}] after {subdivisions} subdivisions \
         (estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("infinite moment: m({alpha}) diverges{detail}")]
    InfiniteMoment { alpha: f64, detail: String },

    #[error("numerical derivative unstable at x = {x}: step-halving estimates {coarse:e} and {fine:e} disagree")]
    DerivativeFailure { x: f64, coarse: f64, fine: f64 },

    #[error("operation requires a density, but {family} has none")]
    DensityRequired { family: String },

    #[error("overflow at x = {x:e}: largest safe x is about {largest_safe_x:e}")]
    Overflow { x: f64, largest_safe_x: f64 },

    #[error("generating function out of range at z = {z}")]
    Range { z: f64 },

    #[error("bracketing failed for level {level}: CDF is flat at {flat_value} on [{flat_from:e}, {flat_to:e}]")]
    Bracketing {
        level: f64,
        flat_value: f64,
        flat_from: f64,
        flat_to: f64,
    },

    #[error("theorem {theorem} is not applicable: {reason}")]
    IncompatibleTailClass { theorem: String, reason: String },

    #[error("floating-point breakdown: fewer than {needed} usable grid points; largest usable x is {largest_usable_x:e}")]
    FloatingPointBreakdown { needed: usize, largest_usable_x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
