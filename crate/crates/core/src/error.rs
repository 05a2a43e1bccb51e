//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong between problem validation and certification.
#[derive(Debug, Error)]
pub enum Error {
    /// The annulus estimates need n > 2; the harmonic kernel x^(2-n) is
    /// degenerate in dimensions 1 and 2.
    #[error("dimension n = {n} is too small; the annulus problem needs n > 2")]
    DimensionTooSmall { n: u32 },

    /// q must lie in the open interval (1, (n+2)/(n-2)).
    #[error("exponent q = {q} outside the admissible open interval (1, {max})")]
    ExponentOutOfRange { q: f64, max: f64 },

    /// Inner radius must satisfy 0 < d < 1.
    #[error("inner radius d = {d} outside the open interval (0, 1)")]
    RadiusOutOfRange { d: f64 },

    /// Boundary data k must be a finite non-negative number.
    #[error("boundary value k = {k} must be finite and non-negative")]
    NegativeBoundaryValue { k: f64 },

    /// An operation was asked to run on a variant it is not defined for
    /// (e.g. the nonlinear coefficient set for the Laplace problem).
    #[error("operation `{op}` is not defined for the {variant} variant")]
    VariantMismatch { op: &'static str, variant: String },

    /// Grids below 8 nodes cannot support the composite quadrature rules.
    #[error("grid with {m} nodes is too coarse; at least {min} nodes are required")]
    TooFewNodes { m: usize, min: usize },

    /// Two profiles (or a profile and a request) disagree about the grid.
    #[error("grid mismatch: {detail}")]
    GridMismatch { detail: String },

    /// A profile contains a NaN or infinity where a finite value is required.
    #[error("non-finite value {value} at node index {index}")]
    NonFiniteValue { index: usize, value: f64 },

    /// The Picard map was handed an input that is negative beyond the
    /// round-off clamp; raising it to a fractional power would be meaningless.
    #[error("negative input to the Picard map: value {value} at node {index} is below the clamp {clamp}")]
    NegativeInput { index: usize, value: f64, clamp: f64 },

    /// An iterative solver ran out of its iteration budget.
    #[error("no convergence in `{op}`: {detail}")]
    NoConvergence { op: &'static str, detail: String },

    /// The tridiagonal Newton system lost a pivot.
    #[error("singular Jacobian in the finite-difference solve (pivot {pivot:.3e} at row {row})")]
    SingularJacobian { row: usize, pivot: f64 },

    /// A caller-supplied argument is out of range for the operation.
    #[error("bad argument: {what}")]
    BadArgument { what: String },

    /// Calibration was asked to fit constants against an empty case list.
    #[error("calibration sweep is empty (no usable cases)")]
    EmptySweep,

    /// Calibration cases must all share one variant.
    #[error("calibration sweep mixes variants: {first} and {second}")]
    MixedVariants { first: String, second: String },

    /// A certification run could not produce a solution to check.
    #[error("solve failed during certification ({stage}): {detail}")]
    SolveFailed { stage: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
