//! Radial Dirichlet problems for the Emden-Fowler equation on the annulus
//! d < |x| < 1, solved numerically and certified against explicit upper and
//! lower solutions.
//!
//! The equation, reduced to the radial variable:
//!
//! ```text
//! u'' + (n-1)/x * u' = s * |u|^(q-1) u,   u(d) = k, u(1) = 0,
//! ```
//!
//! with s = +1 (absorption), s = -1 (source), or s = 0 (the plain Laplace
//! problem, whose solution is the harmonic profile in closed form).
//!
//! The crate provides:
//!
//! * two independent solvers — adaptive shooting ([`shoot`]) and a damped
//!   Newton finite-difference scheme ([`solve_fd`]) — whose agreement is
//!   part of every certificate;
//! * the integral (Green) form of the operator ([`apply_green`]) and the
//!   comparison iteration built on it ([`picard_map`], [`bound_ladder`]);
//! * closed-form bounds: the harmonic profile on one side and an explicit
//!   quadratic-plus-power profile on the other ([`closed_form_bounds`]);
//! * empirical calibration of the decay-estimate constants
//!   ([`calibrate_theorem1`]);
//! * a certifier ([`certify`]) that checks positivity, residuals, solver
//!   agreement, and every bound pointwise, and renders a deterministic
//!   JSON [`Certificate`].

pub mod bounds;
pub mod certify;
pub mod error;
pub mod fd;
pub mod green;
pub mod grid;
pub mod problem;
pub mod quad;
pub mod shooting;
pub mod solver;
pub mod tol;

pub use bounds::{
    bound_ladder, bound_ladder_with, calibrate_theorem1, closed_form_bounds, BoundSet,
    CalibrationCase, CalibrationResult, FittedConstants, LabeledProfile, LevelFit,
};
pub use certify::{
    certify, certify_full, certify_with, check_bracketing, BracketReport, Certificate,
    CertifyArtifacts, CertifyOptions, Verdict,
};
pub use error::{Error, Result};
pub use fd::solve_fd;
pub use green::{
    apply_green, apply_green_detailed, apply_green_with, inner_moment, inner_moment_with,
    picard_map, picard_map_with, source_moment, source_moment_with, QuadratureConfig, SourceTerm,
};
pub use grid::{make_grid, Grading, Profile, RadialGrid};
pub use problem::{
    d0_constant, harmonic_profile, quadratic_source_profile, theorem2_coefficients,
    CoefficientSet, ProblemSpec, Variant,
};
pub use quad::{cumulative_from_right, interval_increments, QuadratureRule};
pub use shooting::{shoot, shoot_with, ShootingConfig};
pub use solver::{
    radial_rhs, residual_against, residual_norm, residual_profile, stencil_coeffs, stencil_scale,
    SolveFlags, SolveReport,
};
