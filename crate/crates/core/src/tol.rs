//! Pinned numerical thresholds.
//!
//! Every tolerance that decides a verdict, clamps a value, or stops an
//! iteration lives here, so that a reviewer can audit the whole numeric
//! policy in one screen and so the values cannot drift apart between the
//! solvers and the certifier.

/// Inputs to the Picard map in `[-NEGATIVE_INPUT_CLAMP, 0)` are treated as
/// round-off noise and clamped to zero; anything more negative is rejected.
/// 1e-12 sits two orders above f64 noise for O(1) profiles while staying six
/// orders below any margin we certify.
pub const NEGATIVE_INPUT_CLAMP: f64 = 1e-12;

/// The Green representation reproduces the boundary data by construction;
/// the only slack is a couple of rounding operations in the harmonic
/// correction term. Scaled by max(1, k).
pub const BOUNDARY_EXACTNESS: f64 = 1e-10;

/// Bracketing margins are accepted down to `-MARGIN_TOL_FACTOR * max(1, k)`.
/// Margins vanish identically at both boundary nodes, so the check always
/// operates at the round-off floor of the solvers and the quadrature; 1e-7
/// leaves two orders of headroom over the worst observed solver error.
pub const MARGIN_TOL_FACTOR: f64 = 1e-7;

/// Positivity is certified down to `-POSITIVITY_TOL_FACTOR * k`: the solution
/// vanishes at the outer boundary, so its computed minimum is a pure
/// round-off quantity.
pub const POSITIVITY_TOL_FACTOR: f64 = 1e-8;

/// A solution may exceed its boundary maximum k by at most
/// `CEILING_TOL_FACTOR * max(1, k)` before the ExceededK flag is raised.
pub const CEILING_TOL_FACTOR: f64 = 1e-8;

/// The certifier requires the finite-difference solve to close its own
/// algebraic system to this sup-norm. Newton converges to ~1e-13 on healthy
/// problems; 1e-8 is the line between "converged" and "stalled".
pub const CERT_RESIDUAL_THRESHOLD: f64 = 1e-8;

/// Newton iteration on the finite-difference system stops when the update
/// sup-norm drops below this...
pub const NEWTON_UPDATE_TOL: f64 = 1e-12;

/// ...and the algebraic residual sup-norm below this.
pub const NEWTON_RESIDUAL_TOL: f64 = 1e-10;

/// Iteration budget for the damped Newton loop.
pub const NEWTON_MAX_ITERS: usize = 50;

/// Budget of step halvings inside one damped Newton iteration.
pub const NEWTON_MAX_HALVINGS: usize = 20;

/// Default relative tolerance of the adaptive Runge-Kutta integrator used by
/// the shooting solver. Global error lands near 1e-10 for O(1) data, an
/// order below the tightest certificate margin check.
pub const SHOOT_DEFAULT_RTOL: f64 = 1e-11;

/// Iteration budget for the bisection on the initial slope.
pub const SHOOT_MAX_ROOT_ITERS: usize = 200;

/// Coarsest grid any operation accepts.
pub const MIN_GRID_NODES: usize = 8;
