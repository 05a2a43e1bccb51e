//! Shared pieces of the two solvers: the first-order system right-hand side,
//! the nonuniform three-point stencil, residual measurement, and the report
//! type both solvers return.

use crate::error::{Error, Result};
use crate::grid::Profile;
use crate::problem::ProblemSpec;
use serde::Serialize;

/// Right-hand side of the first-order system y = (u, u'):
///
/// ```text
/// u'  = du
/// du' = s |u|^(q-1) u - (n-1)/r * du
/// ```
pub fn radial_rhs(r: f64, u: f64, du: f64, spec: &ProblemSpec) -> (f64, f64) {
    let s = spec.variant.sign();
    (du, s * spec.nonlinearity(u) - (spec.n as f64 - 1.0) / r * du)
}

/// Diagnostic flags set by the solvers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveFlags {
    /// The computed profile dips measurably below zero.
    pub went_negative: bool,
    /// The computed profile rises measurably above the inner boundary value.
    pub exceeded_k: bool,
    /// The iteration stopped at its budget without meeting its tolerance.
    pub no_convergence: bool,
}

/// What a solver hands back: the profile plus enough numbers to judge it.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub profile: Profile,
    /// max(|u(d) - k|, |u(1)|), measured on the returned profile.
    pub boundary_mismatch: f64,
    /// Sup-norm of the interior difference-equation residual.
    pub residual_norm: f64,
    /// Root-finding or Newton iterations used.
    pub iterations: usize,
    pub flags: SolveFlags,
    /// For the shooting solver: the slope u'(d) it converged to.
    pub initial_slope: Option<f64>,
}

/// Coefficients (a, b, c) of the second-derivative-plus-drift stencil on an
/// uneven triple x_m < x_0 < x_p:
///
/// ```text
/// L u (x_0) ~= a u(x_m) + b u(x_0) + c u(x_p),
/// L u = u'' + (n-1)/x u'.
/// ```
pub fn stencil_coeffs(xm: f64, x0: f64, xp: f64, n: u32) -> (f64, f64, f64) {
    let hm = x0 - xm;
    let hp = xp - x0;
    let drift = (n as f64 - 1.0) / x0;
    let a = 2.0 / (hm * (hm + hp)) - drift * hp / (hm * (hm + hp));
    let b = -2.0 / (hm * hp) + drift * (hp - hm) / (hm * hp);
    let c = 2.0 / (hp * (hm + hp)) + drift * hm / (hp * (hm + hp));
    (a, b, c)
}

/// Interior residual of the nonlinear equation itself:
/// L u - s |u|^(q-1) u, evaluated with the stencil. Endpoints get 0.
pub fn residual_profile(u: &Profile, spec: &ProblemSpec) -> Result<Profile> {
    spec.validate()?;
    let x = u.grid().nodes();
    let m = x.len();
    if m < 3 {
        return Err(Error::TooFewNodes { m, min: 3 });
    }
    let s = spec.variant.sign();
    let v = u.values();
    let mut res = vec![0.0; m];
    for i in 1..m - 1 {
        let (a, b, c) = stencil_coeffs(x[i - 1], x[i], x[i + 1], spec.n);
        res[i] = a * v[i - 1] + b * v[i] + c * v[i + 1] - s * spec.nonlinearity(v[i]);
    }
    Profile::new(u.grid().clone(), res)
}

/// Sup-norm of `residual_profile`.
pub fn residual_norm(u: &Profile, spec: &ProblemSpec) -> Result<f64> {
    let res = residual_profile(u, spec)?;
    Ok(res.values().iter().fold(0.0_f64, |acc, &r| acc.max(r.abs())))
}

/// Largest sum of term magnitudes entering any interior residual row. The
/// residual of an exactly-solved difference system cannot sit below roughly
/// machine epsilon times this number, so thresholds on the raw residual are
/// only meaningful relative to it.
pub fn stencil_scale(u: &Profile, spec: &ProblemSpec) -> Result<f64> {
    spec.validate()?;
    let x = u.grid().nodes();
    let m = x.len();
    if m < 3 {
        return Err(Error::TooFewNodes { m, min: 3 });
    }
    let v = u.values();
    let mut scale = 0.0_f64;
    for i in 1..m - 1 {
        let (a, b, c) = stencil_coeffs(x[i - 1], x[i], x[i + 1], spec.n);
        let row = (a * v[i - 1]).abs()
            + (b * v[i]).abs()
            + (c * v[i + 1]).abs()
            + spec.nonlinearity(v[i]).abs();
        scale = scale.max(row);
    }
    Ok(scale)
}

/// Sup-norm of the linear-problem residual L u - f for a prescribed
/// right-hand side f (interior nodes only).
pub fn residual_against(u: &Profile, f: &Profile, spec: &ProblemSpec) -> Result<f64> {
    spec.validate()?;
    if !u.grid().same_nodes(f.grid()) {
        return Err(Error::GridMismatch {
            detail: "residual_against needs both profiles on one grid".to_string(),
        });
    }
    let x = u.grid().nodes();
    let m = x.len();
    if m < 3 {
        return Err(Error::TooFewNodes { m, min: 3 });
    }
    let v = u.values();
    let fv = f.values();
    let mut worst = 0.0_f64;
    for i in 1..m - 1 {
        let (a, b, c) = stencil_coeffs(x[i - 1], x[i], x[i + 1], spec.n);
        let r = a * v[i - 1] + b * v[i] + c * v[i + 1] - fv[i];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
