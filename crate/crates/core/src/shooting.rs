//! Shooting solver: integrate the radial equation from the inner boundary
//! with a trial slope, then root-find the slope so the outer boundary value
//! lands on zero.
//!
//! The integrator is an adaptive Dormand-Prince 5(4) pair with the usual
//! first-same-as-last trick. During root finding the trajectory runs free;
//! once the slope has converged a final pass is forced to stop at every grid
//! node so the returned profile carries fifth-order samples rather than
//! interpolants.

use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid};
use crate::problem::ProblemSpec;
use crate::solver::{radial_rhs, residual_norm, SolveFlags, SolveReport};
use crate::tol::{SHOOT_DEFAULT_RTOL, SHOOT_MAX_ROOT_ITERS};

/// Knobs for the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Relative tolerance of the step-size controller.
    pub tolerance: f64,
    /// Bisection budget for the slope.
    pub max_root_iters: usize,
    /// Optional explicit slope bracket (lo, hi) replacing the built-in scan.
    pub slope_bracket: Option<(f64, f64)>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            tolerance: SHOOT_DEFAULT_RTOL,
            max_root_iters: SHOOT_MAX_ROOT_ITERS,
            slope_bracket: None,
        }
    }
}

/// Trajectories escaping this many multiples of max(1, k) are cut short; the
/// sign of the escape still orders the shot correctly for bisection.
const ESCAPE_FACTOR: f64 = 1e4;
const MAX_STEPS: usize = 4_000_000;
const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROWTH_LIMIT: f64 = 5.0;
const ABS_TOL: f64 = 1e-12;

enum ShotEnd {
    /// Reached the outer radius; carries u(1), min u, max u along the way.
    Reached { u_end: f64, min_u: f64, max_u: f64 },
    /// Left the trust region early; the sign says which side.
    Escaped(f64),
}

fn rhs(r: f64, y: [f64; 2], spec: &ProblemSpec) -> [f64; 2] {
    let (du, ddu) = radial_rhs(r, y[0], y[1], spec);
    [du, ddu]
}

/// One Dormand-Prince 5(4) step from (r, y) with size h. `k1` is the slope
/// at the left end (reused from the previous step). Returns the fifth-order
/// state, the scaled error estimate, and the slope at the right end.
fn dopri_step(
    r: f64,
    y: [f64; 2],
    h: f64,
    k1: [f64; 2],
    rtol: f64,
    spec: &ProblemSpec,
) -> ([f64; 2], f64, [f64; 2]) {
    #[inline]
    fn axpy(y: [f64; 2], h: f64, coeffs: &[(f64, [f64; 2])]) -> [f64; 2] {
        let mut out = y;
        for &(a, k) in coeffs {
            out[0] += h * a * k[0];
            out[1] += h * a * k[1];
        }
        out
    }

    let k2 = rhs(r + h / 5.0, axpy(y, h, &[(1.0 / 5.0, k1)]), spec);
    let k3 = rhs(
        r + 3.0 * h / 10.0,
        axpy(y, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
        spec,
    );
    let k4 = rhs(
        r + 4.0 * h / 5.0,
        axpy(
            y,
            h,
            &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
        ),
        spec,
    );
    let k5 = rhs(
        r + 8.0 * h / 9.0,
        axpy(
            y,
            h,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
        spec,
    );
    let k6 = rhs(
        r + h,
        axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
        spec,
    );
    let y5 = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = rhs(r + h, y5, spec);

    // difference between the fifth- and embedded fourth-order solutions
    let e = [
        h * (71.0 / 57600.0 * k1[0] - 71.0 / 16695.0 * k3[0] + 71.0 / 1920.0 * k4[0]
            - 17253.0 / 339200.0 * k5[0]
            + 22.0 / 525.0 * k6[0]
            - 1.0 / 40.0 * k7[0]),
        h * (71.0 / 57600.0 * k1[1] - 71.0 / 16695.0 * k3[1] + 71.0 / 1920.0 * k4[1]
            - 17253.0 / 339200.0 * k5[1]
            + 22.0 / 525.0 * k6[1]
            - 1.0 / 40.0 * k7[1]),
    ];
    let mut err = 0.0_f64;
    for i in 0..2 {
        let scale = ABS_TOL + rtol * y[i].abs().max(y5[i].abs());
        err = err.max((e[i] / scale).abs());
    }
    (y5, err, k7)
}

/// Integrate from the inner radius with the given slope. When `samples` is
/// provided the stepper is forced to land on every node and the state at
/// each is written into it (so it must be empty on entry).
fn integrate(
    spec: &ProblemSpec,
    slope: f64,
    rtol: f64,
    nodes: Option<&[f64]>,
    samples: Option<&mut Vec<f64>>,
) -> Result<ShotEnd> {
    let escape = ESCAPE_FACTOR * spec.k.max(1.0);
    let mut r = spec.d;
    let mut y = [spec.k, slope];
    let mut k1 = rhs(r, y, spec);
    let mut min_u = y[0];
    let mut max_u = y[0];

    let mut sample_sink = samples;
    let mut next_node = 1usize;
    if let Some(sink) = sample_sink.as_deref_mut() {
        sink.push(y[0]);
    }

    let mut h = (1.0 - spec.d) / 64.0;
    if let Some(xs) = nodes {
        h = h.min(xs[1] - xs[0]);
    }

    for _ in 0..MAX_STEPS {
        let target = match nodes {
            Some(xs) => xs[next_node],
            None => 1.0,
        };
        let remaining = target - r;
        if remaining <= 0.0 {
            return Err(Error::SolveFailed {
                stage: "integrate",
                detail: format!("step target {} not ahead of r = {}", target, r),
            });
        }
        let clipped = h >= remaining;
        let h_use = if clipped { remaining } else { h };

        let (y5, err, k7) = dopri_step(r, y, h_use, k1, rtol, spec);
        let ok = err.is_finite() && err <= 1.0 && y5[0].is_finite() && y5[1].is_finite();
        if ok {
            r = if clipped { target } else { r + h_use };
            y = y5;
            k1 = k7;
            min_u = min_u.min(y[0]);
            max_u = max_u.max(y[0]);
            if y[0].abs() > escape {
                return Ok(ShotEnd::Escaped(y[0].signum()));
            }
            if clipped {
                if let Some(sink) = sample_sink.as_deref_mut() {
                    sink.push(y[0]);
                }
                next_node += 1;
                let done = match nodes {
                    Some(xs) => next_node == xs.len(),
                    None => true,
                };
                if done {
                    return Ok(ShotEnd::Reached {
                        u_end: y[0],
                        min_u,
                        max_u,
                    });
                }
            }
            let factor = if err > 0.0 {
                (SAFETY * err.powf(-0.2)).clamp(SHRINK_LIMIT, GROWTH_LIMIT)
            } else {
                GROWTH_LIMIT
            };
            let grown = h_use * factor;
            h = if clipped { h.max(grown) } else { grown };
        } else {
            let factor = if err.is_finite() && err > 0.0 {
                (SAFETY * err.powf(-0.2)).clamp(SHRINK_LIMIT, GROWTH_LIMIT)
            } else {
                SHRINK_LIMIT
            };
            h = h_use * factor;
            if h < 1e-15 {
                return Err(Error::NoConvergence {
                    op: "integrate",
                    detail: format!("step size collapsed at r = {}", r),
                });
            }
        }
    }
    Err(Error::NoConvergence {
        op: "integrate",
        detail: "step budget exhausted".to_string(),
    })
}

/// u(1) as a function of the trial slope; escapes are mapped to signed
/// sentinels so they still order correctly.
fn outer_value(spec: &ProblemSpec, slope: f64, rtol: f64) -> Result<f64> {
    Ok(match integrate(spec, slope, rtol, None, None)? {
        ShotEnd::Reached { u_end, .. } => u_end,
        ShotEnd::Escaped(sign) => sign * ESCAPE_FACTOR * spec.k.max(1.0),
    })
}

/// Magnitude of the slope the harmonic solution has at the inner radius;
/// the natural unit for bracketing.
fn slope_scale(spec: &ProblemSpec) -> f64 {
    let p = 2 - spec.n as i32;
    let kernel = spec.d.powi(p) - 1.0;
    (spec.k * (spec.n as f64 - 2.0) * spec.d.powi(1 - spec.n as i32) / kernel).abs()
}

/// Scan a geometric ladder of slopes away from zero until the outer value
/// changes sign; returns (lo, hi) with value(lo) < 0 < value(hi).
fn bracket_slope(spec: &ProblemSpec, rtol: f64) -> Result<(f64, f64)> {
    let sigma = slope_scale(spec);
    let phi0 = outer_value(spec, 0.0, rtol)?;
    if phi0 == 0.0 {
        return Ok((-f64::EPSILON * sigma, f64::EPSILON * sigma));
    }
    // value increases with slope, so walk in the direction that crosses zero
    let downward = phi0 > 0.0;
    let mut prev_slope = 0.0;
    let mut rung = sigma / 4.0;
    for _ in 0..13 {
        let slope = if downward { -rung } else { rung };
        let phi = outer_value(spec, slope, rtol)?;
        if downward && phi < 0.0 {
            return Ok((slope, prev_slope));
        }
        if !downward && phi > 0.0 {
            return Ok((prev_slope, slope));
        }
        prev_slope = slope;
        rung *= 2.0;
    }
    Err(Error::SolveFailed {
        stage: "bracket",
        detail: format!(
            "no sign change in the outer value for slopes up to {:e}",
            rung / 2.0
        ),
    })
}

/// Solve the boundary-value problem on `grid` by shooting.
pub fn shoot(spec: &ProblemSpec, grid: &RadialGrid) -> Result<SolveReport> {
    shoot_with(spec, grid, &ShootingConfig::default())
}

/// `shoot` with explicit configuration.
pub fn shoot_with(spec: &ProblemSpec, grid: &RadialGrid, config: &ShootingConfig) -> Result<SolveReport> {
    spec.validate()?;
    if grid.inner() != spec.d || grid.outer() != 1.0 {
        return Err(Error::GridMismatch {
            detail: format!(
                "grid spans [{}, {}] but the problem needs [{}, 1]",
                grid.inner(),
                grid.outer(),
                spec.d
            ),
        });
    }

    // k = 0 forces the trivial solution for every variant.
    if spec.k == 0.0 {
        let profile = Profile::constant(grid.clone(), 0.0)?;
        return Ok(SolveReport {
            profile,
            boundary_mismatch: 0.0,
            residual_norm: 0.0,
            iterations: 0,
            flags: SolveFlags::default(),
            initial_slope: Some(0.0),
        });
    }

    let rtol = config.tolerance;
    let (mut lo, mut hi) = match config.slope_bracket {
        Some((a, b)) => {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let fa = outer_value(spec, a, rtol)?;
            let fb = outer_value(spec, b, rtol)?;
            if fa > 0.0 || fb < 0.0 {
                return Err(Error::SolveFailed {
                    stage: "bracket",
                    detail: format!(
                        "supplied bracket does not straddle: value({}) = {:e}, value({}) = {:e}",
                        a, fa, b, fb
                    ),
                });
            }
            (a, b)
        }
        None => bracket_slope(spec, rtol)?,
    };

    let phi_tol = 1e-13 * spec.k.max(1.0);
    let mut iterations = 0usize;
    let mut best = 0.5 * (lo + hi);
    while iterations < config.max_root_iters {
        let width = hi - lo;
        if width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let phi = outer_value(spec, mid, rtol)?;
        iterations += 1;
        best = mid;
        if phi.abs() <= phi_tol {
            break;
        }
        if phi < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // final pass: force stops on the grid so the samples are integrator states
    let mut samples = Vec::with_capacity(grid.len());
    let end = integrate(spec, best, rtol, Some(grid.nodes()), Some(&mut samples))?;
    let (u_end, min_u, max_u) = match end {
        ShotEnd::Reached { u_end, min_u, max_u } => (u_end, min_u, max_u),
        ShotEnd::Escaped(_) => {
            return Err(Error::SolveFailed {
                stage: "final-pass",
                detail: "converged slope still leaves the trust region".to_string(),
            })
        }
    };
    let profile = Profile::new(grid.clone(), samples)?;
    let scale = spec.k.max(1.0);
    let boundary_mismatch = (profile.values()[0] - spec.k).abs().max(u_end.abs());
    let flags = SolveFlags {
        went_negative: min_u < -1e-8 * scale,
        exceeded_k: max_u > spec.k * (1.0 + 1e-8),
        no_convergence: iterations >= config.max_root_iters && u_end.abs() > 1e-10 * scale,
    };
    let residual = residual_norm(&profile, spec)?;
    Ok(SolveReport {
        profile,
        boundary_mismatch,
        residual_norm: residual,
        iterations,
        flags,
        initial_slope: Some(best),
    })
}
