//! Finite-difference solver: the three-point discretization of the radial
//! equation with Dirichlet data, solved by damped Newton iteration on the
//! resulting tridiagonal nonlinear system.

use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid};
use crate::problem::ProblemSpec;
use crate::solver::{stencil_coeffs, stencil_scale, SolveFlags, SolveReport};
use crate::tol::{
    MIN_GRID_NODES, NEWTON_MAX_HALVINGS, NEWTON_MAX_ITERS, NEWTON_RESIDUAL_TOL, NEWTON_UPDATE_TOL,
};

/// Residual of the difference system at every interior node.
fn residual_vec(x: &[f64], v: &[f64], spec: &ProblemSpec) -> Vec<f64> {
    let s = spec.variant.sign();
    let m = x.len();
    let mut res = Vec::with_capacity(m - 2);
    for i in 1..m - 1 {
        let (a, b, c) = stencil_coeffs(x[i - 1], x[i], x[i + 1], spec.n);
        res.push(a * v[i - 1] + b * v[i] + c * v[i + 1] - s * spec.nonlinearity(v[i]));
    }
    res
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, &r| acc.max(r.abs()))
}

/// Solve the tridiagonal system in place by forward elimination and back
/// substitution. `sub[i]`, `diag[i]`, `sup_[i]` describe row i; `rhs` is
/// consumed and becomes the solution.
fn thomas(sub: &[f64], diag: &[f64], sup_: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut upper = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() < 1e-300 {
        return Err(Error::SingularJacobian { row: 0, pivot });
    }
    upper[0] = sup_[0] / pivot;
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * upper[i - 1];
        if pivot.abs() < 1e-300 {
            return Err(Error::SingularJacobian { row: i, pivot });
        }
        upper[i] = sup_[i] / pivot;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= upper[i] * rhs[i + 1];
    }
    Ok(())
}

/// Solve the boundary-value problem on `grid` by damped Newton iteration,
/// starting from the harmonic profile.
///
/// Two stopping rules, both requiring the residual at its stopping level —
/// the larger of the absolute constant and the round-off floor of the
/// stencil (on fine graded grids the row magnitudes reach 1e10, so even the
/// exact solution of the difference system evaluates to a residual of
/// epsilon times that):
///
/// * the next correction would move the iterate by less than the update
///   tolerance (checked before applying it, so a confirming pass is free);
/// * stagnation — a whole accepted step no longer materially reduces the
///   residual, meaning the iteration is down to rounding noise. This is
///   the path fine grids take, where the update bottoms out above the
///   tolerance at the noise the elimination smooths back to solution
///   scale.
pub fn solve_fd(spec: &ProblemSpec, grid: &RadialGrid) -> Result<SolveReport> {
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
    let m = grid.len();
    if m < MIN_GRID_NODES {
        return Err(Error::TooFewNodes {
            m,
            min: MIN_GRID_NODES,
        });
    }

    let x = grid.nodes();
    let s = spec.variant.sign();
    let start = crate::problem::harmonic_profile(spec, grid)?;
    let mut v: Vec<f64> = start.values().to_vec();

    let floor = |v: &[f64]| -> Result<f64> {
        let p = Profile::new(grid.clone(), v.to_vec())?;
        Ok(8.0 * f64::EPSILON * stencil_scale(&p, spec)?)
    };

    let mut res = residual_vec(x, &v, spec);
    let mut res_norm = sup(&res);
    let mut iterations = 0usize;
    // only an identically zero residual skips the iteration (k = 0)
    let mut converged = res_norm == 0.0;
    let mut stalled = false;
    let update_tol = NEWTON_UPDATE_TOL * spec.k.max(1.0);

    while !converged && iterations < NEWTON_MAX_ITERS {
        // tridiagonal Jacobian of the interior system
        let interior = m - 2;
        let mut sub_d = vec![0.0; interior];
        let mut diag = vec![0.0; interior];
        let mut sup_d = vec![0.0; interior];
        for i in 1..m - 1 {
            let (a, b, c) = stencil_coeffs(x[i - 1], x[i], x[i + 1], spec.n);
            let j = i - 1;
            if j > 0 {
                sub_d[j] = a;
            }
            diag[j] = b - s * spec.nonlinearity_prime(v[i]);
            if j + 1 < interior {
                sup_d[j] = c;
            }
        }
        let mut delta: Vec<f64> = res.iter().map(|&r| -r).collect();
        thomas(&sub_d, &diag, &sup_d, &mut delta)?;

        // converged: the correction would not move the iterate and the
        // residual is at its stopping level. Checked before applying, so
        // the confirming pass is not counted (the linear variant reports
        // the single productive iteration it needs).
        if sup(&delta) <= update_tol && res_norm <= NEWTON_RESIDUAL_TOL.max(floor(&v)?) {
            converged = true;
            break;
        }

        // damped line search: accept the first step that does not grow the residual
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let mut candidate = v.clone();
            for (i, dv) in delta.iter().enumerate() {
                candidate[i + 1] += lambda * dv;
            }
            let cres = residual_vec(x, &candidate, spec);
            let cnorm = sup(&cres);
            if cnorm <= res_norm || cnorm <= floor(&candidate)? {
                accepted = Some((candidate, cres, cnorm, lambda));
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        let Some((candidate, cres, cnorm, _lambda)) = accepted else {
            stalled = true;
            break;
        };
        // stagnation at the floor: the residual sits at its stopping level
        // and a whole Newton step no longer materially reduces it, so any
        // further correction is driven by rounding noise alone. On fine
        // graded grids this fires before the update tolerance is reachable
        // (the update bottoms out at the noise the elimination smooths back
        // to solution scale, around 1e-9 at 1e5 nodes).
        if cnorm <= NEWTON_RESIDUAL_TOL.max(floor(&candidate)?) && cnorm >= 0.5 * res_norm {
            converged = true;
        }
        v = candidate;
        res = cres;
        res_norm = cnorm;
    }

    let profile = Profile::new(grid.clone(), v)?;
    let scale = spec.k.max(1.0);
    let min_u = profile.min_value();
    let max_u = profile.max_value();
    let flags = SolveFlags {
        went_negative: min_u < -1e-8 * scale,
        exceeded_k: max_u > spec.k * (1.0 + 1e-8),
        no_convergence: !converged || stalled,
    };
    let boundary_mismatch = (profile.values()[0] - spec.k)
        .abs()
        .max(profile.values()[m - 1].abs());
    Ok(SolveReport {
        profile,
        boundary_mismatch,
        residual_norm: res_norm,
        iterations,
        flags,
        initial_slope: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grading};
    use crate::problem::{harmonic_profile, Variant};

    #[test]
    fn linear_variant_converges_in_one_newton_step() {
        let spec = ProblemSpec::new(Variant::Laplace, 3, 2.0, 0.5, 1.0).unwrap();
        let grid = make_grid(&spec, 257, Grading::Geometric).unwrap();
        let report = solve_fd(&spec, &grid).unwrap();
        assert!(report.iterations <= 1, "iterations = {}", report.iterations);
        assert!(!report.flags.no_convergence);
        let exact = harmonic_profile(&spec, &grid).unwrap();
        assert!(report.profile.sup_diff(&exact).unwrap() < 1e-4);
        assert_eq!(report.boundary_mismatch, 0.0);
    }

    #[test]
    fn discretization_error_shrinks_at_second_order() {
        let spec = ProblemSpec::new(Variant::Laplace, 3, 2.0, 0.5, 1.0).unwrap();
        let mut errors = Vec::new();
        for m in [129usize, 257, 513] {
            let grid = make_grid(&spec, m, Grading::Geometric).unwrap();
            let report = solve_fd(&spec, &grid).unwrap();
            let exact = harmonic_profile(&spec, &grid).unwrap();
            errors.push(report.profile.sup_diff(&exact).unwrap());
        }
        assert!(errors[0] / errors[1] > 3.5);
        assert!(errors[1] / errors[2] > 3.5);
    }

    #[test]
    fn absorption_desk_case_converges_cleanly() {
        let spec = ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 1.0).unwrap();
        let grid = make_grid(&spec, 513, Grading::Geometric).unwrap();
        let report = solve_fd(&spec, &grid).unwrap();
        assert!(!report.flags.no_convergence);
        assert!(!report.flags.went_negative);
        assert!(!report.flags.exceeded_k);
        assert!(report.iterations <= 10);
        // solution lives strictly between zero and the boundary value
        assert!(report.profile.min_value() >= 0.0);
        assert!(report.profile.max_value() <= spec.k);
    }

    #[test]
    fn large_boundary_data_still_converges_with_damping() {
        let spec = ProblemSpec::new(Variant::Absorption, 4, 2.5, 0.1, 5.0).unwrap();
        let grid = make_grid(&spec, 513, Grading::Geometric).unwrap();
        let report = solve_fd(&spec, &grid).unwrap();
        assert!(!report.flags.no_convergence);
        assert!(report.profile.min_value() >= -1e-10);
    }

    #[test]
    fn zero_boundary_data_is_already_solved() {
        let spec = ProblemSpec::new(Variant::Source, 3, 2.0, 0.5, 0.0).unwrap();
        let grid = make_grid(&spec, 65, Grading::Uniform).unwrap();
        let report = solve_fd(&spec, &grid).unwrap();
        assert_eq!(report.iterations, 0);
        assert!(report.profile.values().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn tridiagonal_elimination_matches_a_dense_check() {
        // 4x4 system with known solution (1, 2, 3, 4)
        let sub = [0.0, 1.0, 2.0, -1.0];
        let diag = [4.0, 5.0, 6.0, 3.0];
        let sup_ = [1.0, -2.0, 0.5, 0.0];
        let xs = [1.0, 2.0, 3.0, 4.0];
        let mut rhs = [
            diag[0] * xs[0] + sup_[0] * xs[1],
            sub[1] * xs[0] + diag[1] * xs[1] + sup_[1] * xs[2],
            sub[2] * xs[1] + diag[2] * xs[2] + sup_[2] * xs[3],
            sub[3] * xs[2] + diag[3] * xs[3],
        ];
        thomas(&sub, &diag, &sup_, &mut rhs).unwrap();
        for (got, want) in rhs.iter().zip(xs.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        let sub = [0.0, 1.0];
        let diag = [0.0, 1.0];
        let sup_ = [1.0, 0.0];
        let mut rhs = [1.0, 1.0];
        assert!(matches!(
            thomas(&sub, &diag, &sup_, &mut rhs),
            Err(Error::SingularJacobian { row: 0, .. })
        ));
    }
}
