//! Cumulative quadrature on non-uniform node sets.
//!
//! Both rules return the running integral at every node in a single O(m)
//! pass. The parabolic rule fits a quadratic through each pair of adjacent
//! intervals (three nodes) and integrates it over each sub-interval
//! separately, which generalizes the composite rule to uneven spacing and
//! still yields cumulative values at every node.

use serde::{Deserialize, Serialize};

/// Quadrature rule for the kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    /// Composite trapezoid; second order.
    Trapezoid,
    /// Pairwise parabolic fit (composite Simpson generalized to uneven
    /// nodes); fourth order on smoothly graded grids.
    Simpson,
}

/// Per-interval increments inc[i] = integral of the sampled integrand over
/// [x[i], x[i+1]].
pub fn interval_increments(x: &[f64], phi: &[f64], rule: QuadratureRule) -> Vec<f64> {
    let m = x.len();
    debug_assert_eq!(m, phi.len());
    debug_assert!(m >= 2);
    let mut inc = vec![0.0; m - 1];
    match rule {
        QuadratureRule::Trapezoid => {
            for i in 0..m - 1 {
                inc[i] = 0.5 * (phi[i] + phi[i + 1]) * (x[i + 1] - x[i]);
            }
        }
        QuadratureRule::Simpson => {
            if m == 2 {
                inc[0] = 0.5 * (phi[0] + phi[1]) * (x[1] - x[0]);
                return inc;
            }
            // Pairs of intervals anchored at the left end; a dangling last
            // interval reuses the final three-node parabola.
            let mut i = 0;
            while i + 2 < m {
                let (hm, hp) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
                inc[i] = parabola_piece(hm, hp, phi[i], phi[i + 1], phi[i + 2], -hm, 0.0);
                inc[i + 1] = parabola_piece(hm, hp, phi[i], phi[i + 1], phi[i + 2], 0.0, hp);
                i += 2;
            }
            if i + 2 == m {
                // odd interval count: integrate the last parabola over the
                // trailing interval [x[m-2], x[m-1]]
                let (hm, hp) = (x[m - 2] - x[m - 3], x[m - 1] - x[m - 2]);
                inc[m - 2] =
                    parabola_piece(hm, hp, phi[m - 3], phi[m - 2], phi[m - 1], 0.0, hp);
            }
        }
    }
    inc
}

/// Integral over [lo, hi] of the quadratic through (-hm, f0), (0, f1),
/// (hp, f2), all coordinates relative to the middle node. Working in the
/// shifted frame keeps every term O(h^3) and avoids cancellation against the
/// absolute node positions.
fn parabola_piece(hm: f64, hp: f64, f0: f64, f1: f64, f2: f64, lo: f64, hi: f64) -> f64 {
    let i0 = hi - lo;
    let i1 = 0.5 * (hi * hi - lo * lo);
    let i2 = (hi * hi * hi - lo * lo * lo) / 3.0;
    let w0 = (i2 - hp * i1) / (hm * (hm + hp));
    let w1 = -(i2 + (hm - hp) * i1 - hm * hp * i0) / (hm * hp);
    let w2 = (i2 + hm * i1) / (hp * (hm + hp));
    f0 * w0 + f1 * w1 + f2 * w2
}

/// Cumulative integral measured from the right endpoint:
/// out[j] = integral of phi over [x[j], x[last]], so out[last] = 0 exactly.
pub fn cumulative_from_right(x: &[f64], phi: &[f64], rule: QuadratureRule) -> Vec<f64> {
    let inc = interval_increments(x, phi, rule);
    let m = x.len();
    let mut out = vec![0.0; m];
    for i in (0..m - 1).rev() {
        out[i] = out[i + 1] + inc[i];
    }
    out
}
