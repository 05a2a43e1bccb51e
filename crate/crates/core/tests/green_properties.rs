//! Properties of the integral operator: boundary reproduction, closed-form
//! agreement, order reversal, and quadrature convergence.

use emfow::{
    apply_green, apply_green_detailed, apply_green_with, d0_constant, harmonic_profile, make_grid,
    picard_map, quadratic_source_profile, residual_against, Grading, Profile, ProblemSpec,
    QuadratureRule, Variant,
};
use proptest::prelude::*;

fn absorption(n: u32, q: f64, d: f64, k: f64) -> ProblemSpec {
    ProblemSpec::new(Variant::Absorption, n, q, d, k).unwrap()
}

#[test]
fn zero_source_reproduces_the_harmonic_profile_across_the_parameter_box() {
    for n in [3u32, 4, 5] {
        for d in [0.1, 0.5] {
            for k in [0.5, 1.0] {
                let spec = absorption(n, 2.0, d, k);
                let grid = make_grid(&spec, 1025, Grading::Geometric).unwrap();
                let zero = Profile::constant(grid.clone(), 0.0).unwrap();
                let w = apply_green(&zero, &spec).unwrap();
                let h = harmonic_profile(&spec, &grid).unwrap();
                let gap = w.sup_diff(&h).unwrap();
                assert!(
                    gap <= 1e-12,
                    "n={} d={} k={}: zero-source gap {}",
                    n,
                    d,
                    k,
                    gap
                );
            }
        }
    }
}

#[test]
fn constant_source_matches_the_quadratic_profile_across_the_parameter_box() {
    for n in [3u32, 4, 5] {
        for d in [0.1, 0.5] {
            for k in [0.5, 1.0] {
                let spec = absorption(n, 2.0, d, k);
                let grid = make_grid(&spec, 1025, Grading::Geometric).unwrap();
                let f = Profile::constant(grid.clone(), k.powf(spec.q)).unwrap();
                let (w, d_moment) =
                    apply_green_detailed(&f, &spec, QuadratureRule::Simpson).unwrap();
                let explicit = quadratic_source_profile(&spec, &grid).unwrap();
                let gap = w.sup_diff(&explicit).unwrap();
                assert!(gap <= 1e-7, "n={} d={} k={}: gap {}", n, d, k, gap);
                let d0 = d0_constant(&spec);
                let rel = (d_moment - d0).abs() / d0.abs();
                assert!(rel <= 1e-8, "n={} d={} k={}: D rel err {}", n, d, k, rel);
            }
        }
    }
}

#[test]
fn zero_boundary_data_with_unit_source_recovers_the_source_under_the_stencil() {
    // w solves Lw = 1 with w(d) = w(1) = 0; the discrete operator applied to
    // the computed profile must converge to that source at second order
    let spec = ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 0.0).unwrap();
    let mut gaps = Vec::new();
    for m in [257usize, 513, 1025] {
        let grid = make_grid(&spec, m, Grading::Geometric).unwrap();
        let f = Profile::constant(grid.clone(), 1.0).unwrap();
        let w = apply_green(&f, &spec).unwrap();
        assert!(w.values()[0].abs() <= 1e-12);
        assert!(w.values().last().unwrap().abs() <= 1e-12);
        gaps.push(residual_against(&w, &f, &spec).unwrap());
    }
    assert!(gaps[0] / gaps[1] > 3.5, "gaps: {:?}", gaps);
    assert!(gaps[1] / gaps[2] > 3.5, "gaps: {:?}", gaps);
}

#[test]
fn bigger_sources_give_smaller_profiles() {
    let spec = absorption(4, 2.0, 0.2, 1.0);
    let grid = make_grid(&spec, 513, Grading::Geometric).unwrap();
    let small = Profile::from_fn(grid.clone(), |x| 0.2 + 0.1 * x).unwrap();
    let large = Profile::from_fn(grid.clone(), |x| 0.5 + 0.3 * x * x).unwrap();
    let w_small = apply_green(&small, &spec).unwrap();
    let w_large = apply_green(&large, &spec).unwrap();
    let worst = w_large
        .values()
        .iter()
        .zip(w_small.values())
        .map(|(l, s)| l - s)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(worst <= 1e-8, "order reversal violated by {}", worst);
}

#[test]
fn trapezoid_rule_converges_at_second_order_on_graded_grids() {
    let spec = absorption(4, 2.0, 0.1, 1.0);
    let mut errors = Vec::new();
    for m in [129usize, 257, 513, 1025] {
        let grid = make_grid(&spec, m, Grading::Geometric).unwrap();
        let f = Profile::constant(grid.clone(), spec.k.powf(spec.q)).unwrap();
        let w = apply_green_with(&f, &spec, QuadratureRule::Trapezoid).unwrap();
        let explicit = quadratic_source_profile(&spec, &grid).unwrap();
        errors.push(w.sup_diff(&explicit).unwrap());
    }
    let slope = (errors[0] / errors[3]).ln() / 8.0_f64.ln();
    assert!(slope >= 1.9, "trapezoid order {} from {:?}", slope, errors);
}

#[test]
fn parabolic_rule_meets_the_accuracy_target_where_the_trapezoid_misses() {
    // the accuracy argument for the default rule, at the hardest corner of
    // the parameter box: same grid, same source, 1e-7 target
    let spec = absorption(5, 2.0, 0.1, 1.0);
    let grid = make_grid(&spec, 1025, Grading::Geometric).unwrap();
    let f = Profile::constant(grid.clone(), 1.0).unwrap();
    let explicit = quadratic_source_profile(&spec, &grid).unwrap();
    let trap = apply_green_with(&f, &spec, QuadratureRule::Trapezoid)
        .unwrap()
        .sup_diff(&explicit)
        .unwrap();
    let simp = apply_green_with(&f, &spec, QuadratureRule::Simpson)
        .unwrap()
        .sup_diff(&explicit)
        .unwrap();
    assert!(trap > 1e-7, "trapezoid unexpectedly fine: {}", trap);
    assert!(simp <= 1e-7, "parabolic rule too coarse: {}", simp);
    assert!(simp * 5.0 < trap, "simpson {} vs trapezoid {}", simp, trap);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn picard_output_stays_between_zero_and_the_harmonic_profile(
        values in proptest::collection::vec(0.0_f64..=1.0, 65)
    ) {
        // any admissible input below k maps into [0, harmonic]: the map
        // reverses order and picard(0) is the harmonic profile itself
        let spec = absorption(3, 2.0, 0.5, 1.0);
        let grid = make_grid(&spec, 65, Grading::Geometric).unwrap();
        let u = Profile::new(grid.clone(), values).unwrap();
        let w = picard_map(&u, &spec).unwrap();
        let h = harmonic_profile(&spec, &grid).unwrap();
        for (i, (&wi, &hi)) in w.values().iter().zip(h.values()).enumerate() {
            prop_assert!(wi <= hi + 1e-9, "node {}: {} > harmonic {}", i, wi, hi);
        }
        // the source k^q-capped profile is the corresponding floor
        let quad = quadratic_source_profile(&spec, &grid).unwrap();
        for (i, (&wi, &qi)) in w.values().iter().zip(quad.values()).enumerate() {
            prop_assert!(wi >= qi - 1e-9, "node {}: {} < quadratic {}", i, wi, qi);
        }
    }

    #[test]
    fn picard_map_reverses_pointwise_order(
        base in proptest::collection::vec(0.0_f64..=0.9, 65),
        bump in proptest::collection::vec(0.0_f64..=0.1, 65)
    ) {
        let spec = absorption(3, 2.0, 0.5, 1.0);
        let grid = make_grid(&spec, 65, Grading::Geometric).unwrap();
        let lo = Profile::new(grid.clone(), base.clone()).unwrap();
        let hi_values: Vec<f64> = base.iter().zip(&bump).map(|(b, e)| b + e).collect();
        let hi = Profile::new(grid, hi_values).unwrap();
        let w_lo = picard_map(&lo, &spec).unwrap();
        let w_hi = picard_map(&hi, &spec).unwrap();
        for (i, (&a, &b)) in w_lo.values().iter().zip(w_hi.values()).enumerate() {
            prop_assert!(a >= b - 1e-9, "node {}: map({}) < map({})", i, a, b);
        }
    }
}
