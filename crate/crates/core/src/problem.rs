//! Problem definition and the closed-form profiles attached to it.
//!
//! The radial reduction of the annulus Dirichlet problem reads
//!
//! ```text
//! u'' + (n-1)/r * u' = s * |u|^(q-1) u   on (d, 1),   u(d) = k, u(1) = 0,
//! ```
//!
//! with `s = +1` for the absorption equation, `s = -1` for the source
//! equation and `s = 0` for the plain Laplace problem. This module owns the
//! parameter record, its validation, and the closed-form profiles (the
//! harmonic solution and the explicit quadratic-plus-kernel comparison
//! profile) that the bound engine builds on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Profile, RadialGrid};

/// Which equation is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// -Laplace(u) + |u|^(q-1) u = 0 (the nonlinearity absorbs).
    Absorption,
    /// Laplace(u) + |u|^(q-1) u = 0 (the nonlinearity feeds).
    Source,
    /// Laplace(u) = 0; linear reference case with an exact solution.
    Laplace,
}

impl Variant {
    /// Sign of the nonlinear term on the right-hand side of the radial ODE.
    pub fn sign(self) -> f64 {
        match self {
            Variant::Absorption => 1.0,
            Variant::Source => -1.0,
            Variant::Laplace => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Absorption => "absorption",
            Variant::Source => "source",
            Variant::Laplace => "laplace",
        }
    }
}

/// Parameters of one annulus problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub variant: Variant,
    /// Space dimension; must exceed 2 so the kernel x^(2-n) decays.
    pub n: u32,
    /// Nonlinearity exponent; admissible range is the open interval
    /// (1, (n+2)/(n-2)). Ignored by the Laplace variant.
    pub q: f64,
    /// Inner radius of the annulus, 0 < d < 1.
    pub d: f64,
    /// Dirichlet value on the inner sphere, k >= 0 (the outer value is 0).
    pub k: f64,
}

impl ProblemSpec {
    /// Validated constructor.
    pub fn new(variant: Variant, n: u32, q: f64, d: f64, k: f64) -> Result<Self> {
        let spec = ProblemSpec { variant, n, q, d, k };
        spec.validate()?;
        Ok(spec)
    }

    /// Supremum of the admissible exponent range, (n+2)/(n-2).
    pub fn q_max(&self) -> f64 {
        (self.n as f64 + 2.0) / (self.n as f64 - 2.0)
    }

    /// Check every parameter constraint. The exponent is not inspected for
    /// the Laplace variant, which has no nonlinear term.
    pub fn validate(&self) -> Result<()> {
        if self.n <= 2 {
            return Err(Error::DimensionTooSmall { n: self.n });
        }
        if self.variant != Variant::Laplace {
            let max = self.q_max();
            if !self.q.is_finite() || self.q <= 1.0 || self.q >= max {
                return Err(Error::ExponentOutOfRange { q: self.q, max });
            }
        }
        if !self.d.is_finite() || self.d <= 0.0 || self.d >= 1.0 {
            return Err(Error::RadiusOutOfRange { d: self.d });
        }
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(Error::NegativeBoundaryValue { k: self.k });
        }
        Ok(())
    }

    /// `|u|^(q-1) u` — odd extension of the power nonlinearity, so solvers
    /// remain well defined if an iterate dips below zero.
    pub fn nonlinearity(&self, u: f64) -> f64 {
        u.abs().powf(self.q - 1.0) * u
    }

    /// Derivative of the nonlinearity, `q |u|^(q-1)`.
    pub fn nonlinearity_prime(&self, u: f64) -> f64 {
        self.q * u.abs().powf(self.q - 1.0)
    }
}

/// The normalized harmonic kernel (x^(2-n) - 1)/(d^(2-n) - 1): the radial
/// harmonic function that is 1 at x = d and 0 at x = 1.
///
/// Both endpoint values are exact in floating point: the numerator vanishes
/// identically at x = 1, and at x = d numerator and denominator are the same
/// expression evaluated on the same bits.
pub(crate) fn harmonic_unit(x: f64, n: u32, d: f64) -> f64 {
    let p = 2 - n as i32;
    (x.powi(p) - 1.0) / (d.powi(p) - 1.0)
}

/// The harmonic profile k (x^(2-n) - 1)/(d^(2-n) - 1) sampled on `grid`.
///
/// This is the exact solution of the Laplace variant, the pointwise upper
/// bound for absorption, and the pointwise lower bound for the source
/// equation.
pub fn harmonic_profile(spec: &ProblemSpec, grid: &RadialGrid) -> Result<Profile> {
    spec.validate()?;
    let (n, d, k) = (spec.n, spec.d, spec.k);
    Profile::from_fn(grid.clone(), |x| k * harmonic_unit(x, n, d))
}

/// The inner-boundary value of the nested kernel moment of a constant
/// source k^q:
///
/// ```text
/// D0 = k^q / (2 n (n-2)) * (2 d^(2-n) + (n-2) d^2 - n)
/// ```
///
/// Always returned with the absorption orientation (positive source k^q);
/// the source variant negates it inside `theorem2_coefficients`.
pub fn d0_constant(spec: &ProblemSpec) -> f64 {
    let n = spec.n as f64;
    let p = 2 - spec.n as i32;
    spec.k.powf(spec.q) / (2.0 * n * (n - 2.0))
        * (2.0 * spec.d.powi(p) + (n - 2.0) * spec.d * spec.d - n)
}

/// Coefficients of the explicit comparison profile
/// `C1 x^(2-n) + C2 x^2 + C3` and its building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// Coefficient of the particular solution, ±k^q / (2 n (n-2)).
    pub c1_tilde: f64,
    /// Coefficient of the harmonic correction, -(k - D0)/(d^(2-n) - 1).
    pub c2_tilde: f64,
    /// Kernel coefficient, 2*c1_tilde - c2_tilde.
    pub c1: f64,
    /// Quadratic coefficient, c1_tilde * (n-2).
    pub c2: f64,
    /// Constant term, c2_tilde - n * c1_tilde.
    pub c3: f64,
    /// The leading-order kernel coefficient claimed by the closed-form
    /// analysis, (k -/+ k^q/(n(n-2)))/(d^(2-n) - 1). Reported alongside the
    /// exact `c1` so the small-d behaviour of the two can be compared; the
    /// two are not asserted to agree.
    pub principal: f64,
}

/// Coefficients of the comparison profile for the absorption and source
/// variants. The source variant is obtained by flipping the sign of k^q
/// everywhere it enters.
pub fn theorem2_coefficients(spec: &ProblemSpec) -> Result<CoefficientSet> {
    spec.validate()?;
    if spec.variant == Variant::Laplace {
        return Err(Error::VariantMismatch {
            op: "theorem2_coefficients",
            variant: spec.variant.name().to_string(),
        });
    }
    let n = spec.n as f64;
    let p = 2 - spec.n as i32;
    let kernel_at_d = spec.d.powi(p) - 1.0;
    // Signed k^q: positive for absorption, negative for source.
    let kq = spec.variant.sign() * spec.k.powf(spec.q);
    let d0 = spec.variant.sign() * d0_constant(spec);
    let c1_tilde = kq / (2.0 * n * (n - 2.0));
    let c2_tilde = -(spec.k - d0) / kernel_at_d;
    Ok(CoefficientSet {
        c1_tilde,
        c2_tilde,
        c1: 2.0 * c1_tilde - c2_tilde,
        c2: c1_tilde * (n - 2.0),
        c3: c2_tilde - n * c1_tilde,
        principal: (spec.k - kq / (n * (n - 2.0))) / kernel_at_d,
    })
}

/// The explicit comparison profile `C1 x^(2-n) + C2 x^2 + C3` on `grid`.
///
/// For absorption this is the pointwise lower bound produced by one
/// comparison step against the constant ceiling k; for the source equation
/// (with k^q negated) it is the pointwise upper bound valid on the branch
/// that stays below k. It interpolates the boundary data exactly up to
/// round-off. Not defined for the Laplace variant.
pub fn quadratic_source_profile(spec: &ProblemSpec, grid: &RadialGrid) -> Result<Profile> {
    let c = theorem2_coefficients(spec)?;
    let p = 2 - spec.n as i32;
    Profile::from_fn(grid.clone(), |x| {
        c.c1 * x.powi(p) + c.c2 * x * x + c.c3
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Grading};
    use approx::assert_abs_diff_eq;

    fn desk_spec() -> ProblemSpec {
        ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn validation_accepts_desk_case_and_rejects_bad_parameters() {
        assert!(desk_spec().validate().is_ok());
        assert!(matches!(
            ProblemSpec::new(Variant::Absorption, 2, 2.0, 0.5, 1.0),
            Err(Error::DimensionTooSmall { n: 2 })
        ));
        // q = 5 is the closed endpoint (n+2)/(n-2) for n = 3 and is rejected.
        assert!(matches!(
            ProblemSpec::new(Variant::Absorption, 3, 5.0, 0.5, 1.0),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            ProblemSpec::new(Variant::Absorption, 3, 1.0, 0.5, 1.0),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(matches!(
            ProblemSpec::new(Variant::Source, 3, 2.0, 1.5, 1.0),
            Err(Error::RadiusOutOfRange { .. })
        ));
        assert!(matches!(
            ProblemSpec::new(Variant::Source, 3, 2.0, 0.5, -1.0),
            Err(Error::NegativeBoundaryValue { .. })
        ));
        // The Laplace variant has no nonlinearity, so q is not inspected.
        assert!(ProblemSpec::new(Variant::Laplace, 3, 99.0, 0.5, 1.0).is_ok());
    }

    #[test]
    fn exponent_window_scales_with_dimension() {
        // (n+2)/(n-2) = 5 for n = 3: q = 4.9 admissible, 5.1 not.
        assert!(ProblemSpec::new(Variant::Absorption, 3, 4.9, 0.5, 1.0).is_ok());
        assert!(ProblemSpec::new(Variant::Absorption, 3, 5.1, 0.5, 1.0).is_err());
        // For n = 4 the window already closes at 3.
        assert!(ProblemSpec::new(Variant::Absorption, 4, 2.9, 0.5, 1.0).is_ok());
        assert!(ProblemSpec::new(Variant::Absorption, 4, 3.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn harmonic_profile_desk_values() {
        let spec = desk_spec();
        let grid = make_grid(&spec, 9, Grading::Uniform).unwrap();
        let h = harmonic_profile(&spec, &grid).unwrap();
        // boundary data are exact
        assert_eq!(h.values()[0], 1.0);
        assert_eq!(*h.values().last().unwrap(), 0.0);
        // interior value at x = 0.75: (1/0.75 - 1)/(1/0.5 - 1) = 1/3
        assert_abs_diff_eq!(h.sample(0.75), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn harmonic_profile_is_zero_for_zero_boundary_data() {
        let spec = ProblemSpec::new(Variant::Absorption, 4, 2.0, 0.3, 0.0).unwrap();
        let grid = make_grid(&spec, 33, Grading::Geometric).unwrap();
        let h = harmonic_profile(&spec, &grid).unwrap();
        assert!(h.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn d0_constant_desk_value() {
        // n=3, q=2, d=0.5, k=1: (1/6)(4 + 0.25 - 3) = 0.2083333...
        assert_abs_diff_eq!(d0_constant(&desk_spec()), 1.25 / 6.0, epsilon = 1e-15);
        let zero_k = ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 0.0).unwrap();
        assert_eq!(d0_constant(&zero_k), 0.0);
    }

    #[test]
    fn coefficient_set_desk_values() {
        let c = theorem2_coefficients(&desk_spec()).unwrap();
        assert_abs_diff_eq!(c.c1_tilde, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.c2_tilde, -0.7916666666666666, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c1, 1.125, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c2, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.c3, -1.2916666666666666, epsilon = 1e-12);
        // principal kernel coefficient: (1 - 1/3)/(2 - 1) = 2/3
        assert_abs_diff_eq!(c.principal, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn coefficient_boundary_identities() {
        // The comparison profile interpolates the boundary data:
        // C1 d^(2-n) + C2 d^2 + C3 = k and C1 + C2 + C3 = 0.
        for (n, d, k, q) in [
            (3u32, 0.5, 1.0, 2.0),
            (4, 0.1, 0.5, 1.5),
            (5, 0.3, 2.0, 1.2),
            (3, 0.25, 0.1, 2.5),
        ] {
            for variant in [Variant::Absorption, Variant::Source] {
                let spec = ProblemSpec::new(variant, n, q, d, k).unwrap();
                let c = theorem2_coefficients(&spec).unwrap();
                let p = 2 - n as i32;
                let at_d = c.c1 * d.powi(p) + c.c2 * d * d + c.c3;
                let at_one = c.c1 + c.c2 + c.c3;
                assert_abs_diff_eq!(at_d, k, epsilon = 1e-11 * k.max(1.0));
                assert_abs_diff_eq!(at_one, 0.0, epsilon = 1e-11 * k.max(1.0));
            }
        }
    }

    #[test]
    fn source_variant_flips_the_nonlinear_coefficient() {
        let a = theorem2_coefficients(&desk_spec()).unwrap();
        let s_spec = ProblemSpec::new(Variant::Source, 3, 2.0, 0.5, 1.0).unwrap();
        let s = theorem2_coefficients(&s_spec).unwrap();
        assert_abs_diff_eq!(s.c1_tilde, -a.c1_tilde, epsilon = 1e-15);
        // principal: absorption (k - k^q/(n(n-2)))/..., source (k + ...)/...
        assert_abs_diff_eq!(a.principal, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.principal, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn laplace_has_no_coefficient_set() {
        let spec = ProblemSpec::new(Variant::Laplace, 3, 2.0, 0.5, 1.0).unwrap();
        assert!(matches!(
            theorem2_coefficients(&spec),
            Err(Error::VariantMismatch { .. })
        ));
        let grid = make_grid(&spec, 9, Grading::Uniform).unwrap();
        assert!(matches!(
            quadratic_source_profile(&spec, &grid),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn quadratic_source_profile_desk_value() {
        let spec = desk_spec();
        let grid = make_grid(&spec, 9, Grading::Uniform).unwrap();
        let p = quadratic_source_profile(&spec, &grid).unwrap();
        // value at x = 0.75: 1.125/0.75 + (1/6)(0.5625) - 1.291666... = 0.302083...
        assert_abs_diff_eq!(p.sample(0.75), 0.3020833333333334, epsilon = 1e-12);
        assert_abs_diff_eq!(p.values()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(*p.values().last().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_boundary_data_degenerates_all_profiles_to_zero() {
        let spec = ProblemSpec::new(Variant::Absorption, 3, 2.0, 0.5, 0.0).unwrap();
        let grid = make_grid(&spec, 17, Grading::Uniform).unwrap();
        let h = harmonic_profile(&spec, &grid).unwrap();
        let qp = quadratic_source_profile(&spec, &grid).unwrap();
        assert!(h.values().iter().all(|&v| v == 0.0));
        assert!(qp.values().iter().all(|&v| v.abs() < 1e-300));
    }

    #[test]
    fn nonlinearity_is_odd_and_smooth_at_zero() {
        let spec = desk_spec();
        assert_eq!(spec.nonlinearity(0.0), 0.0);
        assert_abs_diff_eq!(spec.nonlinearity(2.0), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.nonlinearity(-2.0), -4.0, epsilon = 1e-15);
        let frac = ProblemSpec::new(Variant::Absorption, 3, 1.5, 0.5, 1.0).unwrap();
        assert_eq!(frac.nonlinearity(0.0), 0.0);
        assert_abs_diff_eq!(frac.nonlinearity(0.25), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(frac.nonlinearity(-0.25), -0.125, epsilon = 1e-15);
    }
}
