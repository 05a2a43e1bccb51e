//! Upper and lower solution construction by the comparison method, plus the
//! empirical calibration of the decay-estimate constants.
//!
//! The key order relations behind the ladder (all relative to the true
//! solution u with the same boundary data):
//!
//! * absorption (s = +1): the integral map reverses order, so applying it to
//!   a lower bound yields an upper bound and vice versa; inputs above k are
//!   clamped to k first, which is safe because u itself never exceeds k.
//! * source (s = -1): the map preserves order, so each side improves itself;
//!   the upper chain is only valid on the branch where u stays below k,
//!   which the solver flags.

use crate::error::{Error, Result};
use crate::green::{picard_map_with, QuadratureConfig};
use crate::grid::{Profile, RadialGrid};
use crate::problem::{harmonic_profile, quadratic_source_profile, ProblemSpec, Variant};
use serde::Serialize;

/// A bound profile together with the name of the rule that produced it.
#[derive(Debug, Clone)]
pub struct LabeledProfile {
    pub label: String,
    pub profile: Profile,
}

/// The collection of bounds certified against a solution.
#[derive(Debug, Clone, Default)]
pub struct BoundSet {
    pub lowers: Vec<LabeledProfile>,
    pub uppers: Vec<LabeledProfile>,
}

impl BoundSet {
    /// Worst violation of the pairwise ordering: max over all lower/upper
    /// pairs and nodes of (lower - upper). Negative infinity when either
    /// side is empty; values at or below roughly quadrature noise mean the
    /// set is consistently ordered.
    pub fn max_cross_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for lo in &self.lowers {
            for up in &self.uppers {
                for (l, u) in lo.profile.values().iter().zip(up.profile.values()) {
                    worst = worst.max(l - u);
                }
            }
        }
        worst
    }

    fn push_lower(&mut self, label: String, profile: Profile) {
        self.lowers.push(LabeledProfile { label, profile });
    }

    fn push_upper(&mut self, label: String, profile: Profile) {
        self.uppers.push(LabeledProfile { label, profile });
    }
}

/// The two explicit bounds: the harmonic profile on one side and the
/// constant-source quadratic profile on the other. Which is which depends
/// on the sign of the nonlinearity.
pub fn closed_form_bounds(spec: &ProblemSpec, grid: &RadialGrid) -> Result<BoundSet> {
    spec.validate()?;
    let quadratic = quadratic_source_profile(spec, grid)?; // rejects Laplace
    let harmonic = harmonic_profile(spec, grid)?;
    let mut set = BoundSet::default();
    match spec.variant {
        Variant::Absorption => {
            set.push_upper("Eq23".to_string(), harmonic);
            set.push_lower("Eq25".to_string(), quadratic);
        }
        Variant::Source => {
            set.push_lower("Eq23".to_string(), harmonic);
            set.push_upper("Eq25".to_string(), quadratic);
        }
        Variant::Laplace => unreachable!("quadratic_source_profile rejects Laplace"),
    }
    Ok(set)
}

fn clamp_floor(profile: Profile) -> Result<Profile> {
    profile.map(|v| v.max(0.0))
}

fn clamp_ceiling(profile: &Profile, k: f64) -> Result<Profile> {
    profile.clone().map(|v| v.min(k))
}

/// Iterated comparison bounds. `steps` counts applications of the integral
/// map. Absorption alternates sides (odd steps sharpen the upper bound,
/// even steps the lower); Source advances both sides each step.
pub fn bound_ladder(
    spec: &ProblemSpec,
    grid: &RadialGrid,
    steps: usize,
) -> Result<BoundSet> {
    bound_ladder_with(spec, grid, steps, QuadratureConfig::default())
}

/// `bound_ladder` under an explicit quadrature configuration.
pub fn bound_ladder_with(
    spec: &ProblemSpec,
    grid: &RadialGrid,
    steps: usize,
    quad: QuadratureConfig,
) -> Result<BoundSet> {
    spec.validate()?;
    if spec.variant == Variant::Laplace {
        return Err(Error::VariantMismatch {
            op: "bound_ladder",
            variant: spec.variant.name().to_string(),
        });
    }
    if steps == 0 {
        return Err(Error::BadArgument {
            what: "bound_ladder needs at least one step".to_string(),
        });
    }
    let rule = quad.rule;
    let mut set = BoundSet::default();

    match spec.variant {
        Variant::Absorption => {
            // seed: the trivial lower bound 0 (not recorded)
            let mut lower = Profile::constant(grid.clone(), 0.0)?;
            let mut upper: Option<Profile> = None;
            for step in 1..=steps {
                if step % 2 == 1 {
                    // mapping a lower bound lands above the solution
                    let next = picard_map_with(&lower, spec, rule)?;
                    let label = if step == 1 {
                        "Eq23".to_string()
                    } else {
                        format!("PicardStep {}", step)
                    };
                    set.push_upper(label, next.clone());
                    upper = Some(next);
                } else {
                    // mapping an upper bound (capped at k) lands below
                    let capped = clamp_ceiling(upper.as_ref().expect("step 1 precedes"), spec.k)?;
                    let next = clamp_floor(picard_map_with(&capped, spec, rule)?)?;
                    set.push_lower(format!("PicardStep {}", step), next.clone());
                    lower = next;
                }
            }
        }
        Variant::Source => {
            // both chains advance every step; the upper chain starts at the
            // constant k and is valid on the bounded branch only
            let mut lower = Profile::constant(grid.clone(), 0.0)?;
            let mut upper = Profile::constant(grid.clone(), spec.k)?;
            for step in 1..=steps {
                lower = clamp_floor(picard_map_with(&lower, spec, rule)?)?;
                upper = picard_map_with(&clamp_ceiling(&upper, spec.k)?, spec, rule)?;
                let (lo_label, up_label) = if step == 1 {
                    ("Eq23".to_string(), "Eq25".to_string())
                } else {
                    (
                        format!("PicardStep {} lower", step),
                        format!("PicardStep {} upper", step),
                    )
                };
                set.push_lower(lo_label, lower.clone());
                set.push_upper(up_label, upper.clone());
            }
        }
        Variant::Laplace => unreachable!(),
    }
    Ok(set)
}

/// Decay weight (d/x)^(n-2) - d^(n-2): the radial tail profile the
/// calibrated estimate multiplies. It vanishes at the outer boundary like
/// the solution itself, so the quotient u / (k * tail) stays finite there;
/// for the pure Laplace solution the quotient is the constant
/// 1/(1 - d^(n-2)).
fn decay_tail(x: f64, n: u32, d: f64) -> f64 {
    let p = n as i32 - 2;
    (d / x).powi(p) - d.powi(p)
}

/// One calibration input with the ratio it contributed.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationCase {
    pub n: u32,
    pub q: f64,
    pub d: f64,
    pub k: f64,
    /// Laplace/Source: max over nodes of u/(k * tail). Absorption: max over
    /// nodes of u/tail (the quantity the two-constant form must dominate).
    pub max_ratio: f64,
}

/// Fitted constants of the decay estimate.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum FittedConstants {
    /// Single-constant form C * k * tail(x).
    Single { c: f64 },
    /// Two-constant form (c1 * k + c2 * k^(q-1) * d^2) * tail(x).
    Pair { c1: f64, c2: f64 },
}

impl FittedConstants {
    /// Scalar used for cross-level stability comparison.
    pub fn scalar(&self) -> f64 {
        match *self {
            FittedConstants::Single { c } => c,
            FittedConstants::Pair { c1, c2 } => c1.max(c2),
        }
    }
}

/// Fit for one inner-radius level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelFit {
    pub d: f64,
    pub constants: FittedConstants,
}

/// Output of `calibrate_theorem1`.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationResult {
    pub variant: Variant,
    /// Fit over every case together.
    pub constants: FittedConstants,
    pub per_case: Vec<CalibrationCase>,
    /// Fits restricted to each d level, ascending in d.
    pub per_level: Vec<LevelFit>,
    /// max/min of the fitted scalar across levels (1 when only one level).
    pub stability: f64,
}

fn ratio_of(profile: &Profile, spec: &ProblemSpec, divide_k: bool) -> f64 {
    let nodes = profile.grid().nodes();
    let mut worst = 0.0_f64;
    for (&x, &u) in nodes.iter().zip(profile.values()) {
        let tail = decay_tail(x, spec.n, spec.d);
        if tail <= 0.0 {
            continue; // the outer boundary node, where both sides vanish
        }
        let denom = if divide_k { spec.k * tail } else { tail };
        worst = worst.max(u / denom);
    }
    worst
}

/// Two-constant feasibility sweep: the smallest (in the max norm)
/// non-negative pair (c1, c2) with c1*k_j + c2*k_j^(q-1)*d_j^2 >= S_j for
/// every case j. For a fixed c2 the smallest feasible c1 is a max of
/// ratios, so the sweep scans c2 and keeps the pair minimizing max(c1, c2),
/// preferring smaller c2 on ties.
fn fit_pair(cases: &[&CalibrationCase]) -> FittedConstants {
    let c1_at = |c2: f64| -> f64 {
        cases
            .iter()
            .map(|case| {
                let weight = case.k.powf(case.q - 1.0) * case.d * case.d;
                (case.max_ratio - c2 * weight) / case.k
            })
            .fold(0.0_f64, f64::max)
    };
    let c2_hi = c1_at(0.0);
    if c2_hi == 0.0 {
        return FittedConstants::Pair { c1: 0.0, c2: 0.0 };
    }
    let samples = 2000usize;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=samples {
        let c2 = c2_hi * i as f64 / samples as f64;
        let c1 = c1_at(c2);
        let objective = c1.max(c2);
        if objective < best.0 {
            best = (objective, c1, c2);
        }
    }
    FittedConstants::Pair {
        c1: best.1,
        c2: best.2,
    }
}

fn fit_cases(variant: Variant, cases: &[&CalibrationCase]) -> FittedConstants {
    match variant {
        Variant::Absorption => fit_pair(cases),
        _ => FittedConstants::Single {
            c: cases
                .iter()
                .map(|case| case.max_ratio)
                .fold(0.0_f64, f64::max),
        },
    }
}

/// Fit the decay-estimate constants against computed solutions.
///
/// Cases with k = 0 carry no information (the trivial solution divides out)
/// and are skipped; if nothing remains the sweep is empty.
pub fn calibrate_theorem1(cases: &[(ProblemSpec, Profile)]) -> Result<CalibrationResult> {
    let mut usable: Vec<CalibrationCase> = Vec::new();
    let mut variant: Option<Variant> = None;
    for (spec, profile) in cases {
        spec.validate()?;
        match variant {
            None => variant = Some(spec.variant),
            Some(v) if v != spec.variant => {
                return Err(Error::MixedVariants {
                    first: v.name().to_string(),
                    second: spec.variant.name().to_string(),
                });
            }
            _ => {}
        }
        if profile.grid().inner() != spec.d || profile.grid().outer() != 1.0 {
            return Err(Error::GridMismatch {
                detail: "calibration profile does not live on the case's annulus".to_string(),
            });
        }
        if spec.k == 0.0 {
            continue;
        }
        let divide_k = spec.variant != Variant::Absorption;
        usable.push(CalibrationCase {
            n: spec.n,
            q: spec.q,
            d: spec.d,
            k: spec.k,
            max_ratio: ratio_of(profile, spec, divide_k),
        });
    }
    let variant = variant.ok_or(Error::EmptySweep)?;
    if usable.is_empty() {
        return Err(Error::EmptySweep);
    }

    let all: Vec<&CalibrationCase> = usable.iter().collect();
    let constants = fit_cases(variant, &all);

    let mut levels: Vec<f64> = usable.iter().map(|c| c.d).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let per_level: Vec<LevelFit> = levels
        .iter()
        .map(|&d| {
            let members: Vec<&CalibrationCase> =
                usable.iter().filter(|c| c.d == d).collect();
            LevelFit {
                d,
                constants: fit_cases(variant, &members),
            }
        })
        .collect();

    let scalars: Vec<f64> = per_level.iter().map(|l| l.constants.scalar()).collect();
    let hi = scalars.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let lo = scalars.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let stability = if lo > 0.0 {
        hi / lo
    } else if hi == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };

    Ok(CalibrationResult {
        variant,
        constants,
        per_case: usable,
        per_level,
        stability,
    })
}
