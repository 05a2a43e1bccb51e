//! Command-line harness over the `emfow` solver library.
//!
//! Three modes, all driven by a parameter sweep (the cartesian product of
//! the `--n/--q/--d/--k` lists under one `--variant`):
//!
//! * `certify`  — solve each case twice, check it against every bound, and
//!   write a JSON certificate per case plus a sweep summary CSV;
//! * `profile`  — solve each case once and write the radial profile, its
//!   stencil residual, and the closed-form bounds as CSV;
//! * `calibrate` — solve every case and fit the sharpest decay constants
//!   consistent with all of them, written as `calibration.json`.
//!
//! Sweeps run on a bounded worker pool, but files and summary rows are
//! emitted in case order, so runs with identical inputs are byte-identical.

use clap::{Parser, ValueEnum};
use emfow::certify::{certify_full, CertifyOptions};
use emfow::error::Error;
use emfow::{
    calibrate_theorem1, closed_form_bounds, make_grid, residual_profile, shoot, BoundSet,
    CalibrationResult, Certificate, CertifyArtifacts, Grading, Profile, ProblemSpec, Variant,
};
use serde::Deserialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Hard cap on sweep size; larger products are almost certainly a typo in a
/// list flag, and refusing early keeps the out-dir from filling with junk.
pub const MAX_SWEEP_CASES: usize = 10_000;

const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Absorption,
    Source,
    Laplace,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Absorption => Variant::Absorption,
            VariantArg::Source => Variant::Source,
            VariantArg::Laplace => Variant::Laplace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradingArg {
    Uniform,
    Geometric,
}

impl From<GradingArg> for Grading {
    fn from(g: GradingArg) -> Grading {
        match g {
            GradingArg::Uniform => Grading::Uniform,
            GradingArg::Geometric => Grading::Geometric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certify,
    Calibrate,
    Profile,
}

/// Certify, calibrate, or profile radial Emden-Fowler problems on an annulus.
#[derive(Debug, Parser)]
#[command(name = "emfow", version, about)]
pub struct Cli {
    /// Equation variant shared by every case in the sweep.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Space dimensions (integers > 2); comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,

    /// Nonlinearity exponents, each in (1, (n+2)/(n-2)).
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,

    /// Inner radii, each in (0, 1).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<f64>,

    /// Inner boundary values, each >= 0.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,

    /// Number of grid nodes per case.
    #[arg(long)]
    pub grid_size: Option<usize>,

    /// Node placement: uniform spacing or geometric clustering at the
    /// inner radius.
    #[arg(long, value_enum)]
    pub grading: Option<GradingArg>,

    /// What to do with each case.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    /// JSON sweep description; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Directory for per-case files and the sweep summary.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// In certify mode, also write each solution profile as CSV.
    #[arg(long)]
    pub emit_profile: bool,

    /// Worker threads (default: logical CPUs).
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Sweep description accepted via `--config`. Every field is optional; the
/// command line fills the gaps and wins on conflicts.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variant: Option<Variant>,
    #[serde(default)]
    pub n: Vec<u32>,
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default)]
    pub d: Vec<f64>,
    #[serde(default)]
    pub k: Vec<f64>,
    pub mode: Option<Mode>,
    pub grid_size: Option<usize>,
    pub grading: Option<Grading>,
    pub ladder_steps: Option<usize>,
    pub emit_profile: Option<bool>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved run plan: merged flags + config, with every case already
/// validated. Nothing is written to disk until one of these exists.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub variant: Variant,
    pub mode: Mode,
    pub grid_size: usize,
    pub grading: Grading,
    pub ladder_steps: usize,
    pub emit_profile: bool,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub cases: Vec<ProblemSpec>,
}

/// Merge the command line with an optional config file and validate every
/// case up front. Errors here are usage errors: nothing has been written.
pub fn resolve(cli: &Cli) -> Result<RunPlan, String> {
    let config: SweepConfig = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
        }
        None => SweepConfig::default(),
    };

    let variant: Variant = match (cli.variant, config.variant) {
        (Some(v), _) => v.into(),
        (None, Some(v)) => v,
        (None, None) => return Err("no variant given (use --variant or a config file)".into()),
    };
    let pick_list = |flag: &[f64], cfg: &[f64], name: &str| -> Result<Vec<f64>, String> {
        let chosen = if !flag.is_empty() { flag } else { cfg };
        if chosen.is_empty() {
            Err(format!("no values for --{name}"))
        } else {
            Ok(chosen.to_vec())
        }
    };
    let n_values = if !cli.n.is_empty() {
        cli.n.clone()
    } else {
        config.n.clone()
    };
    if n_values.is_empty() {
        return Err("no values for --n".into());
    }
    let q_values = pick_list(&cli.q, &config.q, "q")?;
    let d_values = pick_list(&cli.d, &config.d, "d")?;
    let k_values = pick_list(&cli.k, &config.k, "k")?;

    let defaults = CertifyOptions::default();
    let grid_size = cli.grid_size.or(config.grid_size).unwrap_or(defaults.grid_size);
    let grading = cli
        .grading
        .map(Grading::from)
        .or(config.grading)
        .unwrap_or(defaults.grading);
    let mode = cli.mode.or(config.mode).unwrap_or(Mode::Certify);
    let ladder_steps = config.ladder_steps.unwrap_or(defaults.ladder_steps);
    let emit_profile = cli.emit_profile || config.emit_profile.unwrap_or(false);
    let jobs = cli
        .jobs
        .or(config.jobs)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    let out_dir = cli
        .out_dir
        .clone()
        .or(config.out_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    if jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    if ladder_steps == 0 {
        return Err("ladder_steps must be at least 1".into());
    }

    let count = n_values.len() * q_values.len() * d_values.len() * k_values.len();
    if count > MAX_SWEEP_CASES {
        return Err(format!(
            "sweep has {count} cases, more than the limit of {MAX_SWEEP_CASES}"
        ));
    }

    let mut cases = Vec::with_capacity(count);
    for &n in &n_values {
        for &q in &q_values {
            for &d in &d_values {
                for &k in &k_values {
                    let spec = ProblemSpec::new(variant, n, q, d, k)
                        .map_err(|e| format!("case n={n} q={q} d={d} k={k}: {e}"))?;
                    cases.push(spec);
                }
            }
        }
    }

    // reject a bad grid size before touching the filesystem; reuse the
    // library's own check so the limits never drift apart
    make_grid(&cases[0], grid_size, grading).map_err(|e| format!("grid: {e}"))?;

    Ok(RunPlan {
        variant,
        mode,
        grid_size,
        grading,
        ladder_steps,
        emit_profile,
        jobs,
        out_dir,
        cases,
    })
}

/// Entry point behind `main`: 0 ok, 1 sweep had failures, 2 a single case
/// failed or could not be solved, 3 usage error (nothing written).
pub fn run(cli: Cli) -> i32 {
    let plan = match resolve(&cli) {
        Ok(plan) => plan,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 3;
        }
    };
    match execute(&plan) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            if plan.cases.len() == 1 {
                2
            } else {
                1
            }
        }
    }
}

/// Run the plan. `Err` here means an I/O or whole-sweep failure; per-case
/// solver failures are reported in the summary and through the exit code.
pub fn execute(plan: &RunPlan) -> Result<i32, String> {
    fs::create_dir_all(&plan.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", plan.out_dir.display()))?;
    match plan.mode {
        Mode::Certify => run_certify(plan),
        Mode::Profile => run_profile(plan),
        Mode::Calibrate => run_calibrate(plan),
    }
}

/// Apply `work` to every case on `jobs` threads, collecting results in case
/// order regardless of which worker finished first.
fn parallel_map<T, F>(cases: &[ProblemSpec], jobs: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &ProblemSpec) -> T + Sync,
{
    let workers = jobs.min(cases.len()).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..cases.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cases.len() {
                    break;
                }
                let out = work(i, &cases[i]);
                slots.lock().expect("result slots")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|slot| slot.expect("every case produced a result"))
        .collect()
}

/// 17-significant-digit float field: round-trips exactly through parsing.
fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

fn case_stem(index: usize) -> String {
    format!("{index:04}")
}

fn describe(index: usize, spec: &ProblemSpec) -> String {
    format!(
        "case {}: {} n={} q={} d={} k={}",
        case_stem(index),
        spec.variant.name(),
        spec.n,
        spec.q,
        spec.d,
        spec.k
    )
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// CSV of the solved profile: radius, solution, stencil residual, and (for
/// the nonlinear variants) the two closed-form bounds on their sides.
fn profile_csv(
    spec: &ProblemSpec,
    solution: &Profile,
    residual: &Profile,
    bounds: &BoundSet,
) -> Result<String, String> {
    let find = |list: &[emfow::LabeledProfile], label: &str| -> Result<Vec<f64>, String> {
        list.iter()
            .find(|b| b.label == label)
            .map(|b| b.profile.values().to_vec())
            .ok_or_else(|| format!("bound {label} missing from the computed set"))
    };
    let (header, col4, col5) = match spec.variant {
        Variant::Absorption => (
            "r,u,residual,upper_eq23,lower_eq25",
            Some(find(&bounds.uppers, "Eq23")?),
            Some(find(&bounds.lowers, "Eq25")?),
        ),
        Variant::Source => (
            "r,u,residual,lower_eq23,upper_eq25",
            Some(find(&bounds.lowers, "Eq23")?),
            Some(find(&bounds.uppers, "Eq25")?),
        ),
        Variant::Laplace => ("r,u,residual", None, None),
    };
    let nodes = solution.grid().nodes();
    let mut text = String::with_capacity(nodes.len() * 64);
    text.push_str(header);
    text.push('\n');
    for i in 0..nodes.len() {
        let _ = write!(
            text,
            "{},{},{}",
            fmt(nodes[i]),
            fmt(solution.values()[i]),
            fmt(residual.values()[i])
        );
        if let Some(c4) = &col4 {
            let _ = write!(text, ",{}", fmt(c4[i]));
        }
        if let Some(c5) = &col5 {
            let _ = write!(text, ",{}", fmt(c5[i]));
        }
        text.push('\n');
    }
    Ok(text)
}

fn run_certify(plan: &RunPlan) -> Result<i32, String> {
    let options = CertifyOptions {
        grid_size: plan.grid_size,
        grading: plan.grading,
        ladder_steps: plan.ladder_steps,
        ..CertifyOptions::default()
    };
    type CaseResult = Result<(Certificate, CertifyArtifacts), Error>;
    let outcomes: Vec<CaseResult> =
        parallel_map(&plan.cases, plan.jobs, |_, spec| certify_full(spec, &options));

    let mut summary = String::from(
        "index,variant,n,q,d,k,verdict,positivity_margin,solver_gap,relative_residual,worst_margin,caveat_count\n",
    );
    let mut any_failed = false;
    let mut any_error = false;
    let mut single_verdict = None;

    for (index, (spec, outcome)) in plan.cases.iter().zip(&outcomes).enumerate() {
        let prefix = format!(
            "{},{},{},{},{},{}",
            index,
            spec.variant.name(),
            spec.n,
            spec.q,
            spec.d,
            spec.k
        );
        match outcome {
            Ok((cert, artifacts)) => {
                let path = plan.out_dir.join(format!("certificate_{}.json", case_stem(index)));
                write_text(&path, &(cert.to_json() + "\n"))?;
                if plan.emit_profile {
                    let csv =
                        profile_csv(spec, &artifacts.solution, &artifacts.residual, &artifacts.bounds)?;
                    let path = plan.out_dir.join(format!("profile_{}.csv", case_stem(index)));
                    write_text(&path, &csv)?;
                }
                let worst = cert
                    .bound_margins
                    .values()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                let worst_field = if cert.bound_margins.is_empty() {
                    String::new()
                } else {
                    fmt(worst)
                };
                let _ = writeln!(
                    summary,
                    "{prefix},{},{},{},{},{},{}",
                    cert.verdict.as_str(),
                    fmt(cert.positivity_margin),
                    fmt(cert.solver_gap),
                    fmt(cert.relative_residual),
                    worst_field,
                    cert.caveats.len()
                );
                println!("{} -> {}", describe(index, spec), cert.verdict.as_str());
                if cert.verdict == emfow::Verdict::Failed {
                    any_failed = true;
                }
                single_verdict = Some(cert.verdict);
            }
            Err(err) => {
                let _ = writeln!(summary, "{prefix},error,,,,,");
                eprintln!("{} -> error: {err}", describe(index, spec));
                any_error = true;
            }
        }
    }
    write_text(&plan.out_dir.join("sweep_summary.csv"), &summary)?;

    if plan.cases.len() == 1 {
        let code = match single_verdict {
            Some(emfow::Verdict::Certified) => 0,
            Some(emfow::Verdict::CertifiedWithCaveats) => 1,
            Some(emfow::Verdict::Failed) | None => 2,
        };
        if code == 0 || code == 1 {
            // single-case runs print the certificate itself for piping
            if let Ok((cert, _)) = &outcomes[0] {
                println!("{}", cert.to_json());
            }
        }
        return Ok(code);
    }
    Ok(if any_failed || any_error { 1 } else { 0 })
}

struct ProfileRun {
    solution: Profile,
    residual: Profile,
    bounds: BoundSet,
    residual_norm: f64,
    boundary_mismatch: f64,
}

fn run_profile(plan: &RunPlan) -> Result<i32, String> {
    let outcomes: Vec<Result<ProfileRun, Error>> =
        parallel_map(&plan.cases, plan.jobs, |_, spec| {
            let grid = make_grid(spec, plan.grid_size, plan.grading)?;
            let report = shoot(spec, &grid)?;
            let residual = residual_profile(&report.profile, spec)?;
            let bounds = if spec.variant == Variant::Laplace {
                BoundSet::default()
            } else {
                closed_form_bounds(spec, &grid)?
            };
            Ok(ProfileRun {
                solution: report.profile,
                residual,
                bounds,
                residual_norm: report.residual_norm,
                boundary_mismatch: report.boundary_mismatch,
            })
        });

    let mut summary = String::from(
        "index,variant,n,q,d,k,min_u,max_u,residual_norm,boundary_mismatch\n",
    );
    let mut any_error = false;
    for (index, (spec, outcome)) in plan.cases.iter().zip(&outcomes).enumerate() {
        let prefix = format!(
            "{},{},{},{},{},{}",
            index,
            spec.variant.name(),
            spec.n,
            spec.q,
            spec.d,
            spec.k
        );
        match outcome {
            Ok(run) => {
                let csv = profile_csv(spec, &run.solution, &run.residual, &run.bounds)?;
                let path = plan.out_dir.join(format!("profile_{}.csv", case_stem(index)));
                write_text(&path, &csv)?;
                let _ = writeln!(
                    summary,
                    "{prefix},{},{},{},{}",
                    fmt(run.solution.min_value()),
                    fmt(run.solution.max_value()),
                    fmt(run.residual_norm),
                    fmt(run.boundary_mismatch)
                );
                println!("{} -> profile written", describe(index, spec));
            }
            Err(err) => {
                let _ = writeln!(summary, "{prefix},,,,");
                eprintln!("{} -> error: {err}", describe(index, spec));
                any_error = true;
            }
        }
    }
    write_text(&plan.out_dir.join("sweep_summary.csv"), &summary)?;
    Ok(match (any_error, plan.cases.len()) {
        (false, _) => 0,
        (true, 1) => 2,
        (true, _) => 1,
    })
}

fn run_calibrate(plan: &RunPlan) -> Result<i32, String> {
    let outcomes: Vec<Result<Profile, Error>> = parallel_map(&plan.cases, plan.jobs, |_, spec| {
        let grid = make_grid(spec, plan.grid_size, plan.grading)?;
        Ok(shoot(spec, &grid)?.profile)
    });
    let mut solved = Vec::with_capacity(plan.cases.len());
    for (index, (spec, outcome)) in plan.cases.iter().zip(outcomes).enumerate() {
        match outcome {
            Ok(profile) => solved.push((*spec, profile)),
            Err(err) => {
                eprintln!("{} -> error: {err}", describe(index, spec));
                return Ok(if plan.cases.len() == 1 { 2 } else { 1 });
            }
        }
    }
    let result: CalibrationResult =
        calibrate_theorem1(&solved).map_err(|e| format!("calibration: {e}"))?;
    let value = serde_json::to_value(&result).map_err(|e| format!("serialize: {e}"))?;
    let text = serde_json::to_string_pretty(&value).map_err(|e| format!("serialize: {e}"))?
        + "\n";
    write_text(&plan.out_dir.join("calibration.json"), &text)?;
    println!(
        "calibrated {} {} case(s): stability {}",
        solved.len(),
        plan.variant.name(),
        result.stability
    );
    Ok(0)
}
