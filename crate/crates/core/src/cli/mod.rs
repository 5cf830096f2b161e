//! Command dispatch, check evaluation and artifact emission for `pfront`.

pub mod config;
pub mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{
    boundary_between, fit_power_law, probe_local_solution, profile_boundary, run_with_truncation, sandwich_slack,
    verdicts_csv, verdicts_summary, verify_sandwich, waiting_time_report, AnalysisError, ProbeCurve, Verdict,
};
use crate::closed_form::{
    certify_sign, domain_samples, BarrierSpec, ClosedFormError, ClosedFormSolution, LowerBound, Side, SpaceTime,
};
use crate::model::{classify, derived_constants, ModelError, ProblemParams, Region, Subcase};
use crate::pde::{Field, LeftBoundary, PdeError, RunOutput, Solver};
use crate::profile::{solve_pure_profile, solve_reaction_profile, ProfileError, ProfileKind, SelfSimilarProfile};

pub use config::{parse_config, BoundaryMode, Check, ConfigError, ExperimentConfig};
use svg::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Classify,
    Profile,
    Simulate,
    Verify,
    Constants,
    Figure1,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(ConfigError::Validation(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(ConfigError::Invalid(msg.into()))
}

/// Verdicts and written files of one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub verdicts: Vec<Verdict>,
    pub artifacts: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

/// Worker pool capped by PFRONT_THREADS when set to a positive integer.
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("PFRONT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

/// Reads the config, runs the command inside the worker pool, prints the
/// summary and returns the exit code.
pub fn run_cli(command: Command, config_path: &Path, out: Option<&Path>) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            return EXIT_CONFIG;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", config_path.display());
            return EXIT_CONFIG;
        }
    };
    let dir = out.map(Path::to_path_buf).or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("pfront-out"));
    match thread_pool().install(|| execute(command, &cfg, &dir)) {
        Ok(outcome) => {
            for note in &outcome.notes {
                println!("{note}");
            }
            print!("{}", verdicts_summary(&outcome.verdicts));
            for a in &outcome.artifacts {
                println!("wrote {}", a.display());
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command and writes its artifacts plus `verdicts.csv` into `dir`.
pub fn execute(command: Command, cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut ctx = Ctx { dir, outcome: Outcome::default() };
    match command {
        Command::Classify => cmd_classify(cfg, &mut ctx)?,
        Command::Constants => cmd_constants(cfg, &mut ctx)?,
        Command::Profile => cmd_profile(cfg, &mut ctx)?,
        Command::Simulate => cmd_simulate(cfg, &mut ctx, false)?,
        Command::Verify => cmd_simulate(cfg, &mut ctx, true)?,
        Command::Figure1 => cmd_figure1(cfg, &mut ctx)?,
    }
    let verdicts = verdicts_csv(&ctx.outcome.verdicts);
    ctx.write("verdicts.csv", &verdicts)?;
    Ok(ctx.outcome)
}

struct Ctx<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl Ctx<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.outcome.artifacts.push(path);
        Ok(())
    }

    fn verdict(&mut self, v: Verdict) {
        self.outcome.verdicts.push(v);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.outcome.notes.push(s.into());
    }
}

/// A numeric table in the artifact format: comma separated, LF, `{:.16e}`.
pub fn numeric_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn key_value_csv(rows: &[(String, String)]) -> String {
    let mut out = String::from("name,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_classify(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<(), CliError> {
    note_skipped(cfg, "classify", &[], ctx);
    let regime = classify(&cfg.params);
    let mut rows = vec![
        ("region".to_string(), regime.region.label().to_string()),
        ("subcase".to_string(), regime.subcase.map_or("none", |s| s.label()).to_string()),
        ("waiting_time".to_string(), regime.region.has_waiting_time().to_string()),
    ];
    if let Some(e) = regime.predicted_interface_exponent {
        rows.push(("interface_exponent".into(), num(e)));
    }
    if let Some(c) = regime.predicted_interface_coefficient {
        rows.push(("interface_coefficient".into(), num(c)));
    }
    ctx.note(regime.to_string());
    ctx.write("classify.csv", &key_value_csv(&rows))
}

/// Profile needed for ξ_*, A₀ or A₁ in the regime, if any.
fn regime_profile(params: &ProblemParams, tol: f64) -> Result<Option<SelfSimilarProfile>, CliError> {
    let regime = classify(params);
    Ok(match regime.region {
        Region::B0Expanding => Some(solve_pure_profile(params, tol)?),
        // Leading order of the expanding reaction case is the b = 0 profile.
        Region::R1Expanding => Some(solve_pure_profile(&ProblemParams::new(params.p, 0.0, 1.0, params.alpha, params.c)?, tol)?),
        Region::R2Borderline if regime.subcase == Some(Subcase::R2AboveCritical) => {
            Some(solve_reaction_profile(params, tol)?)
        }
        _ => None,
    })
}

fn cmd_constants(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<(), CliError> {
    note_skipped(cfg, "constants", &[], ctx);
    let params = &cfg.params;
    let profile = regime_profile(params, cfg.tolerance("profile"))?;
    let a1 = profile.as_ref().and_then(|p| p.a1);
    let k = derived_constants(params, a1);
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut push = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            rows.push((name.to_string(), num(v)));
        }
    };
    push("C_star", k.c_star);
    push("C_bar", Some(k.c_bar));
    push("ell_star", k.ell_star);
    push("xi1", k.xi1);
    push("xi2", k.xi2);
    push("nu_alpha", Some(k.nu_alpha));
    if let Some(p) = &profile {
        push("xi_star", Some(p.xi_star));
        push("A0", p.a0);
        push("A1", p.a1);
    }
    if let Some(app) = &k.appendix {
        for (name, v) in &app.values {
            if !rows.iter().any(|r| r.0 == *name) {
                rows.push((name.to_string(), num(*v)));
            }
        }
    }
    for (name, value) in &rows {
        ctx.note(format!("{name} = {value}"));
    }
    ctx.write("constants.csv", &key_value_csv(&rows))
}

/// Exact solution whose initial datum is the configured one.
fn exact_solution(params: &ProblemParams) -> Option<ClosedFormSolution> {
    ClosedFormSolution::all_for(params).into_iter().find(ClosedFormSolution::is_exact_solution)
}

fn cmd_profile(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<(), CliError> {
    note_skipped(cfg, "profile", &[Check::Exact], ctx);
    let params = &cfg.params;
    let profile = regime_profile(params, cfg.tolerance("profile"))?
        .ok_or_else(|| invalid(format!("{} has no self-similar profile", classify(params).region.label())))?;
    let rows = profile.xi_grid.iter().zip(&profile.values).zip(&profile.fluxes).map(|((&x, &f), &v)| vec![x, f, v]);
    let table = numeric_csv("xi,f,flux", rows);
    ctx.write("profile.csv", &table)?;
    let mut summary = vec![
        ("kind".to_string(), format!("{:?}", profile.kind)),
        ("xi_star".to_string(), num(profile.xi_star)),
        ("front_coefficient".to_string(), num(profile.front_coefficient)),
        ("far_amplitude".to_string(), num(profile.far_amplitude)),
    ];
    if let Some(a) = profile.a0 {
        summary.push(("A0".into(), num(a)));
    }
    if let Some(a) = profile.a1 {
        summary.push(("A1".into(), num(a)));
    }
    ctx.note(format!("xi_star = {}", profile.xi_star));
    ctx.write("profile_constants.csv", &key_value_csv(&summary))?;
    let points: Vec<(f64, f64)> = profile.xi_grid.iter().copied().zip(profile.values.iter().copied()).collect();
    let mut series = vec![Series::new("shooting", points)];
    if cfg.checks.contains(&Check::Exact) {
        let sol = match profile.kind {
            ProfileKind::PureDiffusion => ClosedFormSolution::traveling_wave(params),
            ProfileKind::Reaction => ClosedFormSolution::borderline_explicit(params),
        }?;
        // At t = 1 the self-similar solution is the profile itself.
        let lo = profile.xi_grid.last().copied().unwrap_or(-1.0);
        let xs: Vec<f64> = (0..=400).map(|i| lo + (profile.xi_star - lo) * i as f64 / 400.0).collect();
        let exact: Vec<(f64, f64)> = xs.iter().map(|&x| Ok((x, sol.value(x, 1.0)?))).collect::<Result<_, ClosedFormError>>()?;
        let scale = exact.iter().map(|p| p.1).fold(0.0, f64::max);
        let err = exact.iter().map(|&(x, u)| (profile.eval(x) - u).abs()).fold(0.0, f64::max) / scale;
        let front = sol.interface(1.0);
        let tol = cfg.tolerance("front");
        ctx.verdict(Verdict::relative("profile_front", front, profile.xi_star, tol));
        ctx.verdict(Verdict::at_most("profile_sup_error", tol, err));
        series.push(Series::new("explicit", exact).dashed());
    }
    let chart = svg::line_chart("Self-similar profile", "xi", "f", &series);
    ctx.write("profile.svg", &chart)
}

/// Config checks that `command` does not run are reported and skipped.
fn note_skipped(cfg: &ExperimentConfig, command: &str, allowed: &[Check], ctx: &mut Ctx) {
    let same = |a: &Check, b: &Check| std::mem::discriminant(a) == std::mem::discriminant(b);
    for c in cfg.checks.iter().filter(|c| !allowed.iter().any(|a| same(a, c))) {
        ctx.note(format!("check {c:?} does not apply to {command}; skipped"));
    }
}

/// A sub/super pair for the sandwich check.
struct BarrierPair {
    lower: Arc<dyn SpaceTime + Send + Sync>,
    upper: Arc<dyn SpaceTime + Send + Sync>,
    /// Barriers whose residual sign can be certified.
    certifiable: Vec<BarrierSpec>,
    /// Left datum preferred over the midpoint of the pair.
    boundary: Option<LeftBoundary>,
    label: String,
}

fn spec_pair(lower: BarrierSpec, upper: BarrierSpec) -> BarrierPair {
    let label = format!("{} {}/{}", lower.family.label(), lower.side.label(), upper.side.label());
    BarrierPair {
        lower: Arc::new(lower.clone()),
        upper: Arc::new(upper.clone()),
        certifiable: vec![lower, upper],
        boundary: None,
        label,
    }
}

/// Exact solutions with amplitude C(1 ± ε) bracketing the configured one.
fn exact_envelope(
    params: &ProblemParams,
    eps: f64,
    build: fn(&ProblemParams) -> Result<ClosedFormSolution, ClosedFormError>,
) -> Result<BarrierPair, CliError> {
    let lower = build(&params.with_c(params.c * (1.0 - eps))?)?;
    let upper = build(&params.with_c(params.c * (1.0 + eps))?)?;
    let label = format!("{} envelope C(1 +/- {eps})", lower.family.label());
    Ok(BarrierPair { lower: Arc::new(lower), upper: Arc::new(upper), certifiable: Vec::new(), boundary: None, label })
}

/// The regime's barrier pair.
fn barrier_pair(cfg: &ExperimentConfig) -> Result<BarrierPair, CliError> {
    let params = &cfg.params;
    let eps = cfg.eps;
    let regime = classify(params);
    let tol = cfg.tolerance("profile");
    let pair = match (regime.region, regime.subcase) {
        (Region::B0Expanding, _) => {
            let profile = solve_pure_profile(params, tol)?;
            let a0 = profile.a0.ok_or_else(|| invalid("pure profile without A0"))?;
            let mut pair = spec_pair(BarrierSpec::b0_profile(params, a0, Side::Sub)?, BarrierSpec::b0_profile(params, a0, Side::Super)?);
            pair.boundary = Some(profile_boundary(&profile, cfg.grid.x_left));
            pair
        }
        (Region::R2Borderline, Some(Subcase::R2BelowCritical)) => {
            spec_pair(BarrierSpec::shrink_lower(params)?, BarrierSpec::shrink_upper(params)?)
        }
        (Region::R2Borderline, Some(Subcase::R2AboveCritical)) => {
            let profile = solve_reaction_profile(params, tol)?;
            let a1 = profile.a1.ok_or_else(|| invalid("reaction profile without A1"))?;
            let mut pair = spec_pair(BarrierSpec::profile_lower(params, a1)?, BarrierSpec::profile_upper(params, a1)?);
            pair.boundary = Some(profile_boundary(&profile, cfg.grid.x_left));
            pair
        }
        (Region::R3Shrinking, _) => {
            let lower = BarrierSpec::region_three_g(params, eps, Side::Sub)?;
            let upper = match BarrierSpec::region_three_g(params, eps, Side::Super) {
                Ok(u) => u,
                Err(_) => {
                    let ell = lower.constant("ell").unwrap_or(1.0) * 1.5;
                    BarrierSpec::region_three_corner_upper(params, ell, eps)?
                }
            };
            spec_pair(lower, upper)
        }
        (Region::R4Waiting, Some(Subcase::W4a)) => exact_envelope(params, eps, ClosedFormSolution::waiting_beta1)?,
        (Region::R4Waiting, Some(Subcase::W4b)) => {
            spec_pair(BarrierSpec::exp_beta1(params, eps, Side::Sub)?, BarrierSpec::exp_beta1(params, eps, Side::Super)?)
        }
        (Region::R4Waiting, _) | (Region::B0Stationary, _) => {
            spec_pair(BarrierSpec::power_wait(params, eps, Side::Sub)?, BarrierSpec::power_wait(params, eps, Side::Super)?)
        }
        (Region::B0Waiting, _) => exact_envelope(params, eps, ClosedFormSolution::waiting_b0)?,
        (region, _) => return Err(invalid(format!("no barrier pair is available for {}", region.label()))),
    };
    Ok(pair)
}

/// Left datum for a plain run.
fn plain_boundary(cfg: &ExperimentConfig) -> Result<(LeftBoundary, Option<ClosedFormSolution>), CliError> {
    let params = &cfg.params;
    let x_left = cfg.grid.x_left;
    let exact = exact_solution(params);
    Ok(match cfg.boundary {
        BoundaryMode::Static => (LeftBoundary::Static, exact),
        BoundaryMode::Auto => match &exact {
            Some(sol) => (LeftBoundary::exact(sol, x_left), exact),
            None => (LeftBoundary::Static, None),
        },
        BoundaryMode::Exact => {
            let sol = exact.ok_or_else(|| invalid("boundary = exact needs an exact solution for these parameters"))?;
            (LeftBoundary::exact(&sol, x_left), Some(sol))
        }
        BoundaryMode::Profile => {
            let profile = regime_profile(params, cfg.tolerance("profile"))?
                .filter(|p| p.params == *params)
                .ok_or_else(|| invalid("boundary = profile needs a self-similar solution for these parameters"))?;
            (profile_boundary(&profile, x_left), exact)
        }
    })
}

/// Checks of a run: the configured ones, or regime defaults when none are
/// configured; `verify` always adds the sandwich and its certification.
fn run_checks(cfg: &ExperimentConfig, verify: bool) -> Vec<Check> {
    let mut checks: Vec<Check> = cfg.checks.iter().copied().filter(|c| *c != Check::Classify).collect();
    if verify {
        for c in [Check::Sandwich, Check::Certify] {
            if !checks.contains(&c) {
                checks.push(c);
            }
        }
        return checks;
    }
    if !cfg.checks.is_empty() {
        return checks;
    }
    let regime = classify(&cfg.params);
    if regime.region.has_waiting_time() {
        checks.push(Check::Waiting);
    } else if regime.predicted_interface_exponent.is_some() {
        checks.push(Check::Fit);
    }
    if exact_solution(&cfg.params).is_some() {
        checks.push(Check::Exact);
    }
    checks
}

fn snapshot_times(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.snapshot_times.is_empty() {
        (1..=4).map(|k| cfg.t_end * k as f64 / 4.0).collect()
    } else {
        cfg.snapshot_times.clone()
    }
}

fn cmd_simulate(cfg: &ExperimentConfig, ctx: &mut Ctx, verify: bool) -> Result<(), CliError> {
    let checks = run_checks(cfg, verify);
    note_skipped(
        cfg,
        if verify { "verify" } else { "simulate" },
        &[Check::Fit, Check::Sandwich, Check::Probe(0.0), Check::Waiting, Check::Exact, Check::Certify],
        ctx,
    );
    let params = &cfg.params;
    let snaps = snapshot_times(cfg);
    let needs_pair = checks.iter().any(|c| matches!(c, Check::Sandwich | Check::Certify));
    let pair = if needs_pair { Some(barrier_pair(cfg)?) } else { None };
    let needs_run = checks.iter().any(|c| !matches!(c, Check::Certify));

    if let (Some(pair), true) = (&pair, checks.contains(&Check::Certify)) {
        certify_pair(cfg, pair, ctx)?;
    }
    if !needs_run {
        return Ok(());
    }

    let (out, truncation, exact) = if checks.contains(&Check::Sandwich) {
        let pair = pair.as_ref().expect("pair built for sandwich");
        let (plain, exact) = plain_boundary(cfg)?;
        let left = match (cfg.boundary, &exact, &pair.boundary) {
            (BoundaryMode::Auto, None, Some(b)) => b.clone(),
            (BoundaryMode::Auto, None, None) => boundary_between(pair.lower.clone(), pair.upper.clone(), cfg.grid.x_left),
            _ => plain,
        };
        let (out, est) = run_with_truncation(params, &cfg.grid, left, cfg.t_end, &snaps)?;
        (out, Some(est), exact)
    } else {
        let (left, exact) = plain_boundary(cfg)?;
        let out = Solver::new(params, &cfg.grid).with_left_boundary(left).run(cfg.t_end, &snaps)?;
        (out, None, exact)
    };
    write_run(ctx, &out)?;

    for check in &checks {
        match *check {
            Check::Fit => check_fit(cfg, &out, ctx)?,
            Check::Probe(speed) => check_probe(cfg, &out, speed, ctx)?,
            Check::Waiting => check_waiting(cfg, &out, ctx),
            Check::Exact => {
                let sol = exact.as_ref().ok_or_else(|| invalid("check exact needs an exact solution for these parameters"))?;
                check_exact(cfg, &out, sol, ctx)?;
            }
            Check::Sandwich => {
                let pair = pair.as_ref().expect("pair built for sandwich");
                check_sandwich(&out, pair, truncation.unwrap_or(0.0), ctx)?;
            }
            Check::Certify | Check::Classify => {}
        }
    }
    Ok(())
}

fn write_run(ctx: &mut Ctx, out: &RunOutput) -> Result<(), CliError> {
    let trace = numeric_csv("t,eta", out.trace.samples.iter().map(|&(t, e)| vec![t, e]));
    ctx.write("trace.csv", &trace)?;
    let rows = out.snapshots.iter().flat_map(|f| f.grid.nodes().zip(&f.values).map(move |(x, &u)| vec![f.t, x, u]));
    ctx.write("snapshots.csv", &numeric_csv("t,x,u", rows))?;
    let chart = svg::line_chart("Interface", "t", "eta", &[Series::new("eta(t)", out.trace.samples.clone())]);
    ctx.write("trace.svg", &chart)?;
    let series: Vec<Series> = out.snapshots.iter().map(|f| Series::new(format!("t = {}", f.t), field_points(f))).collect();
    ctx.write("snapshots.svg", &svg::line_chart("Solution snapshots", "x", "u", &series))
}

/// Nodes of a field thinned to at most ~2000 points for plotting.
fn field_points(f: &Field) -> Vec<(f64, f64)> {
    let stride = (f.values.len() / 2000).max(1);
    f.grid.nodes().zip(&f.values).step_by(stride).map(|(x, &u)| (x, u)).collect()
}

fn check_fit(cfg: &ExperimentConfig, out: &RunOutput, ctx: &mut Ctx) -> Result<(), CliError> {
    let regime = classify(&cfg.params);
    let exponent = regime
        .predicted_interface_exponent
        .ok_or_else(|| invalid(format!("{} has no interface power law to fit", regime.region.label())))?;
    let fit = fit_power_law(&out.trace, cfg.fit_window())?;
    ctx.note(format!(
        "fit on [{:e}, {:e}]: eta ~ {} t^{} (r^2 = {})",
        fit.window.0, fit.window.1, fit.coefficient, fit.exponent, fit.r_squared
    ));
    ctx.verdict(Verdict::relative("fit_exponent", exponent, fit.exponent, cfg.tolerance("exponent")));
    let coefficient = match regime.predicted_interface_coefficient {
        Some(c) => Some(c),
        None => regime_profile(&cfg.params, cfg.tolerance("profile"))?.map(|p| p.xi_star),
    };
    match coefficient {
        Some(c) => ctx.verdict(Verdict::relative("fit_coefficient", c, fit.coefficient, cfg.tolerance("coefficient"))),
        None => ctx.note("no predicted coefficient for this regime; exponent only"),
    }
    Ok(())
}

fn check_probe(cfg: &ExperimentConfig, out: &RunOutput, speed: f64, ctx: &mut Ctx) -> Result<(), CliError> {
    let params = &cfg.params;
    let region = classify(params).region;
    let profile = regime_profile(params, cfg.tolerance("profile"))?;
    let (curve, plateau) = match (region, &profile) {
        (Region::B0Expanding | Region::R1Expanding, Some(p)) => (ProbeCurve::rho(params, speed, p.xi_star)?, p.eval(speed)),
        (Region::R2Borderline, Some(p)) => (ProbeCurve::zeta(params, speed, p.xi_star)?, p.eval(speed)),
        (Region::R3Shrinking, _) => {
            let curve = ProbeCurve::ell(params, speed)?;
            let plateau = curve.ell_plateau().ok_or_else(|| invalid("no plateau for this curve"))?;
            (curve, plateau)
        }
        _ => return Err(invalid(format!("no probe curve for {}", region.label()))),
    };
    let series = probe_local_solution(&out.snapshots, &curve)?;
    let worst = series
        .iter()
        .map(|&(_, v)| v)
        .max_by(|a, b| (a - plateau).abs().total_cmp(&(b - plateau).abs()))
        .ok_or_else(|| invalid("probe needs snapshots with t > 0"))?;
    ctx.write("probe.csv", &numeric_csv("t,normalized_u", series.iter().map(|&(t, v)| vec![t, v])))?;
    ctx.verdict(Verdict::relative(format!("probe_{speed}"), plateau, worst, cfg.tolerance("probe")));
    Ok(())
}

fn check_waiting(cfg: &ExperimentConfig, out: &RunOutput, ctx: &mut Ctx) {
    let report = waiting_time_report(&out.trace, &cfg.params);
    if let Some(d) = &report.diagnostic {
        ctx.note(d.clone());
    }
    let mut v = Verdict::at_most("waiting_excursion", report.band, report.max_excursion);
    v.pass = report.stationary;
    ctx.verdict(v);
    if let Some(h) = report.horizon {
        ctx.note(format!("blow-up time T = {h}"));
        let mut v = Verdict::at_most("waiting_horizon", h, report.t_end);
        v.pass = report.horizon_honored;
        ctx.verdict(v);
    }
}

fn check_exact(cfg: &ExperimentConfig, out: &RunOutput, sol: &ClosedFormSolution, ctx: &mut Ctx) -> Result<(), CliError> {
    let mut err = 0.0f64;
    let mut umax = 0.0f64;
    for f in out.snapshots.iter().chain(std::iter::once(&out.final_field)) {
        for (x, &u) in f.grid.nodes().zip(&f.values) {
            err = err.max((u - sol.value(x, f.t)?).abs());
            umax = umax.max(u);
        }
    }
    ctx.verdict(Verdict::at_most("exact_nodal_error", cfg.tolerance("nodal") * umax, err));
    let t = out.final_field.t;
    let eta = out.trace.samples.last().map_or(f64::NAN, |s| s.1);
    let predicted = sol.interface(t);
    if predicted == 0.0 {
        ctx.verdict(Verdict::absolute("exact_interface", 0.0, eta, 2.0 * cfg.grid.dx()));
    } else {
        ctx.verdict(Verdict::relative("exact_interface", predicted, eta, cfg.tolerance("interface")));
    }
    Ok(())
}

fn check_sandwich(out: &RunOutput, pair: &BarrierPair, truncation: f64, ctx: &mut Ctx) -> Result<(), CliError> {
    let umax = out.snapshots.iter().map(Field::max).fold(0.0, f64::max);
    let slack = sandwich_slack(truncation, umax);
    let report = verify_sandwich(&out.snapshots, pair.lower.as_ref(), pair.upper.as_ref(), slack)?;
    ctx.note(format!(
        "sandwich {}: {} nodes checked, truncation estimate {truncation:e}, slack {slack:e}",
        pair.label, report.checked
    ));
    for (name, worst) in [("sandwich_lower", report.worst_lower), ("sandwich_upper", report.worst_upper)] {
        let margin = worst.map_or(0.0, |w| w.2);
        let pass = margin >= -slack;
        ctx.verdict(Verdict { check_name: name.into(), predicted: 0.0, measured: margin, tolerance: slack, pass });
    }
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for f in out.snapshots.iter().filter(|f| f.t > 0.0) {
        let mut lo_pts = Vec::new();
        let mut hi_pts = Vec::new();
        for (x, &u) in f.grid.nodes().zip(&f.values) {
            if let (Ok(lo), Ok(hi)) = (pair.lower.value(x, f.t), pair.upper.value(x, f.t)) {
                rows.push(vec![f.t, x, lo, u, hi]);
                lo_pts.push((x, lo));
                hi_pts.push((x, hi));
            }
        }
        series.push(Series::new(format!("u, t = {}", f.t), field_points(f)));
        series.push(Series::new(format!("lower, t = {}", f.t), lo_pts).dashed());
        series.push(Series::new(format!("upper, t = {}", f.t), hi_pts).dashed());
    }
    ctx.write("sandwich.csv", &numeric_csv("t,x,lower,u,upper", rows))?;
    ctx.write("sandwich.svg", &svg::line_chart(&format!("Sandwich: {}", pair.label), "x", "u", &series))
}

/// Points per barrier in the sign certification.
pub const CERTIFY_NX: usize = 40;
pub const CERTIFY_NT: usize = 25;

/// Sign certification sample ranges for a barrier over the configured grid
/// and run time.
pub fn certify_ranges(bar: &BarrierSpec, x_range: (f64, f64), t_end: f64) -> ((f64, f64), (f64, f64)) {
    let t_hi = bar.domain.t_max.min(t_end);
    match bar.domain.lower {
        // Local barriers: near x = 0 the time change of g drops below rounding.
        LowerBound::Fixed(x_eps) if x_eps < 0.0 => {
            let x_lo = x_eps.max(x_range.0);
            ((x_lo, 0.05 * x_lo), (0.1 * t_hi, t_hi))
        }
        LowerBound::Fixed(x0) => ((x0.max(x_range.0), x_range.1), (0.01 * t_hi, t_hi)),
        // Moving edges are clipped per time by the sampler.
        LowerBound::Curve { .. } | LowerBound::None => (x_range, (0.01 * t_hi, t_hi)),
    }
}

fn certify_pair(cfg: &ExperimentConfig, pair: &BarrierPair, ctx: &mut Ctx) -> Result<(), CliError> {
    if pair.certifiable.is_empty() {
        ctx.note(format!("{}: exact solutions, nothing to certify", pair.label));
        return Ok(());
    }
    for bar in &pair.certifiable {
        let (xr, tr) = certify_ranges(bar, (cfg.grid.x_left, cfg.grid.x_right), cfg.t_end);
        let samples = domain_samples(bar, xr, tr, CERTIFY_NX, CERTIFY_NT);
        let report = certify_sign(bar, &samples)?;
        let worst = report.worst.map_or(f64::NAN, |w| w.2);
        let name = format!("certify_{}_{}", bar.family.label(), bar.side.label());
        ctx.note(format!("{name}: {} points, {} skipped near kinks", report.checked, report.skipped));
        ctx.verdict(Verdict {
            check_name: name,
            predicted: 0.0,
            measured: worst,
            tolerance: crate::closed_form::SIGN_RTOL,
            pass: report.pass,
        });
    }
    Ok(())
}

/// Regions in map order; the index is the map category.
pub const MAP_REGIONS: [Region; 7] = [
    Region::R1Expanding,
    Region::R2Borderline,
    Region::R3Shrinking,
    Region::R4Waiting,
    Region::B0Expanding,
    Region::B0Waiting,
    Region::B0Stationary,
];

/// Region label of every cell centre of the (α, β) sweep, row by row in β.
pub struct RegionMap {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// rows[j][i] is the region at (alphas[i], betas[j]); `None` where the
    /// tuple is not admissible.
    pub rows: Vec<Vec<Option<Region>>>,
}

pub fn region_map(p: f64, b: f64, alpha_max: f64, beta_max: f64, alpha_cells: usize, beta_cells: usize) -> RegionMap {
    let alphas: Vec<f64> = (0..alpha_cells).map(|i| (i as f64 + 0.5) * alpha_max / alpha_cells as f64).collect();
    let betas: Vec<f64> = (0..beta_cells).map(|j| (j as f64 + 0.5) * beta_max / beta_cells as f64).collect();
    let rows = betas
        .par_iter()
        .map(|&beta| {
            alphas.iter().map(|&alpha| ProblemParams::new(p, b, beta, alpha, 1.0).ok().map(|pr| classify(&pr).region)).collect()
        })
        .collect();
    RegionMap { alphas, betas, rows }
}

/// α where the map first leaves the expanding region along a row.
fn first_transition(alphas: &[f64], row: &[Option<Region>]) -> Option<f64> {
    let expanding = |r: &Option<Region>| matches!(r, Some(Region::R1Expanding | Region::B0Expanding));
    let i = row.iter().position(|r| !expanding(r))?;
    (i > 0).then(|| 0.5 * (alphas[i - 1] + alphas[i]))
}

fn cmd_figure1(cfg: &ExperimentConfig, ctx: &mut Ctx) -> Result<(), CliError> {
    note_skipped(cfg, "figure1", &[Check::Classify], ctx);
    let ProblemParams { p, b, .. } = cfg.params;
    let map = region_map(p, b, cfg.alpha_max, cfg.beta_max, cfg.alpha_cells, cfg.beta_cells);
    let da = cfg.alpha_max / cfg.alpha_cells as f64;
    let db = cfg.beta_max / cfg.beta_cells as f64;

    let mut table = String::from("alpha,beta,region\n");
    let mut cells = Vec::new();
    for (j, row) in map.rows.iter().enumerate() {
        for (i, r) in row.iter().enumerate() {
            let label = r.map_or("invalid", |r| r.label());
            let _ = writeln!(table, "{:.16e},{:.16e},{label}", map.alphas[i], map.betas[j]);
            if let Some(r) = r {
                let category = MAP_REGIONS.iter().position(|m| m == r).unwrap_or(0);
                cells.push(svg::Cell { x: map.alphas[i], y: map.betas[j], category });
            }
        }
    }
    ctx.write("figure1.csv", &table)?;

    let boundary = |beta: f64| if b == 0.0 { p / (p - 2.0) } else { p / (p - 1.0 - beta.min(1.0)) };
    let mut worst_below = 0.0f64;
    let mut worst_above = 0.0f64;
    for (j, row) in map.rows.iter().enumerate() {
        let beta = map.betas[j];
        let predicted = boundary(beta);
        let err = match first_transition(&map.alphas, row) {
            Some(a) => (a - predicted).abs(),
            None if predicted >= cfg.alpha_max - da => 0.0,
            None => f64::INFINITY,
        };
        if beta < 1.0 {
            worst_below = worst_below.max(err);
        } else {
            worst_above = worst_above.max(err);
        }
    }
    if map.betas.iter().any(|&beta| beta < 1.0) {
        ctx.verdict(Verdict::at_most("boundary_alpha_p_over_q", da, worst_below));
    }
    if map.betas.iter().any(|&beta| beta >= 1.0) {
        ctx.verdict(Verdict::at_most("boundary_alpha_p_over_p_minus_2", da, worst_above));
    }
    if b > 0.0 && cfg.beta_max > 1.0 {
        // Shrinking below β = 1, waiting above it, for every α beyond p/(p−2).
        let mut worst = 0.0f64;
        for (i, &alpha) in map.alphas.iter().enumerate() {
            if alpha <= p / (p - 2.0) + da {
                continue;
            }
            let k = map.rows.iter().position(|row| row[i] == Some(Region::R4Waiting));
            let err = match k {
                Some(k) if k > 0 => (0.5 * (map.betas[k - 1] + map.betas[k]) - 1.0).abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(err);
        }
        ctx.verdict(Verdict::at_most("boundary_beta_one", db, worst));
        let spots = [
            ("spot_region1", 0.5 * boundary(0.5), 0.5, Region::R1Expanding),
            ("spot_region2", boundary(0.5), 0.5, Region::R2Borderline),
            ("spot_region3", 2.0 * boundary(0.5), 0.5, Region::R3Shrinking),
            ("spot_region4", p / (p - 2.0) + 2.0, 2.0, Region::R4Waiting),
        ];
        for (name, alpha, beta, want) in spots {
            let got = classify(&ProblemParams::new(p, b, beta, alpha, 1.0)?).region;
            ctx.note(format!("({alpha}, {beta}): {}", got.label()));
            ctx.verdict(Verdict::absolute(name, 1.0, f64::from(u8::from(got == want)), 0.0));
        }
    }

    let steps = 400;
    let curve = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Vec<(f64, f64)> {
        (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).map(|beta| (f(beta), beta)).collect()
    };
    let mut curves = vec![Series::new("alpha = p/(p-1-min(1,beta))", curve(&boundary, 0.0, cfg.beta_max))];
    if b > 0.0 {
        curves.push(Series::new("beta = 1", vec![(p / (p - 2.0), 1.0), (cfg.alpha_max, 1.0)]));
        let upper = |beta: f64| p / (p - 1.0 - beta);
        if p - 1.0 > 1.0 {
            let hi = (p - 1.0 - p / cfg.alpha_max).min(cfg.beta_max);
            if hi > 1.0 {
                curves.push(Series::new("alpha = p/(p-1-beta)", curve(&upper, 1.0, hi)).dashed());
            }
        }
    }
    let labels: Vec<&str> = MAP_REGIONS.iter().map(|r| r.label()).collect();
    let chart = svg::region_map(
        &format!("Region map, p = {p}, b = {b}"),
        ("alpha", "beta"),
        ((0.0, cfg.alpha_max), (0.0, cfg.beta_max)),
        (da, db),
        &cells,
        &labels,
        &curves,
    );
    ctx.write("figure1.svg", &chart)
}

#[cfg(test)]
mod tests;
