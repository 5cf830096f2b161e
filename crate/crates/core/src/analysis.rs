//! Power-law fits of interface traces, probes along similarity curves,
//! sandwich checks against barrier pairs and waiting-time verdicts.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::closed_form::{ClosedFormSolution, SpaceTime};
use crate::model::{classify, ell_star, ModelError, ProblemParams, Region};
use crate::pde::{Field, Grid1D, InterfaceTrace, LeftBoundary, PdeError, RunOutput, Solver};
use crate::profile::SelfSimilarProfile;

/// Minimum number of usable samples in a fit window.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Samples with |η| at or below this many cells are too close to the origin to fit.
pub const FIT_MIN_CELLS: f64 = 5.0;
/// Floor of the sandwich slack relative to max u.
pub const SLACK_FLOOR_REL: f64 = 1e-6;
/// Multiple of the truncation estimate granted as sandwich slack.
pub const SLACK_TRUNCATION_FACTOR: f64 = 3.0;
/// A waiting interface may wander this many cells.
pub const WAITING_BAND_CELLS: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {needed} samples with |eta| > {min_abs} in [{}, {}], found {found}", window.0, window.1)]
    InsufficientData { found: usize, needed: usize, min_abs: f64, window: (f64, f64) },
    #[error("interface changes sign inside the fit window")]
    MixedSign,
    #[error("probe curve leaves the grid at t = {t} (x = {x})")]
    CurveOutsideGrid { t: f64, x: f64 },
    #[error("invalid probe curve: {0}")]
    InvalidCurve(String),
    #[error("barriers do not fit the run: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    /// Signed: negative for a receding interface.
    pub coefficient: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// [t_end/100, t_end/10].
pub fn default_window(t_end: f64) -> (f64, f64) {
    (t_end / 100.0, t_end / 10.0)
}

/// Least squares of log|η| against log t over the samples inside `window`
/// with |η| > 5 dx. A receding interface is fitted on −η.
pub fn fit_power_law(trace: &InterfaceTrace, window: (f64, f64)) -> Result<FitResult, AnalysisError> {
    let (t1, t2) = window;
    if !(t1 > 0.0 && t1 < t2) {
        return Err(AnalysisError::InsufficientData { found: 0, needed: MIN_FIT_SAMPLES, min_abs: 0.0, window });
    }
    let min_abs = FIT_MIN_CELLS * trace.dx;
    let usable: Vec<(f64, f64)> =
        trace.samples.iter().copied().filter(|&(t, eta)| t >= t1 && t <= t2 && eta.abs() > min_abs).collect();
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::InsufficientData { found: usable.len(), needed: MIN_FIT_SAMPLES, min_abs, window });
    }
    let sign = usable[0].1.signum();
    if usable.iter().any(|s| s.1.signum() != sign) {
        return Err(AnalysisError::MixedSign);
    }
    let pts: Vec<(f64, f64)> = usable.iter().map(|&(t, eta)| (t.ln(), (sign * eta).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(AnalysisError::InsufficientData { found: 1, needed: MIN_FIT_SAMPLES, min_abs, window });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult { exponent: slope, coefficient: sign * intercept.exp(), r_squared, window })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// x = ρ t^{1/(p−α(p−2))}, expanding regions.
    Rho,
    /// x = −ℓ t^{1/(α(1−β))}, the shrinking region.
    Ell,
    /// x = ρ t^{(p−1−β)/(p(1−β))}, the borderline region.
    Zeta,
}

/// A curve x(t) along which u(x(t), t)·t^{−σ} should settle to a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeCurve {
    pub kind: CurveKind,
    pub speed: f64,
    params: ProblemParams,
}

impl ProbeCurve {
    /// Requires an expanding region and ρ < ξ_*.
    pub fn rho(params: &ProblemParams, rho: f64, xi_star: f64) -> Result<Self, AnalysisError> {
        let region = classify(params).region;
        if !matches!(region, Region::R1Expanding | Region::B0Expanding) {
            return Err(AnalysisError::InvalidCurve(format!("{} is not an expanding region", region.label())));
        }
        if !(rho < xi_star) {
            return Err(AnalysisError::InvalidCurve(format!("rho = {rho} must lie below the front xi_* = {xi_star}")));
        }
        Ok(ProbeCurve { kind: CurveKind::Rho, speed: rho, params: *params })
    }

    /// Requires the shrinking region and ℓ > ℓ_*.
    pub fn ell(params: &ProblemParams, ell: f64) -> Result<Self, AnalysisError> {
        if classify(params).region != Region::R3Shrinking {
            return Err(AnalysisError::InvalidCurve("needs the shrinking region".into()));
        }
        let star = ell_star(params)?;
        if !(ell > star) {
            return Err(AnalysisError::InvalidCurve(format!("ell = {ell} must exceed ell_* = {star}")));
        }
        Ok(ProbeCurve { kind: CurveKind::Ell, speed: ell, params: *params })
    }

    /// Requires the borderline region and ρ < ζ_*.
    pub fn zeta(params: &ProblemParams, rho: f64, zeta_star: f64) -> Result<Self, AnalysisError> {
        if classify(params).region != Region::R2Borderline {
            return Err(AnalysisError::InvalidCurve("needs the borderline region".into()));
        }
        if !(rho < zeta_star) {
            return Err(AnalysisError::InvalidCurve(format!("rho = {rho} must lie below zeta_* = {zeta_star}")));
        }
        Ok(ProbeCurve { kind: CurveKind::Zeta, speed: rho, params: *params })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    /// Exponent of t in x(t).
    pub fn space_exponent(&self) -> f64 {
        let ProblemParams { p, beta, alpha, .. } = self.params;
        match self.kind {
            CurveKind::Rho => 1.0 / self.params.lambda(),
            CurveKind::Ell => 1.0 / (alpha * (1.0 - beta)),
            CurveKind::Zeta => (p - 1.0 - beta) / (p * (1.0 - beta)),
        }
    }

    /// σ in u ~ t^σ along the curve.
    pub fn time_exponent(&self) -> f64 {
        match self.kind {
            CurveKind::Rho => self.params.alpha / self.params.lambda(),
            CurveKind::Ell | CurveKind::Zeta => 1.0 / (1.0 - self.params.beta),
        }
    }

    pub fn x(&self, t: f64) -> f64 {
        let sign = if self.kind == CurveKind::Ell { -1.0 } else { 1.0 };
        sign * self.speed * t.powf(self.space_exponent())
    }

    /// [C^{1−β}ℓ^{α(1−β)} − b(1−β)]₊^{1/(1−β)}, the limit along an ℓ-curve;
    /// `None` for the other kinds, whose limit is a profile value.
    pub fn ell_plateau(&self) -> Option<f64> {
        if self.kind != CurveKind::Ell {
            return None;
        }
        let ProblemParams { b, beta, alpha, c, .. } = self.params;
        let e = 1.0 - beta;
        Some((c.powf(e) * self.speed.powf(alpha * e) - b * e).max(0.0).powf(1.0 / e))
    }
}

/// (t, u(x(t), t)·t^{−σ}) for every snapshot with t > 0, reading u by linear
/// interpolation.
pub fn probe_local_solution(snapshots: &[Field], curve: &ProbeCurve) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let sigma = curve.time_exponent();
    snapshots
        .iter()
        .filter(|f| f.t > 0.0)
        .map(|f| {
            let x = curve.x(f.t);
            let u = f.at(x).ok_or(AnalysisError::CurveOutsideGrid { t: f.t, x })?;
            Ok((f.t, u * f.t.powf(-sigma)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub pass: bool,
    pub slack: f64,
    pub checked: usize,
    /// Smallest u − lower over the checked nodes, as (x, t, margin).
    pub worst_lower: Option<(f64, f64, f64)>,
    /// Smallest upper − u over the checked nodes.
    pub worst_upper: Option<(f64, f64, f64)>,
}

/// max(3·truncation, 1e−6·max u).
pub fn sandwich_slack(truncation: f64, umax: f64) -> f64 {
    (SLACK_TRUNCATION_FACTOR * truncation).max(SLACK_FLOOR_REL * umax)
}

/// Checks lower − slack ≤ u ≤ upper + slack at every node of every snapshot
/// with t > 0 where both bounds are defined. The bounds must share p, b and β;
/// their initial data may differ.
pub fn verify_sandwich(
    snapshots: &[Field],
    lower: &dyn SpaceTime,
    upper: &dyn SpaceTime,
    slack: f64,
) -> Result<SandwichReport, AnalysisError> {
    let (a, b) = (lower.params(), upper.params());
    if (a.p, a.b, a.beta) != (b.p, b.b, b.beta) {
        return Err(AnalysisError::DomainMismatch("bounds solve different equations".into()));
    }
    if !(slack >= 0.0) {
        return Err(AnalysisError::DomainMismatch(format!("slack {slack} must be non-negative")));
    }
    let mut report = SandwichReport { pass: true, slack, checked: 0, worst_lower: None, worst_upper: None };
    let worse = |w: Option<(f64, f64, f64)>, m: f64| w.map_or(true, |w| m < w.2);
    for f in snapshots.iter().filter(|f| f.t > 0.0) {
        for (x, &u) in f.grid.nodes().zip(&f.values) {
            let (Ok(lo), Ok(hi)) = (lower.value(x, f.t), upper.value(x, f.t)) else {
                continue;
            };
            report.checked += 1;
            let (ml, mu) = (u - lo, hi - u);
            if worse(report.worst_lower, ml) {
                report.worst_lower = Some((x, f.t, ml));
            }
            if worse(report.worst_upper, mu) {
                report.worst_upper = Some((x, f.t, mu));
            }
            if ml < -slack || mu < -slack {
                report.pass = false;
            }
        }
    }
    if report.checked == 0 {
        return Err(AnalysisError::DomainMismatch("no snapshot node lies in both barrier domains".into()));
    }
    Ok(report)
}

/// Left datum halfway between two bounds at x_left, so that both stay
/// ordered against the boundary; the static initial value where either
/// bound is undefined there.
pub fn boundary_between(
    lower: Arc<dyn SpaceTime + Send + Sync>,
    upper: Arc<dyn SpaceTime + Send + Sync>,
    x_left: f64,
) -> LeftBoundary {
    if lower.value(x_left, 0.0).is_err() || upper.value(x_left, 0.0).is_err() {
        return LeftBoundary::Static;
    }
    LeftBoundary::Trace(Arc::new(move |t| match (lower.value(x_left, t), upper.value(x_left, t)) {
        (Ok(a), Ok(b)) => 0.5 * (a + b),
        _ => f64::NAN,
    }))
}

/// Left datum following the self-similar solution of a profile.
pub fn profile_boundary(profile: &SelfSimilarProfile, x_left: f64) -> LeftBoundary {
    let profile = profile.clone();
    LeftBoundary::Trace(Arc::new(move |t| profile.solution(x_left, t)))
}

/// Runs on `grid` and on the grid with half as many cells; the truncation
/// estimate is the largest nodal difference at shared nodes over all
/// snapshots.
pub fn run_with_truncation(
    params: &ProblemParams,
    grid: &Grid1D,
    left: LeftBoundary,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<(RunOutput, f64), AnalysisError> {
    if grid.n_cells % 2 != 0 {
        return Err(PdeError::InvalidGrid(format!("n_cells = {} must be even", grid.n_cells)).into());
    }
    let coarse_grid = Grid1D::new(grid.x_left, grid.x_right, grid.n_cells / 2)?;
    let fine = Solver::new(params, grid).with_left_boundary(left.clone()).run(t_end, snapshot_times)?;
    let coarse = Solver::new(params, &coarse_grid).with_left_boundary(left).run(t_end, snapshot_times)?;
    let est = fine
        .snapshots
        .iter()
        .zip(&coarse.snapshots)
        .flat_map(|(f, c)| c.values.iter().enumerate().map(move |(i, v)| (f.values[2 * i] - v).abs()))
        .fold(0.0, f64::max);
    Ok((fine, est))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaitingReport {
    pub stationary: bool,
    /// Largest |η(t) − η(0)| over the trace.
    pub max_excursion: f64,
    pub band: f64,
    /// Blow-up time of the explicit separable solution when one exists.
    pub horizon: Option<f64>,
    pub t_end: f64,
    pub horizon_honored: bool,
    pub diagnostic: Option<String>,
}

/// Verdict on a trace from a waiting-time regime: the interface must stay
/// within 2dx of its start for the whole run, and the run must end before any
/// finite blow-up time.
pub fn waiting_time_report(trace: &InterfaceTrace, params: &ProblemParams) -> WaitingReport {
    let band = WAITING_BAND_CELLS * trace.dx;
    let max_excursion = trace.max_excursion();
    let t_end = trace.samples.last().map_or(0.0, |s| s.0);
    let horizon = ClosedFormSolution::all_for(params)
        .iter()
        .map(|s| s.horizon)
        .filter(|h| h.is_finite())
        .fold(None, |acc: Option<f64>, h| Some(acc.map_or(h, |a| a.min(h))));
    let horizon_honored = horizon.map_or(true, |h| t_end < h);
    let regime = classify(params);
    let mut diagnostic = None;
    if !regime.region.has_waiting_time() {
        diagnostic = Some(format!("regime mismatch: {} has no waiting time", regime.region.label()));
    } else if max_excursion > band {
        diagnostic = Some(format!("regime mismatch: interface moved {max_excursion} (band {band})"));
    } else if !horizon_honored {
        diagnostic = Some(format!("run end {t_end} is not before the blow-up time {}", horizon.unwrap_or(f64::NAN)));
    }
    WaitingReport {
        stationary: diagnostic.is_none(),
        max_excursion,
        band,
        horizon,
        t_end,
        horizon_honored,
        diagnostic,
    }
}

/// One line of a verdict table.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub check_name: String,
    pub predicted: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    /// |measured − predicted| ≤ tolerance·|predicted|.
    pub fn relative(name: impl Into<String>, predicted: f64, measured: f64, tolerance: f64) -> Self {
        let pass = (measured - predicted).abs() <= tolerance * predicted.abs();
        Verdict { check_name: name.into(), predicted, measured, tolerance, pass }
    }

    /// |measured − predicted| ≤ tolerance.
    pub fn absolute(name: impl Into<String>, predicted: f64, measured: f64, tolerance: f64) -> Self {
        let pass = (measured - predicted).abs() <= tolerance;
        Verdict { check_name: name.into(), predicted, measured, tolerance, pass }
    }

    /// measured ≤ limit.
    pub fn at_most(name: impl Into<String>, limit: f64, measured: f64) -> Self {
        Verdict { check_name: name.into(), predicted: limit, measured, tolerance: 0.0, pass: measured <= limit }
    }
}

pub const VERDICT_HEADER: &str = "check_name,predicted,measured,tolerance,pass";

pub fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from(VERDICT_HEADER);
    out.push('\n');
    for v in verdicts {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{}",
            v.check_name,
            v.predicted,
            v.measured,
            v.tolerance,
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

pub fn verdicts_summary(verdicts: &[Verdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        let _ = writeln!(
            out,
            "{} {}: measured {:.6e}, predicted {:.6e}, tolerance {:.1e}",
            if v.pass { "PASS" } else { "FAIL" },
            v.check_name,
            v.measured,
            v.predicted,
            v.tolerance
        );
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    let _ = writeln!(out, "{} checks, {} failed", verdicts.len(), failed);
    out
}
