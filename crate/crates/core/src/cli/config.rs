//! Flat `key = value` experiment files.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::model::{validate, ModelError, ProblemParams};
use crate::pde::{Grid1D, PdeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Missing(String),
    #[error(transparent)]
    Validation(#[from] ModelError),
    #[error(transparent)]
    Grid(#[from] PdeError),
    #[error("{0}")]
    Invalid(String),
}

/// Which checks a command should run and grade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// Power-law fit of the interface against the predicted law.
    Fit,
    /// Numerical solution between the regime's barrier pair.
    Sandwich,
    /// u·t^{−σ} along a probe curve with the given speed.
    Probe(f64),
    /// Interface held still for the whole run.
    Waiting,
    /// Nodal error and interface against an exact solution.
    Exact,
    /// Residual sign certification of the regime's barriers.
    Certify,
    /// Figure-1 boundary placement.
    Classify,
}

impl Check {
    fn parse(text: &str) -> Option<Self> {
        let mut words = text.split_whitespace();
        let name = words.next()?;
        let check = match name {
            "fit" => Check::Fit,
            "sandwich" => Check::Sandwich,
            "probe" => Check::Probe(words.next()?.parse().ok()?),
            "waiting" => Check::Waiting,
            "exact" => Check::Exact,
            "certify" => Check::Certify,
            "classify" => Check::Classify,
            _ => return None,
        };
        words.next().is_none().then_some(check)
    }
}

/// Left Dirichlet datum of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Exact trace when the parameters have an exact solution, else static.
    Auto,
    Static,
    Exact,
    /// Self-similar solution from the profile solver.
    Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: ProblemParams,
    pub grid: Grid1D,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub checks: Vec<Check>,
    pub output_dir: Option<PathBuf>,
    pub boundary: BoundaryMode,
    /// Fit window; [t_end/100, t_end/10] when absent.
    pub fit_window: Option<(f64, f64)>,
    /// Barrier ε.
    pub eps: f64,
    pub tolerances: BTreeMap<String, f64>,
    /// Figure-1 sweep: α ∈ (0, alpha_max], β ∈ (0, beta_max].
    pub alpha_max: f64,
    pub beta_max: f64,
    pub alpha_cells: usize,
    pub beta_cells: usize,
}

/// Tolerance defaults, overridable with `tol.<name> = value`.
pub const DEFAULT_TOLERANCES: [(&str, f64); 8] = [
    ("exponent", 0.02),
    ("coefficient", 0.05),
    ("probe", 0.05),
    ("profile", 1e-6),
    ("front", 1e-3),
    ("nodal", 0.01),
    ("interface", 0.02),
    ("amplitude", 0.02),
];

impl ExperimentConfig {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn fit_window(&self) -> (f64, f64) {
        self.fit_window.unwrap_or((self.t_end / 100.0, self.t_end / 10.0))
    }
}

fn number(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::Parse { line, msg: format!("{key}: '{value}' is not a number") })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut scalars: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut snapshot_times = Vec::new();
    let mut checks = Vec::new();
    let mut tolerances: BTreeMap<String, f64> = DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse { line, msg: format!("expected key = value, got '{content}'") });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "snapshot" => snapshot_times.push(number(line, key, value)?),
            "check" => checks.push(
                Check::parse(value).ok_or_else(|| ConfigError::Parse { line, msg: format!("unknown check '{value}'") })?,
            ),
            _ if key.starts_with("tol.") => {
                let name = &key[4..];
                if !tolerances.contains_key(name) {
                    return Err(ConfigError::Parse { line, msg: format!("unknown tolerance '{name}'") });
                }
                let v = number(line, key, value)?;
                if !(v > 0.0) {
                    return Err(ConfigError::Parse { line, msg: format!("{key} must be positive") });
                }
                tolerances.insert(name.to_string(), v);
            }
            "p" | "b" | "beta" | "alpha" | "C" | "x_left" | "x_right" | "n" | "t_end" | "output_dir" | "boundary"
            | "fit_t1" | "fit_t2" | "eps" | "alpha_max" | "beta_max" | "alpha_cells" | "beta_cells" => {
                if scalars.insert(key.to_string(), (line, value.to_string())).is_some() {
                    return Err(ConfigError::Parse { line, msg: format!("{key} given twice") });
                }
            }
            _ => return Err(ConfigError::Parse { line, msg: format!("unknown key '{key}'") }),
        }
    }
    let get = |key: &str| -> Result<Option<f64>, ConfigError> {
        scalars.get(key).map(|(line, v)| number(*line, key, v)).transpose()
    };
    let required = |key: &str| get(key)?.ok_or_else(|| ConfigError::Missing(format!("{key} required")));
    let count = |key: &str, default: usize| -> Result<usize, ConfigError> {
        match scalars.get(key) {
            None => Ok(default),
            Some((line, v)) => v.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError::Parse {
                line: *line,
                msg: format!("{key}: '{v}' is not a positive integer"),
            }),
        }
    };
    let params = validate(ProblemParams {
        p: required("p")?,
        b: required("b")?,
        beta: required("beta")?,
        alpha: required("alpha")?,
        c: required("C")?,
    })?;
    let grid = Grid1D::new(get("x_left")?.unwrap_or(-6.0), get("x_right")?.unwrap_or(6.0), count("n", 4800)?)?;
    let t_end = get("t_end")?.unwrap_or(1.0);
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(ConfigError::Invalid(format!("t_end = {t_end} must be positive")));
    }
    if let Some(&s) = snapshot_times.iter().find(|&&s| !(s >= 0.0 && s <= t_end)) {
        return Err(ConfigError::Invalid(format!("snapshot {s} lies outside [0, {t_end}]")));
    }
    snapshot_times.sort_by(f64::total_cmp);
    let fit_window = match (get("fit_t1")?, get("fit_t2")?) {
        (None, None) => None,
        (Some(a), Some(b)) if a > 0.0 && a < b => Some((a, b)),
        _ => return Err(ConfigError::Invalid("fit_t1 and fit_t2 must be given together with 0 < fit_t1 < fit_t2".into())),
    };
    let boundary = match scalars.get("boundary").map(|(line, v)| (*line, v.as_str())) {
        None | Some((_, "auto")) => BoundaryMode::Auto,
        Some((_, "static")) => BoundaryMode::Static,
        Some((_, "exact")) => BoundaryMode::Exact,
        Some((_, "profile")) => BoundaryMode::Profile,
        Some((line, v)) => return Err(ConfigError::Parse { line, msg: format!("unknown boundary mode '{v}'") }),
    };
    let eps = get("eps")?.unwrap_or(0.05);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ConfigError::Invalid(format!("eps = {eps} must lie in (0, 1)")));
    }
    let alpha_max = get("alpha_max")?.unwrap_or(8.0);
    let beta_max = get("beta_max")?.unwrap_or(3.0);
    if !(alpha_max > 0.0 && beta_max > 0.0) {
        return Err(ConfigError::Invalid("alpha_max and beta_max must be positive".into()));
    }
    Ok(ExperimentConfig {
        params,
        grid,
        t_end,
        snapshot_times,
        checks,
        output_dir: scalars.get("output_dir").map(|(_, v)| PathBuf::from(v)),
        boundary,
        fit_window,
        eps,
        tolerances,
        alpha_max,
        beta_max,
        alpha_cells: count("alpha_cells", 320)?,
        beta_cells: count("beta_cells", 120)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config("p = 3\nb = 0\nbeta = 1\nalpha = 2\nC = 1\n").unwrap();
        assert_eq!(cfg.params, ProblemParams::new(3.0, 0.0, 1.0, 2.0, 1.0).unwrap());
        assert_eq!(cfg.grid.n_cells, 4800);
        assert_eq!(cfg.t_end, 1.0);
        assert_eq!(cfg.fit_window(), (0.01, 0.1));
        assert_eq!(cfg.tolerance("exponent"), 0.02);
        assert_eq!(cfg.tolerance("coefficient"), 0.05);
        assert!(cfg.checks.is_empty() && cfg.snapshot_times.is_empty());
        assert_eq!(cfg.boundary, BoundaryMode::Auto);
    }

    #[test]
    fn missing_p_is_reported() {
        let err = parse_config("b = 0\nbeta = 1\nalpha = 2\nC = 1\n").unwrap_err();
        assert_eq!(err, ConfigError::Missing("p required".into()));
        assert_eq!(err.to_string(), "p required");
    }

    #[test]
    fn p_two_is_rejected_by_validation() {
        let err = parse_config("p = 2\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\n").unwrap_err();
        assert_eq!(err, ConfigError::Validation(ModelError::RejectedP2));
    }

    #[test]
    fn comments_repeats_and_checks() {
        let text = "# waiting run\np = 3 # slow diffusion\nb = 0\nbeta = 1\nalpha = 3\nC = 0.027777777777777776\n\
                    t_end = 0.5\nsnapshot = 0.5\nsnapshot = 0.25\ncheck = waiting\ncheck = probe 0.5\ntol.probe = 0.1\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.snapshot_times, vec![0.25, 0.5]);
        assert_eq!(cfg.checks, vec![Check::Waiting, Check::Probe(0.5)]);
        assert_eq!(cfg.tolerance("probe"), 0.1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let base = "p = 3\nb = 0\nbeta = 1\nalpha = 2\nC = 1\n";
        let cases = [
            ("p 3\n", 1),
            ("p = 3\np = 4\n", 2),
            ("p = 3\nq = 1\n", 2),
            ("p = x\n", 1),
            ("p = 3\n\ncheck = nonsense\n", 3),
        ];
        for (text, want) in cases {
            match parse_config(text) {
                Err(ConfigError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_config(&format!("{base}snapshot = 2\n")), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config(&format!("{base}x_left = 1\n")), Err(ConfigError::Grid(_))));
        assert!(matches!(parse_config(&format!("{base}fit_t1 = 0.1\n")), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config(&format!("{base}tol.bogus = 1\n")), Err(ConfigError::Parse { .. })));
    }
}
