//! Problem parameters, regime classification and the named constants.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Relative tolerance used when deciding that two exponents coincide.
pub const TIE_RTOL: f64 = 1e-12;

/// Tolerance on the golden-section search for δ_*.
pub const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_MAX_ITER: usize = 200;
const BOUNDARY_FLAG: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("p = 2 is excluded (semilinear limit)")]
    RejectedP2,
    #[error("b must be positive when beta < 1 (got b = {0})")]
    RejectedSignB(f64),
    #[error("parameter out of range: {0}")]
    RejectedRange(String),
    #[error("constant undefined for these parameters: {0}")]
    OutOfDomain(String),
}

/// Returns true when `a` and `b` agree to [`TIE_RTOL`] relative precision.
pub fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub p: f64,
    pub b: f64,
    pub beta: f64,
    pub alpha: f64,
    pub c: f64,
}

impl ProblemParams {
    /// Builds and validates a parameter tuple.
    pub fn new(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> Result<Self, ModelError> {
        validate(ProblemParams { p, b, beta, alpha, c })
    }

    /// Same tuple with a different amplitude.
    pub fn with_c(&self, c: f64) -> Result<Self, ModelError> {
        validate(ProblemParams { c, ..*self })
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self, ModelError> {
        validate(ProblemParams { alpha, ..*self })
    }

    /// q = p − 1 − β.
    pub fn q(&self) -> f64 {
        self.p - 1.0 - self.beta
    }

    /// λ = p − α(p − 2), the diffusive similarity denominator.
    pub fn lambda(&self) -> f64 {
        self.p - self.alpha * (self.p - 2.0)
    }

    /// Initial datum C(−x)₊^α.
    pub fn initial(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.c * (-x).powf(self.alpha)
        } else {
            0.0
        }
    }

    /// α = p/(p−1−β) up to ties.
    pub fn on_borderline(&self) -> bool {
        self.q() > 0.0 && ties(self.alpha, self.p / self.q())
    }

    /// Sign of β(p−1) − 1 with ties resolved to 0.
    pub fn borderline_branch(&self) -> std::cmp::Ordering {
        let s = self.beta * (self.p - 1.0);
        if ties(s, 1.0) {
            std::cmp::Ordering::Equal
        } else if s > 1.0 {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Less
        }
    }
}

impl fmt::Display for ProblemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} b={} beta={} alpha={} C={}",
            self.p, self.b, self.beta, self.alpha, self.c
        )
    }
}

pub fn validate(params: ProblemParams) -> Result<ProblemParams, ModelError> {
    let ProblemParams { p, b, beta, alpha, c } = params;
    for (name, v) in [("p", p), ("b", b), ("beta", beta), ("alpha", alpha), ("C", c)] {
        if !v.is_finite() {
            return Err(ModelError::RejectedRange(format!("{name} is not finite")));
        }
    }
    if ties(p, 2.0) {
        return Err(ModelError::RejectedP2);
    }
    if p < 2.0 {
        return Err(ModelError::RejectedRange(format!("p - 2 must be positive (p = {p})")));
    }
    if beta <= 0.0 {
        return Err(ModelError::RejectedRange(format!("beta must be positive (beta = {beta})")));
    }
    if alpha <= 0.0 {
        return Err(ModelError::RejectedRange(format!("alpha must be positive (alpha = {alpha})")));
    }
    if c <= 0.0 {
        return Err(ModelError::RejectedRange(format!("C must be positive (C = {c})")));
    }
    if beta < 1.0 && b <= 0.0 {
        return Err(ModelError::RejectedSignB(b));
    }
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    R1Expanding,
    R2Borderline,
    R3Shrinking,
    R4Waiting,
    B0Expanding,
    B0Waiting,
    B0Stationary,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::R1Expanding => "R1_Expanding",
            Region::R2Borderline => "R2_Borderline",
            Region::R3Shrinking => "R3_Shrinking",
            Region::R4Waiting => "R4_Waiting",
            Region::B0Expanding => "B0_Expanding",
            Region::B0Waiting => "B0_Waiting",
            Region::B0Stationary => "B0_Stationary",
        }
    }

    /// Regions in which the interface is expected not to move initially.
    pub fn has_waiting_time(&self) -> bool {
        matches!(self, Region::R4Waiting | Region::B0Waiting | Region::B0Stationary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subcase {
    R2AboveCritical,
    R2BelowCritical,
    R2AtCritical,
    W4a,
    W4b,
    W4c,
    W4d,
}

impl Subcase {
    pub fn label(&self) -> &'static str {
        match self {
            Subcase::R2AboveCritical => "R2_above_critical",
            Subcase::R2BelowCritical => "R2_below_critical",
            Subcase::R2AtCritical => "R2_at_critical",
            Subcase::W4a => "W4a",
            Subcase::W4b => "W4b",
            Subcase::W4c => "W4c",
            Subcase::W4d => "W4d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub region: Region,
    pub subcase: Option<Subcase>,
    /// η(t) ~ coefficient · t^exponent.
    pub predicted_interface_exponent: Option<f64>,
    /// Signed; negative means the interface recedes. `None` when it is only
    /// available numerically (self-similar profile).
    pub predicted_interface_coefficient: Option<f64>,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.region.label())?;
        if let Some(s) = self.subcase {
            write!(f, " ({})", s.label())?;
        }
        match (self.predicted_interface_exponent, self.predicted_interface_coefficient) {
            (Some(e), Some(c)) => write!(f, ": eta(t) ~ {c} t^{e}"),
            (Some(e), None) => write!(f, ": eta(t) ~ xi_* t^{e}"),
            _ => write!(f, ": no initial power law"),
        }
    }
}

/// Expanding front coefficient for α = (p−1)/(p−2), where the traveling wave is explicit.
fn traveling_wave_speed(params: &ProblemParams) -> f64 {
    let p = params.p;
    params.c.powf(p - 2.0) * ((p - 1.0) / (p - 2.0)).powf(p - 1.0)
}

pub fn classify(params: &ProblemParams) -> Regime {
    let ProblemParams { p, b, beta, alpha, .. } = *params;
    let waiting_alpha = p / (p - 2.0);
    if b == 0.0 {
        if alpha < waiting_alpha && !ties(alpha, waiting_alpha) {
            return expanding(params, Region::B0Expanding);
        }
        let region = if ties(alpha, waiting_alpha) { Region::B0Waiting } else { Region::B0Stationary };
        return Regime {
            region,
            subcase: None,
            predicted_interface_exponent: None,
            predicted_interface_coefficient: None,
        };
    }
    let r1_bound = p / (p - 1.0 - beta.min(1.0));
    if alpha < r1_bound && !ties(alpha, r1_bound) {
        return expanding(params, Region::R1Expanding);
    }
    if beta < 1.0 {
        // alpha >= p/(p-1-beta) here.
        if ties(alpha, r1_bound) {
            return borderline(params);
        }
        let expo = 1.0 / (alpha * (1.0 - beta));
        return Regime {
            region: Region::R3Shrinking,
            subcase: None,
            predicted_interface_exponent: Some(expo),
            predicted_interface_coefficient: ell_star(params).ok().map(|l| -l),
        };
    }
    // beta >= 1 and alpha >= p/(p-2).
    let subcase = if ties(beta, 1.0) {
        if ties(alpha, waiting_alpha) {
            Subcase::W4a
        } else {
            Subcase::W4b
        }
    } else if beta < p - 1.0 && !ties(beta, p - 1.0) {
        let upper = p / (p - 1.0 - beta);
        if alpha > upper || ties(alpha, upper) {
            Subcase::W4c
        } else {
            Subcase::W4d
        }
    } else {
        Subcase::W4d
    };
    Regime {
        region: Region::R4Waiting,
        subcase: Some(subcase),
        predicted_interface_exponent: None,
        predicted_interface_coefficient: None,
    }
}

fn expanding(params: &ProblemParams, region: Region) -> Regime {
    let p = params.p;
    let coefficient = if ties(params.alpha, (p - 1.0) / (p - 2.0)) {
        Some(traveling_wave_speed(params))
    } else {
        None
    };
    Regime {
        region,
        subcase: None,
        predicted_interface_exponent: Some(1.0 / params.lambda()),
        predicted_interface_coefficient: coefficient,
    }
}

fn borderline(params: &ProblemParams) -> Regime {
    let c_star = critical_constant(params).expect("borderline case has q > 0");
    let c = params.c;
    let subcase = if ties(c, c_star) {
        Subcase::R2AtCritical
    } else if c > c_star {
        Subcase::R2AboveCritical
    } else {
        Subcase::R2BelowCritical
    };
    if subcase == Subcase::R2AtCritical {
        return Regime {
            region: Region::R2Borderline,
            subcase: Some(subcase),
            predicted_interface_exponent: None,
            predicted_interface_coefficient: None,
        };
    }
    let coefficient = if params.borderline_branch() == std::cmp::Ordering::Equal {
        Some(borderline_explicit_speed(params, c_star))
    } else {
        None
    };
    Regime {
        region: Region::R2Borderline,
        subcase: Some(subcase),
        predicted_interface_exponent: Some(params.q() / (params.p * (1.0 - params.beta))),
        predicted_interface_coefficient: coefficient,
    }
}

/// ζ_* of the explicit solution available when β(p−1) = 1.
pub fn borderline_explicit_speed(params: &ProblemParams, c_star: f64) -> f64 {
    let ProblemParams { b, beta, c, .. } = *params;
    b * (1.0 - beta) * c.powf(beta - 1.0) * ((c / c_star).powf(params.q()) - 1.0)
}

/// C_*, the amplitude at which C(−x)₊^{p/(p−1−β)} is stationary.
pub fn critical_constant(params: &ProblemParams) -> Result<f64, ModelError> {
    let ProblemParams { p, b, beta, .. } = *params;
    let q = params.q();
    if q <= 0.0 {
        return Err(ModelError::OutOfDomain(format!("C_* needs p - 1 - beta > 0 (got {q})")));
    }
    if b == 0.0 {
        return Err(ModelError::OutOfDomain("C_* needs b != 0".into()));
    }
    let inner = b.abs() * q.powf(p) / ((1.0 + beta) * p.powf(p - 1.0) * (p - 1.0));
    Ok(inner.powf(1.0 / q))
}

/// C̄, the amplitude separating the waiting-time behaviours at α = p/(p−2).
pub fn bar_constant(p: f64) -> f64 {
    ((p - 2.0).powf(p) / (2.0 * (p - 1.0) * p.powf(p - 1.0))).powf(1.0 / (p - 2.0))
}

/// ℓ_*, the leading shrinking coefficient when diffusion is negligible.
pub fn ell_star(params: &ProblemParams) -> Result<f64, ModelError> {
    let ProblemParams { b, beta, alpha, c, .. } = *params;
    if beta >= 1.0 || b <= 0.0 {
        return Err(ModelError::OutOfDomain("ell_* needs beta < 1 and b > 0".into()));
    }
    Ok(c.powf(-1.0 / alpha) * (b * (1.0 - beta)).powf(1.0 / (alpha * (1.0 - beta))))
}

/// ν_α: α(p−2)/(p−1) below α = (p−1)/(p−2), 1 above (both agree at equality).
pub fn nu_alpha(p: f64, alpha: f64) -> f64 {
    let split = (p - 1.0) / (p - 2.0);
    if alpha < split {
        alpha * (p - 2.0) / (p - 1.0)
    } else {
        1.0
    }
}

/// Bracket [ξ₁, ξ₂] for the dimensionless front position ξ''_*.
pub fn xi_bracket(params: &ProblemParams) -> Result<(f64, f64), ModelError> {
    let ProblemParams { p, alpha, .. } = *params;
    if !(alpha > 0.0 && alpha < p / (p - 2.0)) || ties(alpha, p / (p - 2.0)) {
        return Err(ModelError::OutOfDomain(format!(
            "xi bracket needs 0 < alpha < p/(p-2) (alpha = {alpha})"
        )));
    }
    let other = ((p - 1.0) / (alpha * (p - 2.0))).powf(1.0 / p);
    if ties(alpha, (p - 1.0) / (p - 2.0)) {
        Ok((1.0, 1.0))
    } else if alpha < (p - 1.0) / (p - 2.0) {
        Ok((1.0, other))
    } else {
        Ok((other, 1.0))
    }
}

/// Scale factor [(p−1)^{p−1}λ/(p−2)^{p−1}]^{1/p} relating ξ'_* to ξ''_*·A₀^{(p−2)/p}.
pub fn xi_scale(params: &ProblemParams) -> f64 {
    let p = params.p;
    ((p - 1.0).powf(p - 1.0) * params.lambda() / (p - 2.0).powf(p - 1.0)).powf(1.0 / p)
}

/// Constants of the b = 0 profile barriers, given A₀ = w(0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B0ProfileConstants {
    pub xi3: f64,
    pub xi4: f64,
    pub c4: f64,
    pub c5: f64,
}

pub fn b0_profile_constants(params: &ProblemParams, a0: f64) -> Result<B0ProfileConstants, ModelError> {
    let (xi1, xi2) = xi_bracket(params)?;
    if !(a0 > 0.0) {
        return Err(ModelError::OutOfDomain("A0 must be positive".into()));
    }
    let p = params.p;
    let lam = params.lambda();
    let base = params.c.powf((p - 2.0) / lam) * a0.powf((p - 2.0) / p) * xi_scale(params);
    let xi3 = base * xi1;
    let xi4 = base * xi2;
    let m = (p - 1.0) / (p - 2.0);
    let amp = params.c.powf(p / lam) * a0;
    Ok(B0ProfileConstants { xi3, xi4, c4: amp * xi3.powf(-m), c5: amp * xi4.powf(-m) })
}

/// Which formula set of the borderline constants is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendixBranch {
    /// β(p−1) ≥ 1 (equality is evaluated with these formulas).
    AtLeastOne,
    /// β(p−1) < 1.
    BelowOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixConstants {
    pub branch: AppendixBranch,
    pub values: BTreeMap<&'static str, f64>,
    /// Set when the δ_* maximizer lies within 1e−6 of 0 or 1.
    pub maximizer_at_boundary: bool,
}

impl AppendixConstants {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// Constants of the borderline case α = p/(p−1−β), β < 1. `a1` is f₁(0) of the
/// reaction profile (only the expanding constants depend on it).
pub fn appendix_constants(params: &ProblemParams, a1: f64) -> Result<AppendixConstants, ModelError> {
    let ProblemParams { p, b, beta, c, .. } = *params;
    if !(beta < 1.0 && b > 0.0 && params.on_borderline()) {
        return Err(ModelError::OutOfDomain(
            "appendix constants need beta < 1, b > 0 and alpha = p/(p-1-beta)".into(),
        ));
    }
    if !(a1 > 0.0 && a1.is_finite()) {
        return Err(ModelError::OutOfDomain("A1 must be positive".into()));
    }
    let q = params.q();
    let c_star = critical_constant(params)?;
    let branch = if params.borderline_branch() == std::cmp::Ordering::Less {
        AppendixBranch::BelowOne
    } else {
        AppendixBranch::AtLeastOne
    };
    let mut values = BTreeMap::new();
    let m = (p - 1.0) / (p - 2.0);
    let damp = (1.0 + b * (1.0 - beta) * a1.powf(beta - 1.0)).powf(-1.0 / p);
    let a_pow = a1.powf((p - 2.0) / p);
    // Two building blocks shared by the branches.
    let zeta_diff = a_pow * (1.0 - beta).powf(1.0 / p) * (p - 1.0) * damp / (p - 2.0);
    let zeta_react =
        a_pow * ((1.0 - beta) * (1.0 + beta) * p.powf(p - 1.0) * (p - 1.0)).powf(1.0 / p) * damp / q;
    match branch {
        AppendixBranch::AtLeastOne => {
            let zeta2_bar = a_pow
                * (p * (p - 1.0).powf(p) * (p - 2.0).powf(1.0 - p) * (1.0 - beta)
                    / (p * (p - 2.0) - beta * (p - 1.0) + 1.0))
                    .powf(1.0 / p);
            values.insert("zeta1", zeta_diff);
            values.insert("C1", a1 * zeta_diff.powf(-m));
            values.insert("zeta2", zeta_react);
            values.insert("C2", a1 * zeta_react.powf(-p / q));
            values.insert("zeta2_bar", zeta2_bar);
            values.insert("C2_bar", a1 * zeta2_bar.powf(-m));
            values.insert("mu", m);
        }
        AppendixBranch::BelowOne => {
            let zeta2 = (a1 / c_star).powf(q / p);
            values.insert("zeta1", zeta_react);
            values.insert("C1", a1 * zeta_react.powf(-p / q));
            values.insert("zeta2", zeta2);
            values.insert("C2", c_star);
            values.insert("zeta2_bar", zeta_diff);
            values.insert("C2_bar", a1 * zeta_diff.powf(-m));
            values.insert("mu", p / q);
        }
    }
    values.insert("ell_star", ell_star(params)?);
    let mut maximizer_at_boundary = false;
    if c < c_star && !ties(c, c_star) {
        let ratio_q = (c / c_star).powf(q);
        let kappa = q / (p * (1.0 - beta));
        if branch == AppendixBranch::BelowOne {
            let e = (1.0 - beta) * q / (1.0 - beta * (p - 1.0));
            let r = (c_star / c).powf(e);
            let theta = (1.0 - ratio_q) / (r - 1.0);
            let scale = c_star.powf((1.0 + beta - p) / p) * (b * (1.0 - beta) * theta).powf(kappa);
            values.insert("theta_star", theta);
            values.insert("ell0", scale * r);
            values.insert("zeta3", scale * (r - 1.0));
        }
        let gamma = 1.0 - (c / c_star).powf(q / p);
        values.insert("Gamma", gamma);
        // At beta(p-1) = 1 the objective is monotone and the family degenerates
        // (the explicit solution is available there instead).
        if branch == AppendixBranch::BelowOne {
            let (delta, at_boundary) = maximize_delta(params, gamma, ratio_q);
            maximizer_at_boundary = at_boundary;
            let dg = delta * gamma;
            let bracket = (1.0 - dg) - (1.0 - dg).powf(1.0 - p) * ratio_q;
            let ell1 = c.powf((1.0 + beta - p) / p) * (b * (1.0 - beta) * bracket / dg).powf(kappa);
            values.insert("delta_star", delta);
            values.insert("ell1", ell1);
            values.insert("zeta4", dg * ell1);
            values.insert("C3", c * (1.0 - dg).powf(p / (1.0 + beta - p)));
        }
    }
    Ok(AppendixConstants { branch, values, maximizer_at_boundary })
}

/// The function maximized to define δ_*.
pub fn delta_objective(params: &ProblemParams, gamma: f64, ratio_q: f64, delta: f64) -> f64 {
    let ProblemParams { p, beta, .. } = *params;
    let e = (1.0 + beta * (1.0 - p)) / (p * (1.0 - beta));
    let s = 1.0 - delta * gamma;
    (e * delta.ln()).exp() * (s - ratio_q * s.powf(1.0 - p))
}

fn maximize_delta(params: &ProblemParams, gamma: f64, ratio_q: f64) -> (f64, bool) {
    let g = |d: f64| delta_objective(params, gamma, ratio_q, d);
    let (x, _) = golden_section_max(g, 0.0, 1.0, GOLDEN_TOL, GOLDEN_MAX_ITER);
    (x, x < BOUNDARY_FLAG || x > 1.0 - BOUNDARY_FLAG)
}

/// Golden-section maximization on the open interval (lo, hi); returns (argmax, max).
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Upper-bound constants used locally in the shrinking case α > p/(p−1−β)
/// when β(p−1) < 1: returns (ζ₅, C₆) for ℓ > ℓ_* and 0 < ε < 1.
pub fn region_three_corner_constants(params: &ProblemParams, ell: f64, eps: f64) -> Result<(f64, f64), ModelError> {
    let ProblemParams { b, beta, alpha, c, .. } = *params;
    let ls = ell_star(params)?;
    if !(ell > ls) || !(eps > 0.0 && eps < 1.0) {
        return Err(ModelError::OutOfDomain("need ell > ell_* and 0 < eps < 1".into()));
    }
    let a1b = alpha * (1.0 - beta);
    let r = (ls / ell).powf(a1b);
    let zeta5 = r * (1.0 - eps) * ell;
    let inner = c.powf(1.0 - beta) - ell.powf(-a1b) * b * (1.0 - beta) * (1.0 - eps);
    if inner <= 0.0 {
        return Err(ModelError::OutOfDomain("C6 bracket is not positive".into()));
    }
    let c6 = (1.0 - r * (1.0 - eps)).powf(-alpha) * inner.powf(1.0 / (1.0 - beta));
    Ok((zeta5, c6))
}

/// Everything [`derived_constants`] can evaluate for a parameter tuple; entries
/// that are undefined for the regime are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedConstants {
    pub c_star: Option<f64>,
    pub c_bar: f64,
    pub ell_star: Option<f64>,
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
    pub nu_alpha: f64,
    pub appendix: Option<AppendixConstants>,
}

pub fn derived_constants(params: &ProblemParams, a1: Option<f64>) -> DerivedConstants {
    let bracket = xi_bracket(params).ok();
    DerivedConstants {
        c_star: critical_constant(params).ok(),
        c_bar: bar_constant(params.p),
        ell_star: ell_star(params).ok(),
        xi1: bracket.map(|b| b.0),
        xi2: bracket.map(|b| b.1),
        nu_alpha: nu_alpha(params.p, params.alpha),
        appendix: a1.and_then(|a| appendix_constants(params, a).ok()),
    }
}
