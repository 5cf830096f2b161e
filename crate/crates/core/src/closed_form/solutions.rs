use std::collections::BTreeMap;

use super::{ClosedFormError, SpaceTime};
use crate::model::{bar_constant, critical_constant, ties, ProblemParams};

/// Below this |b| the β = 1 waiting solution is evaluated through its b → 0 limit.
const B_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionFamily {
    /// C(ξ_* t − x)₊^{(p−1)/(p−2)}, b = 0, α = (p−1)/(p−2).
    TravelingWave,
    /// C(ζ_* t − x)₊^{1/(1−β)}, β(p−1) = 1, α = p/(p−1−β).
    BorderlineExplicit,
    /// β = 1, α = p/(p−2): separable solution with factor e^{−bt}.
    WaitingBeta1,
    /// b = 0, α = p/(p−2): separable solution blowing up at T.
    WaitingB0,
    /// [C^{1−β}(−x)₊^{α(1−β)} − b(1−β)t]₊^{1/(1−β)}; solves u_t + b u^β = 0 only.
    AbsorptionOnly,
    /// C_*(−x)₊^{p/(p−1−β)}, a steady state.
    CriticalStationary,
}

impl SolutionFamily {
    pub fn label(&self) -> &'static str {
        match self {
            SolutionFamily::TravelingWave => "TravelingWave",
            SolutionFamily::BorderlineExplicit => "BorderlineExplicit",
            SolutionFamily::WaitingBeta1 => "WaitingBeta1",
            SolutionFamily::WaitingB0 => "WaitingB0",
            SolutionFamily::AbsorptionOnly => "AbsorptionOnly",
            SolutionFamily::CriticalStationary => "CriticalStationary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSolution {
    pub family: SolutionFamily,
    pub params: ProblemParams,
    pub constants: BTreeMap<&'static str, f64>,
    /// Blow-up time; infinite when the solution is global.
    pub horizon: f64,
}

fn not_admissible(msg: &str) -> ClosedFormError {
    ClosedFormError::NotAdmissible(msg.to_string())
}

impl ClosedFormSolution {
    pub fn traveling_wave(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let p = params.p;
        if params.b != 0.0 || !ties(params.alpha, (p - 1.0) / (p - 2.0)) {
            return Err(not_admissible("traveling wave needs b = 0 and alpha = (p-1)/(p-2)"));
        }
        let speed = params.c.powf(p - 2.0) * ((p - 1.0) / (p - 2.0)).powf(p - 1.0);
        Ok(Self::build(SolutionFamily::TravelingWave, params, &[("xi_star", speed)], f64::INFINITY))
    }

    pub fn borderline_explicit(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        if !(params.beta < 1.0 && params.on_borderline())
            || params.borderline_branch() != std::cmp::Ordering::Equal
        {
            return Err(not_admissible("needs beta(p-1) = 1 and alpha = p/(p-1-beta)"));
        }
        let c_star = critical_constant(params)?;
        let speed = crate::model::borderline_explicit_speed(params, c_star);
        Ok(Self::build(
            SolutionFamily::BorderlineExplicit,
            params,
            &[("zeta_star", speed), ("C_star", c_star)],
            f64::INFINITY,
        ))
    }

    pub fn waiting_beta1(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let p = params.p;
        if !ties(params.beta, 1.0) || !ties(params.alpha, p / (p - 2.0)) {
            return Err(not_admissible("needs beta = 1 and alpha = p/(p-2)"));
        }
        let c_bar = bar_constant(p);
        let rate = (params.c / c_bar).powf(p - 2.0);
        let b = params.b;
        let horizon = if b.abs() < B_GUARD {
            1.0 / (rate * (p - 2.0))
        } else if b >= rate {
            f64::INFINITY
        } else {
            (1.0 - b / rate).ln() / (b * (2.0 - p))
        };
        Ok(Self::build(SolutionFamily::WaitingBeta1, params, &[("C_bar", c_bar), ("T", horizon)], horizon))
    }

    pub fn waiting_b0(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let p = params.p;
        if params.b != 0.0 || !ties(params.alpha, p / (p - 2.0)) {
            return Err(not_admissible("needs b = 0 and alpha = p/(p-2)"));
        }
        let c_bar = bar_constant(p);
        let horizon = (c_bar / params.c).powf(p - 2.0) / (p - 2.0);
        Ok(Self::build(SolutionFamily::WaitingB0, params, &[("C_bar", c_bar), ("T", horizon)], horizon))
    }

    pub fn absorption_only(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        if !(params.beta < 1.0 && params.b > 0.0) {
            return Err(not_admissible("needs beta < 1 and b > 0"));
        }
        let ell = crate::model::ell_star(params)?;
        Ok(Self::build(SolutionFamily::AbsorptionOnly, params, &[("ell_star", ell)], f64::INFINITY))
    }

    /// The steady state at amplitude C_* (the amplitude of `params` is replaced).
    pub fn critical_stationary(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        if !(params.beta < 1.0 && params.on_borderline()) {
            return Err(not_admissible("needs beta < 1 and alpha = p/(p-1-beta)"));
        }
        let c_star = critical_constant(params)?;
        let params = params.with_c(c_star)?;
        Ok(Self::build(SolutionFamily::CriticalStationary, &params, &[("C_star", c_star)], f64::INFINITY))
    }

    /// Every family admissible for `params`.
    pub fn all_for(params: &ProblemParams) -> Vec<Self> {
        [
            Self::traveling_wave(params),
            Self::borderline_explicit(params),
            Self::waiting_beta1(params),
            Self::waiting_b0(params),
            Self::absorption_only(params),
        ]
        .into_iter()
        .filter_map(Result::ok)
        .collect()
    }

    fn build(family: SolutionFamily, params: &ProblemParams, constants: &[(&'static str, f64)], horizon: f64) -> Self {
        ClosedFormSolution { family, params: *params, constants: constants.iter().copied().collect(), horizon }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    /// True when the function solves the full equation, not just u_t + b u^β = 0.
    pub fn is_exact_solution(&self) -> bool {
        self.family != SolutionFamily::AbsorptionOnly
    }

    /// sup{x : u(x, t) > 0}.
    pub fn interface(&self, t: f64) -> f64 {
        let ProblemParams { b, beta, alpha, c, .. } = self.params;
        match self.family {
            SolutionFamily::TravelingWave => self.constants["xi_star"] * t,
            SolutionFamily::BorderlineExplicit => self.constants["zeta_star"] * t,
            SolutionFamily::AbsorptionOnly => {
                -(b * (1.0 - beta) * t / c.powf(1.0 - beta)).powf(1.0 / (alpha * (1.0 - beta)))
            }
            _ => 0.0,
        }
    }
}

impl SpaceTime for ClosedFormSolution {
    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: f64, t: f64) -> Result<f64, ClosedFormError> {
        if t >= self.horizon {
            return Err(ClosedFormError::BeyondHorizon { t, horizon: self.horizon });
        }
        let ProblemParams { p, b, beta, alpha, c } = self.params;
        let pos = |v: f64| v.max(0.0);
        Ok(match self.family {
            SolutionFamily::TravelingWave => c * pos(self.constants["xi_star"] * t - x).powf(alpha),
            SolutionFamily::BorderlineExplicit => {
                c * pos(self.constants["zeta_star"] * t - x).powf(1.0 / (1.0 - beta))
            }
            SolutionFamily::CriticalStationary => c * pos(-x).powf(alpha),
            SolutionFamily::WaitingB0 => {
                let rate = (c / self.constants["C_bar"]).powf(p - 2.0);
                c * pos(-x).powf(alpha) * (1.0 - rate * (p - 2.0) * t).powf(1.0 / (2.0 - p))
            }
            SolutionFamily::WaitingBeta1 => {
                let rate = (c / self.constants["C_bar"]).powf(p - 2.0);
                let elapsed = if b.abs() < B_GUARD { (p - 2.0) * t } else { -(-b * (p - 2.0) * t).exp_m1() / b };
                c * pos(-x).powf(alpha) * (-b * t).exp() * (1.0 - rate * elapsed).powf(1.0 / (2.0 - p))
            }
            SolutionFamily::AbsorptionOnly => {
                let w = c.powf(1.0 - beta) * pos(-x).powf(alpha * (1.0 - beta)) - b * (1.0 - beta) * t;
                pos(w).powf(1.0 / (1.0 - beta))
            }
        })
    }

    fn kinks(&self, t: f64) -> Vec<f64> {
        vec![self.interface(t)]
    }

    fn t_max(&self) -> f64 {
        self.horizon
    }

    fn blowup_time(&self) -> f64 {
        self.horizon
    }
}
