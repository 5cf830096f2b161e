use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{ClosedFormError, SpaceTime};
use crate::model::{
    appendix_constants, b0_profile_constants, bar_constant, classify, critical_constant,
    region_three_corner_constants, ties, ProblemParams, Region, Subcase,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Sub,
    Super,
}

impl Side {
    pub fn label(&self) -> &'static str {
        match self {
            Side::Sub => "sub",
            Side::Super => "super",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerWaitKind {
    /// 1 < β < p−1 with α ≥ p/(p−1−β).
    Absorbing,
    /// α = p/(p−2) (β ≥ 1 with β ≠ 1, or b = 0).
    Critical,
    /// α > p/(p−2) (β ≥ 1 with β ≠ 1, or b = 0).
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BarrierFamily {
    ProfilePower,
    ShrinkGamma,
    CornerBarrier,
    RegionThreeG,
    ExpBeta1,
    PowerWait(PowerWaitKind),
    B0Profile,
}

impl BarrierFamily {
    pub fn label(&self) -> &'static str {
        match self {
            BarrierFamily::ProfilePower => "ProfilePower",
            BarrierFamily::ShrinkGamma => "ShrinkGamma",
            BarrierFamily::CornerBarrier => "CornerBarrier",
            BarrierFamily::RegionThreeG => "RegionThreeG",
            BarrierFamily::ExpBeta1 => "ExpBeta1",
            BarrierFamily::PowerWait(PowerWaitKind::Absorbing) => "PowerWait/absorbing",
            BarrierFamily::PowerWait(PowerWaitKind::Critical) => "PowerWait/critical",
            BarrierFamily::PowerWait(PowerWaitKind::Supercritical) => "PowerWait/supercritical",
            BarrierFamily::B0Profile => "B0Profile",
        }
    }
}

/// Left edge of a barrier domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerBound {
    None,
    Fixed(f64),
    /// x ≥ −ell·t^exponent.
    Curve { ell: f64, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierDomain {
    pub lower: LowerBound,
    pub x_upper: Option<f64>,
    /// Exclusive upper time limit.
    pub t_max: f64,
}

impl BarrierDomain {
    fn everywhere() -> Self {
        BarrierDomain { lower: LowerBound::None, x_upper: None, t_max: f64::INFINITY }
    }

    fn local(x_eps: f64, t_max: f64) -> Self {
        BarrierDomain { lower: LowerBound::Fixed(x_eps), x_upper: None, t_max }
    }

    pub fn lower_x(&self, t: f64) -> Option<f64> {
        match self.lower {
            LowerBound::None => None,
            LowerBound::Fixed(x) => Some(x),
            LowerBound::Curve { ell, exponent } => Some(-ell * t.powf(exponent)),
        }
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        t >= 0.0
            && t < self.t_max
            && self.lower_x(t).map_or(true, |l| x >= l)
            && self.x_upper.map_or(true, |u| x <= u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Formula {
    /// t^{1/(1−β)} c0 (ζ0 − x t^{−κ})₊^{γ0}, κ = (p−1−β)/(p(1−β)).
    ProfilePower { c0: f64, zeta0: f64, gamma0: f64 },
    /// [amp^{1−β}(−x)₊^{expo(1−β)} − b(1−β)·rate·t]₊^{1/(1−β)}.
    Absorption { amp: f64, rate: f64, expo: f64 },
    /// c0 (−ζ0 t^e − x)₊^power.
    Corner { c0: f64, zeta0: f64, power: f64, time_exp: f64 },
    /// amp (−x)₊^α e^{−bt} [1 − ε E(t)]^{1/(2−p)}, E(t) = (1 − e^{−b(p−2)t})/(b(p−2)).
    Exponential { amp: f64, eps: f64 },
    /// [amp^{1−β}|x|^{α(1−β)} + b(β−1)(1−d)t]^{1/(1−β)} for x < 0, zero otherwise.
    Absorbing { amp: f64, d: f64 },
    /// amp (−x)₊^α (1 − rate·t)^{1/(2−p)}.
    Separable { amp: f64, rate: f64 },
    /// t^{α/λ} c0 (ξ0 − x t^{−1/λ})₊^{(p−1)/(p−2)}.
    B0Profile { c0: f64, xi0: f64 },
}

/// A sub- or supersolution candidate on its validity domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSpec {
    pub family: BarrierFamily,
    pub side: Side,
    pub params: ProblemParams,
    pub constants: BTreeMap<&'static str, f64>,
    pub domain: BarrierDomain,
    formula: Formula,
}

fn not_admissible(msg: impl Into<String>) -> ClosedFormError {
    ClosedFormError::NotAdmissible(msg.into())
}

fn require_borderline(params: &ProblemParams) -> Result<f64, ClosedFormError> {
    if !(params.beta < 1.0 && params.b > 0.0 && params.on_borderline()) {
        return Err(not_admissible("needs beta < 1, b > 0 and alpha = p/(p-1-beta)"));
    }
    Ok(critical_constant(params)?)
}

/// α^{p−1}(α−1)(p−1): Δ_p of (−x)^α is this times |x|^{α(p−1)−p}.
fn power_laplacian_factor(p: f64, alpha: f64) -> f64 {
    alpha.powf(p - 1.0) * (alpha - 1.0) * (p - 1.0)
}

impl BarrierSpec {
    fn new(
        family: BarrierFamily,
        side: Side,
        params: &ProblemParams,
        constants: &[(&'static str, f64)],
        domain: BarrierDomain,
        formula: Formula,
    ) -> Self {
        BarrierSpec {
            family,
            side,
            params: *params,
            constants: constants.iter().copied().collect(),
            domain,
            formula,
        }
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    /// Profile barrier on x > 0 with arbitrary constants.
    pub fn profile_power(params: &ProblemParams, c0: f64, zeta0: f64, gamma0: f64, side: Side) -> Self {
        Self::new(
            BarrierFamily::ProfilePower,
            side,
            params,
            &[("C0", c0), ("zeta0", zeta0), ("gamma0", gamma0)],
            BarrierDomain { lower: LowerBound::Fixed(0.0), ..BarrierDomain::everywhere() },
            Formula::ProfilePower { c0, zeta0, gamma0 },
        )
    }

    fn borderline_expanding(params: &ProblemParams, a1: f64) -> Result<crate::model::AppendixConstants, ClosedFormError> {
        let c_star = require_borderline(params)?;
        if !(params.c > c_star) || ties(params.c, c_star) {
            return Err(not_admissible("profile barriers need C > C_*"));
        }
        Ok(appendix_constants(params, a1)?)
    }

    /// Supersolution (C₂, ζ₂, p/(p−1−β)) of the expanding borderline case.
    pub fn profile_upper(params: &ProblemParams, a1: f64) -> Result<Self, ClosedFormError> {
        let k = Self::borderline_expanding(params, a1)?;
        let gamma0 = params.p / params.q();
        Ok(Self::profile_power(params, k.values["C2"], k.values["zeta2"], gamma0, Side::Super))
    }

    /// Alternative supersolution (C̄₂, ζ̄₂, (p−1)/(p−2)).
    pub fn profile_upper_alt(params: &ProblemParams, a1: f64) -> Result<Self, ClosedFormError> {
        let k = Self::borderline_expanding(params, a1)?;
        let gamma0 = (params.p - 1.0) / (params.p - 2.0);
        Ok(Self::profile_power(params, k.values["C2_bar"], k.values["zeta2_bar"], gamma0, Side::Super))
    }

    /// Subsolution (C₁, ζ₁, μ).
    pub fn profile_lower(params: &ProblemParams, a1: f64) -> Result<Self, ClosedFormError> {
        let k = Self::borderline_expanding(params, a1)?;
        Ok(Self::profile_power(params, k.values["C1"], k.values["zeta1"], k.values["mu"], Side::Sub))
    }

    /// [C^{1−β}(−x)₊^{p(1−β)/q} − b(1−β)(1−γ)t]₊^{1/(1−β)}.
    pub fn shrink_gamma(params: &ProblemParams, gamma: f64, side: Side) -> Result<Self, ClosedFormError> {
        let c_star = require_borderline(params)?;
        Ok(Self::new(
            BarrierFamily::ShrinkGamma,
            side,
            params,
            &[("gamma", gamma), ("C_star", c_star)],
            BarrierDomain::everywhere(),
            Formula::Absorption { amp: params.c, rate: 1.0 - gamma, expo: params.p / params.q() },
        ))
    }

    fn shrinking_ratio(params: &ProblemParams) -> Result<f64, ClosedFormError> {
        let c_star = require_borderline(params)?;
        if !(params.c < c_star) || ties(params.c, c_star) {
            return Err(not_admissible("shrinking barriers need C < C_*"));
        }
        Ok((params.c / c_star).powf(params.q()))
    }

    /// Upper bound of the shrinking borderline case: γ = (C/C_*)^q when
    /// β(p−1) > 1, the initial datum itself (γ = 1) otherwise.
    pub fn shrink_upper(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let r = Self::shrinking_ratio(params)?;
        let gamma = if params.borderline_branch() == Ordering::Greater { r } else { 1.0 };
        Self::shrink_gamma(params, gamma, Side::Super)
    }

    /// Lower bound: γ = 0 when β(p−1) > 1, γ = (C/C_*)^q otherwise.
    pub fn shrink_lower(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let r = Self::shrinking_ratio(params)?;
        let gamma = if params.borderline_branch() == Ordering::Greater { 0.0 } else { r };
        Self::shrink_gamma(params, gamma, Side::Sub)
    }

    fn corner(
        params: &ProblemParams,
        side: Side,
        (c0, zeta0, ell): (f64, f64, f64),
        power: f64,
        time_exp: f64,
        t_max: f64,
    ) -> Self {
        Self::new(
            BarrierFamily::CornerBarrier,
            side,
            params,
            &[("C0", c0), ("zeta0", zeta0), ("ell", ell)],
            BarrierDomain { lower: LowerBound::Curve { ell, exponent: time_exp }, x_upper: None, t_max },
            Formula::Corner { c0, zeta0, power, time_exp },
        )
    }

    fn corner_constants(params: &ProblemParams) -> Result<crate::model::AppendixConstants, ClosedFormError> {
        Self::shrinking_ratio(params)?;
        if params.borderline_branch() != Ordering::Less {
            return Err(not_admissible("corner barriers need beta(p-1) < 1"));
        }
        // The shrinking constants do not involve A1.
        Ok(appendix_constants(params, 1.0)?)
    }

    /// C_*(−ζ₃t^κ − x)₊^{p/q} on x > −ℓ₀t^κ.
    pub fn corner_lower(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let k = Self::corner_constants(params)?;
        let kappa = params.q() / (params.p * (1.0 - params.beta));
        let c_star = critical_constant(params)?;
        let triple = (c_star, k.values["zeta3"], k.values["ell0"]);
        Ok(Self::corner(params, Side::Sub, triple, params.p / params.q(), kappa, f64::INFINITY))
    }

    /// C₃(−ζ₄t^κ − x)₊^{p/q} on x > −ℓ₁t^κ.
    pub fn corner_upper(params: &ProblemParams) -> Result<Self, ClosedFormError> {
        let k = Self::corner_constants(params)?;
        let kappa = params.q() / (params.p * (1.0 - params.beta));
        let triple = (k.values["C3"], k.values["zeta4"], k.values["ell1"]);
        Ok(Self::corner(params, Side::Super, triple, params.p / params.q(), kappa, f64::INFINITY))
    }

    fn require_region_three(params: &ProblemParams) -> Result<(), ClosedFormError> {
        if classify(params).region != Region::R3Shrinking {
            return Err(not_admissible("needs beta < 1 and alpha > p/(p-1-beta)"));
        }
        Ok(())
    }

    /// Local barriers [(C±ε)^{1−β}(−x)₊^{α(1−β)} − b(1−β)(1∓ε)t]₊^{1/(1−β)}
    /// near the interface of the shrinking case. The supersolution requires
    /// β(p−1) ≥ 1; use [`Self::region_three_corner_upper`] otherwise.
    pub fn region_three_g(params: &ProblemParams, eps: f64, side: Side) -> Result<Self, ClosedFormError> {
        Self::require_region_three(params)?;
        let ProblemParams { p, b, beta, alpha, c } = *params;
        if !(eps > 0.0 && eps < 1.0 && eps < c) {
            return Err(not_admissible("needs 0 < eps < min(1, C)"));
        }
        if side == Side::Super && params.borderline_branch() == Ordering::Less {
            return Err(not_admissible("supersolution g_eps needs beta(p-1) >= 1"));
        }
        let (amp, rate) = match side {
            Side::Super => (c + eps, 1.0 - eps),
            Side::Sub => (c - eps, 1.0 + eps),
        };
        let q = params.q();
        let big = c + eps;
        let x_eps = -(b * eps / (2.0 * big.powf(q) * power_laplacian_factor(p, alpha))).powf(1.0 / (alpha * q - p));
        let ell = amp.powf(-1.0 / alpha) * (b * (1.0 - beta) * rate).powf(1.0 / (alpha * (1.0 - beta)));
        let delta = (x_eps.abs() / (2.0 * ell)).powf(alpha * (1.0 - beta));
        Ok(Self::new(
            BarrierFamily::RegionThreeG,
            side,
            params,
            &[("eps", eps), ("x_eps", x_eps), ("delta", delta), ("ell", ell)],
            BarrierDomain::local(x_eps, delta),
            Formula::Absorption { amp, rate, expo: alpha },
        ))
    }

    /// C₆(−ζ₅t^{1/(α(1−β))} − x)₊^α on x > −ℓt^{1/(α(1−β))}, t < δ; the
    /// shrinking-case supersolution when β(p−1) < 1.
    pub fn region_three_corner_upper(params: &ProblemParams, ell: f64, eps: f64) -> Result<Self, ClosedFormError> {
        Self::require_region_three(params)?;
        let ProblemParams { p, b, beta, alpha, .. } = *params;
        let (zeta5, c6) = region_three_corner_constants(params, ell, eps)?;
        let q = params.q();
        let e = 1.0 / (alpha * (1.0 - beta));
        let depth = (eps * b / (2.0 * c6.powf(q) * power_laplacian_factor(p, alpha))).powf(1.0 / (alpha * q - p));
        let delta = (depth / (ell - zeta5)).powf(1.0 / e);
        let mut bar = Self::corner(params, Side::Super, (c6, zeta5, ell), alpha, e, delta);
        bar.constants.insert("eps", eps);
        bar.constants.insert("delta", delta);
        Ok(bar)
    }

    /// Waiting-time barriers for β = 1, α > p/(p−2).
    pub fn exp_beta1(params: &ProblemParams, eps: f64, side: Side) -> Result<Self, ClosedFormError> {
        if classify(params).subcase != Some(Subcase::W4b) {
            return Err(not_admissible("needs beta = 1 and alpha > p/(p-2), b != 0"));
        }
        let ProblemParams { p, b, alpha, c, .. } = *params;
        if !(eps > 0.0 && eps < c) {
            return Err(not_admissible("needs 0 < eps < C"));
        }
        let big = c + eps;
        let x_eps = -(eps / ((p - 2.0) * big.powf(p - 2.0) * power_laplacian_factor(p, alpha)))
            .powf(1.0 / (alpha * (p - 2.0) - p));
        // Keep the bracket 1 − εE(t) above 1/2.
        let k = b * (p - 2.0);
        let delta = if k.abs() < 1e-12 {
            0.5 / eps
        } else if 1.0 - k / (2.0 * eps) <= 0.0 {
            f64::INFINITY
        } else {
            -(1.0 - k / (2.0 * eps)).ln() / k
        };
        let (amp, e) = match side {
            Side::Super => (big, eps),
            Side::Sub => (c - eps, 0.0),
        };
        Ok(Self::new(
            BarrierFamily::ExpBeta1,
            side,
            params,
            &[("eps", eps), ("x_eps", x_eps), ("delta", delta)],
            BarrierDomain::local(x_eps, delta),
            Formula::Exponential { amp, eps: e },
        ))
    }

    /// Waiting-time barriers for β > 1 (β ≠ 1) and for b = 0 with α ≥ p/(p−2).
    pub fn power_wait(params: &ProblemParams, eps: f64, side: Side) -> Result<Self, ClosedFormError> {
        let ProblemParams { p, b, beta, alpha, c } = *params;
        let regime = classify(params);
        let kind = match (regime.region, regime.subcase) {
            (Region::R4Waiting, Some(Subcase::W4c)) => PowerWaitKind::Absorbing,
            (Region::R4Waiting, Some(Subcase::W4d)) | (Region::B0Waiting, _) | (Region::B0Stationary, _) => {
                if ties(alpha, p / (p - 2.0)) {
                    PowerWaitKind::Critical
                } else {
                    PowerWaitKind::Supercritical
                }
            }
            _ => return Err(not_admissible("needs a waiting-time regime other than beta = 1")),
        };
        if !(eps > 0.0 && eps < c) {
            return Err(not_admissible("needs 0 < eps < C"));
        }
        let big = c + eps;
        let amp = match side {
            Side::Super => big,
            Side::Sub => c - eps,
        };
        let signed = match side {
            Side::Super => eps,
            Side::Sub => -eps,
        };
        let family = BarrierFamily::PowerWait(kind);
        let lap = power_laplacian_factor(p, alpha);
        match kind {
            PowerWaitKind::Absorbing => {
                let q = params.q();
                let c_star = critical_constant(params)?;
                let critical = ties(alpha, p / q);
                let d = if critical {
                    ((amp / c_star).powf(q) + signed) * b.signum()
                } else {
                    signed * b.signum()
                };
                let x_eps = if critical {
                    -1.0
                } else {
                    -(eps * b.abs() / (2.0 * big.powf(q) * lap)).powf(1.0 / (alpha * q - p))
                };
                let w_min = (amp * x_eps.abs().powf(alpha)).powf(1.0 - beta);
                let drift = (b * (beta - 1.0) * (1.0 - d)).abs();
                // In the critical case the diffusion and reaction balance to within
                // eps|b| g^β, so the drift may only perturb the profile by that much.
                let balance = if critical { (eps * b.abs() / (4.0 * alpha * p * lap * amp.powf(q))).min(1.0) } else { 1.0 };
                let delta = if drift > 0.0 { balance * w_min / (2.0 * drift) } else { f64::INFINITY };
                Ok(Self::new(
                    family,
                    side,
                    params,
                    &[("eps", eps), ("d_eps", d), ("x_eps", x_eps), ("delta", delta)],
                    BarrierDomain::local(x_eps, delta),
                    Formula::Absorbing { amp, d },
                ))
            }
            PowerWaitKind::Critical => {
                let rate = (p - 2.0) * (amp / bar_constant(p)).powf(p - 2.0) + signed;
                let delta = if rate > 0.0 { 0.5 / rate } else { f64::INFINITY };
                let x_eps = if b == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -(eps / (8.0 * (p - 2.0) * b.abs() * big.powf(beta - 1.0))).powf(1.0 / (alpha * (beta - 1.0)))
                };
                let domain = if x_eps.is_finite() {
                    BarrierDomain::local(x_eps, delta)
                } else {
                    BarrierDomain { t_max: delta, ..BarrierDomain::everywhere() }
                };
                Ok(Self::new(
                    family,
                    side,
                    params,
                    &[("eps", eps), ("gamma_eps", rate), ("x_eps", x_eps), ("delta", delta)],
                    domain,
                    Formula::Separable { amp, rate },
                ))
            }
            PowerWaitKind::Supercritical => {
                let q = params.q();
                let (rate, mut x_abs) = match side {
                    Side::Super => {
                        let diff = (eps / (2.0 * (p - 2.0) * big.powf(p - 2.0) * lap))
                            .powf(1.0 / (alpha * (p - 2.0) - p));
                        (eps, diff)
                    }
                    Side::Sub => {
                        let react = if b > 0.0 {
                            (2.0 * b / (amp.powf(q) * lap)).powf(1.0 / (alpha * q - p))
                        } else {
                            f64::INFINITY
                        };
                        (0.0, react)
                    }
                };
                if b < 0.0 && side == Side::Super {
                    let react = (eps * big.powf(1.0 - beta) / (8.0 * (p - 2.0) * b.abs()))
                        .powf(1.0 / (alpha * (beta - 1.0)));
                    x_abs = x_abs.min(react);
                }
                let delta = if rate > 0.0 { 0.5 / rate } else { f64::INFINITY };
                let domain = if x_abs.is_finite() {
                    BarrierDomain::local(-x_abs, delta)
                } else {
                    BarrierDomain { t_max: delta, ..BarrierDomain::everywhere() }
                };
                Ok(Self::new(
                    family,
                    side,
                    params,
                    &[("eps", eps), ("rate", rate), ("x_eps", -x_abs), ("delta", delta)],
                    domain,
                    Formula::Separable { amp, rate },
                ))
            }
        }
    }

    /// Profile barriers of the b = 0 expanding case on x > 0; `a0` is w(0, 1).
    pub fn b0_profile(params: &ProblemParams, a0: f64, side: Side) -> Result<Self, ClosedFormError> {
        if classify(params).region != Region::B0Expanding {
            return Err(not_admissible("needs b = 0 and alpha < p/(p-2)"));
        }
        let k = b0_profile_constants(params, a0)?;
        let (c0, xi0) = match side {
            Side::Super => (k.c5, k.xi4),
            Side::Sub => (k.c4, k.xi3),
        };
        Ok(Self::new(
            BarrierFamily::B0Profile,
            side,
            params,
            &[("C0", c0), ("xi0", xi0), ("A0", a0)],
            BarrierDomain { lower: LowerBound::Fixed(0.0), ..BarrierDomain::everywhere() },
            Formula::B0Profile { c0, xi0 },
        ))
    }

    fn formula_value(&self, x: f64, t: f64) -> f64 {
        let ProblemParams { p, b, beta, alpha, .. } = self.params;
        let pos = |v: f64| v.max(0.0);
        match self.formula {
            Formula::ProfilePower { c0, zeta0, gamma0 } => {
                if t == 0.0 {
                    return 0.0;
                }
                let kappa = self.params.q() / (p * (1.0 - beta));
                let zeta = x * t.powf(-kappa);
                t.powf(1.0 / (1.0 - beta)) * c0 * pos(zeta0 - zeta).powf(gamma0)
            }
            Formula::Absorption { amp, rate, expo } => {
                let w = amp.powf(1.0 - beta) * pos(-x).powf(expo * (1.0 - beta)) - b * (1.0 - beta) * rate * t;
                pos(w).powf(1.0 / (1.0 - beta))
            }
            Formula::Corner { c0, zeta0, power, time_exp } => c0 * pos(-zeta0 * t.powf(time_exp) - x).powf(power),
            Formula::Exponential { amp, eps } => {
                let base = amp * pos(-x).powf(alpha) * (-b * t).exp();
                if eps == 0.0 {
                    return base;
                }
                let k = b * (p - 2.0);
                let elapsed = if k.abs() < 1e-12 { t } else { -(-k * t).exp_m1() / k };
                base * (1.0 - eps * elapsed).powf(1.0 / (2.0 - p))
            }
            Formula::Absorbing { amp, d } => {
                if x >= 0.0 {
                    return 0.0;
                }
                let w = amp.powf(1.0 - beta) * (-x).powf(alpha * (1.0 - beta)) + b * (beta - 1.0) * (1.0 - d) * t;
                w.powf(1.0 / (1.0 - beta))
            }
            Formula::Separable { amp, rate } => amp * pos(-x).powf(alpha) * (1.0 - rate * t).powf(1.0 / (2.0 - p)),
            Formula::B0Profile { c0, xi0 } => {
                if t == 0.0 {
                    return 0.0;
                }
                let lam = self.params.lambda();
                let xi = x * t.powf(-1.0 / lam);
                t.powf(alpha / lam) * c0 * pos(xi0 - xi).powf((p - 1.0) / (p - 2.0))
            }
        }
    }

    fn formula_kinks(&self, t: f64) -> Vec<f64> {
        let ProblemParams { p, b, beta, .. } = self.params;
        match self.formula {
            Formula::ProfilePower { zeta0, .. } => {
                let kappa = self.params.q() / (p * (1.0 - beta));
                vec![zeta0 * t.powf(kappa)]
            }
            Formula::Absorption { amp, rate, expo } => {
                let shift = b * (1.0 - beta) * rate * t / amp.powf(1.0 - beta);
                if shift > 0.0 {
                    vec![-shift.powf(1.0 / (expo * (1.0 - beta)))]
                } else {
                    vec![0.0]
                }
            }
            Formula::Corner { zeta0, time_exp, .. } => vec![-zeta0 * t.powf(time_exp)],
            Formula::B0Profile { xi0, .. } => vec![xi0 * t.powf(1.0 / self.params.lambda())],
            Formula::Exponential { .. } | Formula::Absorbing { .. } | Formula::Separable { .. } => vec![0.0],
        }
    }
}

impl SpaceTime for BarrierSpec {
    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: f64, t: f64) -> Result<f64, ClosedFormError> {
        if !self.domain.contains(x, t) {
            return Err(ClosedFormError::OutsideDomain { x, t });
        }
        Ok(self.formula_value(x, t))
    }

    fn kinks(&self, t: f64) -> Vec<f64> {
        self.formula_kinks(t)
    }

    fn domain_edges(&self, t: f64) -> Vec<f64> {
        self.domain.lower_x(t).into_iter().chain(self.domain.x_upper).collect()
    }

    fn t_max(&self) -> f64 {
        self.domain.t_max
    }
}
