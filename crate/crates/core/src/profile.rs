//! Shooting solvers for the self-similar profile equations.
//!
//! Both equations are integrated as a first-order system in (f, v) with
//! v = |f'|^{p−2} f', starting just behind the free endpoint from the local
//! front expansion and marching away from it. The endpoint is found by
//! bisection on the far-field amplitude f(ξ)/(−ξ)^α.

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::{critical_constant, ties, ModelError, ProblemParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("endpoint not bracketed: amplitude {lo_amp} at {lo}, {hi_amp} at {hi}, target {target}")]
    NoBracket { lo: f64, hi: f64, lo_amp: f64, hi_amp: f64, target: f64 },
    #[error("step size underflow at distance {s} from the front")]
    StiffFailure { s: f64 },
    #[error("far-field amplitude is not monotone in the endpoint: {0}")]
    NonMonotone(String),
    #[error("far-field amplitude still drifting at xi = {xi}")]
    FarFieldNotSettled { xi: f64 },
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// b = 0: (|f'|^{p−2}f')' = (αf − ξf')/(p − α(p−2)).
    PureDiffusion,
    /// Borderline reaction case: f/(1−β) − (|f'|^{p−2}f')' − κζf' + bf^β = 0.
    Reaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub kind: ProfileKind,
    pub params: ProblemParams,
    /// Similarity variable, descending from the front.
    pub xi_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// v = |f'|^{p−2} f' at the grid points.
    pub fluxes: Vec<f64>,
    pub xi_star: f64,
    /// f(0) for the C = 1 normalization (pure diffusion only).
    pub a0: Option<f64>,
    /// f(0) (reaction only).
    pub a1: Option<f64>,
    pub front_coefficient: f64,
    /// Far-field amplitude lim f(ξ)/(−ξ)^α reached by the shot.
    pub far_amplitude: f64,
}

impl SelfSimilarProfile {
    /// f at an arbitrary ξ: cubic Hermite interpolation inside the grid, the
    /// front expansion between the first grid point and ξ_*, and the far-field
    /// power law beyond the last grid point.
    pub fn eval(&self, xi: f64) -> f64 {
        let n = self.xi_grid.len();
        if xi >= self.xi_star {
            return 0.0;
        }
        let last = self.xi_grid[n - 1];
        if xi <= last {
            return self.values[n - 1] * (xi / last).powf(self.params.alpha);
        }
        // xi_grid is descending.
        let i = self.xi_grid.partition_point(|&g| g > xi).clamp(1, n - 1);
        let (x0, x1) = (self.xi_grid[i - 1], self.xi_grid[i]);
        let (f0, f1) = (self.values[i - 1], self.values[i]);
        let slope = |v: f64| v.signum() * v.abs().powf(1.0 / (self.params.p - 1.0));
        let (d0, d1) = (slope(self.fluxes[i - 1]), slope(self.fluxes[i]));
        let h = x1 - x0;
        let s = (xi - x0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
    }

    /// The self-similar solution t^σ f(x t^{−τ}) built from this profile.
    pub fn solution(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return self.params.initial(x);
        }
        let ProblemParams { p, beta, alpha, .. } = self.params;
        let (sigma, tau) = match self.kind {
            ProfileKind::PureDiffusion => (alpha / self.params.lambda(), 1.0 / self.params.lambda()),
            ProfileKind::Reaction => (1.0 / (1.0 - beta), self.params.q() / (p * (1.0 - beta))),
        };
        t.powf(sigma) * self.eval(x * t.powf(-tau))
    }
}

/// K of the front expansion f ≈ K(ξ_* − ξ)^{(p−1)/(p−2)} for the b = 0 profile.
pub fn front_coefficient(params: &ProblemParams, xi_star: f64) -> f64 {
    let p = params.p;
    (xi_star * (p - 2.0).powf(p - 1.0) / (params.lambda() * (p - 1.0).powf(p - 1.0))).powf(1.0 / (p - 2.0))
}

/// K of the front expansion f ≈ K(ζ_* − ζ)^μ for the reaction profile, with
/// μ as in [`reaction_front_exponent`].
pub fn reaction_front_coefficient(params: &ProblemParams, zeta_star: f64) -> Result<f64, ProfileError> {
    let ode = Ode::reaction(params)?;
    Ok(ode.front_coefficient(zeta_star))
}

/// μ = (p−1)/(p−2) when β(p−1) ≥ 1, p/(p−1−β) otherwise.
pub fn reaction_front_exponent(params: &ProblemParams) -> f64 {
    let p = params.p;
    match params.borderline_branch() {
        Ordering::Less => p / params.q(),
        _ => (p - 1.0) / (p - 2.0),
    }
}

pub fn solve_pure_profile(params: &ProblemParams, tol: f64) -> Result<SelfSimilarProfile, ProfileError> {
    check_tol(tol)?;
    let ode = Ode::pure(params)?;
    // The b = 0 equation is scale invariant, so a single shot at ξ_* = 1
    // predicts the endpoint; bisection then removes the far-field truncation.
    let lam = params.lambda();
    let amp_one = Shooter::calibrated(ode, 1.0, tol)?.amplitude(1.0)?;
    let guess = (params.c / amp_one).powf((params.p - 2.0) / lam);
    let profile = shoot_endpoint(ode, guess, tol)?;
    Ok(profile)
}

pub fn solve_reaction_profile(params: &ProblemParams, tol: f64) -> Result<SelfSimilarProfile, ProfileError> {
    check_tol(tol)?;
    let ode = Ode::reaction(params)?;
    shoot_endpoint(ode, 1.0, tol)
}

fn check_tol(tol: f64) -> Result<(), ProfileError> {
    if tol > 0.0 && tol < 0.1 {
        Ok(())
    } else {
        Err(ProfileError::OutOfDomain(format!("tolerance must lie in (0, 0.1) (got {tol})")))
    }
}

#[derive(Debug, Clone, Copy)]
struct Ode {
    kind: ProfileKind,
    params: ProblemParams,
    /// λ for the pure equation, κ = (p−1−β)/(p(1−β)) for the reaction one.
    drift: f64,
}

impl Ode {
    fn pure(params: &ProblemParams) -> Result<Self, ProfileError> {
        let p = params.p;
        let top = p / (p - 2.0);
        if !(params.alpha < top) || ties(params.alpha, top) {
            return Err(ProfileError::OutOfDomain(format!("needs 0 < alpha < p/(p-2) (alpha = {})", params.alpha)));
        }
        let params = ProblemParams { b: 0.0, ..*params };
        Ok(Ode { kind: ProfileKind::PureDiffusion, params, drift: params.lambda() })
    }

    fn reaction(params: &ProblemParams) -> Result<Self, ProfileError> {
        if !(params.beta < 1.0 && params.on_borderline()) {
            return Err(ProfileError::OutOfDomain("needs beta < 1 and alpha = p/(p-1-beta)".into()));
        }
        let c_star = critical_constant(params)?;
        if !(params.c > c_star) || ties(params.c, c_star) {
            return Err(ProfileError::OutOfDomain(format!("needs C > C_* = {c_star} (C = {})", params.c)));
        }
        let drift = params.q() / (params.p * (1.0 - params.beta));
        Ok(Ode { kind: ProfileKind::Reaction, params: *params, drift })
    }

    fn slope(&self, v: f64) -> f64 {
        v.signum() * v.abs().powf(1.0 / (self.params.p - 1.0))
    }

    /// d(f, v)/dξ.
    fn rhs(&self, xi: f64, [f, v]: [f64; 2]) -> [f64; 2] {
        let ProblemParams { alpha, beta, b, .. } = self.params;
        let fp = self.slope(v);
        let vp = match self.kind {
            ProfileKind::PureDiffusion => (alpha * f - xi * fp) / self.drift,
            ProfileKind::Reaction => f / (1.0 - beta) - self.drift * xi * fp + b * f.max(0.0).powf(beta),
        };
        [fp, vp]
    }

    fn front_exponent(&self) -> f64 {
        match self.kind {
            ProfileKind::PureDiffusion => (self.params.p - 1.0) / (self.params.p - 2.0),
            ProfileKind::Reaction => reaction_front_exponent(&self.params),
        }
    }

    fn front_coefficient(&self, xi_star: f64) -> f64 {
        let ProblemParams { p, beta, b, .. } = self.params;
        let m = self.front_exponent();
        match (self.kind, self.params.borderline_branch()) {
            (ProfileKind::PureDiffusion, _) => front_coefficient(&self.params, xi_star),
            (ProfileKind::Reaction, Ordering::Greater) => (self.drift * xi_star / m.powf(p - 1.0)).powf(1.0 / (p - 2.0)),
            (ProfileKind::Reaction, Ordering::Less) => {
                (b / (m.powf(p - 1.0) * (m - 1.0) * (p - 1.0))).powf(1.0 / self.params.q())
            }
            (ProfileKind::Reaction, Ordering::Equal) => {
                // m^p K^{p−1−β} = κζ_* m K^{1−β} + b has a single positive root.
                let g = |k: f64| m.powf(p) * k.powf(p - 1.0 - beta) - self.drift * xi_star * m * k.powf(1.0 - beta) - b;
                let (mut lo, mut hi) = (0.0, 1.0);
                while g(hi) < 0.0 {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Exponent of the leading relative correction to the front expansion.
    fn front_correction_exponent(&self) -> f64 {
        let m = self.front_exponent();
        let beta = self.params.beta;
        let e = match (self.kind, self.params.borderline_branch()) {
            (ProfileKind::Reaction, Ordering::Greater) => 1.0 - m * (1.0 - beta),
            (ProfileKind::Reaction, Ordering::Less) => m * (1.0 - beta) - 1.0,
            _ => 1.0,
        };
        e.min(1.0)
    }

    /// Rate ω of the far-field approach f/(−ξ)^α = A + O(|ξ|^{−ω}).
    fn far_exponent(&self) -> f64 {
        match self.kind {
            ProfileKind::PureDiffusion => self.params.lambda(),
            ProfileKind::Reaction => self.params.alpha * (1.0 - self.params.beta),
        }
    }
}

/// Offset of the first integration point behind the front, relative to ξ_*:
/// small enough that the neglected terms of the front expansion stay below
/// a hundredth of the tolerance.
fn front_offset(ode: &Ode, tol: f64) -> f64 {
    let e = ode.front_correction_exponent().max(1e-3);
    (tol / 100.0).powf(1.0 / e).clamp(1e-250, 1e-6)
}

const MAX_DOUBLINGS: usize = 48;
const MAX_STEPS: usize = 2_000_000;

/// Integrates from the front to a fixed set of far-field stations ξ = −Ξ·2^k.
#[derive(Debug, Clone)]
struct Shooter {
    ode: Ode,
    tol: f64,
    /// Distances Ξ·2^k, k = 0..=n.
    stations: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Shot {
    /// f/(−ξ)^α at each station.
    ratios: Vec<f64>,
    path: Vec<(f64, f64, f64)>,
}

impl Shooter {
    /// Picks the far-field station at the trial endpoint by doubling Ξ until
    /// the extrapolated amplitude changes by less than tol/10.
    fn calibrated(ode: Ode, xi_star: f64, tol: f64) -> Result<Self, ProfileError> {
        let base = 4.0 * xi_star.abs().max(1.0);
        let all: Vec<f64> = (0..=MAX_DOUBLINGS).map(|k| base * 2f64.powi(k as i32)).collect();
        let probe = Shooter { ode, tol, stations: all.clone() };
        let omega = ode.far_exponent();
        let mut settled = None;
        let shot = probe.run(xi_star, false, |ratios| {
            let ex = extrapolate(ratios, omega);
            let n = ex.len();
            if n >= 2 && (ex[n - 1] - ex[n - 2]).abs() < 0.1 * tol * ex[n - 1].abs() {
                settled = Some(ratios.len());
                return true;
            }
            false
        })?;
        let used = settled.ok_or(ProfileError::FarFieldNotSettled { xi: -all[shot.ratios.len() - 1] })?;
        Ok(Shooter { ode, tol, stations: all[..used].to_vec() })
    }

    fn amplitude(&self, xi_star: f64) -> Result<f64, ProfileError> {
        let shot = self.run(xi_star, false, |_| false)?;
        Ok(*extrapolate(&shot.ratios, self.ode.far_exponent()).last().unwrap())
    }

    /// Integrates in s = ξ_* − ξ from the front offset outwards. `stop` sees
    /// the ratios collected so far after each station and may end the run.
    fn run(&self, xi_star: f64, record: bool, mut stop: impl FnMut(&[f64]) -> bool) -> Result<Shot, ProfileError> {
        let ode = &self.ode;
        let p = ode.params.p;
        let alpha = ode.params.alpha;
        let m = ode.front_exponent();
        let k = ode.front_coefficient(xi_star);
        let s0 = front_offset(ode, self.tol) * xi_star;
        let f0 = k * s0.powf(m);
        let v0 = -(k * m).powf(p - 1.0) * s0.powf((m - 1.0) * (p - 1.0));
        let rhs = |s: f64, y: [f64; 2]| {
            let d = ode.rhs(xi_star - s, y);
            [-d[0], -d[1]]
        };
        let mut path = Vec::new();
        if record {
            path.push((xi_star, 0.0, 0.0));
            path.push((xi_star - s0, f0, v0));
        }
        let mut ratios = Vec::with_capacity(self.stations.len());
        let mut y = [f0, v0];
        let mut s = s0;
        let mut h = 0.01 * s0;
        let rtol = self.tol / 100.0;
        let mut steps = 0;
        for &dist in &self.stations {
            let target = xi_star + dist;
            while s < target {
                steps += 1;
                if steps > MAX_STEPS || h < 1e-14 * s {
                    return Err(ProfileError::StiffFailure { s });
                }
                let hh = h.min(target - s);
                let (y_new, err) = dp45_step(&rhs, s, y, hh, rtol);
                if err <= 1.0 {
                    s = if hh == target - s { target } else { s + hh };
                    y = y_new;
                    if record {
                        path.push((xi_star - s, y[0], y[1]));
                    }
                }
                let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
                h = hh * factor.clamp(0.2, 5.0);
            }
            ratios.push(y[0] / dist.powf(alpha));
            if stop(&ratios) {
                break;
            }
        }
        Ok(Shot { ratios, path })
    }
}

/// One Richardson step per pair of consecutive stations, assuming an error
/// term proportional to Ξ^{−ω}.
fn extrapolate(ratios: &[f64], omega: f64) -> Vec<f64> {
    if ratios.len() < 2 {
        return ratios.to_vec();
    }
    let w = 2f64.powf(omega);
    ratios.windows(2).map(|r| (w * r[1] - r[0]) / (w - 1.0)).collect()
}

/// Dormand–Prince 5(4) step; returns the fifth-order update and the error
/// norm relative to rtol.
fn dp45_step(rhs: &impl Fn(f64, [f64; 2]) -> [f64; 2], s: f64, y: [f64; 2], h: f64, rtol: f64) -> ([f64; 2], f64) {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(s, y);
    for stage in 0..6 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(stage + 1) {
            yi[0] += h * A[stage][j] * kj[0];
            yi[1] += h * A[stage][j] * kj[1];
        }
        k[stage + 1] = rhs(s + C[stage] * h, yi);
    }
    // The last row of A is the fifth-order solution (FSAL).
    let mut y_new = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        y_new[0] += h * A[5][j] * kj[0];
        y_new[1] += h * A[5][j] * kj[1];
    }
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
        let scale = rtol * y[i].abs().max(y_new[i].abs()).max(1e-300);
        err = err.max(e.abs() / scale);
    }
    if !y_new.iter().all(|v| v.is_finite()) {
        err = f64::INFINITY;
    }
    (y_new, err)
}

/// Bisection on log ξ_* until the bracket is narrower than tol·max(1, ξ_*) and the
/// far-field amplitude matches C to tol; the far-field station is re-calibrated
/// at the converged endpoint and the search repeated if it moved.
fn shoot_endpoint(ode: Ode, guess: f64, tol: f64) -> Result<SelfSimilarProfile, ProfileError> {
    let target = ode.params.c;
    let mut shooter = Shooter::calibrated(ode, guess, tol)?;
    let mut centre = guess;
    for _ in 0..4 {
        let (lo, hi) = bracket(&shooter, centre, target)?;
        let xi_star = bisect(&shooter, lo, hi, target, tol)?;
        let recal = Shooter::calibrated(ode, xi_star, tol)?;
        if recal.stations.last() <= shooter.stations.last() {
            return finish(&shooter, xi_star);
        }
        shooter = recal;
        centre = xi_star;
    }
    Err(ProfileError::FarFieldNotSettled { xi: -shooter.stations.last().copied().unwrap_or(f64::NAN) })
}

fn bracket(shooter: &Shooter, centre: f64, target: f64) -> Result<(f64, f64), ProfileError> {
    let mut spread = 10.0;
    let mut last = None;
    for _ in 0..6 {
        let (lo, hi) = (centre / spread, centre * spread);
        let (a_lo, a_hi) = (shooter.amplitude(lo)?, shooter.amplitude(hi)?);
        if (a_lo - target) * (a_hi - target) <= 0.0 {
            return Ok((lo, hi));
        }
        last = Some((lo, hi, a_lo, a_hi));
        spread *= spread;
    }
    let (lo, hi, lo_amp, hi_amp) = last.unwrap();
    Err(ProfileError::NoBracket { lo, hi, lo_amp, hi_amp, target })
}

fn bisect(shooter: &Shooter, mut lo: f64, mut hi: f64, target: f64, tol: f64) -> Result<f64, ProfileError> {
    let mut g_lo = shooter.amplitude(lo)? / target - 1.0;
    let mut g_hi = shooter.amplitude(hi)? / target - 1.0;
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let g = shooter.amplitude(mid)? / target - 1.0;
        if (g - g_lo) * (g - g_hi) > 0.0 {
            return Err(ProfileError::NonMonotone(format!(
                "ratio - 1 = {g} at {mid} outside [{g_lo}, {g_hi}] from bracket [{lo}, {hi}]"
            )));
        }
        if (g < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
        if hi - lo < tol * mid.max(1.0) && g.abs() < tol {
            return Ok(mid);
        }
    }
    Ok((lo * hi).sqrt())
}

fn finish(shooter: &Shooter, xi_star: f64) -> Result<SelfSimilarProfile, ProfileError> {
    let ode = &shooter.ode;
    let shot = shooter.run(xi_star, true, |_| false)?;
    let far_amplitude = *extrapolate(&shot.ratios, ode.far_exponent()).last().unwrap();
    let (xi_grid, (values, fluxes)): (Vec<f64>, (Vec<f64>, Vec<f64>)) =
        shot.path.iter().map(|&(x, f, v)| (x, (f, v))).unzip();
    let at_zero = {
        let partial = SelfSimilarProfile {
            kind: ode.kind,
            params: ode.params,
            xi_grid: xi_grid.clone(),
            values: values.clone(),
            fluxes: fluxes.clone(),
            xi_star,
            a0: None,
            a1: None,
            front_coefficient: 0.0,
            far_amplitude,
        };
        partial.eval(0.0)
    };
    let (a0, a1) = match ode.kind {
        ProfileKind::PureDiffusion => {
            let p = ode.params.p;
            (Some(at_zero / ode.params.c.powf(p / ode.params.lambda())), None)
        }
        ProfileKind::Reaction => (None, Some(at_zero)),
    };
    Ok(SelfSimilarProfile {
        kind: ode.kind,
        params: ode.params,
        xi_grid,
        values,
        fluxes,
        xi_star,
        a0,
        a1,
        front_coefficient: ode.front_coefficient(xi_star),
        far_amplitude,
    })
}
