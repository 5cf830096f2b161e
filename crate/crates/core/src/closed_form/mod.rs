//! Exact solutions, barrier functions and a finite-difference residual check.

mod barriers;
mod solutions;

pub use barriers::{BarrierDomain, BarrierFamily, BarrierSpec, LowerBound, PowerWaitKind, Side};
pub use solutions::{ClosedFormSolution, SolutionFamily};

use thiserror::Error;

use crate::model::{ModelError, ProblemParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("t = {t} is at or beyond the blow-up time {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },
    #[error("({x}, {t}) lies outside the barrier domain")]
    OutsideDomain { x: f64, t: f64 },
    #[error("({x}, {t}) is too close to a non-smooth curve")]
    TooCloseToKink { x: f64, t: f64 },
    #[error("family not admissible: {0}")]
    NotAdmissible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A function of (x, t) that can be fed to [`residual`].
pub trait SpaceTime {
    fn params(&self) -> &ProblemParams;
    fn value(&self, x: f64, t: f64) -> Result<f64, ClosedFormError>;
    /// Positions at time t across which the function is not smooth.
    fn kinks(&self, t: f64) -> Vec<f64>;
    /// Positions at time t where the domain of definition ends.
    fn domain_edges(&self, _t: f64) -> Vec<f64> {
        Vec::new()
    }
    /// Largest admissible time (exclusive).
    fn t_max(&self) -> f64 {
        f64::INFINITY
    }
    /// Time at which the function becomes singular.
    fn blowup_time(&self) -> f64 {
        f64::INFINITY
    }
}

pub fn eval_solution(sol: &ClosedFormSolution, x: f64, t: f64) -> Result<f64, ClosedFormError> {
    sol.value(x, t)
}

pub fn eval_barrier(bar: &BarrierSpec, x: f64, t: f64) -> Result<f64, ClosedFormError> {
    bar.value(x, t)
}

/// Relative step of the difference quotients, in units of the local length scale.
pub const FD_REL_STEP: f64 = 1e-3;

/// The three terms of Lg at one point, evaluated by difference quotients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualTerms {
    pub time_derivative: f64,
    pub diffusion: f64,
    pub reaction: f64,
}

impl ResidualTerms {
    /// Lg = g_t − (|g_x|^{p−2}g_x)_x + b g^β.
    pub fn value(&self) -> f64 {
        self.time_derivative - self.diffusion + self.reaction
    }

    /// Sum of the term magnitudes, the natural scale of the cancellation.
    pub fn scale(&self) -> f64 {
        self.time_derivative.abs() + self.diffusion.abs() + self.reaction.abs()
    }
}

pub fn residual(f: &dyn SpaceTime, x: f64, t: f64) -> Result<f64, ClosedFormError> {
    residual_terms(f, x, t).map(|r| r.value())
}

/// Difference-quotient evaluation of Lg with one Richardson step in h and in
/// the time step. The spatial step is FD_REL_STEP times the local length scale
/// min(max(1, |x|), distance to the nearest kink), and at most a quarter of the
/// distance to a domain edge. The time step starts at FD_REL_STEP/2 times
/// min(t, distance to the blow-up time) and is halved while a kink would travel more
/// than FD_REL_STEP of its distance, or an edge more than half of its
/// distance, across the stencil.
pub fn residual_terms(f: &dyn SpaceTime, x: f64, t: f64) -> Result<ResidualTerms, ClosedFormError> {
    let params = *f.params();
    let t_gap = (f.blowup_time() - t).min(t);
    if !(t_gap > 0.0 && t < f.t_max()) {
        return Err(ClosedFormError::OutsideDomain { x, t });
    }
    let too_close = ClosedFormError::TooCloseToKink { x, t };
    let nearest = |pts: &[f64]| pts.iter().map(|k| (x - k).abs()).fold(f64::INFINITY, f64::min);
    let kinks = f.kinks(t);
    let edges = f.domain_edges(t);
    let kink_dist = nearest(&kinks);
    let edge_dist = nearest(&edges);
    let length = x.abs().max(1.0).min(kink_dist);
    if !(length > 1e-6 * x.abs()) || !(edge_dist > 0.0) {
        return Err(too_close);
    }
    let h = (FD_REL_STEP * length).min(0.25 * edge_dist);
    let moved = |now: &[f64], later: Vec<f64>| {
        later.iter().zip(now).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let mut ht = 0.5 * FD_REL_STEP * t_gap;
    for _ in 0..64 {
        let ok = [t - 4.0 * ht, t + 2.0 * ht].iter().all(|&tt| {
            moved(&kinks, f.kinks(tt)) <= FD_REL_STEP * kink_dist && moved(&edges, f.domain_edges(tt)) <= 0.5 * edge_dist
        });
        if ok {
            break;
        }
        ht *= 0.5;
    }
    let g = f.value(x, t)?;
    // A stencil point leaving the domain means the centre hugs its boundary.
    let at = |xx: f64, tt: f64| f.value(xx, tt).map_err(|_| ClosedFormError::TooCloseToKink { x, t });
    let phi = |s: f64| s.abs().powf(params.p - 2.0) * s;
    // Backward differences when the stencil would cross the end of the time domain.
    let backward = t + 4.0 * ht >= f.t_max();
    let d_t = |k: f64| -> Result<f64, ClosedFormError> {
        if backward {
            Ok((3.0 * g - 4.0 * at(x, t - k)? + at(x, t - 2.0 * k)?) / (2.0 * k))
        } else {
            Ok((at(x, t + k)? - at(x, t - k)?) / (2.0 * k))
        }
    };
    let d_x = |k: f64| -> Result<f64, ClosedFormError> {
        let right = (at(x + k, t)? - g) / k;
        let left = (g - at(x - k, t)?) / k;
        Ok((phi(right) - phi(left)) / k)
    };
    // One Richardson step removes the second-order truncation error.
    let time_derivative = (4.0 * d_t(ht)? - d_t(2.0 * ht)?) / 3.0;
    let diffusion = (4.0 * d_x(h)? - d_x(2.0 * h)?) / 3.0;
    let reaction = if g > 0.0 { params.b * g.powf(params.beta) } else { 0.0 };
    Ok(ResidualTerms { time_derivative, diffusion, reaction })
}

/// Relative tolerance of the sign certification.
pub const SIGN_RTOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub pass: bool,
    pub checked: usize,
    /// Points rejected as too close to a kink.
    pub skipped: usize,
    /// Worst violation as (x, t, residual / scale); sign-adjusted so that
    /// negative means the claim is violated.
    pub worst: Option<(f64, f64, f64)>,
}

/// Checks the declared sign of Lg on the given sample points.
pub fn certify_sign(bar: &BarrierSpec, samples: &[(f64, f64)]) -> Result<SignReport, ClosedFormError> {
    let sign = match bar.side {
        Side::Super => 1.0,
        Side::Sub => -1.0,
    };
    let mut report = SignReport { pass: true, checked: 0, skipped: 0, worst: None };
    for &(x, t) in samples {
        let terms = match residual_terms(bar, x, t) {
            Ok(r) => r,
            Err(ClosedFormError::TooCloseToKink { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        report.checked += 1;
        let scale = terms.scale();
        let normalized = if scale > 0.0 { sign * terms.value() / scale } else { 0.0 };
        if normalized < -SIGN_RTOL {
            report.pass = false;
        }
        if report.worst.map_or(true, |w| normalized < w.2) {
            report.worst = Some((x, t, normalized));
        }
    }
    if report.checked == 0 {
        report.pass = false;
    }
    Ok(report)
}

/// An nx × nt sample grid inside the barrier's domain: cell-centred in x over
/// [x_lo, x_hi] clipped to the domain at each t, geometric in t over [t_lo, t_hi].
pub fn domain_samples(
    bar: &BarrierSpec,
    (x_lo, x_hi): (f64, f64),
    (t_lo, t_hi): (f64, f64),
    nx: usize,
    nt: usize,
) -> Vec<(f64, f64)> {
    let t_hi = t_hi.min(0.99 * bar.domain.t_max);
    let mut out = Vec::with_capacity(nx * nt);
    for j in 0..nt {
        let t = t_lo * (t_hi / t_lo).powf((j as f64 + 0.5) / nt as f64);
        let lo = bar.domain.lower_x(t).map_or(x_lo, |l| l.max(x_lo));
        let hi = bar.domain.x_upper.map_or(x_hi, |u| u.min(x_hi));
        for i in 0..nx {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / nx as f64;
            out.push((x, t));
        }
    }
    out
}

#[cfg(test)]
mod tests;
