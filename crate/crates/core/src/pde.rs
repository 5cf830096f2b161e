//! Explicit conservative finite differences for u_t = (|u_x|^{p−2}u_x)_x − b u^β
//! on an interval, with Strang splitting and an exact reaction sub-step.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::closed_form::{ClosedFormSolution, SpaceTime};
use crate::model::{classify, ProblemParams};

/// CFL safety factor of the explicit diffusion step.
pub const CFL_SIGMA: f64 = 0.4;
/// Largest time step taken, also returned for a field without diffusion.
pub const DT_MAX: f64 = 1e-3;
/// Smallest time step returned by [`stable_dt`].
pub const DT_MIN: f64 = 1e-14;
/// Interface threshold relative to the maximum of the initial field.
pub const THRESHOLD_REL: f64 = 1e-10;
/// Number of geometrically spaced interface samples per run.
pub const TRACE_SAMPLES: usize = 240;
/// Trace samples start at this fraction of the run length.
pub const TRACE_START: f64 = 1e-4;
/// Values below this are flushed to zero to keep subnormals out of the loops.
const FLUSH: f64 = 1e-290;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unstable step at t = {t}: {reason}")]
    UnstableStep { t: f64, reason: String },
    #[error("support reached the right boundary at t = {t} (x = {x})")]
    InterfaceAtBoundary { t: f64, x: f64 },
    #[error("snapshot times are not usable: {0}")]
    SnapshotSkew(String),
    #[error("t_end = {t_end} is not before the blow-up time {horizon}")]
    BeyondHorizon { t_end: f64, horizon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_left: f64,
    pub x_right: f64,
    pub n_cells: usize,
}

impl Grid1D {
    pub fn new(x_left: f64, x_right: f64, n_cells: usize) -> Result<Self, PdeError> {
        if !(x_left < 0.0 && x_right > 0.0) {
            return Err(PdeError::InvalidGrid(format!("needs x_left < 0 < x_right (got [{x_left}, {x_right}])")));
        }
        if n_cells < 4 {
            return Err(PdeError::InvalidGrid(format!("needs at least 4 cells (got {n_cells})")));
        }
        Ok(Grid1D { x_left, x_right, n_cells })
    }

    pub fn dx(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_cells as f64
    }

    /// Number of nodes, n_cells + 1.
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.x(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid1D,
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation; `None` outside the grid.
    pub fn at(&self, x: f64) -> Option<f64> {
        let g = &self.grid;
        if !(x >= g.x_left && x <= g.x_right) {
            return None;
        }
        let pos = (x - g.x_left) / g.dx();
        let i = (pos.floor() as usize).min(g.n_cells - 1);
        let w = pos - i as f64;
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Σ u dx.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceTrace {
    /// (t, η) with t strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub threshold: f64,
    /// First sample time at which a waiting interface has moved; only set
    /// for regimes with a predicted waiting time.
    pub waiting_time: Option<f64>,
    pub dx: f64,
}

impl InterfaceTrace {
    /// Largest displacement of η from its initial position.
    pub fn max_excursion(&self) -> f64 {
        let eta0 = self.samples.first().map_or(0.0, |s| s.1);
        self.samples.iter().map(|s| (s.1 - eta0).abs()).fold(0.0, f64::max)
    }
}

/// Left Dirichlet datum.
#[derive(Clone, Default)]
pub enum LeftBoundary {
    /// Keep the initial nodal value.
    #[default]
    Static,
    /// Follow a prescribed trace u(x_left, t).
    Trace(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for LeftBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeftBoundary::Static => write!(f, "Static"),
            LeftBoundary::Trace(_) => write!(f, "Trace(..)"),
        }
    }
}

impl LeftBoundary {
    /// The boundary trace of an exact solution at the left grid edge.
    pub fn exact(sol: &ClosedFormSolution, x_left: f64) -> Self {
        let sol = sol.clone();
        LeftBoundary::Trace(Arc::new(move |t| sol.value(x_left, t).unwrap_or(f64::NAN)))
    }
}

pub fn initial_field(params: &ProblemParams, grid: &Grid1D) -> Field {
    Field { grid: *grid, t: 0.0, values: grid.nodes().map(|x| params.initial(x)).collect() }
}

/// σ dx² / ((p−1) max|δu/dx|^{p−2} + dx² λ_r), capped at [`DT_MAX`] and
/// floored at [`DT_MIN`]; λ_r = |b| β max(u)^{β−1} when β ≥ 1, else 0.
pub fn stable_dt(field: &Field, params: &ProblemParams) -> f64 {
    let dx = field.grid.dx();
    let slope = field.values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max) / dx;
    dt_from_slope(params, dx, slope, field.max())
}

fn dt_from_slope(params: &ProblemParams, dx: f64, slope: f64, umax: f64) -> f64 {
    let ProblemParams { p, b, beta, .. } = *params;
    let react = if beta >= 1.0 && umax > 0.0 { b.abs() * beta * umax.powf(beta - 1.0) } else { 0.0 };
    let denom = (p - 1.0) * slope.powf(p - 2.0) + dx * dx * react;
    if denom > 0.0 {
        (CFL_SIGMA * dx * dx / denom).clamp(DT_MIN, DT_MAX)
    } else {
        DT_MAX
    }
}

/// Exact solution of u' = −b u^β over a time τ.
#[derive(Debug, Clone, Copy)]
struct Reaction {
    b: f64,
    beta: f64,
}

impl Reaction {
    fn apply(&self, u: &mut [f64], tau: f64) {
        let Reaction { b, beta } = *self;
        if b == 0.0 || tau == 0.0 {
            return;
        }
        if beta == 1.0 {
            let k = (-b * tau).exp();
            u.iter_mut().for_each(|v| *v *= k);
        } else if beta == 0.5 {
            let shift = 0.5 * b * tau;
            u.iter_mut().for_each(|v| {
                let w = (v.sqrt() - shift).max(0.0);
                *v = w * w;
            });
        } else {
            let shift = b * (1.0 - beta) * tau;
            let e = 1.0 / (1.0 - beta);
            u.iter_mut().for_each(|v| {
                if *v > 0.0 {
                    *v = (v.powf(1.0 - beta) - shift).max(0.0).powf(e);
                }
            });
        }
    }

    /// The diffusion update followed by a reaction step of length τ, in one pass.
    fn update_then_apply(&self, u: &mut [f64], flux: &[f64], last: usize, c: f64, tau: f64) -> (f64, f64) {
        #[cfg(target_arch = "x86_64")]
        if wide_vectors() {
            // SAFETY: the CPU supports AVX2.
            return unsafe { self.update_then_apply_avx2(u, flux, last, c, tau) };
        }
        self.update_then_apply_generic(u, flux, last, c, tau)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn update_then_apply_avx2(&self, u: &mut [f64], flux: &[f64], last: usize, c: f64, tau: f64) -> (f64, f64) {
        self.update_then_apply_generic(u, flux, last, c, tau)
    }

    #[inline(always)]
    fn update_then_apply_generic(&self, u: &mut [f64], flux: &[f64], last: usize, c: f64, tau: f64) -> (f64, f64) {
        let Reaction { b, beta } = *self;
        if b == 0.0 || tau == 0.0 {
            update_with(u, flux, last, c, |v| v)
        } else if beta == 1.0 {
            let k = (-b * tau).exp();
            update_with(u, flux, last, c, |v| v * k)
        } else if beta == 0.5 {
            let shift = 0.5 * b * tau;
            update_with(u, flux, last, c, |v| {
                let w = (v.max(0.0).sqrt() - shift).max(0.0);
                w * w
            })
        } else {
            let shift = b * (1.0 - beta) * tau;
            let e = 1.0 / (1.0 - beta);
            update_with(u, flux, last, c, |v| if v > 0.0 { (v.powf(1.0 - beta) - shift).max(0.0).powf(e) } else { v })
        }
    }

    /// Largest factor by which a half step can stretch differences of values
    /// up to `umax`; above one only for a source (b < 0).
    fn stretch(&self, umax: f64, tau: f64) -> f64 {
        let Reaction { b, beta } = *self;
        if b >= 0.0 || umax <= 0.0 {
            return 1.0;
        }
        if beta == 1.0 {
            (-b * tau).exp()
        } else {
            let w = umax.powf(1.0 - beta) - b * (1.0 - beta) * tau;
            if w <= 0.0 {
                return f64::INFINITY;
            }
            (w.powf(1.0 / (1.0 - beta)) / umax).powf(beta)
        }
    }
}

const LANES: usize = 4;

/// Whether the hot loops may use 256-bit vectors. Only the vector width
/// changes: no fused multiply-adds are formed, so results are bitwise the same.
#[cfg(target_arch = "x86_64")]
fn wide_vectors() -> bool {
    std::arch::is_x86_feature_detected!("avx2")
}

/// Largest |u_{i+1} − u_i| over faces 0..=last.
fn max_jump(u: &[f64], last: usize) -> f64 {
    let (a, b) = (&u[..=last], &u[1..=last + 1]);
    let mut m = [0.0f64; LANES];
    let mut ca = a.chunks_exact(LANES);
    let mut cb = b.chunks_exact(LANES);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..LANES {
            let d = (y[k] - x[k]).abs();
            m[k] = if d > m[k] { d } else { m[k] };
        }
    }
    let tail = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| (y - x).abs()).fold(0.0, f64::max);
    m.iter().copied().fold(tail, f64::max)
}

/// Face fluxes F_{i+1/2} = φ((u_{i+1} − u_i)/dx) for faces 0..=last; returns
/// the largest |δu/dx|. Slopes below `s_min` give zero flux, which keeps
/// subnormal products (and their slow microcode paths) out of the loop.
#[inline(always)]
fn fluxes_with(u: &[f64], flux: &mut [f64], last: usize, inv_dx: f64, s_min: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let (a, b, f) = (&u[..=last], &u[1..=last + 1], &mut flux[..=last]);
    let mut m = [0.0f64; LANES];
    let mut ca = a.chunks_exact(LANES);
    let mut cb = b.chunks_exact(LANES);
    let mut cf = f.chunks_exact_mut(LANES);
    for ((x, y), g) in (&mut ca).zip(&mut cb).zip(&mut cf) {
        for k in 0..LANES {
            let s = (y[k] - x[k]) * inv_dx;
            let d = s.abs();
            m[k] = if d > m[k] { d } else { m[k] };
            g[k] = phi(if d < s_min { 0.0 } else { s });
        }
    }
    // A separate tail accumulator keeps `m` in one vector register.
    let mut tail = 0.0f64;
    for ((x, y), g) in ca.remainder().iter().zip(cb.remainder()).zip(cf.into_remainder()) {
        let s = (y - x) * inv_dx;
        let d = s.abs();
        tail = tail.max(d);
        *g = phi(if d < s_min { 0.0 } else { s });
    }
    m.iter().copied().fold(tail, f64::max)
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    P3,
    P4,
    P5Half,
    General(f64),
}

impl Kernel {
    fn for_p(p: f64) -> Self {
        if p == 3.0 {
            Kernel::P3
        } else if p == 4.0 {
            Kernel::P4
        } else if p == 2.5 {
            Kernel::P5Half
        } else {
            Kernel::General(p - 2.0)
        }
    }

    fn fluxes(&self, u: &[f64], flux: &mut [f64], last: usize, inv_dx: f64, s_min: f64) -> f64 {
        #[cfg(target_arch = "x86_64")]
        if wide_vectors() {
            // SAFETY: the CPU supports AVX2.
            return unsafe { self.fluxes_avx2(u, flux, last, inv_dx, s_min) };
        }
        self.fluxes_generic(u, flux, last, inv_dx, s_min)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn fluxes_avx2(&self, u: &[f64], flux: &mut [f64], last: usize, inv_dx: f64, s_min: f64) -> f64 {
        self.fluxes_generic(u, flux, last, inv_dx, s_min)
    }

    #[inline(always)]
    fn fluxes_generic(&self, u: &[f64], flux: &mut [f64], last: usize, inv_dx: f64, s_min: f64) -> f64 {
        match *self {
            Kernel::P3 => fluxes_with(u, flux, last, inv_dx, s_min, |s| s * s.abs()),
            Kernel::P4 => fluxes_with(u, flux, last, inv_dx, s_min, |s| s * s * s),
            Kernel::P5Half => fluxes_with(u, flux, last, inv_dx, s_min, |s| s * s.abs().sqrt()),
            Kernel::General(e) => fluxes_with(u, flux, last, inv_dx, s_min, |s| s * s.abs().powf(e)),
        }
    }
}

/// u_i ← post(u_i + c (F_{i+1/2} − F_{i−1/2})) for i in 1..=last; returns the
/// minimum of the unclamped diffusion update and the maximum after `post`.
#[inline(always)]
fn update_with(u: &mut [f64], flux: &[f64], last: usize, c: f64, post: impl Fn(f64) -> f64) -> (f64, f64) {
    let (v, fr, fl) = (&mut u[1..=last], &flux[1..=last], &flux[..last]);
    let mut lo = [f64::INFINITY; LANES];
    let mut hi = [0.0f64; LANES];
    let mut cv = v.chunks_exact_mut(LANES);
    let mut cr = fr.chunks_exact(LANES);
    let mut cl = fl.chunks_exact(LANES);
    for ((w, r), l) in (&mut cv).zip(&mut cr).zip(&mut cl) {
        for k in 0..LANES {
            let x = w[k] + c * (r[k] - l[k]);
            let x = if x.abs() < FLUSH { 0.0 } else { x };
            lo[k] = if x < lo[k] { x } else { lo[k] };
            let y = post(x);
            hi[k] = if y > hi[k] { y } else { hi[k] };
            w[k] = y;
        }
    }
    let (mut tail_lo, mut tail_hi) = (f64::INFINITY, 0.0f64);
    for ((w, r), l) in cv.into_remainder().iter_mut().zip(cr.remainder()).zip(cl.remainder()) {
        let x = *w + c * (r - l);
        let x = if x.abs() < FLUSH { 0.0 } else { x };
        tail_lo = tail_lo.min(x);
        let y = post(x);
        tail_hi = tail_hi.max(y);
        *w = y;
    }
    (lo.iter().copied().fold(tail_lo, f64::min), hi.iter().copied().fold(tail_hi, f64::max))
}

/// Time integrator owning the current field.
#[derive(Debug, Clone)]
pub struct Solver {
    params: ProblemParams,
    field: Field,
    left: LeftBoundary,
    kernel: Kernel,
    /// Smallest slope given a nonzero flux: |φ(s_min)| = FLUSH.
    s_min: f64,
    reaction: Reaction,
    flux: Vec<f64>,
    /// Index of the rightmost positive node (0 when none).
    hi: usize,
    /// Maximum of the field up to the first zero face.
    umax: f64,
    steps: u64,
}

impl Solver {
    pub fn new(params: &ProblemParams, grid: &Grid1D) -> Self {
        Self::from_field(params, initial_field(params, grid))
    }

    pub fn from_field(params: &ProblemParams, field: Field) -> Self {
        let hi = field.values.iter().rposition(|&v| v > 0.0).unwrap_or(0);
        let umax = field.values[..=(hi + 1).min(field.values.len() - 1)].iter().copied().fold(0.0, f64::max);
        Solver {
            params: *params,
            flux: vec![0.0; field.values.len()],
            kernel: Kernel::for_p(params.p),
            s_min: FLUSH.powf(1.0 / (params.p - 1.0)),
            reaction: Reaction { b: params.b, beta: params.beta },
            field,
            left: LeftBoundary::Static,
            umax,
            hi,
            steps: 0,
        }
    }

    pub fn with_left_boundary(mut self, left: LeftBoundary) -> Self {
        self.left = left;
        self
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn into_field(self) -> Field {
        self.field
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Index of the rightmost positive node.
    pub fn support_end(&self) -> usize {
        self.hi
    }

    /// The largest step the stability bound allows from the current field.
    pub fn stable_dt(&self) -> f64 {
        stable_dt(&self.field, &self.params)
    }

    /// One step of length at most `dt_cap`, shortened to the stability
    /// bound; returns the step taken.
    pub fn advance(&mut self, dt_cap: f64) -> Result<f64, PdeError> {
        self.step_inner(dt_cap, true)
    }

    /// One step of exactly `dt`, whatever the stability bound says.
    pub fn advance_exact(&mut self, dt: f64) -> Result<f64, PdeError> {
        self.step_inner(dt, false)
    }

    fn step_inner(&mut self, dt_cap: f64, adapt: bool) -> Result<f64, PdeError> {
        let n = self.field.grid.n_cells;
        let dx = self.field.grid.dx();
        let inv_dx = 1.0 / dx;
        let t0 = self.field.t;
        let u = &mut self.field.values;
        let last_face = (self.hi + 1).min(n - 1);
        let umax = self.umax;
        let mut dt = dt_cap;
        let needs_reaction = self.params.b != 0.0 && self.hi > 0;
        if needs_reaction {
            if adapt {
                // Slopes before the reaction half step bound those after it up to
                // the stretch factor of the reaction map.
                let slope = max_jump(u, last_face) * inv_dx;
                for _ in 0..3 {
                    let stretch = self.reaction.stretch(umax, 0.5 * dt);
                    let bound = dt_from_slope(&self.params, dx, slope * stretch, umax * stretch);
                    if dt <= bound {
                        break;
                    }
                    dt = bound;
                }
            }
            self.reaction.apply(&mut u[1..=last_face], 0.5 * dt);
            self.kernel.fluxes(u, &mut self.flux, last_face, inv_dx, self.s_min);
        } else {
            let slope = self.kernel.fluxes(u, &mut self.flux, last_face, inv_dx, self.s_min);
            if adapt {
                dt = dt.min(dt_from_slope(&self.params, dx, slope, umax));
            }
        }
        let tau = if needs_reaction { 0.5 * dt } else { 0.0 };
        let (vmin, new_max) = self.reaction.update_then_apply(u, &self.flux, last_face, dt * inv_dx, tau);
        if vmin < 0.0 {
            if vmin < -1e-12 * umax.max(f64::MIN_POSITIVE) {
                return Err(PdeError::UnstableStep { t: t0, reason: format!("negative value {vmin}") });
            }
            u[1..=last_face].iter_mut().for_each(|v| *v = v.max(0.0));
        }
        if !new_max.is_finite() || (umax > 0.0 && new_max > 10.0 * umax) {
            return Err(PdeError::UnstableStep { t: t0, reason: format!("maximum grew from {umax} to {new_max}") });
        }
        self.field.t = t0 + dt;
        if let LeftBoundary::Trace(trace) = &self.left {
            u[0] = trace(self.field.t);
            if !(u[0] >= 0.0 && u[0].is_finite()) {
                return Err(PdeError::UnstableStep { t: self.field.t, reason: format!("boundary value {}", u[0]) });
            }
        }
        self.umax = new_max.max(u[0]);
        let mut hi = last_face;
        while hi > 0 && u[hi] == 0.0 {
            hi -= 1;
        }
        self.hi = hi;
        self.steps += 1;
        if hi + 2 >= n {
            return Err(PdeError::InterfaceAtBoundary { t: self.field.t, x: self.field.grid.x(hi) });
        }
        Ok(dt)
    }

    /// Advances to exactly `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<(), PdeError> {
        while self.field.t < t {
            let remaining = t - self.field.t;
            let dt = self.advance(remaining.min(DT_MAX))?;
            if dt >= remaining {
                self.field.t = t;
            }
        }
        Ok(())
    }

    /// Runs to `t_end`, recording the interface at geometrically spaced times
    /// and the fields at the requested snapshot times.
    pub fn run(mut self, t_end: f64, snapshot_times: &[f64]) -> Result<RunOutput, PdeError> {
        if !(t_end > self.field.t) {
            return Err(PdeError::SnapshotSkew(format!("t_end = {t_end} must exceed the start time {}", self.field.t)));
        }
        let horizon = ClosedFormSolution::all_for(&self.params).iter().map(|s| s.horizon).fold(f64::INFINITY, f64::min);
        if t_end >= horizon {
            return Err(PdeError::BeyondHorizon { t_end, horizon });
        }
        for w in snapshot_times.windows(2) {
            if !(w[0] <= w[1]) {
                return Err(PdeError::SnapshotSkew(format!("{} follows {}", w[1], w[0])));
            }
        }
        if let Some(&bad) = snapshot_times.iter().find(|&&s| !(s >= self.field.t && s <= t_end)) {
            return Err(PdeError::SnapshotSkew(format!("{bad} lies outside [{}, {t_end}]", self.field.t)));
        }
        let t0 = self.field.t;
        let threshold = THRESHOLD_REL * self.field.max();
        let mut samples = vec![(t0, extract_interface(&self.field, threshold))];
        let sample_times: Vec<f64> = (0..TRACE_SAMPLES)
            .map(|k| t0 + (t_end - t0) * TRACE_START.powf(1.0 - k as f64 / (TRACE_SAMPLES - 1) as f64))
            .collect();
        let mut snapshots = Vec::with_capacity(snapshot_times.len());
        let mut snaps = snapshot_times.iter().copied().peekable();
        while let Some(&s) = snaps.peek() {
            if s > t0 {
                break;
            }
            snapshots.push(self.field.clone());
            snaps.next();
        }
        for &ts in &sample_times {
            while let Some(&s) = snaps.peek() {
                if s > ts {
                    break;
                }
                self.advance_to(s)?;
                snapshots.push(self.field.clone());
                snaps.next();
            }
            self.advance_to(ts)?;
            samples.push((ts, extract_interface(&self.field, threshold)));
        }
        for s in snaps {
            self.advance_to(s)?;
            snapshots.push(self.field.clone());
        }
        let dx = self.field.grid.dx();
        let mut trace = InterfaceTrace { samples, threshold, waiting_time: None, dx };
        if classify(&self.params).region.has_waiting_time() {
            trace.waiting_time = detect_waiting_time(&trace);
        }
        Ok(RunOutput { snapshots, trace, final_field: self.field })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<Field>,
    pub trace: InterfaceTrace,
    pub final_field: Field,
}

/// One Strang step with the left node held at its current value.
pub fn step(field: &Field, params: &ProblemParams, dt: f64) -> Result<Field, PdeError> {
    let mut solver = Solver::from_field(params, field.clone());
    solver.advance_exact(dt)?;
    Ok(solver.into_field())
}

pub fn run(params: &ProblemParams, grid: &Grid1D, t_end: f64, snapshot_times: &[f64]) -> Result<RunOutput, PdeError> {
    Solver::new(params, grid).run(t_end, snapshot_times)
}

/// Rightmost node above `threshold`, moved towards its right neighbour by
/// linear interpolation of the threshold crossing; x_left − dx when no node
/// exceeds the threshold.
pub fn extract_interface(field: &Field, threshold: f64) -> f64 {
    let g = &field.grid;
    let Some(i) = field.values.iter().rposition(|&v| v > threshold) else {
        return g.x_left - g.dx();
    };
    if i + 1 >= field.values.len() {
        return g.x(i);
    }
    let (a, b) = (field.values[i], field.values[i + 1]);
    g.x(i) + g.dx() * (a - threshold) / (a - b)
}

/// First sample at which η has left its initial position by more than
/// max(2dx, 3·jitter), jitter being the largest displacement over the first
/// tenth of the samples.
pub fn detect_waiting_time(trace: &InterfaceTrace) -> Option<f64> {
    let eta0 = trace.samples.first()?.1;
    let head = (trace.samples.len() / 10).max(1);
    let jitter = trace.samples[..head].iter().map(|s| (s.1 - eta0).abs()).fold(0.0, f64::max);
    let band = (2.0 * trace.dx).max(3.0 * jitter);
    trace.samples.iter().find(|s| (s.1 - eta0).abs() > band).map(|s| s.0)
}

#[cfg(test)]
mod tests;
