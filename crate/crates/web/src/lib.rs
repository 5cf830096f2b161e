//! WebAssembly bindings for the static demo page: the (α, β) region map, the
//! b = 0 self-similar profile and interface traces of the explicit solver.
//! Every export is a thin wrapper over a plain function that native tests call.

use pfront_core::analysis::fit_power_law;
use pfront_core::model::{classify, ProblemParams, Region};
use pfront_core::pde::{Grid1D, Solver};
use pfront_core::profile::solve_pure_profile;
use wasm_bindgen::prelude::*;

/// Map categories in the order of [`REGION_LABELS`].
const REGIONS: [Region; 7] = [
    Region::R1Expanding,
    Region::R2Borderline,
    Region::R3Shrinking,
    Region::R4Waiting,
    Region::B0Expanding,
    Region::B0Waiting,
    Region::B0Stationary,
];

/// Category code for tuples outside the admissible parameter set.
pub const INVALID: u8 = 255;

fn params(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> Result<ProblemParams, String> {
    ProblemParams::new(p, b, beta, alpha, c).map_err(|e| e.to_string())
}

/// Region codes of the cell centres of an na × nb sweep over (0, α_max] × (0, β_max],
/// row-major with β increasing.
pub fn region_codes(p: f64, b: f64, alpha_max: f64, beta_max: f64, na: usize, nb: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(na * nb);
    for j in 0..nb {
        let beta = (j as f64 + 0.5) * beta_max / nb as f64;
        for i in 0..na {
            let alpha = (i as f64 + 0.5) * alpha_max / na as f64;
            let code = ProblemParams::new(p, b, beta, alpha, 1.0)
                .ok()
                .and_then(|pr| REGIONS.iter().position(|&r| r == classify(&pr).region))
                .map_or(INVALID, |k| k as u8);
            out.push(code);
        }
    }
    out
}

/// Region label and interface law of one tuple.
pub fn describe(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> Result<String, String> {
    Ok(classify(&params(p, b, beta, alpha, c)?).to_string())
}

/// [ξ_*, ξ₀, f₀, ξ₁, f₁, …] of the b = 0 profile, ξ descending from the front.
pub fn profile_points(p: f64, alpha: f64, c: f64) -> Result<Vec<f64>, String> {
    let pr = params(p, 0.0, 1.0, alpha, c)?;
    let profile = solve_pure_profile(&pr, 1e-6).map_err(|e| e.to_string())?;
    let mut out = vec![profile.xi_star];
    for (x, f) in profile.xi_grid.iter().zip(&profile.values) {
        out.extend([*x, *f]);
    }
    Ok(out)
}

/// [exponent, coefficient, t₀, η₀, t₁, η₁, …]: the interface trace of a run on
/// [x_left, x_right] with n cells and its power-law fit over [t_end/100, t_end/10].
/// The fit entries are NaN when the window holds too few resolved samples.
#[allow(clippy::too_many_arguments)]
pub fn trace_points(
    p: f64,
    b: f64,
    beta: f64,
    alpha: f64,
    c: f64,
    x_left: f64,
    x_right: f64,
    n: usize,
    t_end: f64,
) -> Result<Vec<f64>, String> {
    let pr = params(p, b, beta, alpha, c)?;
    let grid = Grid1D::new(x_left, x_right, n).map_err(|e| e.to_string())?;
    let out = Solver::new(&pr, &grid).run(t_end, &[]).map_err(|e| e.to_string())?;
    let fit = fit_power_law(&out.trace, (t_end / 100.0, t_end / 10.0)).ok();
    let mut v = vec![fit.as_ref().map_or(f64::NAN, |f| f.exponent), fit.as_ref().map_or(f64::NAN, |f| f.coefficient)];
    for (t, eta) in &out.trace.samples {
        v.extend([*t, *eta]);
    }
    Ok(v)
}

#[wasm_bindgen]
pub fn region_labels() -> Vec<String> {
    REGIONS.iter().map(|r| r.label().to_string()).collect()
}

#[wasm_bindgen]
pub fn region_map(p: f64, b: f64, alpha_max: f64, beta_max: f64, na: usize, nb: usize) -> Vec<u8> {
    region_codes(p, b, alpha_max, beta_max, na, nb)
}

#[wasm_bindgen]
pub fn classify_point(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> Result<String, JsError> {
    describe(p, b, beta, alpha, c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profile(p: f64, alpha: f64, c: f64) -> Result<Vec<f64>, JsError> {
    profile_points(p, alpha, c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn interface_trace(
    p: f64,
    b: f64,
    beta: f64,
    alpha: f64,
    c: f64,
    x_left: f64,
    x_right: f64,
    n: usize,
    t_end: f64,
) -> Result<Vec<f64>, JsError> {
    trace_points(p, b, beta, alpha, c, x_left, x_right, n, t_end).map_err(|e| JsError::new(&e))
}
