use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{critical_constant, ProblemParams};

fn params(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> ProblemParams {
    ProblemParams::new(p, b, beta, alpha, c).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn traveling_wave_values() {
    let sol = ClosedFormSolution::traveling_wave(&params(3.0, 0.0, 1.0, 2.0, 1.0)).unwrap();
    assert_eq!(sol.constant("xi_star"), Some(4.0));
    assert_eq!(eval_solution(&sol, 0.0, 1.0).unwrap(), 16.0);
    assert_eq!(eval_solution(&sol, 4.0 * 0.7, 0.7).unwrap(), 0.0);
    assert!(ClosedFormSolution::traveling_wave(&params(3.0, 1.0, 1.0, 2.0, 1.0)).is_err());
    assert!(ClosedFormSolution::traveling_wave(&params(3.0, 0.0, 1.0, 1.5, 1.0)).is_err());
}

#[test]
fn borderline_explicit_values() {
    let sol = ClosedFormSolution::borderline_explicit(&params(3.0, 1.0, 0.5, 2.0, 0.5)).unwrap();
    let zeta = sol.constant("zeta_star").unwrap();
    assert!(close(zeta, 1.2928932, 5e-8));
    assert!(close(eval_solution(&sol, 0.0, 1.0).unwrap(), 0.5 * zeta * zeta, 1e-15));
    assert!(close(eval_solution(&sol, 0.0, 1.0).unwrap(), 0.8357864, 5e-8));
    // at the critical amplitude the explicit solution is the initial datum
    let at = ClosedFormSolution::borderline_explicit(&params(3.0, 1.0, 0.5, 2.0, 0.25)).unwrap();
    assert_eq!(at.constant("zeta_star"), Some(0.0));
    for x in [-2.0, -0.5, 0.0, 0.3] {
        let u0 = 0.25 * f64::max(-x, 0.0).powi(2);
        assert!(close(eval_solution(&at, x, 3.0).unwrap(), u0, 1e-15));
    }
}

#[test]
fn waiting_b0_values_and_blow_up() {
    let sol = ClosedFormSolution::waiting_b0(&params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0)).unwrap();
    assert!(close(sol.horizon, 1.0, 1e-14));
    assert!(close(eval_solution(&sol, -1.0, 0.5).unwrap(), 1.0 / 18.0, 1e-15));
    assert!(matches!(eval_solution(&sol, -1.0, 1.0), Err(ClosedFormError::BeyondHorizon { .. })));
    for t in [0.9, 0.99, 0.999, 0.9999] {
        let scaled = eval_solution(&sol, -0.5, t).unwrap() * (1.0 - t / sol.horizon).powf(1.0);
        assert!(close(scaled, 0.125 / 36.0, 1e-12));
    }
}

#[test]
fn waiting_beta1_values() {
    let sol = ClosedFormSolution::waiting_beta1(&params(3.0, 1.0, 1.0, 3.0, 1.0 / 36.0)).unwrap();
    assert_eq!(sol.horizon, f64::INFINITY);
    // At C = C̄ and b = 1 the absorption balances the diffusion exactly for p = 3.
    let v = eval_solution(&sol, -1.0, 2f64.ln()).unwrap();
    assert!(close(v, 1.0 / 36.0, 1e-15), "{v}");
    // finite horizon when b < (C/C̄)^{p-2}
    let sol = ClosedFormSolution::waiting_beta1(&params(3.0, 0.5, 1.0, 3.0, 1.0 / 36.0)).unwrap();
    assert!(close(sol.horizon, 2f64.ln() / 0.5, 1e-14));
}

#[test]
fn waiting_beta1_tends_to_waiting_b0() {
    let b0 = ClosedFormSolution::waiting_b0(&params(3.0, 0.0, 1.0, 3.0, 0.02)).unwrap();
    for b in [1e-13, 1e-9, -1e-9] {
        let sol = ClosedFormSolution::waiting_beta1(&params(3.0, b, 1.0, 3.0, 0.02)).unwrap();
        assert!(close(sol.horizon, b0.horizon, 1e-6 * b0.horizon));
        for (x, t) in [(-1.0, 0.3), (-0.2, 0.9)] {
            let a = eval_solution(&sol, x, t).unwrap();
            let e = eval_solution(&b0, x, t).unwrap();
            assert!(close(a, e, 1e-7 * e), "b={b}: {a} vs {e}");
        }
    }
}

#[test]
fn interfaces_match_support() {
    let tw = ClosedFormSolution::traveling_wave(&params(3.0, 0.0, 1.0, 2.0, 0.7)).unwrap();
    let bx = ClosedFormSolution::borderline_explicit(&params(3.0, 1.0, 0.5, 2.0, 0.5)).unwrap();
    for sol in [&tw, &bx] {
        for t in [0.1, 0.5, 2.0] {
            let eta = sol.interface(t);
            assert_eq!(eval_solution(sol, eta, t).unwrap(), 0.0);
            assert!(eval_solution(sol, eta - 1e-9, t).unwrap() > 0.0);
        }
    }
    assert_eq!(tw.interface(1.5), tw.constant("xi_star").unwrap() * 1.5);
}

fn exact_solutions() -> Vec<(ClosedFormSolution, (f64, f64), (f64, f64))> {
    let mut out = Vec::new();
    let mut push = |sol: ClosedFormSolution, xr, tr| out.push((sol, xr, tr));
    push(ClosedFormSolution::traveling_wave(&params(3.0, 0.0, 1.0, 2.0, 1.0)).unwrap(), (-5.0, 6.0), (0.05, 1.0));
    push(ClosedFormSolution::traveling_wave(&params(4.0, 0.0, 1.0, 1.5, 0.7)).unwrap(), (-3.0, 3.0), (0.05, 1.0));
    push(ClosedFormSolution::traveling_wave(&params(2.5, 0.0, 1.0, 3.0, 1.3)).unwrap(), (-3.0, 3.0), (0.05, 1.0));
    push(ClosedFormSolution::borderline_explicit(&params(3.0, 1.0, 0.5, 2.0, 0.5)).unwrap(), (-3.0, 3.0), (0.05, 1.0));
    push(ClosedFormSolution::borderline_explicit(&params(3.0, 1.0, 0.5, 2.0, 0.2)).unwrap(), (-3.0, 1.0), (0.05, 1.0));
    let p4 = params(4.0, 2.0, 1.0 / 3.0, 1.5, 1.0);
    let cs = critical_constant(&p4).unwrap();
    push(ClosedFormSolution::borderline_explicit(&p4.with_c(2.0 * cs).unwrap()).unwrap(), (-2.0, 2.0), (0.05, 1.0));
    push(ClosedFormSolution::waiting_b0(&params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0)).unwrap(), (-2.0, 1.0), (0.01, 0.9));
    push(ClosedFormSolution::waiting_b0(&params(4.0, 0.0, 1.0, 2.0, 0.3)).unwrap(), (-2.0, 1.0), (0.01, 0.9));
    push(ClosedFormSolution::waiting_beta1(&params(3.0, 1.0, 1.0, 3.0, 1.0 / 36.0)).unwrap(), (-2.0, 1.0), (0.01, 2.0));
    push(ClosedFormSolution::waiting_beta1(&params(3.0, -0.5, 1.0, 3.0, 0.02)).unwrap(), (-2.0, 1.0), (0.01, 0.5));
    push(ClosedFormSolution::waiting_beta1(&params(4.0, 2.0, 1.0, 2.0, 0.1)).unwrap(), (-2.0, 1.0), (0.01, 1.0));
    push(ClosedFormSolution::critical_stationary(&params(3.0, 1.0, 0.5, 2.0, 1.0)).unwrap(), (-3.0, 1.0), (0.1, 1.0));
    push(ClosedFormSolution::critical_stationary(&params(3.0, 1.0, 0.3, 3.0 / 1.7, 1.0)).unwrap(), (-3.0, 1.0), (0.1, 1.0));
    push(ClosedFormSolution::critical_stationary(&params(3.0, 1.0, 0.8, 2.5, 1.0)).unwrap(), (-3.0, 1.0), (0.1, 1.0));
    out
}

#[test]
fn exact_solutions_have_vanishing_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (sol, (x0, x1), (t0, t1)) in exact_solutions() {
        assert!(sol.is_exact_solution());
        let t1 = t1.min(0.9 * sol.horizon);
        let mut checked = 0;
        while checked < 100 {
            let x = rng.gen_range(x0..x1);
            let t = rng.gen_range(t0..t1);
            let r = match residual(&sol, x, t) {
                Ok(r) => r,
                Err(ClosedFormError::TooCloseToKink { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let u = eval_solution(&sol, x, t).unwrap();
            assert!(r.abs() <= 1e-6 * (1.0 + u.abs()), "{:?} {:?} at ({x}, {t}): {r} {:?}", sol.family, sol.params, residual_terms(&sol, x, t));
            checked += 1;
        }
    }
}

#[test]
fn absorption_only_solves_the_reaction_ode() {
    let sol = ClosedFormSolution::absorption_only(&params(3.0, 1.0, 0.5, 4.0, 1.0)).unwrap();
    assert!(!sol.is_exact_solution());
    for (x, t) in [(-0.5, 0.01), (-0.8, 0.1), (-0.3, 0.02)] {
        let r = residual_terms(&sol, x, t).unwrap();
        let ode = r.time_derivative + r.reaction;
        assert!(ode.abs() < 1e-7 * r.scale(), "{ode}");
    }
    // interface at -ell_* t^{1/(alpha(1-beta))}
    let t: f64 = 0.04;
    assert!(close(sol.interface(t), -0.5f64.sqrt() * t.sqrt(), 1e-15));
}

#[test]
fn barrier_evaluation_examples() {
    let pr = params(3.0, 1.0, 0.5, 2.0, 1.0);
    let bar = BarrierSpec::profile_power(&pr, 1.0, 2.0, 2.0, Side::Super);
    // x = ζ t^κ with κ = 1 here
    assert_eq!(eval_barrier(&bar, 1.0, 1.0).unwrap(), 1.0);
    assert!(matches!(eval_barrier(&bar, -1.0, 1.0), Err(ClosedFormError::OutsideDomain { .. })));

    let r3 = params(3.0, 1.0, 0.5, 4.0, 1.0);
    let eps = 0.05;
    let g = BarrierSpec::region_three_g(&r3, eps, Side::Sub).unwrap();
    let x = 0.5 * g.constant("x_eps").unwrap();
    assert!(close(eval_barrier(&g, x, 0.0).unwrap(), (1.0 - eps) * x.powi(4), 1e-15));
    assert!(close(eval_barrier(&g, x, 0.0).unwrap(), (1.0 - eps) * r3.initial(x) / r3.c, 1e-15));

    let shrink = params(3.0, 1.0, 0.7, 3.0 / 1.3, 0.1);
    let lower = BarrierSpec::shrink_lower(&shrink).unwrap();
    assert_eq!(lower.constant("gamma"), Some(0.0));
    for t in [0.1, 0.5, 1.0] {
        let mu = lower.kinks(t)[0];
        assert!(eval_barrier(&lower, mu, t).unwrap().abs() < 1e-12);
        assert!(eval_barrier(&lower, mu - 1e-3, t).unwrap() > 0.0);
    }
}

#[test]
fn initial_ordering_of_barrier_pairs() {
    let mut pairs: Vec<(BarrierSpec, BarrierSpec)> = Vec::new();
    let ex = params(3.0, 1.0, 0.3, 3.0 / 1.7, 1.0);
    pairs.push((BarrierSpec::profile_lower(&ex, 0.9).unwrap(), BarrierSpec::profile_upper(&ex, 0.9).unwrap()));
    let sh = params(3.0, 1.0, 0.7, 3.0 / 1.3, 0.1);
    pairs.push((BarrierSpec::shrink_lower(&sh).unwrap(), BarrierSpec::shrink_upper(&sh).unwrap()));
    let sl = params(3.0, 1.0, 0.3, 3.0 / 1.7, 0.05);
    pairs.push((BarrierSpec::corner_lower(&sl).unwrap(), BarrierSpec::corner_upper(&sl).unwrap()));
    let b0 = params(3.0, 0.0, 1.0, 1.0, 1.0);
    pairs.push((
        BarrierSpec::b0_profile(&b0, 1.2, Side::Sub).unwrap(),
        BarrierSpec::b0_profile(&b0, 1.2, Side::Super).unwrap(),
    ));
    for (lo, up) in &pairs {
        let pr = lo.params;
        for i in 0..=400 {
            let x = -4.0 + i as f64 * 0.02;
            let u0 = pr.initial(x);
            if let (Ok(l), Ok(u)) = (eval_barrier(lo, x, 0.0), eval_barrier(up, x, 0.0)) {
                let tol = 1e-13 * u0.max(1e-300);
                assert!(l <= u0 + tol && u0 <= u + tol, "{:?} at x={x}", lo.family);
            }
        }
    }
}

fn certify(bar: &BarrierSpec, x_range: (f64, f64), t_range: (f64, f64)) -> SignReport {
    let samples = domain_samples(bar, x_range, t_range, 40, 25);
    certify_sign(bar, &samples).unwrap()
}

#[test]
fn shrink_gamma_certifies_both_sides() {
    let pr = params(3.0, 1.0, 0.7, 3.0 / 1.3, 0.1);
    let up = certify(&BarrierSpec::shrink_upper(&pr).unwrap(), (-2.0, 0.5), (0.01, 1.0));
    let lo = certify(&BarrierSpec::shrink_lower(&pr).unwrap(), (-2.0, 0.5), (0.01, 1.0));
    assert!(up.pass, "{up:?}");
    assert!(lo.pass, "{lo:?}");
    // a claim with the wrong side fails
    let wrong = BarrierSpec::shrink_gamma(&pr, 0.0, Side::Super).unwrap();
    assert!(!certify(&wrong, (-2.0, 0.5), (0.01, 1.0)).pass);
}

#[test]
fn corner_lower_certifies_as_sub() {
    let pr = params(3.0, 1.0, 0.3, 3.0 / 1.7, 0.05);
    let rep = certify(&BarrierSpec::corner_lower(&pr).unwrap(), (-3.0, 0.5), (0.01, 1.0));
    assert!(rep.pass, "{rep:?}");
    let rep = certify(&BarrierSpec::corner_upper(&pr).unwrap(), (-3.0, 0.5), (0.01, 1.0));
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn profile_barriers_certify_for_any_a1() {
    for (beta, a1) in [(0.3, 0.9), (0.3, 2.0), (0.7, 0.5), (0.5, 0.8357864)] {
        let q = 2.0 - beta;
        let pr = params(3.0, 1.0, beta, 3.0 / q, 2.0 * critical_constant(&params(3.0, 1.0, beta, 1.0, 1.0)).unwrap());
        for bar in [
            BarrierSpec::profile_upper(&pr, a1).unwrap(),
            BarrierSpec::profile_upper_alt(&pr, a1).unwrap(),
            BarrierSpec::profile_lower(&pr, a1).unwrap(),
        ] {
            let rep = certify(&bar, (0.0, 5.0), (0.01, 1.0));
            assert!(rep.pass, "beta={beta} {:?} {:?}: {rep:?}", bar.family, bar.side);
        }
    }
}

#[test]
fn local_waiting_barriers_certify() {
    let cases: Vec<BarrierSpec> = vec![
        BarrierSpec::exp_beta1(&params(3.0, 1.0, 1.0, 4.0, 1.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::exp_beta1(&params(3.0, 1.0, 1.0, 4.0, 1.0), 0.05, Side::Sub).unwrap(),
        BarrierSpec::exp_beta1(&params(3.0, -1.0, 1.0, 5.0, 2.0), 0.1, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 1.1, 4.0, 1.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 1.1, 4.0, 1.0), 0.05, Side::Sub).unwrap(),
        BarrierSpec::power_wait(&params(3.0, -360.0, 1.5, 6.0, 2.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, -360.0, 1.5, 6.0, 2.0), 0.05, Side::Sub).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 1.5, 3.0, 0.02), 0.005, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 1.5, 3.0, 0.02), 0.005, Side::Sub).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0), 0.001, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0), 0.001, Side::Sub).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 2.5, 4.0, 1.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 1.0, 2.5, 4.0, 1.0), 0.05, Side::Sub).unwrap(),
        BarrierSpec::power_wait(&params(3.0, 0.0, 1.0, 4.0, 1.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::region_three_g(&params(3.0, 1.0, 0.7, 5.0, 1.0), 0.05, Side::Super).unwrap(),
        BarrierSpec::region_three_g(&params(3.0, 1.0, 0.5, 4.0, 1.0), 0.05, Side::Sub).unwrap(),
    ];
    for bar in &cases {
        let x_lo = bar.domain.lower_x(0.0).unwrap_or(-2.0).max(-2.0);
        let t_hi = bar.domain.t_max.min(1.0);
        // Near x = 0 the relative change of g over the time stencil drops below
        // rounding, so the difference quotient for g_t carries no information there.
        let rep = certify(bar, (x_lo, 0.05 * x_lo), (0.1 * t_hi, t_hi));
        assert!(rep.pass, "{:?} {:?} {:?}: {rep:?}", bar.family, bar.side, bar.params);
    }
}

#[test]
fn region_three_corner_upper_certifies() {
    let pr = params(3.0, 1.0, 0.3, 5.0, 1.0);
    let ell = 1.5 * crate::model::ell_star(&pr).unwrap();
    let bar = BarrierSpec::region_three_corner_upper(&pr, ell, 0.1).unwrap();
    let delta = bar.constant("delta").unwrap();
    let rep = certify(&bar, (-1.0, 0.5), (1e-3 * delta, delta));
    assert!(rep.pass, "{rep:?}");
    assert!(BarrierSpec::region_three_g(&pr, 0.05, Side::Super).is_err());
}

#[test]
fn b0_profile_barriers_certify() {
    for alpha in [0.5, 1.0, 1.5, 2.5] {
        let pr = params(3.0, 0.0, 1.0, alpha, 1.0);
        for side in [Side::Sub, Side::Super] {
            let bar = BarrierSpec::b0_profile(&pr, 1.7, side).unwrap();
            let rep = certify(&bar, (0.0, 5.0), (0.01, 1.0));
            assert!(rep.pass, "alpha={alpha} {side:?}: {rep:?}");
        }
    }
}

#[test]
fn residual_rejects_points_on_kinks() {
    let sol = ClosedFormSolution::traveling_wave(&params(3.0, 0.0, 1.0, 2.0, 1.0)).unwrap();
    assert!(matches!(residual(&sol, 4.0, 1.0), Err(ClosedFormError::TooCloseToKink { .. })));
    assert!(residual(&sol, 3.9, 1.0).is_ok());
}
