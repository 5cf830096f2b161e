use pfront_core::analysis::{default_window, fit_power_law, verify_sandwich, ProbeCurve};
use pfront_core::closed_form::ClosedFormSolution;
use pfront_core::model::ProblemParams;
use pfront_core::pde::{run, Grid1D, LeftBoundary, Solver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exponent_error_shrinks_as_the_window_moves_to_zero() {
    // α = 1 has a b = 0 scaling x ~ t^{1/2}; grids scaled with it keep the
    // discretization error fixed, so only the reaction correction changes.
    let pr = ProblemParams::new(3.0, 1.0, 0.5, 1.0, 1.0).unwrap();
    let errors: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&t_end: &f64| {
            let s = (t_end / 0.1).sqrt();
            let out = run(&pr, &Grid1D::new(-0.6 * s, 0.8 * s, 1000).unwrap(), t_end, &[]).unwrap();
            (fit_power_law(&out.trace, default_window(t_end)).unwrap().exponent - 0.5).abs()
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] + 2e-3, "exponent errors {errors:?}");
    }
}

#[test]
fn sandwich_is_monotone_in_slack() {
    let pr = ProblemParams::new(3.0, 0.0, 1.0, 2.0, 1.0).unwrap();
    let sol = ClosedFormSolution::traveling_wave(&pr).unwrap();
    let grid = Grid1D::new(-3.0, 3.0, 200).unwrap();
    let out = Solver::new(&pr, &grid).with_left_boundary(LeftBoundary::exact(&sol, -3.0)).run(0.5, &[0.25, 0.5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let s = 10f64.powf(rng.gen_range(-8.0..0.0));
        if verify_sandwich(&out.snapshots, &sol, &sol, s).unwrap().pass {
            let t = s * rng.gen_range(1.0..10.0);
            assert!(verify_sandwich(&out.snapshots, &sol, &sol, t).unwrap().pass, "pass at {s}, fail at {t}");
        }
    }
}

#[test]
fn rho_curves_beyond_the_front_are_rejected() {
    let pr = ProblemParams::new(3.0, 0.0, 1.0, 1.0, 1.0).unwrap();
    let xi_star = 1.7514949940622793;
    assert!(ProbeCurve::rho(&pr, 0.99 * xi_star, xi_star).is_ok());
    assert!(ProbeCurve::rho(&pr, xi_star, xi_star).is_err());
    assert!(ProbeCurve::rho(&pr, 2.0 * xi_star, xi_star).is_err());
}
