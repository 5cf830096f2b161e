use super::*;
use crate::model::ell_star;

fn params(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> ProblemParams {
    ProblemParams::new(p, b, beta, alpha, c).unwrap()
}

fn field_from(grid: Grid1D, f: impl Fn(f64) -> f64) -> Field {
    Field { grid, t: 0.0, values: grid.nodes().map(f).collect() }
}

#[test]
fn initial_field_samples_power() {
    let grid = Grid1D::new(-2.0, 1.0, 30).unwrap();
    let f = initial_field(&params(3.0, 0.0, 1.0, 2.0, 1.0), &grid);
    assert_eq!(f.values[0], 4.0);
    assert_eq!(f.values[20], 0.0);
    assert!(f.values[21..].iter().all(|&v| v == 0.0));
    let grid = Grid1D::new(-1.0, 1.0, 20).unwrap();
    let f = initial_field(&params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0), &grid);
    assert_eq!(f.values[0], 1.0 / 36.0);
}

#[test]
fn grid_rejects_bad_intervals() {
    assert!(Grid1D::new(0.5, 1.0, 10).is_err());
    assert!(Grid1D::new(-1.0, -0.5, 10).is_err());
    assert!(Grid1D::new(-1.0, 1.0, 2).is_err());
    let g = Grid1D::new(-6.0, 6.0, 4800).unwrap();
    assert_eq!(g.x(0), -6.0);
    assert_eq!(g.x(4800), 6.0);
}

#[test]
fn zero_field_is_a_fixed_point() {
    let grid = Grid1D::new(-1.0, 1.0, 50).unwrap();
    let zero = field_from(grid, |_| 0.0);
    let next = step(&zero, &params(3.0, 1.0, 0.5, 2.0, 1.0), 1e-4).unwrap();
    assert!(next.values.iter().all(|&v| v == 0.0));
    assert_eq!(stable_dt(&zero, &params(3.0, 0.0, 1.0, 2.0, 1.0)), DT_MAX);
}

#[test]
fn exact_reaction_substep() {
    let mut u = [1.0];
    Reaction { b: 1.0, beta: 0.5 }.apply(&mut u, 0.5);
    assert!((u[0] - 0.5625).abs() < 1e-15);
    let mut u = [1.0, 0.01];
    Reaction { b: 1.0, beta: 0.3 }.apply(&mut u, 0.5);
    assert!((u[0] - (1.0f64 - 0.35).powf(1.0 / 0.7)).abs() < 1e-15);
    assert_eq!(u[1], 0.0);
    let mut u = [2.0];
    Reaction { b: 1.0, beta: 1.0 }.apply(&mut u, 0.5);
    assert!((u[0] - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
    let mut u = [1.0];
    Reaction { b: 1.0, beta: 2.0 }.apply(&mut u, 1.0);
    assert!((u[0] - 0.5).abs() < 1e-15);
}

#[test]
fn stable_dt_examples() {
    let grid = Grid1D::new(-1.0, 1.0, 2000).unwrap();
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let f = initial_field(&pr, &grid);
    let dt = stable_dt(&f, &pr);
    assert!((dt / 1e-7 - 1.0).abs() < 1e-3, "{dt}");
    let doubled = Field { values: f.values.iter().map(|v| 2.0 * v).collect(), ..f.clone() };
    assert!((stable_dt(&doubled, &pr) / dt - 0.5).abs() < 1e-12);
}

#[test]
fn one_diffusion_step_matches_operator() {
    // (|u_x| u_x)_x = 8|x| for u = x² on x < 0.
    let grid = Grid1D::new(-1.0, 1.0, 400).unwrap();
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let f = initial_field(&pr, &grid);
    let dt = 1e-9;
    let next = step(&f, &pr, dt).unwrap();
    for i in (20..180).step_by(10) {
        let x = grid.x(i);
        let rate = (next.values[i] - f.values[i]) / dt;
        assert!((rate - 8.0 * x.abs()).abs() < 1e-4 * 8.0, "x={x}: {rate}");
    }
}

#[test]
fn interface_extraction() {
    let grid = Grid1D::new(-6.0, 6.0, 12000).unwrap();
    let exact = field_from(grid, |x| (4.0 - x).max(0.0).powi(2));
    let eta = extract_interface(&exact, 1e-10 * exact.max());
    assert!((eta - 4.0).abs() <= grid.dx(), "{eta}");
    let zero = field_from(grid, |_| 0.0);
    assert_eq!(extract_interface(&zero, 1e-10), -6.0 - grid.dx());
    let mut last = f64::INFINITY;
    for thr in [1e-12, 1e-8, 1e-4, 1e-2, 1.0] {
        let eta = extract_interface(&exact, thr);
        assert!(eta <= last);
        last = eta;
    }
}

#[test]
fn traveling_wave_run() {
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let grid = Grid1D::new(-6.0, 6.0, 1200).unwrap();
    let sol = ClosedFormSolution::traveling_wave(&pr).unwrap();
    let out = Solver::new(&pr, &grid).with_left_boundary(LeftBoundary::exact(&sol, -6.0)).run(1.0, &[0.5, 1.0]).unwrap();
    let last = out.snapshots.last().unwrap();
    assert_eq!(last.t, 1.0);
    let eta = out.trace.samples.last().unwrap().1;
    assert!((eta - 4.0).abs() < 0.08, "{eta}");
    let err = grid.nodes().zip(&last.values).map(|(x, u)| (u - sol.value(x, 1.0).unwrap()).abs()).fold(0.0, f64::max);
    assert!(err < 0.01 * last.max(), "{err}");
}

#[test]
fn shrinking_run_follows_absorption() {
    let pr = params(3.0, 1.0, 0.5, 4.0, 1.0);
    // Absorption dominates only while t is small; by t ~ 0.02 diffusion has
    // taken over and the front turns back.
    let grid = Grid1D::new(-0.5, 0.5, 1200).unwrap();
    let out = run(&pr, &grid, 0.0025, &[]).unwrap();
    let eta = out.trace.samples.last().unwrap().1;
    let expect = -ell_star(&pr).unwrap() * 0.0025f64.sqrt();
    assert!((eta / expect - 1.0).abs() < 0.05, "{eta} vs {expect}");
    assert!(out.trace.waiting_time.is_none());
}

#[test]
fn waiting_interface_stays_put() {
    let pr = params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0);
    let grid = Grid1D::new(-1.0, 0.5, 300).unwrap();
    let out = run(&pr, &grid, 0.5, &[]).unwrap();
    let dx = grid.dx();
    assert!(out.trace.samples.iter().all(|s| s.1.abs() <= dx), "{:?}", out.trace.samples.last());
    assert!(out.trace.waiting_time.is_none());
}

#[test]
fn run_rejects_bad_requests() {
    let pr = params(3.0, 0.0, 1.0, 3.0, 1.0 / 36.0);
    let grid = Grid1D::new(-1.0, 0.5, 60).unwrap();
    assert!(matches!(run(&pr, &grid, 1.5, &[]), Err(PdeError::BeyondHorizon { .. })));
    assert!(matches!(run(&pr, &grid, 0.5, &[0.3, 0.1]), Err(PdeError::SnapshotSkew(_))));
    assert!(matches!(run(&pr, &grid, 0.5, &[0.7]), Err(PdeError::SnapshotSkew(_))));
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let grid = Grid1D::new(-2.0, 0.5, 100).unwrap();
    assert!(matches!(run(&pr, &grid, 1.0, &[]), Err(PdeError::InterfaceAtBoundary { .. })));
}

#[test]
fn trace_times_increase() {
    let pr = params(3.0, 0.0, 1.0, 1.0, 1.0);
    let grid = Grid1D::new(-2.0, 2.0, 200).unwrap();
    let out = run(&pr, &grid, 0.1, &[0.0, 0.05, 0.1]).unwrap();
    assert!(out.trace.samples.windows(2).all(|w| w[1].0 > w[0].0));
    assert_eq!(out.trace.samples.len(), TRACE_SAMPLES + 1);
    assert_eq!(out.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(), vec![0.0, 0.05, 0.1]);
}
