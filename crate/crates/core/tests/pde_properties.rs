use pfront_core::closed_form::{ClosedFormSolution, SpaceTime};
use pfront_core::model::{classify, ProblemParams, Region, Subcase};
use pfront_core::pde::{Field, Grid1D, LeftBoundary, Solver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(p: f64, b: f64, beta: f64, alpha: f64, c: f64) -> ProblemParams {
    ProblemParams::new(p, b, beta, alpha, c).unwrap()
}

/// A random non-negative field supported on the left 60% of the grid, with
/// the last node of the support forced to zero.
fn random_field(rng: &mut ChaCha8Rng, grid: &Grid1D) -> Vec<f64> {
    let n = grid.len();
    let support = (n * 6) / 10;
    (0..n).map(|i| if i < support { rng.gen_range(0.0..1.0) } else { 0.0 }).collect()
}

fn field(grid: &Grid1D, values: Vec<f64>) -> Field {
    Field { grid: *grid, t: 0.0, values }
}

#[test]
fn ordered_pairs_stay_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = Grid1D::new(-1.0, 1.0, 100).unwrap();
    let cases = [params(3.0, 0.0, 1.0, 2.0, 1.0), params(2.5, 0.0, 1.0, 2.0, 1.0), params(4.0, 1.0, 0.5, 1.0, 1.0)];
    for pair in 0..100 {
        let pr = cases[pair % cases.len()];
        let lower = random_field(&mut rng, &grid);
        let upper: Vec<f64> = lower.iter().map(|&v| if v > 0.0 { v + rng.gen_range(0.0..0.5) } else { 0.0 }).collect();
        let mut a = Solver::from_field(&pr, field(&grid, lower));
        let mut b = Solver::from_field(&pr, field(&grid, upper));
        for step in 0..20 {
            let dt = a.stable_dt().min(b.stable_dt());
            a.advance_exact(dt).unwrap();
            b.advance_exact(dt).unwrap();
            let bad = a.field().values.iter().zip(&b.field().values).position(|(x, y)| x > y);
            assert!(bad.is_none(), "pair {pair}, step {step}: order lost at node {bad:?}");
        }
    }
}

#[test]
fn steps_keep_values_non_negative() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = Grid1D::new(-1.0, 1.0, 100).unwrap();
    for case in 0..60 {
        let p = rng.gen_range(2.2..5.0);
        let beta = rng.gen_range(0.2..2.5);
        let b = if beta < 1.0 { rng.gen_range(0.1..4.0) } else { rng.gen_range(-1.0..4.0) };
        let pr = params(p, b, beta, 1.0, 1.0);
        let mut s = Solver::from_field(&pr, field(&grid, random_field(&mut rng, &grid)));
        for _ in 0..30 {
            s.advance(1e-3).unwrap();
            assert!(s.field().values.iter().all(|&v| v >= 0.0 && v.is_finite()), "case {case}: {pr:?}");
        }
    }
}

#[test]
fn support_grows_at_most_one_cell_per_step() {
    let pr = params(3.0, 0.0, 1.0, 1.0, 1.0);
    let grid = Grid1D::new(-1.0, 1.0, 400).unwrap();
    let mut s = Solver::new(&pr, &grid);
    let mut end = s.support_end();
    let start = end;
    for _ in 0..5000 {
        s.advance(1e-3).unwrap();
        let next = s.support_end();
        assert!(next <= end + 1, "support jumped from {end} to {next}");
        end = next;
    }
    assert!(end > start + 10, "front did not move: {start} -> {end}");
}

#[test]
fn mass_is_conserved_without_reaction() {
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let grid = Grid1D::new(-2.0, 2.0, 400).unwrap();
    let values = grid.nodes().map(|x| (0.25f64 - x * x).max(0.0).powi(2)).collect();
    let f0 = field(&grid, values);
    let m0 = f0.mass();
    let mut s = Solver::from_field(&pr, f0);
    s.advance_to(1.0).unwrap();
    let drift = (s.field().mass() - m0).abs() / m0;
    assert!(drift < 1e-8, "relative mass drift {drift} over unit time");
    assert!(s.field().values[0] == 0.0 && s.support_end() + 2 < grid.len());
}

#[test]
fn traveling_wave_error_converges() {
    let pr = params(3.0, 0.0, 1.0, 2.0, 1.0);
    let sol = ClosedFormSolution::traveling_wave(&pr).unwrap();
    let errs: Vec<f64> = [300, 600, 1200]
        .iter()
        .map(|&n| {
            let grid = Grid1D::new(-6.0, 6.0, n).unwrap();
            let mut s = Solver::new(&pr, &grid).with_left_boundary(LeftBoundary::exact(&sol, -6.0));
            s.advance_to(0.5).unwrap();
            let f = s.field();
            grid.nodes().zip(&f.values).map(|(x, u)| (u - sol.value(x, 0.5).unwrap()).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.8, "observed order {order} from errors {errs:?}");
    }
}

/// The region conditions written out directly, one predicate per region and subcase.
fn predicates(pr: &ProblemParams) -> Vec<(Region, Option<Subcase>)> {
    let ProblemParams { p, b, beta, alpha, .. } = *pr;
    let mut hits = Vec::new();
    let w = p / (p - 2.0);
    if b == 0.0 {
        if alpha < w {
            hits.push((Region::B0Expanding, None));
        }
        if alpha == w {
            hits.push((Region::B0Waiting, None));
        }
        if alpha > w {
            hits.push((Region::B0Stationary, None));
        }
        return hits;
    }
    if alpha < p / (p - 1.0 - beta.min(1.0)) {
        hits.push((Region::R1Expanding, None));
    }
    if beta < 1.0 && alpha == p / (p - 1.0 - beta) {
        hits.push((Region::R2Borderline, None));
    }
    if beta < 1.0 && alpha > p / (p - 1.0 - beta) {
        hits.push((Region::R3Shrinking, None));
    }
    if beta == 1.0 && alpha == w {
        hits.push((Region::R4Waiting, Some(Subcase::W4a)));
    }
    if beta == 1.0 && alpha > w {
        hits.push((Region::R4Waiting, Some(Subcase::W4b)));
    }
    if 1.0 < beta && beta < p - 1.0 && alpha >= p / (p - 1.0 - beta) {
        hits.push((Region::R4Waiting, Some(Subcase::W4c)));
    }
    if (1.0 < beta && beta < p - 1.0 && w <= alpha && alpha < p / (p - 1.0 - beta)) || (beta >= p - 1.0 && alpha >= w) {
        hits.push((Region::R4Waiting, Some(Subcase::W4d)));
    }
    hits
}

#[test]
fn classify_partitions_parameter_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..10_000 {
        let p = rng.gen_range(2.05..6.0);
        let beta: f64 = match rng.gen_range(0..4) {
            0 => 1.0,
            1 => p - 1.0,
            _ => rng.gen_range(0.05..5.0),
        };
        let b = match rng.gen_range(0..3) {
            0 if beta >= 1.0 => 0.0,
            1 if beta >= 1.0 => -rng.gen_range(0.1..3.0),
            _ => rng.gen_range(0.1..3.0),
        };
        let q = p - 1.0 - beta.min(1.0);
        let alpha = match rng.gen_range(0..5) {
            0 => p / (p - 2.0),
            1 => p / q,
            2 if beta > 1.0 && beta < p - 1.0 => p / (p - 1.0 - beta),
            _ => rng.gen_range(0.05..12.0),
        };
        let pr = params(p, b, beta, alpha, rng.gen_range(0.1..3.0));
        let hits = predicates(&pr);
        assert_eq!(hits.len(), 1, "{pr:?} matches {hits:?}");
        let got = classify(&pr);
        let (region, subcase) = hits[0];
        assert_eq!(got.region, region, "{pr:?}");
        if region == Region::R4Waiting {
            assert_eq!(got.subcase, subcase, "{pr:?}");
        }
        seen.insert(region);
    }
    assert_eq!(seen.len(), 7, "regions reached: {seen:?}");
}
