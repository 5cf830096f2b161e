use super::*;

fn cfg(text: &str) -> ExperimentConfig {
    parse_config(text).unwrap()
}

#[test]
fn numeric_tables_use_seventeen_digits_and_lf() {
    let t = numeric_csv("a,b", vec![vec![0.1, -2.0], vec![1e-300, 0.0]]);
    assert_eq!(t, "a,b\n1.0000000000000001e-1,-2.0000000000000000e0\n1.0000000000000000e-300,0.0000000000000000e0\n");
}

#[test]
fn region_map_partitions_at_p3() {
    let map = region_map(3.0, 1.0, 8.0, 3.0, 80, 30);
    assert_eq!(map.rows.len(), 30);
    assert!(map.rows.iter().flatten().all(Option::is_some));
    let at = |alpha: f64, beta: f64| {
        let i = map.alphas.iter().position(|&a| (a - alpha).abs() < 0.06).unwrap();
        let j = map.betas.iter().position(|&b| (b - beta).abs() < 0.06).unwrap();
        map.rows[j][i].unwrap()
    };
    assert_eq!(at(1.05, 0.55), Region::R1Expanding);
    assert_eq!(at(4.05, 0.55), Region::R3Shrinking);
    assert_eq!(at(5.05, 2.05), Region::R4Waiting);
    // b < 0 with beta < 1 is not admissible.
    let map = region_map(3.0, -1.0, 8.0, 3.0, 8, 6);
    assert!(map.rows[0].iter().all(Option::is_none));
    assert!(map.rows[5].iter().all(Option::is_some));
}

#[test]
fn figure1_places_boundaries_within_a_cell() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg("p = 3\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\nalpha_cells = 64\nbeta_cells = 24\n");
    let out = execute(Command::Figure1, &c, dir.path()).unwrap();
    assert!(out.passed(), "{:?}", out.verdicts);
    assert_eq!(out.verdicts.len(), 7);
    let csv = std::fs::read_to_string(dir.path().join("figure1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64 * 24);
    assert!(std::fs::read_to_string(dir.path().join("figure1.svg")).unwrap().contains("</svg>"));
}

#[test]
fn constants_command_reports_named_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = execute(Command::Constants, &cfg("p = 3\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\n"), dir.path()).unwrap();
    assert_eq!(out.exit_code(), EXIT_PASS);
    let csv = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert!(csv.contains("C_star,2.5000000000000000e-1\n"), "{csv}");
    assert!(csv.contains("C_bar,2.7777777777777776e-2\n"), "{csv}");
}

#[test]
fn classify_command_skips_run_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = execute(Command::Classify, &cfg("p = 3\nb = 1\nbeta = 0.5\nalpha = 4\nC = 1\ncheck = fit\n"), dir.path()).unwrap();
    assert!(out.verdicts.is_empty());
    assert!(out.notes.iter().any(|n| n.contains("skipped")));
    let csv = std::fs::read_to_string(dir.path().join("classify.csv")).unwrap();
    assert!(csv.starts_with("name,value\nregion,R3_Shrinking\n"), "{csv}");
}

#[test]
fn failed_check_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // A coarse grid cannot meet an absurdly tight nodal tolerance.
    let c = cfg("p = 3\nb = 0\nbeta = 1\nalpha = 2\nC = 1\nn = 100\nt_end = 0.1\ncheck = exact\ntol.nodal = 1e-12\n");
    let out = execute(Command::Simulate, &c, dir.path()).unwrap();
    assert_eq!(out.exit_code(), EXIT_CHECK_FAILED);
    let verdicts = std::fs::read_to_string(dir.path().join("verdicts.csv")).unwrap();
    assert!(verdicts.contains("exact_nodal_error") && verdicts.contains(",FAIL\n"));
}

#[test]
fn missing_barriers_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = execute(Command::Verify, &cfg("p = 3\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\nn = 100\n"), dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
}

#[test]
fn certify_ranges_stay_inside_domains() {
    let pr = ProblemParams::new(3.0, 1.0, 1.0, 4.0, 1.0).unwrap();
    let bar = BarrierSpec::exp_beta1(&pr, 0.05, Side::Super).unwrap();
    let x_eps = bar.constant("x_eps").unwrap();
    let ((x0, x1), (t0, t1)) = certify_ranges(&bar, (-1.0, 1.0), 1.0);
    assert_eq!(x0, x_eps);
    assert!(x1 < 0.0 && t0 > 0.0 && t1 <= 1.0);
}
