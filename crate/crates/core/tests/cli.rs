use std::path::Path;
use std::process::Command;

fn pfront(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pfront")).args(args).env("PFRONT_THREADS", "1").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const WAITING: &str = "p = 3\nb = 0\nbeta = 1\nalpha = 3\nC = 0.027777777777777776\nx_left = -1\nx_right = 0.5\n\
                       n = 300\nt_end = 0.5\nsnapshot = 0.25\nsnapshot = 0.5\n";

#[test]
fn waiting_config_simulates_to_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "w.conf", WAITING);
    let out = dir.path().join("out");
    let (code, text) = pfront(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS waiting_excursion") && text.contains("blow-up time T = 1"), "{text}");
    for name in ["trace.csv", "snapshots.csv", "trace.svg", "snapshots.svg", "verdicts.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "w.conf", &format!("{WAITING}check = waiting\ncheck = sandwich\n"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let (code, text) = pfront(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{text}");
    }
    for name in ["trace.csv", "snapshots.csv", "sandwich.csv", "verdicts.csv", "trace.svg", "sandwich.svg"] {
        let (x, y) = (std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
        assert!(x == y, "{name} differs between runs");
        assert!(!x.contains(&b'\r'));
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let no_p = write(dir.path(), "a.conf", "b = 0\nbeta = 1\nalpha = 2\nC = 1\n");
    let (code, text) = pfront(&["classify", "--config", &no_p, "--out", out]);
    assert_eq!(code, 2);
    assert!(text.contains("p required"), "{text}");
    let p2 = write(dir.path(), "b.conf", "p = 2\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\n");
    assert_eq!(pfront(&["classify", "--config", &p2, "--out", out]).0, 2);
    let (code, text) = pfront(&["classify", "--config", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(code, 2, "{text}");
    assert_eq!(pfront(&["bogus", "--config", &p2]).0, 2);
}

#[test]
fn runtime_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // The interface reaches the right edge of a short grid.
    let config = write(dir.path(), "r.conf", "p = 3\nb = 0\nbeta = 1\nalpha = 2\nC = 1\nx_left = -1\nx_right = 0.2\nn = 60\nt_end = 1\n");
    let out = dir.path().join("out");
    let (code, text) = pfront(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{text}");
}

#[test]
fn constants_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "c.conf", "p = 3\nb = 1\nbeta = 0.5\nalpha = 1\nC = 1\n");
    let out = dir.path().join("out");
    let (code, text) = pfront(&["constants", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("C_star = 2.5000000000000000e-1") && text.contains("C_bar = 2.7777777777777776e-2"), "{text}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Err(e) = pfront_core::cli::parse_config(&text) {
            panic!("{}: {e}", path.display());
        }
        count += 1;
    }
    assert!(count >= 10);
}
