//! End-to-end runs of the command front end.

use std::f64::consts::TAU;
use std::path::Path;

use crate::spectrum::{spectral_residual, SystemConfig};

struct Output {
    code: i32,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn ringphase(args: &[&str]) -> Output {
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = super::run(std::iter::once("ringphase").chain(args.iter().copied()), &mut stdout, &mut stderr);
    Output { code, stdout, stderr }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[test]
fn curves_writes_both_tables_with_true_roots() {
    let dir = tempfile::tempdir().unwrap();
    let o = ringphase(&[
        "curves", "--eta", "2", "--alpha", "0", "--c", "0.1", "--L", "5", "--k-max", "3", "--step", "0.02",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", stderr(&o));

    let curves = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(curves.starts_with("family,branch_id,k1,k2\n"));
    let families: Vec<String> = rows(&curves).into_iter().map(|r| r[0].clone()).collect();
    assert!(families.iter().any(|f| f == "vertical"));
    assert!(families.iter().any(|f| f == "horizontal"));

    let roots = std::fs::read_to_string(dir.path().join("roots.csv")).unwrap();
    assert!(roots.starts_with("i,j,k1,k2,energy,residual\n"));
    let cfg = SystemConfig::new(0.1, 5.0, 2.0, 0.0).unwrap();
    let parsed = rows(&roots);
    assert!(parsed.len() >= 4);
    for r in parsed {
        let (k1, k2): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
        let (f1, f2) = spectral_residual(k1, k2, &cfg).unwrap();
        assert!(f1.abs().max(f2.abs()) < 1e-10, "{r:?}");
        assert!((0.01..=3.0).contains(&k1) && (0.01..=3.0).contains(&k2));
    }
}

#[test]
fn empty_window_gives_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = ringphase(&["curves", "--k-min", "0.01", "--k-max", "0.01", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("curves.csv")).unwrap(),
        "family,branch_id,k1,k2\n"
    );
    assert_eq!(
        std::fs::read_to_string(dir.path().join("roots.csv")).unwrap(),
        "i,j,k1,k2,energy,residual\n"
    );
}

#[test]
fn free_roots_match_closed_form() {
    let (eta, alpha, l) = (1.3f64, 0.4f64, 5.0f64);
    let o = ringphase(&["roots", "--c", "0", "--eta", "1.3", "--alpha", "0.4", "--L", "5", "--max-index", "4"]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    let gap = (1.0 / eta.cosh()).acos();
    let mut expected: Vec<f64> = (-2..4)
        .flat_map(|n| [alpha + gap + TAU * n as f64, alpha - gap + TAU * n as f64])
        .map(|x| x / l)
        .filter(|&k| k > 0.0)
        .collect();
    expected.sort_by(f64::total_cmp);
    let parsed = rows(&stdout(&o));
    assert_eq!(parsed.len(), 16);
    for r in parsed {
        let i: usize = r[0].parse().unwrap();
        let j: usize = r[1].parse().unwrap();
        let k1: f64 = r[2].parse().unwrap();
        let k2: f64 = r[3].parse().unwrap();
        assert!((k1 - expected[i - 1]).abs() < 1e-10, "{r:?}");
        assert!((k2 - expected[j - 1]).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn phase_of_reference_state_converges() {
    let o = ringphase(&["phase", "--state", "1,3", "--eta", "2", "--c", "0.1", "--L", "5"]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "state,eta,c,L,steps_used,theta_g,global_term,connection_term,endpoint_overlap_mag,converged,status"
    );
    let record = lines.next().unwrap();
    assert!(record.starts_with("\"1,3\","));
    assert!(record.ends_with(",true,ok"));
}

#[test]
fn symmetric_state_has_vanishing_phase() {
    let o = ringphase(&["phase", "--state", "1,1", "--eta", "2", "--c", "0.1", "--L", "5", "--format", "json"]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let theta = v["theta_g"].as_f64().unwrap();
    assert!(circle_distance(theta, 0.0) < 0.02, "theta_g = {theta}");
    assert_eq!(v["state"], "1,1");
    assert_eq!(v["L"], 5.0);
    assert_eq!(v["converged"], true);
    let sum = v["global_term"].as_f64().unwrap() + v["connection_term"].as_f64().unwrap();
    assert!(circle_distance(sum, theta) < 1e-12);
}

#[test]
fn enumeration_failure_names_the_state() {
    let o = ringphase(&["phase", "--state", "9,9", "--eta", "50"]);
    assert_eq!(o.code, 3);
    assert!(stderr(&o).contains("(9,9)"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn sweep_rows_are_eta_major() {
    let o = ringphase(&["sweep", "--etas", "1,2", "--c-grid", "0,1,5", "--steps", "64", "--threads", "2"]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("eta,c,theta_g,converged,status\n"));
    let cells: Vec<(f64, f64)> = rows(&out)
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(
        cells,
        vec![(1.0, 0.0), (1.0, 1.0), (1.0, 5.0), (2.0, 0.0), (2.0, 1.0), (2.0, 5.0)]
    );
}

#[test]
fn sweep_default_grid_has_61_values() {
    let o = ringphase(&["sweep", "--etas", "2", "--c-max", "3", "--steps", "16"]);
    assert!(o.code == 0 || o.code == 3, "{}", stderr(&o));
    assert_eq!(rows(&stdout(&o)).len(), 61);
}

#[test]
fn validate_passes_and_reports_injected_failure() {
    let o = ringphase(&["validate"]);
    assert_eq!(o.code, 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().count() >= 4);
    assert!(!stdout(&o).contains("FAIL"));
    let o = ringphase(&["validate", "--inject-failure"]);
    assert_eq!(o.code, 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("roots.csv");
    let o = ringphase(&["roots", "--max-index", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn bad_input_exits_with_code_2() {
    for args in [
        &["roots", "--eta", "-1"][..],
        &["roots", "--L", "0"],
        &["phase", "--state", "0,2"],
        &["phase", "--state", "banana"],
        &["sweep", "--etas", "1,x"],
        &["frobnicate"],
    ] {
        let o = ringphase(args);
        assert_eq!(o.code, 2, "{args:?}: {}", stderr(&o));
    }
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "# free system\nc = 0\neta = 1.3\nalpha = 0.4\nmax_index = 2\n");

    let from_file = ringphase(&["--config", &conf, "roots"]);
    assert_eq!(from_file.code, 0, "{}", stderr(&from_file));
    let parsed = rows(&stdout(&from_file));
    assert_eq!(parsed.len(), 4);
    let k: f64 = parsed[0][2].parse().unwrap();
    let expected = (0.4 - (1.0 / 1.3f64.cosh()).acos() + TAU) / 5.0;
    let expected = expected.min((0.4 + (1.0 / 1.3f64.cosh()).acos()) / 5.0);
    assert!((k - expected).abs() < 1e-10);

    let overridden = ringphase(&["--config", &conf, "roots", "--max-index", "3", "--alpha", "0"]);
    assert_eq!(overridden.code, 0);
    let parsed = rows(&stdout(&overridden));
    assert_eq!(parsed.len(), 9);
    let k: f64 = parsed[0][2].parse().unwrap();
    assert!((k - (1.0 / 1.3f64.cosh()).acos() / 5.0).abs() < 1e-10);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "eta = 2\ncolour = blue\n");
    let o = ringphase(&["--config", &conf, "roots"]);
    assert_eq!(o.code, 2);
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn phase_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phase.json");
    let o = ringphase(&[
        "phase", "--state", "1,2", "--c", "0", "--steps", "64", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(v["theta_g"].as_f64().unwrap().is_finite());
    assert_eq!(v["steps_used"].as_u64().map(|n| n >= 64), Some(true));
}
