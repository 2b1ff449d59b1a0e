//! End-to-end checks of the command line surface: exit codes, stdout shape,
//! and file outputs.

use std::process::{Command, Output};

fn lbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_prints_value_and_verdicts() {
    let out = lbounds(&["eval", "--q", "5", "--chi", "0", "--t", "60", "--radius", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for key in ["q: 5", "l_abs_mid:", "l_abs_radius:", "theorem1:", "theorem2:", "corollary:"] {
        assert!(text.contains(key), "missing `{key}` in:\n{text}");
    }
    assert!(text.contains("verdict=PASS"));
    assert!(!text.contains("verdict=FAIL"));
}

#[test]
fn eval_psum_method_agrees() {
    let out = lbounds(&["eval", "--q", "4", "--chi", "0", "--t", "2", "--method", "psum"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("method: psum"));
}

#[test]
fn eval_rejects_bad_index() {
    let out = lbounds(&["eval", "--q", "3", "--chi", "5", "--t", "1"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sweep.cfg");
    let csv_path = dir.path().join("report.csv");
    std::fs::write(
        &cfg_path,
        "# small smoke sweep\n\
         q_min = 3\nq_max = 5\n\
         t_start = 1.0\nt_stop = 10.0\nt_count = 3\nt_spacing = log\n\
         target_radius = 1e-6\nevaluator = hurwitz\n\
         bounds = theorem2, corollary\nparallelism = 2\n",
    )
    .unwrap();
    let out = lbounds(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("q,chi_exponents,t,method,"));
    // phi(3)-1 + phi(4)-1 + phi(5)-1 characters, 3 t values, 2 bounds
    assert_eq!(csv.lines().count(), 1 + (1 + 1 + 3) * 3 * 2);
    assert!(csv.contains(",PASS"));
}

#[test]
fn sweep_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.cfg");
    std::fs::write(&cfg_path, "q_min = 1\n").unwrap();
    let out = lbounds(&["sweep", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn certify_exit_codes() {
    // certifiable region
    let out = lbounds(&["certify", "--kind", "backlund", "--m", "3", "--t-min", "50"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("status: certified"));
    assert!(text.contains("cell:"));
    assert!(text.contains("tail:"));

    // region where the residual goes positive
    let out = lbounds(&["certify", "--kind", "backlund", "--m", "3", "--t-min", "40"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("status: failed"));

    // malformed region is a usage error, not a certification verdict
    let out = lbounds(&["certify", "--kind", "backlund", "--m", "3", "--t-min", "1"]);
    assert_eq!(out.status.code(), Some(64));

    // two-axis residual writes its certificate to a file
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("psum.cert");
    let out = lbounds(&[
        "certify", "--kind", "psum", "--m", "2", "--b", "2.8", "--t-min", "0",
        "--t-max", "1e6", "--q-min", "2", "--q-max", "1e4",
        "--out", cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&cert_path).unwrap();
    assert!(text.contains("residual: partial-summation"));
    assert!(text.contains("status: certified"));
}

#[test]
fn identities_pass() {
    let out = lbounds(&["identities", "--q-max", "7"]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains(", 0 failed"));
}

#[test]
fn usage_errors() {
    assert_eq!(lbounds(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(lbounds(&["--help"]).status.code(), Some(0));
}
