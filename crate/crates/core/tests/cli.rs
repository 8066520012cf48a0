use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qmono::trees::TreeFile;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmono-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn qmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmono")).args(args).output().unwrap()
}

#[test]
fn normalize_star_difference_gives_two_leaves() {
    let out = tmp("diff.qtree");
    let o = qmono(&["normalize", "--star", "--input", &data("x1_minus_x2.gps"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tree = TreeFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(tree.star);
    assert_eq!(tree.tree.leaf_count(), 2);
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.starts_with(&format!("# qmono {} normalize\n", env!("CARGO_PKG_VERSION"))));
    assert!(report.contains("# config star = true"));
    assert!(report.contains("verification PASS"));
}

#[test]
fn verify_rejects_tampered_tree() {
    let out = tmp("tamper.qtree");
    let path = out.to_str().unwrap();
    assert!(qmono(&["normalize", "--star", "--input", &data("x1_minus_x2.gps"), "--out", path]).status.success());
    assert_eq!(qmono(&["verify", "--input", path]).status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    // Flip the sign of a leaf coefficient.
    let at = text.rfind("{c: -1,").unwrap();
    let bad = format!("{}{{c: 1,{}", &text[..at], &text[at + "{c: -1,".len()..]);
    std::fs::write(&out, bad).unwrap();
    let o = qmono(&["verify", "--input", path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stdout).unwrap().contains("verification FAIL"));
    std::fs::write(&out, "{format: qtree").unwrap();
    assert_eq!(qmono(&["verify", "--input", path]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qmono(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qmono(&["normalize"]).status.code(), Some(2));
    assert_eq!(qmono(&["vlab", "jet", "--k", "3", "--p", "1"]).status.code(), Some(2));
    let dup = tmp("dup.gps");
    std::fs::write(&dup, "gps 2 0\nradius 1 1\n1 : 1 0\n2 : 1 0\n").unwrap();
    let o = qmono(&["signs", "--input", dup.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 4"));
    assert_eq!(qmono(&["parametrize", "--input", &data("x1_minus_x2.gps"), "--tol", "0"]).status.code(), Some(2));
}

#[test]
fn reports_echo_config_and_pass() {
    let o = qmono(&["parametrize", "--equation", &data("x1y1.gps"), "--positive", &data("one_plus_y1.gps"), "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# config seed = 4"));
    assert!(text.contains("certificates PASS"));
    let o = qmono(&["fibercut", "--input", &data("x1x2.gps"), "--m-split", "1", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("PASS"));
    let o = qmono(&["vlab", "wbasis", "--n", "1", "--p", "4", "--k", "4"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("status PASS"), "{text}");
}

#[test]
fn random_element_avoids_zero_value() {
    // A random element of W avoids f(x1) = 0 on the grid.
    let o = qmono(&["vlab", "avoid", "--input", &data("first_jet.gps"), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("hits 0"));
    assert!(text.contains("tuples 16"));
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["qmono", "signs", "--input", &data("x1_minus_x2.gps")];
    let a = qmono::cli::run(args);
    let b = qmono(&args[1..]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout.as_bytes(), b.stdout.as_slice());
}
