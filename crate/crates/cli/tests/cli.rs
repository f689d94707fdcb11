use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn homvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homvar")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let out = homvar(&full);
    (code(&out), serde_json::from_slice(&out.stdout).expect("JSON on stdout"))
}

#[test]
fn homogeneity_check_exit_codes() {
    assert_eq!(code(&homvar(&["check", &fixture("area.toml")])), 0);
    let out = homvar(&["check", &fixture("speed_squared.toml")]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("(i=1, j=1) FAIL"));
}

#[test]
fn parse_errors_point_into_the_file() {
    let out = homvar(&["check", &fixture("malformed.toml")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed.toml:1:31"));
    let out = homvar(&["check", &fixture("bad_index.toml")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad_index.toml:1:15"));
    assert_eq!(code(&homvar(&["check", "no/such/file.toml"])), 2);
    assert_eq!(code(&homvar(&["frobnicate"])), 2);
}

#[test]
fn euler_along_curves() {
    let (c, report) = json(&["euler", &fixture("length.toml")]);
    assert_eq!(c, 0);
    assert_eq!(report["curves"]["line"]["max_abs"].as_f64(), Some(0.0));
    assert!(report["curves"]["arc"]["max_abs"].as_f64().unwrap() > 1e-3);
    let (_, minor) = json(&["euler", &fixture("minor.toml")]);
    for coefficient in minor["coefficients"].as_array().unwrap() {
        assert_eq!(coefficient["raw"], "0");
    }
}

#[test]
fn equivalents_report_their_residuals() {
    let (c, fundamental) = json(&["equivalents", &fixture("minor.toml"), "--kind", "fundamental"]);
    assert_eq!(c, 0);
    assert_eq!(fundamental["closed"], true);
    assert_eq!(fundamental["forms"].as_array().unwrap().len(), 3);
    let (c, hilbert) = json(&["equivalents", &fixture("length.toml")]);
    assert_eq!((c, &hilbert["lepagean"], &hilbert["unique_euler"]), (0, &Value::Bool(true), &Value::Bool(true)));
    let (c, car) = json(&["equivalents", &fixture("area.toml"), "--kind", "caratheodory"]);
    assert_eq!(c, 0);
    assert!(car["residuals"].as_array().unwrap().iter().all(|r| r["status"] != "fail"));
    assert_eq!(code(&homvar(&["equivalents", &fixture("speed_squared.toml")])), 2);
    assert_eq!(code(&homvar(&["equivalents", &fixture("minor.toml"), "--kind", "caratheodory"])), 0);
    let out = homvar(&["equivalents", &fixture("zero.toml"), "--kind", "caratheodory"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("vanishes"));
}

#[test]
fn first_variation_report() {
    let (c, report) = json(&["first-variation", &fixture("area.toml"), "--curve", "graph", "--field", "bump"]);
    assert_eq!(c, 0);
    for key in ["check", "lhs", "rhs", "boundary", "residual", "grid", "tolerance", "pass"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["grid"]["N"], 64);
    assert!((report["lhs"].as_f64().unwrap() - report["rhs"].as_f64().unwrap()).abs() < 1e-8);
    let (c, coarse) = json(&["first-variation", &fixture("area.toml"), "--curve", "graph", "--field", "general", "--grid", "1", "--tol", "1e-12"]);
    assert_eq!((c, &coarse["pass"]), (1, &Value::Bool(false)));
    assert_eq!(code(&homvar(&["first-variation", &fixture("area.toml"), "--curve", "graph"])), 2);
}

#[test]
fn action_and_reparametrization() {
    let (c, a) = json(&["action", &fixture("length.toml"), "--curve", "line"]);
    assert_eq!(c, 0);
    assert!((a["action"].as_f64().unwrap() - 13f64.sqrt()).abs() < 1e-12);
    assert_eq!(code(&homvar(&["action", &fixture("length.toml"), "--curve", "cubic", "--reparam"])), 0);
    let (c, control) = json(&["action", &fixture("speed_squared.toml"), "--reparam"]);
    assert_eq!(c, 1);
    assert!(control["difference"].as_f64().unwrap() > 1e-2);
}

#[test]
fn verify_is_seeded() {
    assert_eq!(code(&homvar(&["verify", "lemma21", "--trials", "10"])), 0);
    assert_eq!(code(&homvar(&["verify", "nope"])), 2);
    let run = || json(&["verify", "theorem22", "--seed", "7", "--trials", "6"]);
    let ((c1, a), (c2, b)) = (run(), run());
    assert_eq!((c1, c2), (1, 1));
    let strip = |v: &Value| {
        let mut v = v.clone();
        for s in v["suites"].as_array_mut().unwrap() {
            s.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert!(!a["suites"][0]["failures"].as_array().unwrap().is_empty());
}
