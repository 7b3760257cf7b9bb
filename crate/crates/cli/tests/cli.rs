use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    dir.join(format!("{name}.chart")).to_string_lossy().into_owned()
}

fn lcsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsurf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = lcsurf(&all);
    (code(&o), serde_json::from_str(&stdout(&o)).expect("stdout is json"))
}

fn field<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["point"]["fields"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["name"] == name)
        .unwrap_or_else(|| panic!("no field {name}"))
}

#[test]
fn check_exit_codes() {
    let cyl = fixture("hyperbolic_cylinder");
    assert_eq!(code(&lcsurf(&["check", "--chart", &cyl])), 0);
    let plane = lcsurf(&["check", "--chart", &fixture("plane_control")]);
    assert_eq!(code(&plane), 3);
    assert!(stderr(&plane).contains("conformally degenerate"));
}

#[test]
fn bad_input_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.chart");
    std::fs::write(&bad, "name = bad\nspace = R\nn = 3\nx1 = u\nx2 = sin(\nx3 = v\ndomain = -1 1 -1 1\ngrid = 9 9\n").unwrap();
    let o = lcsurf(&["check", "--chart", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));

    let missing = dir.path().join("missing.chart");
    assert_eq!(code(&lcsurf(&["check", "--chart", missing.to_str().unwrap()])), 2);
}

#[test]
fn cylinder_invariants() {
    let cyl = fixture("hyperbolic_cylinder");
    for at in ["0,0", "0.3,-0.2"] {
        let (c, r) = json(&["invariants", "--chart", &cyl, "--at", at]);
        assert_eq!(c, 0);
        assert!((field(&r, "psi")["re"].as_f64().unwrap() + 0.25).abs() < 1e-12);
        assert!(field(&r, "psi")["im"].as_f64().unwrap().abs() < 1e-12);
        assert!(field(&r, "|Phi|^2")["re"].as_f64().unwrap().abs() < 1e-12);
        assert_eq!(field(&r, "psi")["gauge_dependent"], false);
        assert_eq!(field(&r, "K")["gauge_dependent"], false);
        assert_eq!(field(&r, "phi[1]")["gauge_dependent"], true);
        assert_eq!(field(&r, "Omega[1]")["gauge_dependent"], true);
    }
    assert_eq!(code(&lcsurf(&["invariants", "--chart", &cyl, "--at", "10,0"])), 2);
}

#[test]
fn verify_every_regular_fixture() {
    for name in [
        "hyperbolic_cylinder",
        "desitter_product_r0.5",
        "desitter_product_r1",
        "desitter_product_r2",
        "antidesitter_torus_r-0.25",
        "antidesitter_torus_r-0.5",
        "graph_control",
        "padded_cylinder",
        "padded_graph_control",
    ] {
        let (c, r) = json(&["verify", "--chart", &fixture(name)]);
        assert_eq!(c, 0, "{name}");
        let res = &r["residuals"];
        assert_eq!(res["pass"], true, "{name}");
        for e in res["entries"].as_array().unwrap() {
            let kind = e["kind"].as_str().unwrap();
            if kind == "structure" || kind == "fundamental" {
                assert!(e["max"].as_f64().unwrap() <= 1e-7, "{name} {}", e["key"]);
            }
        }
    }
    assert_eq!(code(&lcsurf(&["verify", "--chart", &fixture("plane_control")])), 3);
}

#[test]
fn low_order_is_a_usage_error() {
    let o = lcsurf(&["verify", "--chart", &fixture("hyperbolic_cylinder"), "--order", "6"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("order"), "{}", stderr(&o));
}

#[test]
fn verify_csv_has_stable_rows() {
    let o = lcsurf(&["verify", "--chart", &fixture("graph_control"), "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let keys: Vec<&str> = text.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(keys.len(), 16);
    assert_eq!(
        keys,
        [
            "key", "S2.2", "S2.3a", "S2.3b", "S2.4", "F2.5a", "F2.5b", "F2.5c", "F2.6", "F2.7", "W2.8", "R3.1a", "R3.1b", "R3.1c",
            "R3.3", "R3.4"
        ]
    );
}

#[test]
fn loose_isothermal_tolerance_reaches_residual_gate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stretched.chart");
    let text = std::fs::read_to_string(fixture("hyperbolic_cylinder"))
        .unwrap()
        .replace("name = hyperbolic_cylinder", "name = stretched")
        .replace("x2 = v", "x2 = 1.001*v");
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();

    let strict = lcsurf(&["verify", "--chart", p]);
    assert_eq!(code(&strict), 3);
    assert!(stderr(&strict).contains("isothermal"), "{}", stderr(&strict));

    let loose = lcsurf(&["verify", "--chart", p, "--tol-isothermal", "0.01"]);
    assert_eq!(code(&loose), 4, "{}", stderr(&loose));
}

#[test]
fn json_report_is_stable() {
    let chart = fixture("graph_control");
    let (_, r) = json(&["classify", "--chart", &chart]);
    let mut keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    keys.sort();
    assert_eq!(keys, ["chart", "check", "classification", "config", "point", "residuals"]);

    let run = |workers: &str| stdout(&lcsurf(&["classify", "--chart", &chart, "--format", "json", "--workers", workers]));
    let a = run("1");
    assert_eq!(a, run("1"));
    assert_eq!(a, run("3"));
}

#[test]
fn classify_branches() {
    let (c, r) = json(&["classify", "--chart", &fixture("hyperbolic_cylinder")]);
    assert_eq!(c, 0);
    assert_eq!(r["classification"]["branch"], "VanishingFormNonIsotropic");
    assert_eq!(r["classification"]["essential_rank"], 5);

    let (_, r) = json(&["classify", "--chart", &fixture("padded_cylinder")]);
    assert_eq!(r["classification"]["full"], false);
    assert!(!r["classification"]["warnings"].as_array().unwrap().is_empty());

    let (_, r) = json(&["classify", "--chart", &fixture("graph_control")]);
    assert_eq!(r["classification"]["branch"], "NonVanishingForm");

    let o = lcsurf(&["classify", "--chart", &fixture("hyperbolic_cylinder"), "--at", "0,0"]);
    assert_eq!(code(&o), 2);
}
