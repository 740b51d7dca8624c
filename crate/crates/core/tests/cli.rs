use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn nsbox(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsbox"))
        .args(args)
        .env_remove("NSBOX_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn nsbox");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&str>) -> String {
    let out = nsbox(args, stdin);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str], stdin: Option<&str>) -> Value {
    serde_json::from_str(&ok(args, stdin)).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("missing {key} in {v}"))
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records()
        .map(|rec| rec.unwrap()[idx].parse().unwrap())
        .collect()
}

#[test]
fn measure_pr_box_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pr.json");
    std::fs::write(&path, ok(&["box", "vertex", "pr"], None)).unwrap();
    let r = json(&["measure", path.to_str().unwrap()], None);
    assert_eq!(num(&r, "g"), 4.0);
    assert_eq!(num(&r, "q"), 0.0);
    assert_eq!(num(&r, "t"), 4.0);
    assert_eq!(r["chsh_violated"], Value::Bool(true));
}

#[test]
fn measure_state_and_settings_input() {
    let src = ok(
        &[
            "box",
            "scenario",
            "--scenario",
            "werner-bell",
            "--param",
            "0.9",
            "--source",
        ],
        None,
    );
    let r = json(&["measure", "-"], Some(&src));
    let want = 2.0 * 2f64.sqrt() * 0.9;
    assert!((num(&r, "g") - want).abs() < 1e-9);
    assert!((num(&r, "t") - want).abs() < 1e-9);
}

#[test]
fn decompose_isotropic_pr() {
    let b = ok(&["box", "isotropic", "--p", "0.6"], None);
    let d = json(&["decompose", "-"], Some(&b));
    let pr = d["terms"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["tag"] == "PRPart")
        .unwrap();
    assert!((num(pr, "weight") - 0.6).abs() < 1e-12);
}

#[test]
fn decompose_max_entangled_box() {
    let b = ok(
        &[
            "box",
            "scenario",
            "--scenario",
            "max-entangled",
            "--param",
            "0.64",
        ],
        None,
    );
    let d = json(&["decompose", "-", "--mode", "full"], Some(&b));
    let weight = |tag: &str| {
        d["terms"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["tag"] == tag)
            .map(|t| num(t, "weight"))
            .unwrap()
    };
    assert!((weight("PRPart") - 0.6).abs() < 1e-9);
    assert!((weight("MerminPart") - 0.2).abs() < 1e-9);
}

#[test]
fn local_content_and_membership() {
    let b = ok(&["box", "isotropic", "--p", "0.75"], None);
    let lc = json(&["local-content", "-"], Some(&b));
    assert!((num(&lc, "objective") - 0.5).abs() < 1e-9);
    let m = json(&["membership", "-"], Some(&b));
    assert_eq!(m["feasible"], Value::Bool(false));
    let b = ok(&["box", "isotropic", "--p", "0.5"], None);
    assert_eq!(
        json(&["membership", "-"], Some(&b))["feasible"],
        Value::Bool(true)
    );
}

#[test]
fn sweeps() {
    let q = column(
        &ok(
            &["sweep", "--scenario", "werner-mermin", "--points", "3"],
            None,
        ),
        "Q",
    );
    assert_eq!(q, vec![0.0, 1.0, 2.0]);
    let t = column(
        &ok(
            &["sweep", "--scenario", "colored-mermin", "--points", "2"],
            None,
        ),
        "T",
    );
    assert!(
        (t[0] - 2f64.sqrt()).abs() < 1e-9 && (t[1] - 2.0).abs() < 1e-9,
        "{t:?}"
    );
}

#[test]
fn sweep_is_deterministic() {
    let args = [
        "sweep",
        "--scenario",
        "schmidt-bell-mermin",
        "--points",
        "21",
    ];
    assert_eq!(ok(&args, None), ok(&args, None));
    let j = json(
        &["sweep", "--scenario", "werner-bell", "--format", "json"],
        None,
    );
    assert_eq!(j.as_array().unwrap().len(), 11);
}

#[test]
fn mix_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, ok(&["box", "vertex", "pr"], None)).unwrap();
    std::fs::write(&b, ok(&["box", "vertex", "white-noise"], None)).unwrap();
    let mixed = ok(
        &[
            "box",
            "mix",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--weights",
            "0.3,0.7",
        ],
        None,
    );
    assert_eq!(mixed, ok(&["box", "isotropic", "--p", "0.3"], None));
}

#[test]
fn error_exit_codes() {
    let code = |args: &[&str], stdin: Option<&str>| nsbox(args, stdin).status.code();
    assert_eq!(code(&["sweep", "--scenario", "nope"], None), Some(4));
    assert_eq!(code(&["measure", "-"], Some("{")), Some(2));
    assert_eq!(
        code(&["measure", "-"], Some(r#"{"probs": [1, 2]}"#)),
        Some(2)
    );
    assert_eq!(code(&["measure", "/nonexistent/box.json"], None), Some(2));
    assert_eq!(code(&["box", "isotropic", "--p", "1.5"], None), Some(2));
    let signaling = r#"{"probs": [[[[1,0],[0,0]],[[0,0],[0,1]]],[[[1,0],[0,0]],[[1,0],[0,0]]]]}"#;
    let out = nsbox(&["measure", "-"], Some(signaling));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsignaling"));
    let negative =
        r#"{"probs": [[[[1.5,0],[0,-0.5]],[[1,0],[0,0]]],[[[1,0],[0,0]],[[1,0],[0,0]]]]}"#;
    assert_eq!(code(&["measure", "-"], Some(negative)), Some(3));
}

#[test]
fn verify_passes_and_detects_flipped_sigma_y() {
    let out = ok(&["verify", "--samples", "300", "--points", "5"], None);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
    let flipped = nsbox(
        &[
            "verify",
            "--samples",
            "100",
            "--points",
            "5",
            "--flip-sigma-y",
        ],
        None,
    );
    assert_eq!(flipped.status.code(), Some(1));
    let text = String::from_utf8(flipped.stdout).unwrap();
    assert!(text.contains("FAIL scenario schmidt-mermin"), "{text}");
}

#[test]
fn output_formats() {
    let b = ok(&["box", "vertex", "mermin"], None);
    let csv_out = ok(&["measure", "-", "--format", "csv"], Some(&b));
    assert_eq!(column(&csv_out, "Q"), vec![2.0]);
    let table = ok(&["measure", "-", "--format", "table"], Some(&b));
    assert!(table
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["Q", "2"]));
    let list = ok(&["scenarios"], None);
    assert_eq!(list.lines().count(), 17);
}
