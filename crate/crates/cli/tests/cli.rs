use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drtcalc")).args(args).output().unwrap()
}

fn model(src: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(src.as_bytes()).unwrap();
    f
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const MODEL: &str = "actions a, b;\nproc P = u(a) . sigma(u(b));\nproc Q = u(a) . tau . sigma(u(b));\n";

#[test]
fn parse_prints_model() {
    let f = model(MODEL);
    let o = run(&["parse", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("proc P = u(a) . sigma(u(b));"));
}

#[test]
fn check_exit_codes() {
    let pass = model(&format!("{MODEL}check da-rb P ~ Q expect yes;\n"));
    assert_eq!(run(&["check", pass.path().to_str().unwrap()]).status.code(), Some(0));
    let fail = model(&format!("{MODEL}check strong P ~ Q;\n"));
    let o = run(&["check", fail.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_two_without_output() {
    let bad_rel = model(&format!("{MODEL}check wobbly P ~ Q;\n"));
    let o = run(&["check", bad_rel.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let bad_name = model(&format!("{MODEL}check strong P ~ Nope;\n"));
    let o = run(&["check", bad_name.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(run(&["axioms", "--axiom", "XYZ"]).status.code(), Some(2));
}

#[test]
fn check_json_report() {
    let f = model(&format!("{MODEL}check da-rb P ~ Q;\ncheck rb-ts P ~ Q;\n"));
    let o = run(&["check", f.path().to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
    assert_eq!(v["checks"][0]["verdict"]["answer"], "yes");
}

#[test]
fn lts_dump_to_file() {
    let f = model(MODEL);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.lts");
    let o = run(&["lts", f.path().to_str().unwrap(), "--proc", "P", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dump = std::fs::read_to_string(out).unwrap();
    assert!(dump.starts_with("lts 4 2 1 root=0"), "{dump}");
}

#[test]
fn normalize_forms() {
    let f = model("actions a, b;\nproc P = sigma(u(a) || u(b));\nproc R = <X | X = u(a) . X>;\n");
    let path = f.path().to_str().unwrap();
    let o = run(&["normalize", path, "--proc", "P", "--form", "basic"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "sigma(u(a) . u(b) + u(b) . u(a))");
    let o = run(&["normalize", path, "--proc", "R", "--form", "linear"]);
    assert!(stdout(&o).contains("X0 = u(a) . X0;"), "{}", stdout(&o));
}

#[test]
fn par_checks() {
    let o = run(&["par", "--check", "functional", "--tSp", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("yes"));
    let o = run(&["par", "--check", "functional", "--tSp", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = run(&["par", "--check", "performance", "--data", "1", "--report", rep.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["delivery_delays"], serde_json::json!([3, 8, 13, 18]));
    assert_eq!(v["performance"]["x2_x3_rbts"]["answer"], "no");
    assert_eq!(run(&["par", "--check", "performance", "--tSp", "4"]).status.code(), Some(2));
}

#[test]
fn axioms_command() {
    let o = run(&["axioms", "--axiom", "A1", "--samples", "5", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS A1"));
}
