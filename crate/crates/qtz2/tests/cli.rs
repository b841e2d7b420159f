use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qtz2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtz2"))
        .args(args)
        .env_remove("RMATRIX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn export_preset(dir: &Path, preset: &str) -> String {
    let path = dir.join(format!("{}.json", preset.replace(':', "_")));
    let o = qtz2(&["export", "--preset", preset, "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    path.to_str().unwrap().to_string()
}

fn write_json(path: &Path, v: &Value) -> String {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_kac_paljutkin_reports_four_verified() {
    let o = qtz2(&["classify", "--preset", "kac-paljutkin"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("4 non-trivial R-matrices"), "{}", s);
    assert!(s.contains("all verified: true"));
}

#[test]
fn enumerate_all_output_files_each_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let data = export_preset(dir.path(), "kac-paljutkin");
    let sols = dir.path().join("sols");
    let set = dir.path().join("set.json");
    let o = qtz2(&[
        "enumerate",
        &data,
        "--kind",
        "all",
        "--out-dir",
        sols.to_str().unwrap(),
        "--out",
        set.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut files: Vec<_> = std::fs::read_dir(&sols).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 8);
    for f in &files {
        let o = qtz2(&["verify", &data, f.to_str().unwrap(), "--qybe"]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", f.display(), stdout(&o));
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&set).unwrap()).unwrap();
    assert_eq!(v["summary"]["counts"], json!({"special": 4, "trivial": 4}));
    assert_eq!(v["summary"]["data_fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn identity_r_matrix_passes_on_untwisted_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = export_preset(dir.path(), "K8n:n=1:untwisted");
    let ones: Vec<Value> = (0..4).map(|_| json!([[0, 1], [0, 1], [0, 1], [0, 1]])).collect();
    let r = write_json(&dir.path().join("r_identity.json"), &json!({"form": "trivial", "w1": ones}));
    let o = qtz2(&["verify", &data, &r]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));
}

#[test]
fn broken_unitality_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let data = export_preset(dir.path(), "kac-paljutkin");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    v["tau"][0][1] = json!([1, 2]);
    let broken = write_json(&dir.path().join("broken.json"), &v);
    let o = qtz2(&["validate", &broken]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("FAIL tau(1,g) = tau(g,1) = 1"), "{}", s);
    assert!(s.contains("e.g."), "{}", s);
}

#[test]
fn mutated_r_matrix_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let data = export_preset(dir.path(), "kac-paljutkin");
    let report = dir.path().join("c.json");
    let o = qtz2(&["classify", "--preset", "kac-paljutkin", "--out", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let mut r = v["entries"][0]["rmatrix"].clone();
    r["w4"][0][0] = json!([0, 1]);
    let r = write_json(&dir.path().join("bad.json"), &r);
    let o = qtz2(&["verify", &data, &r]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn validate_with_axioms_passes_on_presets() {
    for p in ["kac-paljutkin", "A8n:n=1:paper"] {
        let o = qtz2(&["validate", "--preset", p, "--axioms"]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", p, stdout(&o));
        assert!(stdout(&o).contains("hopf axioms: pass"));
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["validate"],
        vec!["classify", "--preset", "K8n:n=x:kp"],
        vec!["enumerate", "--preset", "kac-paljutkin", "--kind", "sideways"],
        vec!["verify", "--preset", "kac-paljutkin"],
        vec!["validate", "/nonexistent/data.json"],
        vec!["export", "--preset", "kac-paljutkin", "--format", "matrix"],
    ] {
        let o = qtz2(&args);
        assert_eq!(o.status.code(), Some(2), "{:?}: {}", args, stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn budget_refusal_is_loud() {
    let o = qtz2(&["--budget", "3", "enumerate", "--preset", "kac-paljutkin", "--kind", "special"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("refused"), "{}", stderr(&o));
    let o = qtz2(&["--max-group-order", "4", "enumerate", "--preset", "K8n:n=2:kp", "--kind", "all"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("refused"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["enumerate", "--preset", "K8n:n=2:kp", "--kind", "all", "--verify"];
    let a = qtz2(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_qtz2"))
        .args(args)
        .env("RMATRIX_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_qtz2"))
        .args(args)
        .env("RMATRIX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn general_and_phi_symmetric_kinds() {
    let o = qtz2(&["enumerate", "--preset", "kac-paljutkin", "--kind", "phi-symmetric", "--verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("found 4 R-matrices (4 phi-symmetric)"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = qtz2(&[
        "enumerate",
        "--preset",
        "kac-paljutkin",
        "--kind",
        "general",
        "--verify",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let data = out.join("data.json");
    let o = qtz2(&["verify", data.to_str().unwrap(), out.join("r0000.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn exports_exact_and_labelled_approximate_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("c.json");
    qtz2(&["classify", "--preset", "kac-paljutkin", "--out", report.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let r = write_json(&dir.path().join("r.json"), &v["entries"][0]["rmatrix"]);
    let o = qtz2(&["export", "--preset", "kac-paljutkin", &r, "--format", "matrix"]);
    let m: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["matrix"].as_array().unwrap().len(), 8);
    let o = qtz2(&["export", "--preset", "kac-paljutkin", &r, "--format", "complex"]);
    let c: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(c["note"].as_str().unwrap().contains("not authoritative"));
    let o = qtz2(&["export", "--preset", "kac-paljutkin", &r, "--format", "json"]);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["form"], json!("nontrivial"));
    assert!(!j["tensor"].as_array().unwrap().is_empty());
}
