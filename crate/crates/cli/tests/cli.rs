use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

const PREC: u32 = 256;

fn ptau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptau")).args(args).env_remove("PT_DIGITS").output().expect("run ptau")
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = ptau(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, out.status.code().unwrap_or(-1))
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/output.schema.json");
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&s).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

fn float(v: &Value) -> Float {
    Float::with_val(PREC, Float::parse(v.as_str().expect("decimal string")).unwrap())
}

fn close(a: &Float, b: &Float, tol: f64) -> bool {
    let d = Float::with_val(PREC, a - b).abs().to_f64();
    d <= tol * b.to_f64().abs().max(1e-300)
}

#[test]
fn tau_all_methods_agree_on_real_t() {
    let (v, code) =
        json_of(&["tau", "--mu", "1", "--omega1", "0.3", "--omega2", "0.1", "--xi", "0", "--t", "0.5", "--n-max", "6", "--method", "all"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let ag = v["diagnostics"]["agreement"].as_object().unwrap();
    let names: Vec<&str> = ag.keys().map(|k| k.as_str()).collect();
    assert_eq!(names, ["dpv-prop", "hyp", "recurrence-21", "recurrence-22"]);
    assert!(ag.values().all(|a| a["agrees"] == Value::Bool(true)));
    assert_eq!(v["rows"].as_array().unwrap().len(), 5 * 7);
    assert_eq!(v["meta"]["digits"], 60);
}

#[test]
fn cue_gap_first_value_is_one_minus_arc_fraction() {
    let (v, code) = json_of(&["cue-gap", "--xi", "1", "--phi", "1.5707963", "--n-max", "8"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    let phi = Float::with_val(PREC, Float::parse("1.5707963").unwrap());
    let want = 1 - phi / (Float::with_val(PREC, Constant::Pi) * 2u32);
    assert!(close(&float(&rows[1]["E_re"]), &want, 1e-55));
    for w in rows.windows(2) {
        assert!(float(&w[1]["E_re"]) < float(&w[0]["E_re"]));
    }
}

#[test]
fn ising_critical_correlations_are_gamma_products() {
    let (v, code) = json_of(&["ising", "--k", "1", "--phase", "low", "--n-max", "5"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let g = |x: f64| Float::with_val(PREC, x).gamma();
    let mut prod = Float::with_val(PREC, 1);
    for (j, row) in v["rows"].as_array().unwrap().iter().enumerate() {
        let j = (j + 1) as f64;
        prod *= g(j).pow(2u32) / (g(j + 0.5) * g(j - 0.5));
        assert!(close(&float(&row["corr_re"]), &prod, 1e-50), "N={j}");
    }
}

#[test]
fn hyp2f1_single_variable_is_log() {
    let (v, code) = json_of(&["hyp2f1", "--a", "1", "--b", "1", "--c", "2", "--t", "0.5", "--n-max", "2"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let want = Float::with_val(PREC, 2) * Float::with_val(PREC, 2).ln();
    assert!(close(&float(&v["rows"][0]["value_re"]), &want, 1e-55));
    assert_eq!(v["diagnostics"]["converged"], Value::Bool(true));
}

#[test]
fn cue_moment_on_circle_matches_oracle() {
    let (v, code) = json_of(&["cue-moment", "--mu", "0.5", "--u", "1", "--n-max", "6", "--method", "all"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert_eq!(v["meta"]["params"]["route"], "closed-form");
    assert_eq!(v["diagnostics"]["agreement"]["recurrence-22"]["agrees"], Value::Bool(true));
}

#[test]
fn reflections_on_circle_with_schemes_excluded() {
    let (v, code) = json_of(&[
        "reflections",
        "--mu",
        "0.3",
        "--omega1",
        "0.2",
        "--omega2",
        "0.15",
        "--xi",
        "0.4",
        "--phi",
        "1.1",
        "--n-max",
        "5",
        "--method",
        "all",
    ]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let ag = v["diagnostics"]["agreement"].as_object().unwrap();
    assert!(!ag.contains_key("dpv-l01") && !ag.contains_key("hyp"));
    assert!(ag.values().all(|a| a["agrees"] == Value::Bool(true)));
}

#[test]
fn tau_schemes_on_circle() {
    for m in ["dpv-l01", "dpv-l14"] {
        let (v, code) =
            json_of(&["tau", "--mu", "0.3", "--omega1", "0.2", "--omega2", "0.15", "--phi", "1.1", "--n-max", "6", "--method", m]);
        assert_eq!(code, 0, "{m}");
        assert_valid(&v);
    }
    let (v, code) =
        json_of(&["tau", "--mu", "0.3", "--omega1", "0.2", "--omega2", "0.15", "--phi", "1.1", "--n-max", "6", "--method", "all"]);
    assert_eq!(code, 0);
    let ag = v["diagnostics"]["agreement"].as_object().unwrap();
    assert!(ag.contains_key("dpv-l01") && ag.contains_key("dpv-l14"));
}

#[test]
fn verify_ising_only_runs_ising_cells() {
    let (v, code) = json_of(&["verify", "--panel", "ising-only", "--digits", "40", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["group"] == "ising" && r["passed"] == Value::Bool(true)));
}

#[test]
fn exit_codes_follow_the_taxonomy() {
    let code = |a: &[&str]| ptau(a).status.code().unwrap();
    // precondition violations
    assert_eq!(code(&["tau", "--mu", "0.3", "--t", "0.5", "--digits", "20"]), 3);
    assert_eq!(code(&["tau", "--mu", "0.3", "--t", "0.5", "--xi", "0.2"]), 3);
    assert_eq!(code(&["tau", "--mu", "0.3", "--t", "0.5", "--method", "dpv-l01"]), 3);
    assert_eq!(code(&["cue-gap", "--xi", "1", "--phi", "1", "--method", "hyp"]), 3);
    assert_eq!(code(&["ising", "--k", "0.5", "--phase", "low"]), 3);
    assert_eq!(code(&["tau", "--mu", "abc", "--t", "0.5"]), 3);
    assert_eq!(code(&["tau", "--mu", "0.3"]), 3);
    assert_eq!(code(&["verify", "--panel", "nonsense"]), 3);
    // divergent series
    assert_eq!(code(&["hyp2f1", "--a", "0.3", "--b", "0.4", "--c", "1.2", "--t", "1.5"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["tau", "--mu", "0.3,0.1", "--omega1", "0.2", "--omega2", "0.15", "--t", "0.4,0.3", "--n-max", "6", "--method", "all"];
    for fmt in ["csv", "json"] {
        let files: Vec<_> = (0..2).map(|i| dir.path().join(format!("{fmt}{i}"))).collect();
        for f in &files {
            let mut a = args.to_vec();
            a.extend(["--format", fmt, "--output", f.to_str().unwrap()]);
            assert_eq!(ptau(&a).status.code(), Some(0));
        }
        assert_eq!(std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
    }
}

#[test]
fn csv_has_header_and_digits_env_applies() {
    let out = Command::new(env!("CARGO_BIN_EXE_ptau"))
        .args(["reflections", "--mu", "0.3", "--t", "0.5", "--n-max", "3"])
        .env("PT_DIGITS", "35")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,method,r_re,r_im,rbar_re,rbar_im"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 6);
    let mantissa = first[2].trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(mantissa.len(), 35);
}
