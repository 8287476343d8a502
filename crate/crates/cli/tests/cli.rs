use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str], env: &[(&str, &str)]) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ainfty"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("report is not JSON ({e}): {stdout}"));
    (code, v)
}

fn ainfty(args: &[&str]) -> (i32, Value) {
    run(args, &[])
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assertion(report: &Value, name: &str) -> bool {
    report["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["name"] == name)
        .unwrap_or_else(|| panic!("no assertion {name}"))["pass"]
        .as_bool()
        .unwrap()
}

#[test]
fn verify_heis_passes() {
    let f = fixture("heis_f7");
    let (code, r) = ainfty(&["verify", path_str(&f), "--cinfty"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["pass"], true);
    assert!(assertion(&r, "stasheff") && assertion(&r, "bar_square") && assertion(&r, "cinfty"));
    assert_eq!(r["command"]["name"], "verify");
}

#[test]
fn verify_every_shipped_fixture() {
    for name in ["heis_q", "heis_unital_f7", "s3u_q", "s3u_f7", "zero_q", "heis_z_q", "heis_z_f7"] {
        let f = fixture(name);
        let (code, r) = ainfty(&["verify", path_str(&f)]);
        assert_eq!(code, 0, "{name}: {r}");
    }
    for name in ["heis_tr_f7", "heis_tr_q"] {
        let f = fixture(name);
        let (code, r) = ainfty(&["verify", path_str(&f), "--n-max", "4"]);
        assert_eq!(code, 0, "{name}: {r}");
        assert!(assertion(&r, "morphism"));
    }
}

#[test]
fn word_cap_env_var_bounds_bar_check() {
    let f = fixture("heis_tr_f7");
    let (_, r) = run(&["verify", path_str(&f), "--n-max", "4"], &[]);
    assert_eq!(r["results"]["bar_square"]["max_len"], 4);
    let (code, r) = run(&["verify", path_str(&f), "--n-max", "4"], &[("AINFTY_WORD_CAP", "2")]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["bar_square"]["max_len"], 2);
}

#[test]
fn massey_heis_is_a_single_nonzero_multiple_of_x1y() {
    let f = fixture("heis_f7");
    for extra in [&["--field-enum"][..], &[][..]] {
        let mut args = vec!["massey", path_str(&f), "--classes", "[x1],[x1],[x2]"];
        args.extend_from_slice(extra);
        let (code, r) = ainfty(&args);
        assert_eq!(code, 0, "{r}");
        let values = r["results"]["values"].as_array().unwrap();
        assert_eq!(values.len(), 1);
        let terms = values[0].as_array().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0]["basis"], "[x1y]");
        assert!(["1", "6"].contains(&terms[0]["coeff"].as_str().unwrap()));
        assert_eq!(r["results"]["indeterminacy"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn massey_accepts_closed_representatives() {
    let f = fixture("heis_f7");
    let (a, ra) = ainfty(&["massey", path_str(&f), "--classes", "x1,x1,x2"]);
    let (b, rb) = ainfty(&["massey", path_str(&f), "--classes", "[x1],[x1],[x2]"]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(ra["results"]["values"], rb["results"]["values"]);
    let (code, r) = ainfty(&["massey", path_str(&f), "--classes", "y,x1"]);
    assert_eq!(code, 2, "y is not closed: {r}");
}

#[test]
fn massey_budget_is_enforced() {
    let f = fixture("heis_f7");
    let (code, r) = ainfty(&["massey", path_str(&f), "--classes", "[x1],[x1],[x2]", "--field-enum", "--budget", "10"]);
    assert_eq!(code, 1, "{r}");
    assert!(r["error"]["message"].as_str().unwrap().contains("budget"));
}

#[test]
fn spectral_s3u_d3_matches_massey() {
    let f = fixture("s3u_q");
    let (code, r) = ainfty(&["spectral", path_str(&f), "--twist", "u", "--compare-massey", "1"]);
    assert_eq!(code, 0, "{r}");
    let cmp = r["results"]["massey_comparison"].as_array().unwrap();
    assert!(cmp.iter().all(|c| c["agree"] == true));
    let from_unit = cmp.iter().find(|c| c["p"] == -1).unwrap();
    assert_eq!(from_unit["z"], serde_json::json!([{"basis": "u", "coeff": "1/1"}]));
    assert_eq!(from_unit["via_differential"], serde_json::json!([[0, "1/1"]]));
    let pages = r["results"]["pages"].as_array().unwrap();
    let e3 = pages.iter().find(|p| p["r"] == 3).unwrap();
    assert_eq!(e3["differentials"].as_array().unwrap().len(), 1);
    let e4 = pages.iter().find(|p| p["r"] == 4).unwrap();
    assert!(e4["entries"].as_array().unwrap().is_empty());
    assert_eq!(r["results"]["einfty"]["einfty_dims"], serde_json::json!([0, 0]));
}

#[test]
fn spectral_heis_z_d5() {
    let f = fixture("heis_z_q");
    let (code, r) = ainfty(&["spectral", path_str(&f), "--twist", "h", "--pages", "4..6", "--compare-massey", "2"]);
    assert_eq!(code, 0, "{r}");
    let pages = r["results"]["pages"].as_array().unwrap();
    assert_eq!(pages.iter().map(|p| p["r"].as_u64().unwrap()).collect::<Vec<_>>(), vec![4, 5, 6]);
    let cmp = r["results"]["massey_comparison"].as_array().unwrap();
    assert!(!cmp.is_empty() && cmp.iter().all(|c| c["agree"] == true));
}

#[test]
fn cohomology_plain_and_twisted() {
    let f = fixture("heis_f7");
    let (code, r) = ainfty(&["cohomology", path_str(&f)]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["results"]["dims"], serde_json::json!({"0": 2, "1": 2, "2": 1}));
    let f = fixture("s3u_q");
    let (code, r) = ainfty(&["cohomology", path_str(&f), "--twist", "u"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["results"]["dims"], serde_json::json!({"even": 0, "odd": 0}));
    let (code, _) = ainfty(&["cohomology", path_str(&f)]);
    assert_eq!(code, 0);
}

#[test]
fn transfer_output_reverifies_and_matches_shipped_fixture() {
    let f = fixture("heis_f7");
    let (code, r) = ainfty(&["transfer", path_str(&f), "--n-max", "4"]);
    assert_eq!(code, 0, "{r}");
    let doc = &r["results"]["document"];
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(fixture("heis_tr_f7")).unwrap()).unwrap();
    assert_eq!(doc, &shipped);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tr.json");
    std::fs::write(&out, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    let (code, r) = ainfty(&["verify", out.to_str().unwrap(), "--n-max", "4"]);
    assert_eq!(code, 0, "{r}");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = ainfty(&["verify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "input");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(ainfty(&["verify", bad.to_str().unwrap()]).0, 2);
    let f = fixture("s3u_q");
    assert_eq!(ainfty(&["spectral", path_str(&f), "--twist", "nope"]).0, 2);
    assert_eq!(ainfty(&["spectral", path_str(&f), "--twist", "u", "--pages", "x..2"]).0, 2);
    let status = Command::new(env!("CARGO_BIN_EXE_ainfty")).args(["verify"]).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failing_identity_exits_1_with_witness() {
    // b_1 b_1 (a) = c
    let doc = r#"{
        "field": {"kind": "Fp", "p": 5},
        "basis": [{"name": "a", "degree": 0}, {"name": "b", "degree": 1}, {"name": "c", "degree": 2}],
        "ops": [{"arity": 1, "entries": [
            {"args": ["a"], "value": [{"basis": "b", "coeff": "1"}]},
            {"args": ["b"], "value": [{"basis": "c", "coeff": "1"}]}
        ]}]
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, doc).unwrap();
    let (code, r) = ainfty(&["verify", p.to_str().unwrap(), "--n-max", "2"]);
    assert_eq!(code, 1, "{r}");
    let level = &r["results"]["stasheff"]["levels"][0];
    assert_eq!(level["pass"], false);
    assert_eq!(level["witness"][0], serde_json::json!(["a"]));
    let (code, r) = ainfty(&["cohomology", p.to_str().unwrap()]);
    assert_eq!(code, 1, "{r}");
    assert_eq!(ainfty(&["--no-verify", "cohomology", p.to_str().unwrap()]).0, 1);
}

#[test]
fn odd_twist_is_a_check_failure() {
    let f = fixture("s3u_q");
    let (code, r) = ainfty(&["cohomology", path_str(&f), "--twist", "1"]);
    assert_eq!(code, 1, "{r}");
}
