use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use iwasawa_cyc::tables::{case_files, regenerate_tables};
use iwasawa_cyc::{analyze, load_case, validate, CaseFile, Options};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iwasawa-cyc"))
}

fn case(name: &str) -> CaseFile {
    load_case(&corpus().join(name)).unwrap()
}

fn write_case(dir: &Path, name: &str, case: &CaseFile) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, case.to_json()).unwrap();
    path
}

#[test]
fn every_bundled_case_is_valid_and_round_trips() {
    let files = case_files(&corpus()).unwrap();
    assert!(files.len() >= 17);
    for f in files {
        let c = load_case(&f).unwrap();
        validate(&c, &Options::default()).unwrap_or_else(|v| panic!("{}: {v:?}", f.display()));
        let back = CaseFile::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c, "{}", f.display());
        assert_eq!(back.to_json(), c.to_json());
    }
}

#[test]
fn split_prime_is_rejected() {
    let mut c = case("d61.json");
    c.p = 5;
    c.d = 1;
    c.minardi = None;
    c.tower = Default::default();
    let v = validate(&c, &Options::default()).unwrap_err();
    assert!(v.iter().any(|x| x.path == "d" && x.reason.contains("p splits in K")), "{v:?}");
}

#[test]
fn growth_formula_violation_is_reported() {
    let mut c = case("d12394.json");
    c.finite_level = Some(iwasawa_cyc::schema::FiniteLevelBlock {
        n: 1,
        class_group: vec![2, 2],
        basis_labels: Vec::new(),
        s_action: [[iwasawa_cyc::schema::Int(0); 2]; 2],
    });
    let v = validate(&c, &Options::default()).unwrap_err();
    assert!(v.iter().any(|x| x.path == "finite_level.class_group" && x.reason.contains("growth")), "{v:?}");
}

#[test]
fn large_integers_travel_as_strings() {
    let text = r#"{"schema_version":"1","p":3,"d":12394,"class_group_K":[2,1],"lambda_c":2,
        "iwasawa_poly":{"precision":30,"c1":"123476696115","c0":"9007199254740993"}}"#;
    let c = CaseFile::from_json(text).unwrap();
    assert_eq!(c.iwasawa_poly.as_ref().unwrap().c0.0, 9_007_199_254_740_993);
    assert!(c.to_json().contains("\"9007199254740993\""));
    assert!(c.to_json().contains("\"c1\": 123476696115"));
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"schema_version":"1","p":3,"d":61,"class_group_K":[1],"lambda_c":1,"colour":"red"}"#;
    assert!(CaseFile::from_json(text).is_err());
}

#[test]
fn analysis_is_deterministic() {
    let opts = Options::default();
    let once = serde_json::to_string(&regenerate_tables(&corpus(), &opts).unwrap()).unwrap();
    let twice = serde_json::to_string(&regenerate_tables(&corpus(), &opts).unwrap()).unwrap();
    assert_eq!(once, twice);
    let a = bin().args(["--json-report", "tables"]).arg(corpus()).output().unwrap();
    let b = bin().args(["--json-report", "tables"]).arg(corpus()).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn tables_are_ordered_by_table_then_d() {
    let rows = regenerate_tables(&corpus(), &Options::default()).unwrap();
    let keys: Vec<_> = rows.iter().map(|r| (r.table.clone().unwrap_or_else(|| "~".into()), r.d)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn exit_codes() {
    let run = |args: &[&str], file: &Path| bin().args(args).arg(file).output().unwrap().status.code();
    assert_eq!(run(&["analyze"], &corpus().join("d12394.json")), Some(0));
    assert_eq!(run(&["analyze"], &corpus().join("d42619.json")), Some(0));
    assert_eq!(run(&["analyze"], &corpus().join("d3886.json")), Some(2));
    assert_eq!(run(&["validate"], &corpus().join("d2437.json")), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let mut bad = case("d61.json");
    bad.p = 5;
    bad.d = 1;
    let bad = write_case(dir.path(), "bad.json", &bad);
    assert_eq!(run(&["analyze"], &bad), Some(3));
    assert_eq!(run(&["validate"], &bad), Some(3));

    // stated n1 contradicts the ray-class derivation
    let mut clash = case("d12394.json");
    clash.tower.n1 = Some(iwasawa_cyc::schema::Derivable::Given(1));
    let clash = write_case(dir.path(), "clash.json", &clash);
    assert_eq!(run(&["analyze"], &clash), Some(4));

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(run(&["analyze"], &garbage), Some(3));
}

#[test]
fn json_report_of_validation_lists_paths() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = case("d61.json");
    bad.p = 5;
    bad.d = 1;
    let bad = write_case(dir.path(), "bad.json", &bad);
    let out = bin().args(["--json-report", "validate"]).arg(&bad).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["violations"].as_array().unwrap().iter().any(|x| x["path"] == "d"));
}

#[test]
fn precision_override_truncates_the_polynomial() {
    let c = case("d12394.json");
    let full = analyze(&c, &Options::default()).unwrap();
    assert_eq!(full.computed_splitting.as_ref().unwrap().ord_diff, 3);
    let short = analyze(&c, &Options { precision_override: Some(3) }).unwrap();
    assert!(short.computed_splitting.is_none());
    assert!(short.trace.iter().any(|t| t.contains("needs more digits")), "{:?}", short.trace);

    let too_many = analyze(&c, &Options { precision_override: Some(9) }).unwrap_err();
    assert_eq!(too_many.exit_code(), 3);
    let code = bin().args(["--precision-override", "9", "analyze"]).arg(corpus().join("d12394.json")).output().unwrap().status;
    assert_eq!(code.code(), Some(3));
}

#[test]
fn classify_reports_k() {
    let out = bin().args(["--json-report", "classify"]).arg(corpus().join("d2437.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k_candidates"], serde_json::json!([0]));
}

#[test]
fn oracle_verbs_run() {
    let ok = |args: &[&str]| bin().arg("oracle").args(args).output().unwrap().status.code();
    assert_eq!(ok(&["classes", "--c1", "90", "--c0", "189"]), Some(0));
    assert_eq!(ok(&["koike", "--c1", "9", "--c0", "9"]), Some(0));
    assert_eq!(ok(&["fitting", "--c1", "90", "--c0", "189", "--k", "1", "--trials", "10"]), Some(0));
    assert_eq!(ok(&["fitting", "--c1", "90", "--c0", "189", "--k", "1", "--trials", "10", "--corrupt"]), Some(4));
    assert_eq!(ok(&["mainlem", "--c1", "-15", "--c0", "36", "--trials", "10"]), Some(0));
}
