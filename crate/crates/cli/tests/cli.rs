use std::process::{Command, Output};

use serde_json::{json, Value};

fn padic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic")).args(args).output().expect("runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

const O2: &str = r#"{"p":2,"n":2,"generators":[["1","0"],["0","1"]]}"#;
const BAND: &str = r#"{"p":2,"n":1,"generators":[["1","1"],["0","4"]]}"#;

#[test]
fn dist_of_diagonal_pair() {
    let s = r#"{"p":2,"n":2,"generators":[["1/2","0"],["0","4"]]}"#;
    let out = padic(&["dist", O2, s]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), json!({ "k": [1, -2] }));
}

#[test]
fn dist_reads_files() {
    let dir = std::env::temp_dir().join(format!("padic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (r, s) = (dir.join("R.json"), dir.join("S.json"));
    std::fs::write(&r, O2).unwrap();
    std::fs::write(&s, r#"{"p":2,"n":2,"generators":[["1","0"],["1","2"]]}"#).unwrap();
    let out = padic(&["dist", r.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(stdout_json(&out), json!({ "k": [0, -1] }));

    let bundle = dir.join("ops.json");
    std::fs::write(&bundle, format!("[{O2}, {O2}]")).unwrap();
    let result = dir.join("out.json");
    let out = padic(&["--json", bundle.to_str().unwrap(), "meet", "--out", result.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(written["generators"], json!([["1", "0"], ["0", "1"]]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn lattice_commands() {
    let l = r#"{"p":2,"n":2,"generators":[["1","1"],["0","2"]]}"#;
    assert_eq!(stdout_json(&padic(&["norm", l, r#"["2","2"]"#])), json!({ "norm": -1 }));
    assert_eq!(stdout_json(&padic(&["norm", l, r#"["0","0"]"#])), json!({ "norm": "-inf" }));
    assert_eq!(stdout_json(&padic(&["member", l, r#"["1","1"]"#])), json!({ "member": true }));
    assert_eq!(stdout_json(&padic(&["member", l, r#"["0","1"]"#])), json!({ "member": false }));
    let dual = stdout_json(&padic(&["dual", l]));
    let back = stdout_json(&padic(&["dual", &dual.to_string()]));
    assert_eq!(back, stdout_json(&padic(&["canon", l])));
    let over = r#"{"p":2,"n":2,"generators":[["1/2","1/2"],["0","1"]]}"#;
    assert_eq!(stdout_json(&padic(&["sum", O2, over])), stdout_json(&padic(&["canon", over])));
}

#[test]
fn relation_commands() {
    let parts = stdout_json(&padic(&["rel-parts", BAND]));
    assert_eq!(parts["dom"]["generators"], json!([["1"]]));
    assert_eq!(parts["indef"]["generators"], json!([["4"]]));
    let o1 = r#"{"p":2,"n":1,"generators":[["1"]]}"#;
    assert_eq!(stdout_json(&padic(&["rel-act", BAND, o1]))["generators"], json!([["1"]]));
    assert_eq!(stdout_json(&padic(&["rel-compose", BAND, BAND])), stdout_json(&padic(&["rel-compose", BAND, BAND])));
    let structure = stdout_json(&padic(&["rel-structure", BAND]));
    assert_eq!(structure["decomposition_holds"], json!(true));
    let graph = stdout_json(&padic(&["graph-approx", r#"{"p":2,"rows":[["2"]]}"#, "--j", "3"]));
    assert_eq!(graph["threshold"], json!(1));
    assert_eq!(graph["action"]["generators"], json!([["2"]]));
}

#[test]
fn check_theorem_passes() {
    let out = padic(&["check-theorem", "--p", "2", "--n", "2", "--bound", "3", "--trials", "1000", "--seed", "7"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["trials"], json!(1000));
    assert_eq!(report["violations"], json!(0));
    assert_eq!(report["first_counterexample"], Value::Null);
    assert!(report["strict_compressions"].as_u64().unwrap() > 50);
}

#[test]
fn check_lemmas_and_oracle_diff_pass() {
    let out = padic(&["check-lemmas", "--trials", "20", "--seed", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["violations"], json!(0));

    let out = padic(&["oracle-diff", "--p", "2", "--n", "1", "--window", "2", "--trials", "500", "--seed", "7"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["violations"], json!(0));
    assert_eq!(report["reports"].as_array().unwrap().len(), 5);
}

#[test]
fn output_is_deterministic() {
    let args = ["check-theorem", "--trials", "50", "--seed", "11"];
    assert_eq!(padic(&args).stdout, padic(&args).stdout);
}

#[test]
fn errors_name_the_field() {
    let bad_p = padic(&["check-theorem", "--p", "4"]);
    assert_eq!(bad_p.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_p.stderr).contains("`p`"));

    let p3 = r#"{"p":3,"n":2,"generators":[["1","0"],["0","1"]]}"#;
    let mismatch = padic(&["dist", O2, p3]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("`S.p`"));

    let short = r#"{"p":2,"n":2,"generators":[["1","0"],["1"]]}"#;
    let err = padic(&["canon", short]);
    assert!(!err.status.success());
    assert!(String::from_utf8_lossy(&err.stderr).contains("generators[1]"));

    let missing = padic(&["dist", O2]);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("`S`"));

    let flag = padic(&["check-theorem", "--bound", "abc"]);
    assert!(!flag.status.success());
    assert!(String::from_utf8_lossy(&flag.stderr).contains("--bound"));
}
