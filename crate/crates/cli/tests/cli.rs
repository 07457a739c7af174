use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_titsweyl"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8"))
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, s) = run(args);
    (code, serde_json::from_str(&s).unwrap_or_else(|e| panic!("not JSON ({e}): {s}")))
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).expect("golden file")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    std::fs::write(&p, contents).expect("write scratch file");
    p
}

#[test]
fn spec_sl2_matches_golden() {
    let (code, out) = run(&["spec", "sl:2"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("spec_sl2.json"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 7);
}

#[test]
fn dot_and_rank_space_match_golden() {
    assert_eq!(run(&["dot", "sl:2"]), (0, golden("dot_sl2.dot")));
    assert_eq!(run(&["--json-pretty", "rank-space", "sl:2"]), (0, golden("rank_space_sl2.json")));
}

#[test]
fn model_flag_equals_positional() {
    assert_eq!(run(&["spec", "--model", "sl:2"]), run(&["spec", "sl:2"]));
}

#[test]
fn weyl_sl3_is_nonabelian_of_order_6() {
    let (code, v) = json(&["weyl", "sl:3"]);
    assert_eq!(code, 0);
    assert_eq!(v["order"], 6);
    assert_eq!(v["group"], true);
    assert_eq!(v["abelian"], false);
}

#[test]
fn tits_points_sl2() {
    let (_, v) = json(&["tits-points", "sl:2", "--m", "2"]);
    assert_eq!(v["count"], 4);
    assert_eq!(v["closed"], true);
    let (_, v) = json(&["tits-points", "sl:2"]);
    assert_eq!(v["count"], 1);
    let (code, v) = json(&["tits-points", "sl:2", "--m", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "invalid");
}

#[test]
fn semiring_points() {
    let (code, v) = json(&["points", "--model", "sl:2", "--semiring", "tropical", "--check", "[0,5,7,0]"]);
    assert_eq!(code, 0);
    assert_eq!(v["is_point"], true);
    let (_, v) = json(&["points", "--model", "sl:2", "--semiring", "naturals", "--check", "[[1,1],[0,1]]"]);
    assert_eq!(v["is_point"], true);
    let (_, v) = json(&["points", "--model", "sl:2", "--semiring", "naturals", "--check", "[1,1,1,1]"]);
    assert_eq!(v["is_point"], false);
    let (_, v) = json(&["points", "sl:2", "--semiring", "z/2", "--count"]);
    assert_eq!(v["count"], 6);
    let (_, v) = json(&["points", "sl:2", "--semiring", "b1", "--pairs", "30"]);
    assert_eq!(v["failures"], 0);
    let (code, v) = json(&["points", "sl:2", "--semiring", "octonions"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn missing_aux_is_reported() {
    let (code, v) = json(&["points", "gl:2", "--check", "[1,0,0,1]"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "missing_aux");
    let (code, v) = json(&["points", "gl:2", "--check", r#"{"entries":[1,0,0,1],"aux":1}"#]);
    assert_eq!((code, v["is_point"].clone()), (0, Value::Bool(true)));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let (code, v) = json(&["spec", "nosuch:3"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "unknown_model");
    let (code, v) = json(&["spec", "sl:4", "--cap", "8"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "cap_exceeded");
    let (code, v) = json(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = json(&["spec"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("--json-pretty") && text.contains("RAYON_NUM_THREADS"));
}

#[test]
fn entailment_uses_budget() {
    let t2_rel = r#"{"lhs":[[0,[1,1,0,1]]],"rhs":[[0,[0,2,1,0]],[0,[0,1,0,0]]]}"#;
    let (_, v) = json(&["spec", "sl:2", "--budget", "3", "--entails", t2_rel]);
    assert_eq!(v["entailment"]["result"], "yes");
    let (_, v) = json(&["spec", "sl:2", "--entails", r#"{"lhs":[[0,[1,0,0,0]]],"rhs":[[0,[0,1,0,0]]]}"#]);
    assert_eq!(v["entailment"]["result"], "unknown");
}

#[test]
fn presentation_files() {
    let p = scratch(
        "a2.json",
        r#"{"generators":["x","y"],"inverted":[],"coeff_order":1,"relations":[]}"#,
    );
    let sel = format!("pres:{}", p.display());
    let (code, v) = json(&["spec", &sel]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], 4);
    let (code, v) = json(&["weyl", &sel]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn oracle_is_deterministic_and_agrees() {
    let args = ["oracle", "psl2-conj", "--samples", "300", "--seed", "7"];
    let (code, first) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(run(&args).1, first);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["agrees"], true);
    assert_eq!(v["report"]["seed"], 7);
    assert_eq!(v["report"]["patterns"].as_array().unwrap().len(), 7);
}

#[test]
fn oracle_family_files() {
    let fam = scratch(
        "diag.fam",
        "# diagonal torus\nparams: x, y\nconstraints: x != 0, y != 0\nmatrix: [[x, 0], [0, y]]\n",
    );
    let (code, v) = json(&["oracle", "--family", fam.to_str().unwrap(), "--fields", "Q,F3", "--samples", "50"]);
    assert_eq!(code, 0);
    let pats = v["report"]["patterns"].as_array().unwrap();
    assert_eq!(pats.len(), 1);
    assert_eq!(pats[0]["bits"], "0110");
    let bad = scratch("bad.fam", "params: x\nconstraints: x = = 1\nmatrix: [[x]]\n");
    let (code, v) = json(&["oracle", "--family", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("at 27"));
}

#[test]
fn verify_suites() {
    let (code, v) = json(&["verify", "properties", "--models"]);
    assert_eq!((code, v["passed"].clone()), (0, Value::Bool(true)));
    assert_eq!(v["checks"].as_array().unwrap().len(), 0);
    let (code, v) = json(&["verify", "properties", "--models", "sl:2,psl2-adj"]);
    assert_eq!(code, 0, "{v}");
    let (code, v) = json(&["verify", "paper-counts"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["checks"].as_array().unwrap().len() > 30);
    let (code, v) = json(&["verify", "oracle"]);
    assert_eq!(code, 0, "{v}");
}
