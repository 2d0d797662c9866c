use std::process::Command;

use serde_json::Value;

use idealc::classifier::Derivation;
use idealc::egorovlab::TreeDocument;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("idealc").chain(args.iter().copied());
    let code = idealc::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn golden_table_has_fifteen_rows() {
    let rows = json(&["golden"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 15);
    for r in rows {
        assert_eq!(r["expected"], r["derived"], "{}", r["name"]);
        let d: Derivation = serde_json::from_value(r["derivation"].clone()).unwrap();
        idealc::classifier::replay(&d).unwrap();
    }
    let (code, text, _) = run(&["golden", "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 15);
}

#[test]
fn eval_antichain() {
    let v = json(&["eval", "--submeasure", "ib", "--set", "0 1 4"]);
    assert_eq!(v["value"], "1");
    let v = json(&["eval", "--submeasure", "ib", "--set", "3,4,5,6"]);
    assert_eq!(v["value"], "4");
    let v = json(&["eval", "--submeasure", "summable:1/(n+1)", "--set", "0 1"]);
    assert_eq!(v["value"], "3/2");
}

#[test]
fn member_fubini_column() {
    let v = json(&["member", "--ideal", "Fin (x) Fin", "--set", "(column 0)", "--budget", "64"]);
    assert_eq!(v["result"]["verdict"], "ProvedIn");
    assert_eq!(v["budget"]["prefix"], 64);
    let v = json(&["member", "--ideal", "Fin (x) Fin", "--set", "(complement (row 0))"]);
    assert_eq!(v["result"]["verdict"], "ProvedOut");
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_idealc"))
        .args(["member", "--ideal", "Summable 1/(n+1)", "--set", "full"])
        .env("IDEALC_BUDGET", "100")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["budget"]["prefix"], 100);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["member", "--ideal", "Fin"]).0, 2);
    let (code, _, err) = run(&["member", "--ideal", "Bogus", "--set", "full"]);
    assert_eq!(code, 2);
    assert!(err.contains("position 0"), "{err}");
    assert_eq!(run(&["eval", "--submeasure", "nope", "--set", "1"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("golden"));
}

#[test]
fn axioms_are_seeded() {
    let a = json(&["axioms", "--submeasure", "edfin", "--seed", "7", "--trials", "50"]);
    let b = json(&["axioms", "--submeasure", "edfin", "--seed", "7", "--trials", "50"]);
    assert_eq!(a, b);
    assert_eq!(a["passed"], true);
    assert_eq!(run(&["axioms", "--submeasure", "edfin"]).0, 2);
}

#[test]
fn pathology_counting() {
    let v = json(&["pathology", "--submeasure", "counting", "--prefix", "6", "--set", "0 2 4"]);
    assert_eq!(v["hull_value"], "3");
    assert_eq!(v["gap"], "0");
    let a = json(&["pathology", "--submeasure", "ib", "--prefix", "7", "--samples", "3", "--seed", "1"]);
    let b = json(&["pathology", "--submeasure", "ib", "--prefix", "7", "--samples", "3", "--seed", "1"]);
    assert_eq!(a, b);
}

#[test]
fn egorov_construct_and_violate() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.json");
    let tree_s = tree.to_str().unwrap();
    json(&["egorov", "construct", "--witness", "ib", "--depth", "4", "--emit", tree_s]);
    let doc: TreeDocument = serde_json::from_str(&std::fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(doc.depth, 4);
    idealc::egorovlab::load(&doc).unwrap();
    let v = json(&["egorov", "violate", "--tree", tree_s, "--set", "[0,1/4)", "--level", "3"]);
    assert_eq!(v["alpha"], "1/4");
    assert_eq!(v["pigeonhole"], true);
    let (code, _, _) = run(&["egorov", "violate", "--tree", tree_s, "--set", "[0,1/4)", "--level", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn egorov_classify() {
    let v = json(&["egorov", "classify", "--ideal", "Meet(RowExt(FinPow 2), Fin (x) FinSets)"]);
    assert_eq!(v["attributes"]["egorov"]["value"], "Yes");
    assert_eq!(v["derivation"]["rule"], "R8");
    let v = json(&["egorov", "classify", "--ideal", "Mazur"]);
    assert_eq!(v["attributes"]["egorov"]["value"], "No");
}

#[test]
fn rk_run_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let report_s = report.to_str().unwrap();
    let v = json(&["rk", "run", "--construction", "solecki-ib", "--level", "3", "--report", report_s]);
    assert_eq!(v["report"]["consistent"], true);
    let v = json(&["rk", "verify", "--report", report_s]);
    assert_eq!(v["reproduced"], true);
    let (code, _, _) = run(&["rk", "run", "--construction", "constant"]);
    assert_eq!(code, 1);
}

#[test]
fn catalogue_lists_everything() {
    let v = json(&["catalogue", "list"]);
    assert_eq!(v["constructions"].as_array().unwrap().len(), 6);
    assert!(v["submeasures"].as_array().unwrap().iter().any(|s| s == "mazur"));
}
