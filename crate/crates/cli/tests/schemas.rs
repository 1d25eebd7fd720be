use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .join(name);
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&v).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(validator: &jsonschema::Validator, v: &Value) {
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{v}\n{}", errors.join("\n"));
}

fn lop(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_lop"))
        .args(args)
        .env_remove("LOP_PRELUDE")
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
    )
}

#[test]
fn eval_json_matches_schema() {
    let v = schema("limit-result.schema.json");
    for args in [
        vec![
            "eval",
            "--obs",
            "values-upto-beta",
            "--json",
            "-e",
            r"(\x.(x x (+) T)) (\x.(x x (+) T))",
        ],
        vec!["eval", "--json", "--max-steps", "5", "-e", "D D"],
        vec![
            "eval",
            "--calculus",
            "cbn",
            "--obs",
            "hnf-upto-beta",
            "--json",
            "-e",
            r"(T (+) F) (D D)",
        ],
        vec![
            "eval",
            "--calculus",
            "bang",
            "--obs",
            "normal-form-singletons",
            "--json",
            "-e",
            r"(\a. a) (x (+) y)",
        ],
        vec![
            "eval",
            "--obs",
            "values-upto-beta",
            "--join-fuel",
            "1",
            "--max-steps",
            "4",
            "--json",
            "-e",
            r"(\x. O3 O3) (+) (\x. O3 O3 O3)",
        ],
    ] {
        let (_, out) = lop(&args);
        assert_valid(&v, &serde_json::from_str(&out).unwrap());
    }
}

#[test]
fn traces_match_schema() {
    let trace = schema("trace.schema.json");
    let md = schema("multidist.schema.json");
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    lop(&[
        "eval",
        "--epsilon",
        "1/16",
        "--trace-out",
        a.to_str().unwrap(),
        "-e",
        r"(\x.(x x (+) T)) (\x.(x x (+) T))",
    ]);
    lop(&[
        "step",
        "--calculus",
        "bang",
        "--trace",
        b.to_str().unwrap(),
        "--pick",
        "0",
        "-e",
        r"(\!a. a) !(x (+) y)",
    ]);
    lop(&["step", "--trace", b.to_str().unwrap(), "--pick", "0"]);
    for p in [a, b] {
        let v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        assert_valid(&trace, &v);
        for s in v["states"].as_array().unwrap() {
            assert_valid(&md, s);
        }
    }
}

#[test]
fn check_lines_match_schema() {
    let v = schema("check-report.schema.json");
    for args in [
        vec!["check", "regressions"],
        vec!["check", "confluence", "--calculus", "bang", "--size", "6"],
        vec![
            "check",
            "standardize",
            "--calculus",
            "cbn",
            "--seed",
            "2",
            "--count",
            "10",
        ],
        vec!["check", "simulate", "--calculus", "cbv", "--size", "4"],
        vec!["check", "postpone", "--size", "4"],
    ] {
        let (_, out) = lop(&args);
        for line in out.lines() {
            assert_valid(&v, &serde_json::from_str(line).unwrap());
        }
    }
}

#[test]
fn translate_json_matches_schema() {
    let v = schema("translation.schema.json");
    let (code, out) = lop(&["translate", "--from", "cbn", "--json", "-e", r"\x. x (+) y"]);
    assert_eq!(code, 0);
    assert_valid(&v, &serde_json::from_str(&out).unwrap());
}
