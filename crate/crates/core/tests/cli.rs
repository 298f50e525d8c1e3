use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

use symdet::decompose::{replay, SubstitutionScript};
use symdet::field::FieldDescriptor;
use symdet::golden::worked_pencil;
use symdet::poly::parse;
use symdet::schur::SymmetricPencil;

fn symdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdet"))
        .args(args)
        .output()
        .unwrap()
}

fn symdet_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_symdet"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn build_worked_example_with_symbolic_check() {
    let out = symdet(&[
        "build",
        "z1 + z2*z3",
        "--field",
        "q",
        "--verify",
        "symbolic",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        SymmetricPencil::from_json(&v["pencil"]).unwrap(),
        worked_pencil()
    );
    assert_eq!(v["size_trace"], serde_json::json!([1, 4]));
    assert_eq!(v["strategy_trace"], serde_json::json!(["Invertible"]));
    assert_eq!(v["verification"]["pass"], true);
    assert_eq!(v["verification"]["certificate"], "formal");
}

#[test]
fn affine_input_is_one_by_one() {
    let v = json(&symdet(&["build", "x", "--field", "q"]));
    assert_eq!(v["pencil"]["size"], 1);
    assert!(v.get("verification").is_none());
}

#[test]
fn characteristic_two_is_a_usage_error() {
    let out = symdet(&["build", "x*y + z", "--field", "fp:2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("xy + z"));
}

#[test]
fn usage_errors_are_single_line_json() {
    for args in [
        vec!["build", "x y", "--field", "q"],
        vec!["build", "x", "--field", "fp:9"],
        vec!["build", "x", "--strategy", "nope"],
        vec!["build", "x", "--verify", "sampled:"],
        vec!["frobnicate"],
        vec!["example", "nope"],
    ] {
        let out = symdet(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().count(), 1, "{args:?}");
        assert!(serde_json::from_str::<Value>(&text).unwrap()["error"].is_string());
    }
}

#[test]
fn verification_failure_exits_two() {
    let dir = std::env::temp_dir().join(format!("symdet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = symdet(&["build", "x*y + 1", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let ok = symdet(&["verify", "x*y + 1", "--pencil", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["pass"], true);

    let bad = symdet(&[
        "verify",
        "x*y + 2",
        "--pencil",
        path.to_str().unwrap(),
        "--verify",
        "sampled:20",
        "--seed",
        "4",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let v = json(&bad);
    assert_eq!(v["pass"], false);
    assert!(v["witness"]["point"].is_object());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_reads_pencil_from_stdin() {
    let report = symdet(&["build", "a^2 - b", "--field", "fp:7"]);
    let text = String::from_utf8(report.stdout).unwrap();
    let out = symdet_stdin(
        &[
            "verify",
            "a^2 - b",
            "--field",
            "fp:7",
            "--pencil",
            "-",
            "--verify",
            "exhaustive",
        ],
        &text,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["samples"], 49);
}

#[test]
fn polynomial_from_stdin() {
    let out = symdet_stdin(&["build", "-", "--verify", "symbolic"], "x^2 + 1\n");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verification"]["pass"], true);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "build",
        "x^2*y - 3*y*z + 5/2",
        "--verify",
        "sampled:30",
        "--seed",
        "11",
    ];
    let a = symdet(&args);
    let b = symdet(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn decompose_output_replays() {
    for (text, field) in [("x^3 - 2*x*y + y^2*z", "q"), ("a*b*c + a^2 + 4", "fp:5")] {
        let out = symdet(&["decompose", text, "--field", field]);
        assert_eq!(out.status.code(), Some(0));
        let script = SubstitutionScript::from_json(&json(&out)).unwrap();
        let f = FieldDescriptor::parse_spec(field).unwrap();
        assert_eq!(replay(&script).unwrap(), parse(text, f).unwrap());
    }
}

#[test]
fn example_bundle_verifies() {
    let out = symdet(&["example", "hmv-sec4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["input"], "z1 + z2*z3");
    let text = v.to_string();
    let check = symdet_stdin(&["verify", "z1 + z2*z3", "--pencil", "-"], &text);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn pretty_output_shows_matrices() {
    let out = symdet(&["build", "z1 + z2*z3", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("A0 ="));
    assert!(text.contains("A[z3] ="));
}

#[test]
fn help_exits_zero() {
    assert_eq!(symdet(&["--help"]).status.code(), Some(0));
}
