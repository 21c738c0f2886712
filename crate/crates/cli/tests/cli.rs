use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn baselab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baselab"))
        .args(args)
        .env_remove("BASELAB_MAX_ENUM")
        .output()
        .expect("run baselab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = baselab(&all);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(&out)));
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v}");
    (code(&out), v)
}

#[test]
fn derive_exit_codes() {
    assert_eq!(code(&baselab(&["derive", "--base", &data("socrates.base"), "m_s"])), 0);
    assert_eq!(code(&baselab(&["derive", "--base", &data("parent.base"), "old"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.base");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(code(&baselab(&["derive", "--base", empty.to_str().unwrap(), "p"])), 1);
    let broken = dir.path().join("broken.base");
    std::fs::write(&broken, "rule p => .").unwrap();
    let out = baselab(&["derive", "--base", broken.to_str().unwrap(), "p"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1:"));
}

#[test]
fn derive_trace() {
    let out = baselab(&["derive", "--base", &data("socrates.base"), "m_s", "--trace"]);
    let text = stdout(&out);
    assert!(text.contains("by rule h_s => m_s."), "{text}");
    assert!(text.contains("by fact h_s."), "{text}");
}

#[test]
fn validity_and_countermodels() {
    assert_eq!(code(&baselab(&["valid", "--basis", "b1", "((p -o q) -o p) -o p"])), 0);
    let unbounded = ["--basis", "b2", "--max-rules", "unbounded", "--max-premises", "1"];
    let mut args = vec!["valid"];
    args.extend(unbounded);
    args.push("p + (p -o zero)");
    assert_eq!(code(&baselab(&args)), 1);
    args[0] = "countermodel";
    let out = baselab(&args);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("oplus clause fails"), "{text}");
    baselab::parse_base(&text).expect("countermodel output is a base file");
    assert_eq!(code(&baselab(&["countermodel", "p -o p"])), 1);
}

#[test]
fn lottery_entailment() {
    let (status, v) = json_report(&["support", "--base", &data("lottery.base"), "--basis", "b2", "--hyp", "t1+t2+t3", "sup"]);
    assert_eq!(status, 0);
    assert_eq!(v["verdict"], "entailed");
    let (status, _) = json_report(&["entails", "--base", &data("lottery.base"), "--basis", "b1", "--max-rules", "5", "--max-premises", "1", "--hyp", "t1+t2", "t3"]);
    assert_eq!(status, 1);
}

#[test]
fn translation() {
    let out = baselab(&["translate", "to-formula", "rule [p] q => c."]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "(p -> q) -> c"));
    let out = baselab(&["translate", "to-base", "(p & q) -> c"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "rule p, q => c."));
    assert_eq!(code(&baselab(&["translate", "to-base", "p -o q"])), 2);
    assert_eq!(code(&baselab(&["translate", "to-formula", ""])), 2);
}

#[test]
fn oracle_and_compare() {
    assert_eq!(code(&baselab(&["oracle", "--logic", "classical", "((p -o q) -o p) -o p"])), 0);
    assert_eq!(code(&baselab(&["oracle", "--logic", "intuitionistic", "((p -o q) -o p) -o p"])), 1);
    let (status, v) = json_report(&["compare", "--basis", "b1", "--corpus", &data("corpus.txt")]);
    assert_eq!(status, 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    assert_eq!(code(&baselab(&["compare", "p -> q"])), 2);
    let (status, v) = json_report(&["compare", "--basis", "b2", "--max-premises", "1", "--max-rules", "unbounded", "--fresh", "0", "((p -o q) -o p) -o p", "p -o p"]);
    assert_eq!(status, 0, "{v}");
}

#[test]
fn json_reports_are_reproducible() {
    let args = ["valid", "--basis", "b2", "p + q -o q + p"];
    let strip = |mut v: Value| {
        v["stats"]["wall_ms"] = Value::from(0);
        v
    };
    let (_, a) = json_report(&args);
    let (_, b) = json_report(&args);
    assert_eq!(strip(a), strip(b));
    for args in [
        &["derive", "--base", &data("socrates.base"), "m_s"][..],
        &["countermodel", "--basis", "b1", "p -o q"][..],
        &["translate", "to-base", "p & (p -> q)"][..],
        &["oracle", "p -o p"][..],
        &["support", "--basis", "b1", "--strategy", "recursive", "p | (p -o zero)"][..],
    ] {
        json_report(args);
    }
}

#[test]
fn enumeration_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_baselab"))
        .args(["valid", "p -o p"])
        .env("BASELAB_MAX_ENUM", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn bad_configuration() {
    assert_eq!(code(&baselab(&["valid", "--max-rules", "0", "p"])), 2);
    assert_eq!(code(&baselab(&["valid", "--strategy", "fastest", "p"])), 2);
    assert_eq!(code(&baselab(&["valid", "--vocab", "p", "q"])), 2);
    assert_eq!(code(&baselab(&["valid", "p -o"])), 2);
}
