use std::process::{Command, Output};

use serde_json::Value;

fn hadamard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamard")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    hadamard(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(hadamard(args).stdout).unwrap()
}

fn structured(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    serde_json::from_str(&stdout(&all)).expect("valid JSON")
}

/// Value of `name: value` in text output.
fn text_field(text: &str, name: &str) -> String {
    let prefix = format!("{name}: ");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no `{name}` in\n{text}")).to_string()
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", "sin(x)+8", "--interval", "pi", "2*pi"]), 0);
    assert_eq!(code(&["check", "x^2*(1-x)^2", "--interval", "0", "1"]), 2);
    assert_eq!(code(&["check", "x^("]), 1);
    // strictly concave
    assert_eq!(code(&["check", "sqrt(x)", "--interval", "1", "2"]), 2);
}

#[test]
fn check_reports_witness() {
    let doc = structured(&["check", "x^2*(1-x)^2", "--interval", "0", "1"]);
    assert_eq!(doc["convex"]["verdict"], "Disproved");
    assert_eq!(doc["convex"]["witness"]["kind"], "NegativeSecondDerivative");
    assert_eq!(doc["nonnegative"]["verdict"], "Proved");
}

#[test]
fn parse_errors_go_to_stderr() {
    let out = hadamard(&["check", "x^("]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8(out.stderr).unwrap().contains("offset 3"));
}

#[test]
fn verify_sine_example() {
    let args = ["verify", "sin(x)+8", "1/x", "--interval", "pi", "2*pi"];
    assert_eq!(code(&args), 0);
    let doc = structured(&args);
    assert_eq!(doc["theorem_holds"], true);
    let mean = doc["bounds"]["mean_integral"].as_f64().unwrap();
    assert!(mean * std::f64::consts::PI <= 2.0 * 10f64.sqrt());
    assert_eq!((doc["u"].as_str(), doc["v"].as_str()), (Some("sin(x)+8"), Some("1/x")));
}

#[test]
fn verify_squares_example() {
    let args = ["verify", "x^2", "(1-x)^2", "--interval", "0", "1"];
    assert_eq!(code(&args), 0);
    let doc = structured(&args);
    assert!((doc["bounds"]["mean_integral"].as_f64().unwrap() - 1.0 / 30.0).abs() < 1e-12);
    assert_eq!(doc["bounds"]["cs_endpoint"].as_f64(), Some(0.5));
    assert_eq!(doc["bounds"]["product_endpoint"].as_f64(), Some(0.0));
    let notes: Vec<&str> = doc["notes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(notes.iter().any(|n| n.contains("exceeds the product endpoint bound 0")), "{notes:?}");
}

#[test]
fn verify_zero_pair() {
    let args = ["verify", "0", "0", "--interval", "0", "1"];
    assert_eq!(code(&args), 0);
    let doc = structured(&args);
    for key in ["midpoint_lower", "endpoint_upper", "product_endpoint", "cs_endpoint", "mean_integral"] {
        assert_eq!(doc["bounds"][key].as_f64(), Some(0.0), "{key}");
    }
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&["verify", "x", "-x", "--interval", "-1", "1"]), 3);
    assert_eq!(code(&["verify", "x", "1/x", "--interval", "0", "1"]), 1);
    assert_eq!(code(&["verify", "x", "x", "--tol", "0"]), 1);
}

#[test]
fn stress_exit_codes() {
    assert_eq!(code(&["stress", "--trials", "1000", "--interval", "0", "1", "--seed", "7"]), 0);
    assert_eq!(code(&["stress", "--trials", "0"]), 1);
    let doc = structured(&["stress", "--trials", "1", "--seed", "0"]);
    assert_eq!(doc["trials"], 1);
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["theorem_violations"], 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["bogus"]), 1);
    assert_eq!(code(&["check", "x", "--interval", "1", "0"]), 1);
    assert_eq!(code(&["check", "x", "--interval", "0", "foo"]), 1);
}

#[test]
fn structured_output_is_byte_stable() {
    let args = ["stress", "--trials", "20", "--interval", "2", "5", "--seed", "3", "--format", "json"];
    assert_eq!(hadamard(&args).stdout, hadamard(&args).stdout);
    let args = ["verify", "exp(x)", "x^2+1", "--format", "structured"];
    assert_eq!(hadamard(&args).stdout, hadamard(&args).stdout);
}

#[test]
fn text_and_structured_agree() {
    let args = ["verify", "sin(x)+8", "1/x", "--interval", "pi", "2*pi"];
    let text = stdout(&args);
    let doc = structured(&args);
    for (name, key) in [("mean of u*v", "mean_integral"), ("cs endpoint bound", "cs_endpoint")] {
        let shown: f64 = text_field(&text, name).parse().unwrap();
        let exact = doc["bounds"][key].as_f64().unwrap();
        assert!((shown - exact).abs() <= 5e-6 * exact.abs(), "{name}: {shown} vs {exact}");
    }
    let text = stdout(&["bounds", "x^2", "(1-x)^2"]);
    assert_eq!(text_field(&text, "mean"), "0.0333333");
    assert_eq!(text_field(&text, "cs endpoint"), "0.5");
}

#[test]
fn parse_prints_canonical_form() {
    assert_eq!(stdout(&["parse", "x^2*(1-x)^2"]).lines().next(), Some("((x^2) * ((1 - x)^2))"));
    let doc = structured(&["parse", "-x + 1"]);
    assert_eq!(doc["canonical"], "((-x) + 1)");
    assert_eq!(doc["differentiable"], true);
}
