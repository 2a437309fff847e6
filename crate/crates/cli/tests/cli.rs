use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symplectic"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn hilbert_minus_four_prints_the_linear_polynomial() {
    let out = run(&["hilbert", "--format", "text", "--", "-4"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "x - 1728");
}

#[test]
fn json_output_is_byte_stable_and_versioned() {
    let args = ["compare", "--curve1", "[0,0,0,-12167,-559682]", "--curve2",
        "[0,0,0,-16928,840052]", "-p", "7"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "identical invocations must match");
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["consensus"], "anti-symplectic");
}

#[test]
fn frobenius_reproduces_the_reference_matrix() {
    let out = run(&["frobenius", "--curve", "[0,0,0,-3,-6]", "-l", "5", "-p", "19"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["matrix"], serde_json::json!([[9, 0], [1, 9]]));
    assert_eq!(v["result"]["a_l"], -1);
}

#[test]
fn short_form_and_string_coefficients_parse() {
    let out = run(&["invariants", "--curve", "[1, 1]"]);
    assert!(out.status.success());
    let big = run(&["invariants", "--curve", r#"["0","0","0","-362249","165197113"]"#]);
    assert!(big.status.success());
}

#[test]
fn exit_codes_distinguish_outcomes() {
    // No criterion applies: exit 2.
    let na = run(&["compare", "--curve1", "[1,0,1,-5,-8]", "--curve2",
        "[0,0,1,0,-7]", "-p", "5"]);
    assert_eq!(na.status.code(), Some(2));
    // Input error: exit 1 with a machine-readable code on stderr.
    let err = run(&["invariants", "--curve", "[0,0,0,0,0]"]);
    assert_eq!(err.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&err.stderr).unwrap();
    assert_eq!(v["error"]["code"], "singular-model");
    // Ordinary success: exit 0.
    let ok = run(&["classify", "--curve", "[0,0,0,-3,-6]", "-l", "2"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn custom_fixture_catalogue_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    std::fs::write(&path, r#"{"mycurve": [0, 0, 0, -3, -6]}"#).unwrap();
    let out = run(&["frey-scan", "19", "mycurve", "5", "--fixtures",
        path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "Eliminated");
    let missing = run(&["frey-scan", "19", "other", "5", "--fixtures",
        path.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}
