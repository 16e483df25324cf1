use std::process::Command;

fn twophase(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_twophase")).args(args).output().expect("binary runs")
}

fn field<'a>(csv: &'a str, row: usize, column: &str) -> &'a str {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == column).unwrap();
    lines.nth(row).unwrap().split(',').nth(idx).unwrap()
}

#[test]
fn critical_radii_table_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = twophase(&["critical-radii", "--dim", "2", "--mode-k", "5", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(text.lines().count(), 5);
    let r: f64 = field(&text, 0, "r_star_closed").parse().unwrap();
    assert!((r - (1.0f64 / 3.0).powf(0.25)).abs() < 1e-15);
    // 17 significant digits
    assert_eq!(field(&text, 0, "r_star_closed").split('e').next().unwrap().len(), 18);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"dim": 3, "sigma-c": 7.0, "mode-k": 2, "steps": 4}"#).unwrap();
    let out = twophase(&["bifurcation-scan", "--config", config.to_str().unwrap(), "--sigma-c", "0.3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 4);
    assert_eq!(field(&text, 0, "dim"), "3");
    let sigma: f64 = field(&text, 0, "sigma_c").parse().unwrap();
    assert_eq!(sigma, 0.3);
}

#[test]
fn invalid_input_exits_with_validation_code() {
    assert_eq!(twophase(&["trace-branch", "--dim", "5"]).status.code(), Some(2));
    assert_eq!(twophase(&["trace-branch", "--sigma-c", "1"]).status.code(), Some(2));
    assert_eq!(twophase(&["counterexample", "--gamma", "10"]).status.code(), Some(2));
    assert_eq!(twophase(&["critical-radii", "--tol", "-1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"sigma_c": 2.0}"#).unwrap();
    assert_eq!(twophase(&["critical-radii", "--config", config.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn trace_branch_writes_curve_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("branch.csv");
    let out = twophase(&["trace-branch", "--t-max", "0.004", "--steps", "2", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(field(&text, 2, "eta_k").parse::<f64>().unwrap(), 0.004);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["certificate"]["passed"], serde_json::Value::Bool(true));
    assert!(json["diagram"]["tangent"]["relative_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn counterexample_report() {
    let out = twophase(&["counterexample", "--epsilon", "0.1", "--gamma", "1"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((json["r_at_zero"].as_f64().unwrap() - 1.6467).abs() < 1e-3);
    assert_eq!(json["is_ball_about_shifted_center"], serde_json::Value::Bool(false));
}

#[test]
fn identities_pass_at_default_orders() {
    let out = twophase(&["verify-identities", "--epsilon", "auto", "--gamma", "auto"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 3);
}
