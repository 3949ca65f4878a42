use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracepoly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn poly_prints_trace_polynomial() {
    let o = run(&["poly", "bab", "--order2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("p           -β*γ + γ^2"), "{}", stdout(&o));
}

#[test]
fn poly_quaternion_of_a_squared() {
    let o = run(&["poly", "a^2"]);
    assert!(stdout(&o).contains("quaternion  (1/2*x + 1, 1/2*x, 0, 0)"), "{}", stdout(&o));
}

#[test]
fn poly_json_has_checks() {
    let o = run(&["poly", "b a^2 b^-1 a", "--json", "--uv"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"]["norm_ok"], true);
    assert_eq!(v["checks"]["trace_ok"], true);
    assert_eq!(v["uv"]["algebra"], "quv");
}

#[test]
fn table_rows_match() {
    let o = run(&["poly", "--table1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 10);
    assert!(!out.contains("MISMATCH"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["poly", "b q"]).status.code(), Some(2));
    assert_eq!(run(&["discrete", "--beta", "x", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--beta", "0", "--resolution", "0"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = run(&["verify", "--samples", "40", "--seed", "7", "--json"]);
    let b = run(&["verify", "--samples", "40", "--seed", "7", "--json"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_with_no_samples_warns() {
    let o = run(&["verify", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn injected_sign_flip_is_caught() {
    let o = run(&["verify", "--samples", "60", "--inject-fault", "sign-flip"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAILED"));
}

#[test]
fn certificate_exit_code() {
    let o = run(&["discrete", "--beta", "0", "--gamma", "0.5"]);
    assert_eq!(o.status.code(), Some(10));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "jorgensen");
    let o = run(&["discrete", "--beta", "0", "--gamma", "2", "--depth", "8", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("inconclusive"));
}

#[test]
fn discrete_word_tests() {
    let o = run(&["discrete", "--beta", "0.3", "--gamma", "1.3", "--word", "babab", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["multiple_root"], true);
}

#[test]
fn units_degree_two() {
    let o = run(&["units", "--max-degree", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r["in_order"] == true));
}

#[test]
fn scan_writes_csv_and_raster() {
    let dir = std::env::temp_dir().join(format!("tracepoly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("roots.csv");
    let pgm = dir.join("grid.pgm");
    let o = run(&[
        "scan",
        "--beta",
        "0",
        "--max-syllables",
        "4",
        "--out",
        csv.to_str().unwrap(),
        "--resolution",
        "12x10",
        "--depth",
        "10",
        "--budget",
        "50",
        "--raster",
        pgm.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"]["resolution"], serde_json::json!([12, 10]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("re,im,word,multiplicity"));
    assert_eq!(text.lines().count() - 1, v["roots"].as_array().unwrap().len());
    assert!(dir.join("grid.json").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn arith_screen() {
    let o = run(&["arith", "--minpoly", "1,1,0,-1", "--v", "1,0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let o = run(&["arith", "--minpoly", "1,0,-1,-1", "--v", "1,0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn quaternion_ops() {
    let o = run(&["quat", "mul", "w2", "w3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["quat", "in-order", "w3", "--uv", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["member"], true);
    let o = run(&["quat", "norm", "[b,a]"]);
    assert_eq!(stdout(&o).trim(), "1");
    let shown = run(&["quat", "show", "w1", "--json"]);
    let back = run(&["quat", "show", stdout(&shown).trim(), "--json"]);
    assert_eq!(shown.stdout, back.stdout);
    assert_eq!(run(&["quat", "conj", "w1", "w2"]).status.code(), Some(2));
}
