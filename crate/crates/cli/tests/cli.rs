use std::path::Path;
use std::process::{Command, Output};

fn zmoment(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zmoment")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = zmoment(&["zeta", "--random", "6", "--seed", "11", "--workers", "1"]);
    let b = zmoment(&["zeta", "--random", "6", "--seed", "11", "--workers", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let c = zmoment(&["zeta", "--random", "6", "--seed", "12"]);
    assert_ne!(stdout(&a), stdout(&c));

    let m1 = zmoment(&["moment", "--mollifier", "moebius", "--M", "4", "--T", "300", "--workers", "1"]);
    let m3 = zmoment(&["moment", "--mollifier", "moebius", "--M", "4", "--T", "300", "--workers", "3"]);
    assert_eq!(m1.status.code(), Some(0), "{}", stderr(&m1));
    assert_eq!(stdout(&m1), stdout(&m3));
}

#[test]
fn cache_hit_replays_without_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache = cache.to_str().unwrap();
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    let args = |out: &Path| -> Vec<String> {
        ["kernel", "--lambda", "400", "--t2", "600", "--cache", cache, "--out", out.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect()
    };
    let first = Command::new(env!("CARGO_BIN_EXE_zmoment")).args(args(&out1)).output().unwrap();
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let second = Command::new(env!("CARGO_BIN_EXE_zmoment")).args(args(&out2)).output().unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert!(stderr(&second).contains("cache hit"), "{}", stderr(&second));

    let m1: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out1.join("manifest.json")).unwrap()).unwrap();
    let m2: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out2.join("manifest.json")).unwrap()).unwrap();
    assert!(m1["node_evaluations"].as_u64().unwrap() > 0);
    assert_eq!(m2["node_evaluations"].as_u64(), Some(0));
    assert_eq!(m2["cache_hit"], true);
    assert_eq!(m1["key"], m2["key"]);
    assert_eq!(
        std::fs::read_to_string(out1.join("kernel.csv")).unwrap(),
        std::fs::read_to_string(out2.join("kernel.csv")).unwrap()
    );
    assert_eq!(std::fs::read_to_string(dir.path().join("cache.jsonl")).unwrap().lines().count(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(zmoment(&["zeta", "--check-functional", "--s", "2"]).status.code(), Some(0));
    assert_eq!(zmoment(&["kernel", "--t=-300"]).status.code(), Some(0));
    // a check that cannot hold
    assert_eq!(zmoment(&["moment", "--T", "100", "--max-rel-error", "1e-9"]).status.code(), Some(1));
    // configuration errors
    assert_eq!(zmoment(&["kernel", "--lambda", "5"]).status.code(), Some(2));
    assert_eq!(zmoment(&["moment", "--T", "-1"]).status.code(), Some(2));
    assert_eq!(zmoment(&["zeta", "--mode", "fast"]).status.code(), Some(2));
    assert_eq!(zmoment(&["estermann", "--frac", "1/0", "--x-im", "1"]).status.code(), Some(2));
    assert_eq!(zmoment(&["scan", "--M", "4,2"]).status.code(), Some(2));
    assert_eq!(zmoment(&["zeta", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn config_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 3, "zeta": {"random": 2, "sigma": 2.0, "t": [5.0]}}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_config = zmoment(&["zeta", "--config", cfg]);
    let explicit = zmoment(&["zeta", "--random", "2", "--seed", "3", "--sigma", "2", "--t", "5"]);
    assert_eq!(stdout(&from_config), stdout(&explicit));
    let overridden = zmoment(&["zeta", "--config", cfg, "--sigma", "3"]);
    assert!(stdout(&overridden).lines().nth(1).unwrap().starts_with("3.0000000000000000e0,"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"zeta": {"sigmaa": 1}}"#).unwrap();
    assert_eq!(zmoment(&["zeta", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn coefficient_file_runs_as_custom_mollifier() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("coeffs.txt");
    std::fs::write(&f, "# Möbius up to 3\n1 1 0\n2 -1 0\n3 -1 0\n").unwrap();
    let custom = zmoment(&["moment", "--T", "200", "--coeff-file", f.to_str().unwrap()]);
    let preset = zmoment(&["moment", "--T", "200", "--mollifier", "moebius", "--M", "3"]);
    assert_eq!(custom.status.code(), Some(0), "{}", stderr(&custom));
    let row = |o: &Output| stdout(o).lines().nth(1).unwrap().split(',').skip(1).collect::<Vec<_>>().join(",");
    assert_eq!(row(&custom), row(&preset));
    assert!(stdout(&custom).lines().nth(1).unwrap().starts_with("custom,3,"));
}

#[test]
fn suites_report_csv_tables() {
    let o = zmoment(&["contour", "--suite", "gamma"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("lambda,u,residual\n"));
    assert_eq!(text.lines().count(), 4);
    let s = zmoment(&["scan", "--mollifier", "ones", "--M", "1", "--T", "100,200,400"]);
    assert_eq!(s.status.code(), Some(0), "{}", stderr(&s));
    assert!(stdout(&s).contains("# scan_fit\nparam,value,ci95\nt_exponent,"));
}
