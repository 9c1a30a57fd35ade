use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TINY: &str = r#"{"label":"tiny","m_bands":1,"k_antennas":1,"tau_b_frac":0.0,
"spectral_eff_r":1.0,"snr_s":1.0,"p_bar_p":0.5,"p_fa":0.0,"p_md":0.0,"lambda_p":0.25}"#;

fn cogagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogagg")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn repo_config(name: &str) -> String {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_golden_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tiny.json", TINY);
    // pi = 1 - 0.25/0.5, mu_s = pi * exp(-(2^1 - 1)/1)
    let out = stdout(&cogagg(&["analyze", "--config", cfg.to_str().unwrap()]));
    assert_eq!(
        out,
        "label,sensing_fraction,mu_p,pi,mu_s,primary_stable,secondary_stable\n\
         tiny,0,0.5,0.5,0.18393972058572117,true,true\n"
    );
}

#[test]
fn analyze_json_parses() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tiny.json", TINY);
    let out = stdout(&cogagg(&["analyze", "--config", cfg.to_str().unwrap(), "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mu_p"], 0.5);
    assert_eq!(v["primary_stable"], true);
}

#[test]
fn optimize_writes_profile_and_reports_label() {
    let o = cogagg(&["optimize", "--config", &repo_config("baseline_m13.json")]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "m,mu_s");
    assert_eq!(lines.len(), 14);
    let mu: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(mu.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(String::from_utf8_lossy(&o.stderr).contains("baseline-m13: m_opt = "));
}

#[test]
fn csv_floats_round_trip() {
    let out = stdout(&cogagg(&["optimize", "--config", &repo_config("baseline.json")]));
    let json = stdout(&cogagg(&["optimize", "--config", &repo_config("baseline.json"), "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let profile = v["profile"].as_array().unwrap();
    for (line, entry) in out.lines().skip(1).zip(profile) {
        let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, entry[1].as_f64().unwrap());
    }
}

#[test]
fn compare_orders_and_skips() {
    let out = stdout(&cogagg(&["compare", "--config", &repo_config("rate_sweep.json")]));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows[..3] {
        let v: Vec<f64> = row[1..4].iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[0] >= v[1] && v[1] >= v[2], "{row:?}");
        assert_eq!(row[4], "ok");
    }
    for row in &rows[3..] {
        assert_eq!(row[1..], ["", "", "", "skipped"]);
    }
}

#[test]
fn sweep_rows_follow_axis_order() {
    let out = stdout(&cogagg(&["sweep", "--config", &repo_config("antenna_sweep.json")]));
    let values: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(values.len(), 48);
}

#[test]
fn sweep_simulation_fills_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "sweep.json",
        r#"{"m_bands":3,"k_antennas":3,"tau_b_frac":0.01,"spectral_eff_r":1.0,"snr_s":2.0,
"p_bar_p":0.9,"p_fa":0.05,"p_md":0.05,"lambda_p":0.3,"axis":"lambda_p","values":[0.1,0.95]}"#,
    );
    let out = stdout(&cogagg(&["sweep", "--config", cfg.to_str().unwrap(), "--slots", "5000", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["status"], "ok");
    assert!(v[0]["mu_s_simulated"].is_number());
    // 0.95 exceeds mu_p = 0.855
    assert_eq!(v[1]["status"], "skipped");
    assert!(v[1]["mu_s_simulated"].is_null());
}

#[test]
fn simulate_trace_has_one_line_per_slot() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tiny.json", TINY);
    let trace = dir.path().join("t.ndjson");
    let out = stdout(&cogagg(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--slots",
        "300",
        "--mode",
        "original",
        "--trace",
        trace.to_str().unwrap(),
    ]));
    assert!(out.starts_with("mode,slots,warmup,seed,"));
    assert!(out.lines().nth(1).unwrap().starts_with("original,300,30,1,"));
    let text = fs::read_to_string(trace).unwrap();
    assert_eq!(text.lines().count(), 300);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["slot"], 0);
}

#[test]
fn invalid_probability_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.json", &TINY.replace(r#""p_fa":0.0"#, r#""p_fa":1.5"#));
    let o = cogagg(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("p_fa"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "tiny.json", TINY);
    let cfg = cfg.to_str().unwrap();
    for args in [
        vec!["analyze"],
        vec!["frobnicate"],
        vec!["analyze", "--config", "/nonexistent/x.json"],
        vec!["sweep", "--config", cfg],
        vec!["analyze", "--config", &repo_config("rate_sweep.json")],
        vec!["simulate", "--config", cfg, "--slots", "10", "--warmup", "10"],
    ] {
        assert_eq!(cogagg(&args).status.code(), Some(1), "{args:?}");
    }
    let unknown = write(&dir, "unknown.json", &TINY.replace("\"label\"", "\"lable\""));
    assert_eq!(cogagg(&["analyze", "--config", unknown.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    // valid file, but lambda_p exceeds the primary service rate
    let cfg = write(&dir, "unstable.json", &TINY.replace("0.25", "0.75"));
    let o = cogagg(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = cogagg(&["analyze", "--config", &repo_config("baseline.json"), "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(cogagg(&["--help"]).status.code(), Some(0));
    assert_eq!(cogagg(&["--version"]).status.code(), Some(0));
}
