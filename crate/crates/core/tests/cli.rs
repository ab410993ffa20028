use std::process::{Command, Output};

use serde_json::Value;

fn bw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bw-spin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bw(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn prob_unpolarized_antipodal() {
    let v = json(&["prob", "--mode", "unpolarized", "--chi1", "0", "--chi2", "180"]);
    let r = &v["results"][0];
    assert_eq!(num(&r["joint"]), 0.5);
    assert_eq!(num(&r["marginal_left"]), 0.5);
    assert_eq!(num(&r["marginal_right"]), 0.5);
    assert_eq!(num(&r["antipodal_sum"]), 1.0);
}

#[test]
fn prob_linear_csv() {
    let out = stdout(&["prob", "--mode", "linear", "--omega", "1.05", "--chi1", "0", "--chi2", "45"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(
        header.join(","),
        "mode,source,omega_mev,chi1,chi2,joint,marginal_left,marginal_right,antipodal_sum"
    );
    let joint: f64 = rows[0][5].parse().unwrap();
    assert!((joint - 0.0732233047034).abs() < 1e-12);
}

#[test]
fn below_threshold_exits_3() {
    let out = bw(&["prob", "--mode", "linear", "--omega", "0.3", "--chi1", "0", "--chi2", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("threshold"));
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["prob", "--mode", "bogus", "--chi1", "0", "--chi2", "0"][..],
        &["prob", "--mode", "linear", "--chi1", "0"][..],
        &["scan", "--mode", "linear", "--step", "7"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(bw(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bell_unpolarized_violation_and_round_trip() {
    let v = json(&[
        "bell", "--mode", "unpolarized", "--chi1", "0", "--chi2", "23", "--chi1p", "45", "--chi2p", "180",
    ]);
    assert_eq!(v["command"], "bell");
    assert!(v["version"].is_string());
    let r = &v["results"][0];
    assert!((num(&r["s"]) + 1.03514548171).abs() < 1e-10);
    assert_eq!(r["lhv_violated"], true);
    let terms = ["p11", "p12", "p21", "p22", "m1", "m2"].map(|k| num(&r[k]));
    let s = terms[0] - terms[1] + terms[2] + terms[3] - terms[4] - terms[5];
    assert!((s - num(&r["s"])).abs() < 1e-11);
}

#[test]
fn bell_boundary_not_violated() {
    let v = json(&["bell", "--mode", "unpolarized", "--chi1", "0", "--chi2", "0", "--chi1p", "0", "--chi2p", "0"]);
    let r = &v["results"][0];
    assert_eq!(num(&r["s"]), -1.0);
    assert_eq!(r["lhv_violated"], false);
}

#[test]
fn bell_assignments_listed() {
    let out = stdout(&[
        "bell", "--mode", "linear", "--chi1", "0", "--chi2", "45", "--chi1p", "15", "--chi2p", "180", "--assignments",
    ]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[0], "kind");
    assert_eq!(rows.iter().filter(|r| r[0] == "canonical").count(), 1);
    let n = rows.iter().filter(|r| r[0] != "canonical").count();
    assert!((1..=24).contains(&n));
}

#[test]
fn json_and_csv_carry_the_same_numbers() {
    let args = ["bell", "--mode", "linear", "--omega", "5", "--chi1", "0", "--chi2", "45", "--chi1p", "15", "--chi2p", "180"];
    let (header, rows) = csv_rows(&stdout(&args));
    let v = json(&args);
    let r = &v["results"][0];
    for (k, cell) in header.iter().zip(rows[0].iter()) {
        match &r[k.as_str()] {
            Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{k}"),
            Value::Bool(b) => assert_eq!(b.to_string(), *cell),
            Value::String(s) => assert_eq!(s, cell),
            other => panic!("unexpected {k}: {other}"),
        }
    }
}

#[test]
fn scan_unpolarized_top_k_ascending() {
    let out = bw(&["scan", "--mode", "unpolarized", "--top-k", "6"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(&header[..3], ["kind", "rank", "s"]);
    let best: f64 = rows[0][2].parse().unwrap();
    assert!((best + 1.20710678119).abs() < 1e-9);
    let top: Vec<f64> = rows.iter().filter(|r| r[0] == "top").map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(top.len(), 6);
    assert!(top.windows(2).all(|w| w[0] <= w[1]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("best_s="));
}

#[test]
fn scan_linear_finds_witness() {
    let v = json(&["scan", "--mode", "linear", "--omega", "1.05"]);
    let best = &v["results"][0];
    assert_eq!(best["kind"], "best");
    assert!(num(&best["s"]) < -1.0);
    assert_eq!(best["lhv_violated"], true);
}

#[test]
fn sweep_header_and_constant_unpolarized() {
    let out = stdout(&[
        "sweep", "--mode", "unpolarized", "--chi1", "0", "--chi2", "23", "--chi1p", "45", "--chi2p", "180", "--from", "1",
        "--to", "1000", "--points", "12", "--log",
    ]);
    assert!(out.starts_with("omega_mev,s,p11,p12,p21,p22,m1,m2\n"));
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
}

#[test]
fn sweep_linear_saturates() {
    let list = "10,20,40,80,160,320,640";
    let v = json(&[
        "sweep", "--mode", "linear", "--chi1", "0", "--chi2", "45", "--chi1p", "15", "--chi2p", "180", "--omegas", list,
    ]);
    let s: Vec<f64> = v["results"].as_array().unwrap().iter().map(|r| num(&r["s"])).collect();
    let steps: Vec<f64> = s.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(steps.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn verify_paper_text_and_json() {
    let text = stdout(&["verify-paper"]);
    assert!(text.contains("summary:"));
    let v = json(&["verify-paper"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 21);
    let dir = std::env::temp_dir().join(format!("bw-spin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    stdout(&["verify-paper", "--json-out", path.to_str().unwrap()]);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["results"], v["results"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_compare_schema_and_unpolarized_agreement() {
    let out = bw(&["oracle-compare", "--mode", "unpolarized", "--omega", "3", "--samples", "200"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header.join(","), "chi1_deg,chi2_deg,p_closed,p_oracle,delta");
    assert_eq!(rows.len(), 200);
    let worst = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst <= 1e-12, "{worst}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("fit_residual"));
}

#[test]
fn oracle_compare_reports_fit() {
    let v = json(&["oracle-compare", "--mode", "linear", "--samples", "50", "--route", "reduced"]);
    let s = &v["summary"];
    for k in ["omega_mev", "max_delta", "fit_ratio", "fit_residual"] {
        assert!(s[k].is_number(), "{k}");
    }
}

#[test]
fn radians_in_and_out() {
    let deg = json(&["prob", "--mode", "linear", "--chi1", "0", "--chi2", "90"]);
    let rad = json(&["--radians", "prob", "--mode", "linear", "--chi1", "0", "--chi2", "1.5707963267948966"]);
    assert_eq!(deg["results"][0]["joint"], rad["results"][0]["joint"]);
    assert!((num(&rad["results"][0]["chi2"]) - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["scan", "--mode", "circular", "--omega", "5", "--step", "10"];
    assert_eq!(bw(&args).stdout, bw(&args).stdout);
}
