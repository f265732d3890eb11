use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cg-uncert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cg-uncert"))
        .args(args)
        .env("CG_UNCERT_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and numeric rows of a CSV, skipping `#` metadata.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn bounds_sweep_crosses_once() {
    let o = run(&[
        "bounds",
        "--sweep-min",
        "0.01",
        "--sweep-max",
        "100",
        "--sweep-points",
        "200",
        "--alpha",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(
        header,
        [
            "dd_over_hbar",
            "B_half",
            "B_alpha",
            "B_one",
            "R",
            "L_alpha",
            "g"
        ]
    );
    assert_eq!(rows.len(), 200);
    let signs: Vec<bool> = rows.iter().map(|r| r[4] > r[3]).collect();
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(changes, 1);
    assert!(rows.iter().all(|r| r.iter().all(|x| x.is_finite())));
}

#[test]
fn bounds_single_point_at_two_pi() {
    let x = format!("{}", 2.0 * std::f64::consts::PI);
    let o = run(&[
        "bounds",
        "--sweep-min",
        &x,
        "--sweep-max",
        &x,
        "--sweep-points",
        "1",
    ]);
    let (_, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][1].abs() < 1e-15);
}

#[test]
fn kfun_has_fixed_columns_and_k0() {
    let o = run(&[
        "kfun",
        "--sweep-min",
        "0",
        "--sweep-max",
        "3",
        "--sweep-points",
        "4",
        "--sweep-log",
        "false",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("t,M_t,u,M_inv_u,K_u,linear_ref\n"));
    let row0: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row0[4].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn check_gaussian_fine_grid() {
    let o = run(&[
        "check",
        "--state",
        "gaussian:sigma=1",
        "--delta",
        "0.001",
        "--delta-p",
        "0.001",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.iter().all(|r| r["verdict"] == "holds"));
    let opt = reports
        .iter()
        .find(|r| r["relation_id"] == "HeisOptimal")
        .unwrap();
    assert!(opt["margin"].as_f64().unwrap() < 1e-2);
    for key in ["relation_id", "lhs", "rhs", "margin", "verdict"] {
        assert!(opt.get(key).is_some());
    }
}

#[test]
fn check_square_well_centered() {
    let o = run(&[
        "check",
        "--state",
        "squarewell:n=1,L=1",
        "--delta",
        "1",
        "--offset-x",
        "0.5",
        "--delta-p",
        "50",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn malformed_descriptor_exits_2() {
    let o = run(&["check", "--state", "gaussian:sgma=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sgma"));
    let o = run(&["check", "--delta", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"sweep": {"min": 1, "max": 10, "points": 3}, "format": "json"}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = run(&["bounds", "--config", cfg]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    let o = run(&[
        "bounds",
        "--config",
        cfg,
        "--sweep-points",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(csv(&stdout(&o)).1.len(), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"detla\": 1\n}").unwrap();
    let o = run(&["bounds", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("detla") && err.contains("line 2"), "{err}");
}

#[test]
fn region_grid() {
    let o = run(&["region", "--grid-n", "1"]);
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header, ["u_x", "u_p", "forbidden"]);
    assert_eq!(rows, vec![vec![0.0, 0.0, 1.0]]);
    let frac = |d: &str| -> f64 {
        let text = stdout(&run(&["region", "--delta", d, "--delta-p", d]));
        let line = text
            .lines()
            .find(|l| l.starts_with("# forbidden_fraction="))
            .unwrap();
        line.split('=').nth(1).unwrap().parse().unwrap()
    };
    assert!(frac("10") < frac("1"));
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &std::path::Path| {
        vec![
            "sample".to_string(),
            "--samples".into(),
            "20000".into(),
            "--seed".into(),
            "42".into(),
            "--state".into(),
            "hermite:n=1,sigma=1".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run_s = |v: Vec<String>, threads: &str| {
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        run_env(&refs, threads)
    };
    assert_eq!(run_s(args(&a), "1").status.code(), Some(0));
    assert_eq!(run_s(args(&b), "4").status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["verdicts_match"], true);
}

#[test]
fn single_sample_has_zero_entropy() {
    let o = run(&["sample", "--samples", "1", "--seed", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let h = text.lines().find(|l| l.starts_with("x,shannon,")).unwrap();
    assert_eq!(h.split(',').nth(3).unwrap().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn thread_override_is_validated() {
    let o = run_env(&["bounds", "--sweep-points", "2"], "zero");
    assert_eq!(o.status.code(), Some(2));
    let one = run_env(&["bounds", "--sweep-points", "9"], "1");
    let many = run_env(&["bounds", "--sweep-points", "9"], "3");
    assert_eq!(one.stdout, many.stdout);
}
