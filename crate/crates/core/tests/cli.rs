use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_survey-ecdf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{"designs": ["SI", "BE", "PO"], "sizes": [{{"N": 400, "n": 40}}, {{"N": 800, "n": 80}}],
            "populations": 6, "samples": 8, "seed": 11{extra}}}"#
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_tables_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", &config, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let rb = fs::read_to_string(out.join("rb_estimators.csv")).unwrap();
    let lines: Vec<&str> = rb.lines().collect();
    assert_eq!(lines[0], "design,estimator,center,N=400/n=40,N=800/n=80");
    // SI: one row per center; BE and PO: two estimators x two centers
    assert_eq!(lines.len(), 1 + 2 + 4 + 4);
    assert!(lines[1].starts_with("SI,HT-HJ,"));
    assert!(lines[3].starts_with("BE,HT,"));

    let var = fs::read_to_string(out.join("rb_variance.csv")).unwrap();
    assert_eq!(var.lines().count(), 1 + 1 + 2 + 2);
    let cov = fs::read_to_string(out.join("coverage.csv")).unwrap();
    for line in cov.lines().skip(1) {
        for cell in line.split(',').skip(3) {
            let v: f64 = cell.parse().unwrap();
            assert!((0.0..=100.0).contains(&v), "{line}");
        }
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 6);
    assert_eq!(manifest["config"]["populations"], 6);
    let timings: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("timings.json")).unwrap()).unwrap();
    assert_eq!(timings["workers"], 2);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#", "quantile_rule": "interpolated""#);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["simulate", "--config", &config, "--out", a.to_str().unwrap(), "--workers", "1"]).status.success());
    assert!(run(&["simulate", "--config", &config, "--out", b.to_str().unwrap(), "--workers", "3"]).status.success());
    for name in ["rb_estimators.csv", "rb_variance.csv", "coverage.csv", "manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["simulate", "--config", &config, "--out", a.to_str().unwrap()]).status.success());
    assert!(run(&["simulate", "--config", &config, "--out", b.to_str().unwrap(), "--seed", "12"]).status.success());
    assert_ne!(fs::read(a.join("rb_estimators.csv")).unwrap(), fs::read(b.join("rb_estimators.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("nope.json");
    let o = run(&["simulate", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"sizes\": 3}").unwrap();
    assert_eq!(
        run(&["simulate", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["simulate", "--out", out.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let config = write_config(dir.path(), "");
    assert_eq!(
        run(&["simulate", "--config", &config, "--out", out.to_str().unwrap(), "--workers", "0"]).status.code(),
        Some(2)
    );
    assert!(run(&["--help"]).status.success());
}

#[test]
fn invalid_scenario_is_a_runtime_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, r#"{"designs": ["SI"], "sizes": [{"N": 10, "n": 20}], "populations": 2, "samples": 2}"#).unwrap();
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.join("rb_estimators.csv").exists());
}

fn conditions_rows(dir: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("conditions.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn oracle_reports_srswor_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        run(&["oracle", "--design", r#"{"kind": "srswor", "N": 6, "n": 3}"#, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = conditions_rows(dir.path());
    let c2 = rows.iter().find(|r| r[0] == "C2").expect("C2 row");
    assert!((c2[4].parse::<f64>().unwrap() - 0.6).abs() < 1e-5, "{c2:?}");
}

#[test]
fn conditions_alias_with_rejective_reference() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("design.json");
    fs::write(&design, r#"{"kind": "rejective", "p": [0.2, 0.3, 0.4, 0.5, 0.6, 0.3, 0.2, 0.5], "n": 3}"#).unwrap();
    let o = run(&[
        "conditions",
        "--design",
        design.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--rejective-reference",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = conditions_rows(dir.path());
    let d = rows.iter().find(|r| r[0] == "D(P||R)").expect("divergence row");
    assert!(d[2].parse::<f64>().unwrap().abs() < 1e-10, "{d:?}");
    assert!(rows.iter().any(|r| r[0] == "expansion"));

    let o = run(&[
        "oracle",
        "--design",
        r#"{"kind": "srswor", "N": 7, "n": 3}"#,
        "--out",
        dir.path().to_str().unwrap(),
        "--rejective-reference",
    ]);
    assert!(o.status.success());
    let d = conditions_rows(dir.path()).into_iter().find(|r| r[0] == "D(P||R)").unwrap();
    assert!(d[2].parse::<f64>().unwrap().abs() < 1e-10, "srswor is rejective with equal p: {d:?}");
}

#[test]
fn oracle_rejects_malformed_design() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["oracle", "--design", r#"{"kind": "srswor"}"#, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o =
        run(&["oracle", "--design", r#"{"kind": "srswor", "N": 70, "n": 3}"#, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn calibrate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pi = dir.path().join("pi.txt");
    let target = [0.2, 0.5, 0.8, 0.6, 0.4, 0.5];
    fs::write(&pi, target.map(|v| v.to_string()).join(" ")).unwrap();
    let out = dir.path().join("cal.json");
    let o = run(&["calibrate", "--pi", pi.to_str().unwrap(), "--n", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    let p: Vec<f64> = v["p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();

    // the calibrated working probabilities reproduce the targets
    let design = survey_ecdf::designs::Design::rejective(p, 3).unwrap();
    for (got, want) in design.first_order_pi().iter().zip(target) {
        assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
    }
}

#[test]
fn calibrate_equal_targets_and_bad_sum() {
    let dir = tempfile::tempdir().unwrap();
    let pi = dir.path().join("pi.json");
    fs::write(&pi, "[0.4, 0.4, 0.4, 0.4, 0.4]").unwrap();
    let out = dir.path().join("cal.json");
    assert!(run(&["calibrate", "--pi", pi.to_str().unwrap(), "--n", "2", "--out", out.to_str().unwrap()])
        .status
        .success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let p: Vec<f64> = v["p"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(p.iter().all(|x| (x - p[0]).abs() < 1e-12));

    let o = run(&[
        "calibrate",
        "--pi",
        pi.to_str().unwrap(),
        "--n",
        "3",
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn minimal_si_scenario_has_one_row_group() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, r#"{"designs": ["SI"], "sizes": [{"N": 100, "n": 20}], "populations": 10, "samples": 10}"#)
        .unwrap();
    let out = dir.path().join("out");
    assert!(run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    for name in ["rb_estimators.csv", "rb_variance.csv", "coverage.csv"] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(text.lines().skip(1).all(|l| l.starts_with("SI,HT-HJ,")), "{name}: {text}");
    }
}

#[test]
fn bundled_paper_grid_has_eighteen_cells() {
    let dir = tempfile::tempdir().unwrap();
    let grid: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/paper_grid.json")).unwrap(),
    )
    .unwrap();
    let mut reduced = grid.clone();
    reduced["populations"] = 2.into();
    reduced["samples"] = 3.into();
    let path = dir.path().join("grid.json");
    fs::write(&path, reduced.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 18);
    let rb = fs::read_to_string(out.join("rb_estimators.csv")).unwrap();
    let header: Vec<&str> = rb.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 3 + 6);
    assert_eq!(header[3], "N=10000/n=500");
    assert_eq!(header[8], "N=1000/n=50");
}

#[test]
fn conditions_for_bernoulli_and_rejective_twelve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(run(&["conditions", "--design", r#"{"kind": "bernoulli", "N": 3, "p": 0.5}"#, "--out", out])
        .status
        .success());
    let rows = conditions_rows(dir.path());
    for name in ["C2", "C3", "C4"] {
        let r = rows.iter().find(|r| r[0] == name).expect(name);
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0, "{r:?}");
    }

    let p: Vec<String> = (0..12).map(|i| format!("{}", 0.15 + 0.05 * f64::from(i))).collect();
    let spec = format!(r#"{{"kind": "rejective", "p": [{}], "n": 4}}"#, p.join(","));
    assert!(run(&["conditions", "--design", &spec, "--out", out]).status.success());
    let rows = conditions_rows(dir.path());
    let e = rows.iter().find(|r| r[0] == "expansion").unwrap();
    assert!(e[2].parse::<f64>().unwrap().is_finite() && e[4].parse::<f64>().unwrap().is_finite());
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap().is_finite()));
}
