use std::path::Path;
use std::process::{Command, Output};

fn tone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(text.trim().lines().count(), 1, "stderr: {text}");
    serde_json::from_str(text.trim()).expect("stderr is one JSON object")
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn totally_geodesic_profile_has_unit_quotient() {
    let o = tone(&["growth", "--geometry", "totally-geodesic", "--n", "2", "--m", "3", "--kappa", "-1", "--smax", "50", "--bins", "1000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# tone "));
    assert!(text.contains("# config {"));
    let q = csv_column(&text, 2);
    assert_eq!(q.len(), 1001);
    assert!(q.iter().all(|q| (q - 1.0).abs() < 1e-9));
}

#[test]
fn catenoid_quotient_rises_toward_two() {
    let o = tone(&["growth", "--geometry", "euclidean-catenoid", "--smax", "50", "--bins", "256", "--nodes", "2048"]);
    assert!(o.status.success());
    let q = csv_column(&stdout(&o), 2);
    assert!(q.windows(2).all(|w| w[1] >= w[0] - 1e-3));
    let last = *q.last().unwrap();
    assert!(last > 1.9 && last < 2.0 + 1e-3, "{last}");
}

#[test]
fn config_errors_exit_two_with_json() {
    let o = tone(&["growth", "--smax", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["code"], 2);
    assert!(e["message"].as_str().unwrap().contains("geometry"));

    let o = tone(&["growth", "--geometry", "totally-geodesic", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    stderr_json(&o);

    let o = tone(&["spectrum", "--geometry", "totally-geodesic", "--n", "3", "--m", "4"]);
    assert_eq!(o.status.code(), Some(2));
    stderr_json(&o);

    let o = Command::new(env!("CARGO_BIN_EXE_tone")).args(["catalog"]).env("TONE_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_three() {
    // The catenoid profile is tabulated to a finite reach.
    let o = tone(&["growth", "--geometry", "hyperbolic-catenoid", "--smax", "1000", "--bins", "64", "--nodes", "256"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stderr_json(&o)["code"], 3);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["growth", "--geometry", "euclidean-catenoid", "--smax", "10", "--bins", "64", "--nodes", "512"];
    let a = tone(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_tone")).args(args).env("TONE_THREADS", "1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bounds_from_a_saved_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = tone(&["growth", "--geometry", "totally-geodesic", "--smax", "2000", "--bins", "4000", "--nodes", "256"]);
    assert!(o.status.success());
    let path = write(dir.path(), "h2.csv", &stdout(&o));
    let report = dir.path().join("report.json");
    let o = tone(&["bounds", "--profile", &path, "--schedule", "500,1000,2000", "--out", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let line = stdout(&o);
    let v: Vec<f64> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(v.len(), 2);
    assert!(v[0] >= 0.25 && v[1] <= 0.2513, "{line}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["geometry"], "totally-geodesic");
    assert_eq!(json["schedule"].as_array().unwrap().len(), 3);
    for key in ["R", "rayleigh_upper", "paper_upper", "lambda_R", "F_R", "delta_R", "q_ratio"] {
        assert!(json["schedule"][0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["version"], tone::VERSION);
    assert_eq!(json["config"]["command"], "bounds");
}

#[test]
fn flat_plane_upper_bound() {
    let o = tone(&["bounds", "--geometry", "totally-geodesic", "--kappa", "0", "--schedule", "1000", "--bins", "2000", "--nodes", "256"]);
    assert!(o.status.success());
    let v: Vec<f64> = stdout(&o).split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(v[0], 0.0);
    assert!(v[1] <= 1.1e-4, "{v:?}");
}

#[test]
fn disk_spectrum_matches_bessel_zero() {
    let o = tone(&["spectrum", "--geometry", "totally-geodesic", "--kappa", "0", "--truncations", "1", "--mesh", "512"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let j = tone::verify::bessel_j0_first_zero();
    let lam = v["lambda1"][0].as_f64().unwrap();
    assert!((lam - j * j).abs() < 1e-4, "{lam}");
    for key in ["geometry", "truncations", "lambda1", "extrapolated", "error"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_filters_and_fails_on_a_decreasing_profile() {
    let o = tone(&["verify", "--suite", "bounds"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.split_whitespace().nth(1) == Some("bounds")));

    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("# kappa -1\n# dim 2\n# rel_error 1e-6\ns,vol,q,dvol_ds\n");
    let sf = tone_core::SpaceForm::new(-1.0, 2).unwrap();
    let mut prev = 0.0;
    for k in 0..=40 {
        let s = 0.25 * k as f64;
        let q = 2.0 - s / 20.0;
        let vol = q * sf.ball_volume(s);
        let dens = if k == 0 { 0.0 } else { (vol - prev) / 0.25 };
        csv.push_str(&format!("{s},{vol:e},{q},{dens:e}\n"));
        prev = vol;
    }
    let path = write(dir.path(), "bad.csv", &csv);
    let o = tone(&["verify", "--suite", "spaceform", "--profile", &path]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL  growth    supplied profile Q monotone"));
}

#[test]
fn catalog_lists_sources() {
    let o = tone(&["catalog"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    let sources: Vec<&str> = entries.iter().flat_map(|e| e["targets"].as_array().unwrap()).map(|t| t["source"].as_str().unwrap()).collect();
    for s in ["closed-form", "quadrature", "theorem"] {
        assert!(sources.contains(&s), "{s}");
    }
}

#[test]
fn geometry_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "g.json",
        r#"{"ambient": {"kind": "hyperbolic", "m": 3, "kappa": -1.0}, "builtin": {"name": "totally-geodesic", "n": 2},
            "base_point": [0.0, 0.0], "topology": {"euler_char": 1, "ends": 1}}"#,
    );
    let o = tone(&["growth", "--geometry-file", &path, "--smax", "5", "--bins", "32", "--nodes", "256"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(csv_column(&stdout(&o), 2).iter().all(|q| (q - 1.0).abs() < 1e-9));
    let bad = write(dir.path(), "bad.json", r#"{"ambient": {"kind": "hyperbolic", "m": 3, "kappa": -1.0}, "chart": {}}"#);
    assert_eq!(tone(&["growth", "--geometry-file", &bad]).status.code(), Some(2));
}

#[test]
fn spaceform_reports_volumes() {
    let o = tone(&["spaceform", "--kappa", "-1", "--n", "2", "--r", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let want = 2.0 * std::f64::consts::PI * (1f64.cosh() - 1.0);
    assert!((v["ball_volume"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(v["config"]["command"], "spaceform");
}
