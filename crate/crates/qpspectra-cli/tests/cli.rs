//! End-to-end tests of the command-line tool: artifact correctness, exit
//! codes, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpspectra"))
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const OSC_SYMBOL: &str = r#"{
  "alpha": 0,
  "symbol": {"c0": [0, 2], "terms": [{"c": [0.5, 0], "gamma": 1.0}]},
  "series": {"eps_target": 1e-6}
}"#;

fn read_csv_points(path: &Path) -> Vec<(f64, f64, String)> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            let mut parts = line.split(',');
            let re: f64 = parts.next().unwrap().parse().unwrap();
            let im: f64 = parts.next().unwrap().parse().unwrap();
            (re, im, parts.next().unwrap().to_string())
        })
        .collect()
}

#[test]
fn series_report_echoes_the_plan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    write(&cfg, OSC_SYMBOL);
    let out = dir.path().join("out");
    let status = bin()
        .args(["series", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let plan = &report["plan"];
    assert!((plan["beta"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((plan["delta"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    // Strict minimal order for tail <= 1e-6 at delta = 0.25.
    assert_eq!(plan["m"].as_u64().unwrap(), 12);
    // The reported analytic tail is the closed-form bound, exactly.
    let tail = plan["tail"]["value"].as_f64().unwrap();
    let closed = 0.25f64.powi(13) * (13.0 * 0.75 + 1.0) / (0.75 * 0.75);
    assert!((tail - closed).abs() <= 1e-18 * closed, "tail {tail} vs closed {closed}");
    assert!(tail <= 1e-6);
    // Two-line error budget is present and separate.
    let budget = &report["error_budget"];
    assert!(budget["analytic_tail"]["value"].as_f64().unwrap() <= 1e-6);
    assert!(budget["discretization_estimate"]["value"].as_f64().unwrap() < 1e-3);
    // Residual table entries carry their threshold.
    let residuals = report["residual_table"].as_array().unwrap();
    assert!(!residuals.is_empty());
    for entry in residuals {
        assert!(entry["residual"]["value"].as_f64().unwrap() <= 0.05);
        assert_eq!(entry["residual"]["tol"].as_f64().unwrap(), 0.05);
    }
}

#[test]
fn spectrum_of_constant_symbol_fills_the_unit_segment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    write(
        &cfg,
        r#"{
  "alpha": 0,
  "symbol": {"c0": [0, 2], "terms": []},
  "spectrum": {"t_count": 60000}
}"#,
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let points = read_csv_points(&out.join("spectrum.csv"));
    assert_eq!(points.last().unwrap().2, "zero");
    // All points are real and in [0, 1]; together with the gap bound below
    // this pins the cloud within 1e-3 Hausdorff distance of the segment
    // points {exp(-2 pi s)} union {0}, which is dense in [0, 1].
    let mut res: Vec<f64> = points
        .iter()
        .map(|&(re, im, _)| {
            assert!(im.abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&re));
            re
        })
        .collect();
    res.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_gap = res
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max)
        .max(1.0 - res.last().unwrap())
        .max(res[0]);
    assert!(
        max_gap <= 2e-3,
        "spectrum cloud leaves a gap of {max_gap} in [0,1]"
    );
}

#[test]
fn range_of_oscillating_symbol_approximates_the_circle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    write(&cfg, OSC_SYMBOL);
    let out = dir.path().join("out");
    let status = bin()
        .args(["range", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let points = read_csv_points(&out.join("range.csv"));
    assert!(points.len() > 50);
    // Every cell sits near the circle |z - 2i| = 0.5 and the circle is
    // covered: worst radial offset and worst angular gap both small.
    let mut worst_radial = 0.0f64;
    for &(re, im, _) in &points {
        let r = (re * re + (im - 2.0) * (im - 2.0)).sqrt();
        worst_radial = worst_radial.max((r - 0.5).abs());
    }
    assert!(worst_radial <= 0.03, "radial offset {worst_radial}");
    for k in 0..360 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 360.0;
        let (cx, cy) = (0.5 * th.cos(), 2.0 + 0.5 * th.sin());
        let close = points
            .iter()
            .any(|&(re, im, _)| ((re - cx).powi(2) + (im - cy).powi(2)).sqrt() <= 0.04);
        assert!(close, "no cell within 0.04 of angle {th}");
    }
}

#[test]
fn vmo_profile_decays_for_analytic_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    write(&cfg, OSC_SYMBOL);
    let out = dir.path().join("out");
    let status = bin()
        .args(["vmo", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_csv_points(&out.join("vmo.csv"));
    assert_eq!(rows.len(), 4);
    // Decreasing toward the boundary: the transport is continuous up to it.
    for w in rows.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let slope = report["vmo"]["log_log_slope"].as_f64().unwrap();
    assert!((0.7..=1.3).contains(&slope), "slope {slope}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    write(
        &cfg,
        r#"{
  "alpha": 0.5,
  "symbol": {"c0": [0.1, 2], "terms": [{"c": [0.3, 0.2], "gamma": 1.0}]},
  "spectrum": {"t_count": 500}
}"#,
    );
    let (out1, out2) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out1, &out2] {
        let status = bin()
            .args(["spectrum", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["spectrum.csv", "spectrum.svg", "report.json"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    // 2: schema violation.
    let bad = dir.path().join("bad.json");
    write(&bad, r#"{"alpha": -1.5, "symbol": {"c0": [0, 2]}}"#);
    let status = bin().args(["series", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // 2: unknown key.
    let unk = dir.path().join("unk.json");
    write(&unk, r#"{"alpha": 0, "symbol": {"c0": [0, 2]}, "frobnicate": 1}"#);
    let status = bin().args(["series", "--config"]).arg(&unk).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // 3: infeasible symbol (imaginary-part certificate fails).
    let infeasible = dir.path().join("inf.json");
    write(
        &infeasible,
        r#"{"alpha": 0, "symbol": {"c0": [0, 1], "terms": [{"c": [2, 0], "gamma": 1.0}]}}"#,
    );
    let status = bin()
        .args(["series", "--config"])
        .arg(&infeasible)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // 4: seeded grid incommensurable with the symbol shift 1/(2 pi).
    let osc = dir.path().join("osc.json");
    write(&osc, OSC_SYMBOL);
    let status = bin()
        .args(["series", "--config"])
        .arg(&osc)
        .args(["--seed-grid", "0.01"])
        .arg("--out")
        .arg(dir.path().join("o4"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    // 0: seeded grid that divides the shift exactly.
    let dt = 1.0 / (2.0 * std::f64::consts::PI * 32.0);
    let status = bin()
        .args(["series", "--config"])
        .arg(&osc)
        .args(["--seed-grid", &format!("{dt:.17}")])
        .arg("--out")
        .arg(dir.path().join("o0"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn samples_file_symbols_drive_range_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    // Boundary samples of 2i + 0.5 exp(ix) on a uniform grid wide enough for
    // the default window schedule.
    let samples_path = dir.path().join("boundary.csv");
    let mut body = String::from("x,re,im\n");
    let n = 24_000;
    for k in 0..n {
        let x = -9000.0 + 18_000.0 * (k as f64 + 0.5) / n as f64;
        body.push_str(&format!("{},{},{}\n", x, 0.5 * x.cos(), 2.0 + 0.5 * x.sin()));
    }
    fs::write(&samples_path, body).unwrap();

    let cfg = dir.path().join("job.json");
    write(
        &cfg,
        &format!(
            r#"{{"alpha": 0, "symbol": {{"samples": {:?}}}, "spectrum": {{"t_count": 400}}}}"#,
            samples_path
        ),
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["range", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let points = read_csv_points(&out.join("range.csv"));
    assert!(points.len() > 50);
    for &(re, im, _) in &points {
        let r = (re * re + (im - 2.0) * (im - 2.0)).sqrt();
        assert!((r - 0.5).abs() <= 0.035, "cell off the circle by {}", (r - 0.5).abs());
    }

    // The spectrum pipeline accepts the same measured symbol.
    let status = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let cloud = read_csv_points(&out.join("spectrum.csv"));
    assert!(cloud.iter().all(|&(re, im, _)| (re * re + im * im).sqrt() <= 1.0 + 1e-12));
    assert_eq!(cloud.last().unwrap().2, "zero");
}
