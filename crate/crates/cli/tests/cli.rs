use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const REFERENCE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reference.toml");

fn cqed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(experiment: &str, config: &str, out: &Path, extra: &[&str]) {
    let mut args = vec![experiment, "--config", config, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = cqed(&args);
    assert!(
        o.status.success(),
        "{experiment} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p
}

/// (header, rows) of a numeric CSV file.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

fn summary(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn baseline_writes_six_series_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("baseline", REFERENCE, dir.path(), &[]);
    let (header, rows) = read_csv(&dir.path().join("baseline.csv"));
    assert_eq!(header.len(), 7);
    assert_eq!(rows.len(), 256);
    for name in &header[1..] {
        let max = if name.starts_with("p_") { 1.0 } else { 9.0 };
        assert!(column(&header, &rows, name).iter().all(|&v| (-1e-8..=max + 1e-8).contains(&v)));
    }
    let s = summary(&dir.path().join("baseline_summary.json"));
    assert_eq!(s["config"]["system"]["N"], 10);
    assert_eq!(s["config"]["system"]["omega_R_GHz"], 7.0);
    assert_eq!(s["provenance"], Value::Array(vec![]));
}

#[test]
fn defaults_are_recorded_in_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[system]\ng_GHz = 0.2\n[grid]\nt_end_ns = 2.0\npoints = 32\n");
    run_ok("baseline", cfg.to_str().unwrap(), dir.path(), &[]);
    let s = summary(&dir.path().join("baseline_summary.json"));
    assert_eq!(s["config"]["system"]["N"], 10);
    let notes: Vec<&str> = s["provenance"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(notes.iter().any(|n| n.starts_with("system.N defaulted to 10")));
    assert!(notes.iter().any(|n| n.starts_with("dissipation.kappa_GHz") && n.contains("repo default")));
    assert!(!notes.iter().any(|n| n.starts_with("system.g_GHz")));
}

#[test]
fn chevron_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[grid]\nt_end_ns = 5.0\npoints = 64\n[sweep]\ndelta_points = 9\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok("chevron", cfg.to_str().unwrap(), &a, &["--threads", "1"]);
    run_ok("chevron", cfg.to_str().unwrap(), &b, &["--threads", "4"]);
    let bytes = |d: &Path| fs::read(d.join("chevron.csv")).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
}

#[test]
fn chevron_resonant_column_follows_vacuum_rabi() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("chevron", REFERENCE, dir.path(), &[]);
    let (header, rows) = read_csv(&dir.path().join("chevron.csv"));
    assert_eq!(header, ["delta_GHz", "t_ns", "p_excited"]);
    assert_eq!(rows.len(), 41 * 256);
    let g = 2.0 * std::f64::consts::PI * 0.2;
    let resonant: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 0.0).collect();
    assert_eq!(resonant.len(), 256);
    for r in &resonant {
        assert!((r[2] - (g * r[1]).cos().powi(2)).abs() < 1e-6);
    }
    // first zero of cos²(gt) at π/(2g) = 1.25 ns, located to one grid step
    let dt = resonant[1][1] - resonant[0][1];
    let first_min = resonant
        .iter()
        .take_while(|r| r[1] < 2.5)
        .min_by(|a, b| a[2].total_cmp(&b[2]))
        .unwrap();
    assert!((first_min[1] - 1.25).abs() <= dt);

    let s = summary(&dir.path().join("chevron_summary.json"));
    assert_eq!(s["minimum"]["delta_GHz"], 0.0);
    for f in s["frequencies"].as_array().unwrap() {
        assert!(f["relative_error"].as_f64().unwrap() < 0.02);
    }
}

#[test]
fn readout_curves_are_all_pass_and_conjugate_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("readout", REFERENCE, dir.path(), &[]);
    let (header, rows) = read_csv(&dir.path().join("readout.csv"));
    for name in ["abs_R_g", "abs_R_e"] {
        assert!(column(&header, &rows, name).iter().all(|v| (v - 1.0).abs() < 1e-12));
    }
    let w = column(&header, &rows, "omega_probe_GHz");
    let centre = w.len() / 2;
    assert!((w[centre] - 7.0).abs() < 1e-12);
    // at ω_r the two conditioned responses are complex conjugates
    let r = &rows[centre];
    let col = |n: &str| header.iter().position(|h| h == n).unwrap();
    assert!((r[col("re_R_g")] - r[col("re_R_e")]).abs() < 1e-12);
    assert!((r[col("im_R_g")] + r[col("im_R_e")]).abs() < 1e-12);
    assert!((r[col("phase_R_g")] + r[col("phase_R_e")]).abs() < 1e-12);

    let s = summary(&dir.path().join("readout_summary.json"));
    let step = s["reflection"]["probe_step_GHz"].as_f64().unwrap();
    let peak = s["reflection"]["peak_omega_probe_GHz"].as_f64().unwrap();
    assert!((peak - 7.0).abs() <= step);
    assert!((s["dispersive"]["chi_GHz"].as_f64().unwrap() + 0.020).abs() < 1e-12);

    let (th, tr) = read_csv(&dir.path().join("readout_trajectory.csv"));
    let sep = column(&th, &tr, "separation");
    assert_eq!(sep[0], 0.0);
    let steady = s["trajectories"]["steady_separation"].as_f64().unwrap();
    let residuals: f64 = ["final_residual_g", "final_residual_e"]
        .iter()
        .map(|k| s["trajectories"][k].as_f64().unwrap())
        .sum();
    assert!(residuals < 2e-8);
    assert!((sep.last().unwrap() - steady).abs() <= residuals);
}

#[test]
fn spectrum_tables() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("spectrum", REFERENCE, dir.path(), &[]);
    let (header, rows) = read_csv(&dir.path().join("transmon.csv"));
    let w = column(&header, &rows, "omega01_numeric_GHz");
    assert!(w.windows(2).all(|p| p[1] > p[0]));
    let alpha = column(&header, &rows, "anharmonicity_GHz");
    assert!(alpha.iter().all(|&a| a < 0.0));
    // approaches −E_C from below as E_J/E_C grows
    assert!(((alpha.last().unwrap() + 0.3) / 0.3).abs() < 0.05);
    assert!(alpha.windows(2).all(|p| p[1] > p[0]));

    let s = summary(&dir.path().join("spectrum_summary.json"));
    assert!(s["transmon"]["omega01_relative_gap"].as_f64().unwrap() < 0.02);
    assert!((s["transmon"]["omega01_asymptotic_GHz"].as_f64().unwrap() - 5.7).abs() < 1e-12);

    let (jh, jr) = read_csv(&dir.path().join("jc_spectrum.csv"));
    assert_eq!(jr.len(), 9);
    let d = column(&jh, &jr, "Delta_n_GHz");
    assert!((d[0] - 2.0396).abs() < 1e-4);
}

#[test]
fn json_format_writes_column_objects() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("spectrum", REFERENCE, dir.path(), &["--format", "json"]);
    let v = summary(&dir.path().join("transmon.json"));
    assert_eq!(v["EJ_over_EC"].as_array().unwrap().len(), 25);
    assert!(!dir.path().join("transmon.csv").exists());
}

#[test]
fn config_errors_exit_with_code_2_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[dissipation]\nkappa_GHz = -0.1\n");
    let o = cqed(&["baseline", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dissipation.kappa_GHz"));

    let cfg = write_config(dir.path(), "[system]\nwhat = 1\n");
    let o = cqed(&["baseline", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = cqed(&["baseline"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cqed(&["baseline", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coarse_grid_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nt_end_ns = 20.0\npoints = 2\nsubsteps = 1\n");
    let o = cqed(&["baseline", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("substeps"));
}
