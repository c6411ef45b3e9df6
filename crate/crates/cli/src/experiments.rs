//! The four experiments behind the CLI subcommands.
//!
//! Each `run_*` returns the data tables and a JSON summary without touching
//! the filesystem; [`write_run`] persists them.

use std::path::{Path, PathBuf};

use cqed::circuit::{
    drive_terms, jc_hamiltonian, transmon_frequencies, DriveParams, TransmonParams,
};
use cqed::dynamics::{
    collapse_set, default_observables, evolve_master, evolve_schrodinger, Diagnostics, EvolutionResult,
};
use cqed::jc::{dispersive_shift, jc_block};
use cqed::readout::{
    conditioned_cavity_trajectory, conditioned_fixed_point, dispersive_reflection_sweep,
    readout_separation, QubitState, ReadoutParams,
};
use cqed::units::rad_per_ns_to_ghz;
use cqed::{Dims, QuantumState, TimeGrid, C64};
use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::CliError;
use crate::output::{ensure_dir, json_number, write_json, write_table, Table};
use crate::spectral::dominant_frequency;

/// Slack on probability and occupation bounds for roundoff.
pub const RANGE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub name: &'static str,
    /// (file stem, table)
    pub tables: Vec<(String, Table)>,
    pub summary: Value,
}

impl RunOutput {
    pub fn table(&self, stem: &str) -> Option<&Table> {
        self.tables.iter().find(|(s, _)| s == stem).map(|(_, t)| t)
    }
}

/// Writes every table plus `<name>_summary.json`, returning the paths.
pub fn write_run(run: &RunOutput, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut paths = Vec::new();
    for (stem, table) in &run.tables {
        paths.push(write_table(dir, stem, table, format)?);
    }
    paths.push(write_json(dir, &format!("{}_summary.json", run.name), &run.summary)?);
    Ok(paths)
}

fn ghz(omega: f64) -> f64 {
    rad_per_ns_to_ghz(omega)
}

fn header(name: &str, cfg: &ExperimentConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("experiment".into(), json!(name));
    m.insert(
        "config".into(),
        serde_json::to_value(&cfg.resolved).expect("config serializes"),
    );
    m.insert("provenance".into(), json!(cfg.provenance));
    m
}

fn diagnostics_json(d: &Diagnostics) -> Value {
    json!({
        "max_norm_drift": d.max_norm_drift,
        "max_hermiticity_residue": d.max_hermiticity_residue,
        "min_eigenvalue": d.min_eigenvalue,
        "max_top_population": d.max_top_population,
        "steps": d.steps,
        "truncation_ok": d.truncation_ok(),
    })
}

fn evolution_grid(cfg: &ExperimentConfig) -> Result<TimeGrid, CliError> {
    Ok(TimeGrid::new(0.0, cfg.grid.t_end, cfg.grid.points, cfg.grid.substeps)?)
}

/// Enforces the truncation guard and the probability/occupation ranges.
fn check_run(label: &str, r: &EvolutionResult, n: usize) -> Result<(), CliError> {
    if !r.diagnostics.truncation_ok() {
        return Err(CliError::Contract(format!(
            "{label}: top Fock population reached {:e}; increase system.N",
            r.diagnostics.max_top_population
        )));
    }
    let bounds = [("p_excited", 1.0), ("n_cavity", (n - 1) as f64)];
    for (name, max) in bounds {
        if let Some(series) = r.series(name) {
            if let Some(v) = series
                .iter()
                .find(|&&v| !(v >= -RANGE_TOLERANCE && v <= max + RANGE_TOLERANCE))
            {
                return Err(CliError::Contract(format!(
                    "{label}: {name} = {v} is outside [0, {max}]"
                )));
            }
        }
    }
    Ok(())
}

/// The three evolutions shown side by side in the baseline figure.
#[derive(Debug, Clone)]
pub struct BaselineRuns {
    pub coupled: EvolutionResult,
    pub uncoupled: EvolutionResult,
    pub dissipative: EvolutionResult,
}

/// One photon in the cavity, qubit in ground, no drive: coupled and
/// uncoupled closed evolutions plus the coupled dissipative one.
pub fn baseline_runs(cfg: &ExperimentConfig) -> Result<BaselineRuns, CliError> {
    let s = &cfg.system;
    let dims = Dims::new(vec![s.n, 2])?;
    let psi0 = QuantumState::basis(dims.clone(), &[1, 0])?;
    let grid = evolution_grid(cfg)?;
    let obs = default_observables(&dims)?;

    let h = jc_hamiltonian(s.omega_r, s.omega_t, s.g, s.n)?;
    let h0 = jc_hamiltonian(s.omega_r, s.omega_t, 0.0, s.n)?;
    let d = &cfg.dissipation;
    let channels = collapse_set(d.kappa, d.gamma, d.n_th, &dims)?;

    let runs = BaselineRuns {
        coupled: evolve_schrodinger(&h, &psi0, &grid, &obs)?,
        uncoupled: evolve_schrodinger(&h0, &psi0, &grid, &obs)?,
        dissipative: evolve_master(&h, &psi0, &channels, &grid, &obs)?,
    };
    check_run("coupled", &runs.coupled, s.n)?;
    check_run("uncoupled", &runs.uncoupled, s.n)?;
    check_run("dissipative", &runs.dissipative, s.n)?;
    Ok(runs)
}

fn series<'a>(r: &'a EvolutionResult, name: &str) -> &'a [f64] {
    r.series(name).expect("default observables are always recorded")
}

pub fn run_baseline(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let runs = baseline_runs(cfg)?;
    let scenarios = [
        ("coupled", &runs.coupled),
        ("uncoupled", &runs.uncoupled),
        ("dissipative", &runs.dissipative),
    ];

    let mut columns = vec!["t_ns".to_string()];
    for (label, _) in &scenarios {
        columns.push(format!("n_cavity_{label}"));
        columns.push(format!("p_excited_{label}"));
    }
    let mut table = Table::new(columns);
    for (k, &t) in runs.coupled.times.iter().enumerate() {
        let mut row = vec![t];
        for (_, r) in &scenarios {
            row.push(series(r, "n_cavity")[k]);
            row.push(series(r, "p_excited")[k]);
        }
        table.push(row);
    }

    let s = &cfg.system;
    let block = jc_block(0, s.omega_r, s.omega_t, s.g);
    let peak = series(&runs.coupled, "p_excited").iter().cloned().fold(0.0, f64::max);
    let mut summary = header("baseline", cfg);
    let mut per = serde_json::Map::new();
    for (label, r) in &scenarios {
        per.insert(
            label.to_string(),
            json!({
                "final_n_cavity": series(r, "n_cavity").last(),
                "final_p_excited": series(r, "p_excited").last(),
                "max_p_excited": series(r, "p_excited").iter().cloned().fold(0.0, f64::max),
                "diagnostics": diagnostics_json(&r.diagnostics),
            }),
        );
    }
    summary.insert("scenarios".into(), Value::Object(per));
    summary.insert(
        "predicted_peak_p_excited".into(),
        json!({
            "value": block.max_transfer(),
            "delta_0_GHz": ghz(block.delta_n),
            "omega_0_GHz": ghz(block.omega_n),
        }),
    );
    summary.insert("observed_peak_p_excited".into(), json!(peak));
    Ok(RunOutput {
        name: "baseline",
        tables: vec![("baseline".into(), table)],
        summary: Value::Object(summary),
    })
}

/// Excited-qubit population over time for each detuning δ = ω_R − ω_T.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// rad/ns
    pub delta_values: Vec<f64>,
    /// ns
    pub times: Vec<f64>,
    /// Indexed `[delta][time]`.
    pub p_excited: Vec<Vec<f64>>,
}

fn chevron_point(cfg: &ExperimentConfig, delta: f64, grid: &TimeGrid) -> Result<Vec<f64>, CliError> {
    let s = &cfg.system;
    let omega_t = s.omega_r - delta;
    let mut h = jc_hamiltonian(s.omega_r, omega_t, s.g, s.n)?;
    if cfg.drive.chevron_drive {
        let d = &cfg.drive;
        let p = DriveParams::new(d.amplitude, d.omega_d, d.envelope)?;
        let terms = drive_terms(&p, d.target, h.dims())?;
        h.extend_terms(terms)?;
    }
    let psi0 = QuantumState::basis(h.dims().clone(), &[0, 1])?;
    let obs = default_observables(h.dims())?;
    let r = evolve_schrodinger(&h, &psi0, grid, &obs)?;
    let label = format!("chevron delta = {} GHz", ghz(delta));
    check_run(&label, &r, s.n)?;
    Ok(series(&r, "p_excited").to_vec())
}

/// Runs the detuning sweep on `threads` workers (all cores when `None`).
/// Results are assembled in grid order, so the output does not depend on
/// the worker count.
pub fn chevron_sweep(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<SweepGrid, CliError> {
    let grid = evolution_grid(cfg)?;
    let deltas = cfg.sweep.deltas();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    info!(
        "chevron: {} detunings on {} worker(s)",
        deltas.len(),
        pool.current_num_threads()
    );
    let p_excited = pool.install(|| {
        deltas
            .par_iter()
            .map(|&d| chevron_point(cfg, d, &grid))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(SweepGrid {
        delta_values: deltas,
        times: grid.times(),
        p_excited,
    })
}

/// Dominant oscillation frequency in GHz of each δ row.
pub fn chevron_frequencies(sweep: &SweepGrid) -> Vec<f64> {
    let dt = sweep.times[1] - sweep.times[0];
    sweep
        .p_excited
        .iter()
        .map(|row| dominant_frequency(row, dt))
        .collect()
}

pub fn run_chevron(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let sweep = chevron_sweep(cfg, threads)?;
    let mut table = Table::new(["delta_GHz", "t_ns", "p_excited"]);
    for (d, row) in sweep.delta_values.iter().zip(&sweep.p_excited) {
        for (t, p) in sweep.times.iter().zip(row) {
            table.push(vec![ghz(*d), *t, *p]);
        }
    }

    let freqs = chevron_frequencies(&sweep);
    let g = cfg.system.g;
    let points: Vec<Value> = sweep
        .delta_values
        .iter()
        .zip(&freqs)
        .map(|(&d, &f)| {
            let predicted = ghz(d.hypot(2.0 * g));
            json!({
                "delta_GHz": ghz(d),
                "dominant_frequency_GHz": f,
                "generalized_rabi_GHz": predicted,
                "relative_error": (f - predicted).abs() / predicted,
            })
        })
        .collect();
    let argmin = freqs
        .iter()
        .enumerate()
        .fold(0, |best, (k, &f)| if f < freqs[best] { k } else { best });

    let mut summary = header("chevron", cfg);
    summary.insert("drive_during_sweep".into(), json!(cfg.drive.chevron_drive));
    summary.insert("frequencies".into(), Value::Array(points));
    summary.insert(
        "minimum".into(),
        json!({"index": argmin, "delta_GHz": ghz(sweep.delta_values[argmin])}),
    );
    Ok(RunOutput {
        name: "chevron",
        tables: vec![("chevron".into(), table)],
        summary: Value::Object(summary),
    })
}

/// Probe frequencies ω_R + span·(i/(n − 1) − ½), exactly ω_R at the centre
/// of an odd-length sweep.
pub fn probe_frequencies(omega_r: f64, span: f64, points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points)
        .map(|i| omega_r + span * (i as f64 / last - 0.5))
        .collect()
}

fn wrapped_phase_difference(rg: C64, re: C64) -> f64 {
    (rg * re.conj()).arg()
}

pub fn run_readout(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let s = &cfg.system;
    let ro = &cfg.readout;
    let delta_qr = s.omega_t - s.omega_r;
    let chi = dispersive_shift(s.g, delta_qr)?;
    let dispersive = delta_qr.abs() >= 10.0 * s.g.abs();
    let params = ReadoutParams::new(s.omega_r, ro.kappa_c, chi, C64::new(0.0, 0.0), s.omega_r)?;

    let probes = probe_frequencies(s.omega_r, ro.probe_span, ro.probe_points);
    let rg = dispersive_reflection_sweep(&probes, s.omega_r, ro.kappa_c, chi, QubitState::Ground)?;
    let re = dispersive_reflection_sweep(&probes, s.omega_r, ro.kappa_c, chi, QubitState::Excited)?;
    let mut sweep = Table::new([
        "omega_probe_GHz",
        "re_R_g",
        "im_R_g",
        "abs_R_g",
        "phase_R_g",
        "re_R_e",
        "im_R_e",
        "abs_R_e",
        "phase_R_e",
    ]);
    let mut max_dev: f64 = 0.0;
    let mut peak = (0, 0.0);
    for (k, ((w, a), b)) in probes.iter().zip(&rg).zip(&re).enumerate() {
        max_dev = max_dev.max((a.norm() - 1.0).abs()).max((b.norm() - 1.0).abs());
        let diff = wrapped_phase_difference(*a, *b).abs();
        if diff > peak.1 {
            peak = (k, diff);
        }
        sweep.push(vec![ghz(*w), a.re, a.im, a.norm(), a.arg(), b.re, b.im, b.norm(), b.arg()]);
    }

    let grid = TimeGrid::new(0.0, ro.t_end, ro.trajectory_points, ro.substeps)?;
    let b_in = C64::new(ro.b_in, 0.0);
    let tg = conditioned_cavity_trajectory(&params, QubitState::Ground, |_| b_in, &grid);
    let te = conditioned_cavity_trajectory(&params, QubitState::Excited, |_| b_in, &grid);
    let sep = readout_separation(&tg, &te)?;
    let mut traj = Table::new(["t_ns", "re_a_g", "im_a_g", "re_a_e", "im_a_e", "separation"]);
    for (((&t, a), b), &s) in tg.times.iter().zip(&tg.values).zip(&te.values).zip(&sep) {
        traj.push(vec![t, a.re, a.im, b.re, b.im, s]);
    }
    let fg = conditioned_fixed_point(&params, QubitState::Ground, b_in);
    let fe = conditioned_fixed_point(&params, QubitState::Excited, b_in);
    let last = tg.values.len() - 1;

    let mut summary = header("readout", cfg);
    summary.insert(
        "dispersive".into(),
        json!({
            "chi_GHz": ghz(chi),
            "qubit_cavity_detuning_GHz": ghz(delta_qr),
            "within_dispersive_regime": dispersive,
        }),
    );
    summary.insert(
        "reflection".into(),
        json!({
            "max_all_pass_deviation": max_dev,
            "peak_phase_difference_rad": peak.1,
            "peak_index": peak.0,
            "peak_omega_probe_GHz": ghz(probes[peak.0]),
            "probe_step_GHz": ghz(ro.probe_span / (ro.probe_points - 1) as f64),
        }),
    );
    summary.insert(
        "trajectories".into(),
        json!({
            "fixed_point_g": [fg.re, fg.im],
            "fixed_point_e": [fe.re, fe.im],
            "final_residual_g": (tg.values[last] - fg).norm(),
            "final_residual_e": (te.values[last] - fe).norm(),
            "steady_separation": (fg - fe).norm(),
            "final_separation": json_number(sep[last]),
        }),
    );
    Ok(RunOutput {
        name: "readout",
        tables: vec![("readout".into(), sweep), ("readout_trajectory".into(), traj)],
        summary: Value::Object(summary),
    })
}

pub fn run_transmon_spectrum(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let t = &cfg.transmon;
    let mut table = Table::new([
        "EJ_over_EC",
        "omega01_numeric_GHz",
        "omega01_asymptotic_GHz",
        "anharmonicity_GHz",
    ]);
    for ratio in t.ratios() {
        let f = transmon_frequencies(&TransmonParams::new(ratio * t.e_c, t.e_c, t.n_cut, 3)?)?;
        // reported as ω12 − ω01, negative for a transmon
        table.push(vec![
            ratio,
            ghz(f.omega_01_numeric),
            ghz(f.omega_q_asymptotic),
            -ghz(f.anharmonicity_numeric),
        ]);
    }
    if let Some(w) = table.column("omega01_numeric_GHz") {
        if !w.windows(2).all(|p| p[1] > p[0]) {
            return Err(CliError::Contract(
                "omega01 is not increasing with E_J/E_C".into(),
            ));
        }
    }

    let reference = transmon_frequencies(&TransmonParams::new(t.e_j, t.e_c, t.n_cut, 3)?)?;
    let s = &cfg.system;
    let mut jc = Table::new(["n", "E_minus_GHz", "E_plus_GHz", "Delta_n_GHz", "sin_theta", "cos_theta"]);
    for n in 0..s.n - 1 {
        let b = jc_block(n, s.omega_r, s.omega_t, s.g);
        jc.push(vec![n as f64, ghz(b.e_minus), ghz(b.e_plus), ghz(b.delta_n), b.sin_theta, b.cos_theta]);
    }
    let chi = dispersive_shift(s.g, s.omega_t - s.omega_r)?;

    let mut summary = header("spectrum", cfg);
    summary.insert(
        "transmon".into(),
        json!({
            "EJ_over_EC": t.e_j / t.e_c,
            "omega01_numeric_GHz": ghz(reference.omega_01_numeric),
            "omega01_asymptotic_GHz": ghz(reference.omega_q_asymptotic),
            "omega01_relative_gap": (reference.omega_01_numeric - reference.omega_q_asymptotic).abs()
                / reference.omega_01_numeric,
            "anharmonicity_GHz": -ghz(reference.anharmonicity_numeric),
            "anharmonicity_over_EC": reference.anharmonicity_numeric / t.e_c,
        }),
    );
    summary.insert(
        "jaynes_cummings".into(),
        json!({
            "chi_GHz": ghz(chi),
            "vacuum_rabi_GHz": ghz(jc_block(0, s.omega_r, s.omega_t, s.g).delta_n),
        }),
    );
    Ok(RunOutput {
        name: "spectrum",
        tables: vec![("transmon".into(), table), ("jc_spectrum".into(), jc)],
        summary: Value::Object(summary),
    })
}
