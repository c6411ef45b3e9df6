//! Experiment configuration.
//!
//! A config file is TOML with one table per section. Every key is optional;
//! missing keys fall back to the defaults below and each fallback is recorded
//! as a provenance note. Unknown keys are rejected. Frequencies are entered
//! as ν = ω/2π in GHz and converted to rad/ns on load.
//!
//! ```toml
//! [system]
//! omega_R_GHz = 7.0      # cavity frequency
//! omega_T_GHz = 5.0      # qubit frequency
//! g_GHz = 0.2            # coupling
//! N = 10                 # cavity Fock levels
//! qubit_levels = 2
//!
//! [drive]
//! A_GHz = 0.16
//! omega_d_GHz = 5.0      # defaults to omega_T_GHz
//! target = "qubit"       # or "cavity"
//! envelope = "constant"  # or "rectangular" with start_ns / stop_ns
//! chevron_drive = false  # drive the qubit during the chevron sweep
//!
//! [dissipation]
//! kappa_GHz = 0.1
//! gamma_GHz = 0.05
//! n_th = 0.0
//!
//! [grid]
//! t_end_ns = 20.0
//! points = 256
//! substeps = 64
//!
//! [sweep]
//! delta_min_GHz = -1.0
//! delta_max_GHz = 1.0
//! delta_points = 41
//!
//! [output]
//! directory = "out"
//! format = "csv"         # or "json"
//! ```
//!
//! The `[transmon]` and `[readout]` tables configure the `spectrum` and
//! `readout` experiments; see [`TransmonSection`] and [`ReadoutSection`].

// Field names mirror the file keys, units included.
#![allow(non_snake_case)]

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cqed::circuit::{DriveTarget, MIN_CHARGE_CUTOFF};
use cqed::units::ghz_to_rad_per_ns;
use cqed::Envelope;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_OMEGA_R_GHZ: f64 = 7.0;
pub const DEFAULT_OMEGA_T_GHZ: f64 = 5.0;
pub const DEFAULT_G_GHZ: f64 = 0.2;
pub const DEFAULT_N: usize = 10;
pub const DEFAULT_A_GHZ: f64 = 0.16;
pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_SUBSTEPS: usize = 64;
pub const DEFAULT_T_END_NS: f64 = 20.0;
// Chosen to show a visible loss over t_end.
pub const DEFAULT_KAPPA_GHZ: f64 = 0.1;
pub const DEFAULT_GAMMA_GHZ: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Config(format!(
                "output.format: expected 'csv' or 'json', got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "omega_R_GHz")]
    pub omega_r_ghz: Option<f64>,
    #[serde(rename = "omega_T_GHz")]
    pub omega_t_ghz: Option<f64>,
    #[serde(rename = "g_GHz")]
    pub g_ghz: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub qubit_levels: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(rename = "A_GHz")]
    pub a_ghz: Option<f64>,
    pub omega_d_GHz: Option<f64>,
    pub target: Option<String>,
    pub envelope: Option<String>,
    pub start_ns: Option<f64>,
    pub stop_ns: Option<f64>,
    pub chevron_drive: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSection {
    pub kappa_GHz: Option<f64>,
    pub gamma_GHz: Option<f64>,
    pub n_th: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_end_ns: Option<f64>,
    pub points: Option<usize>,
    pub substeps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub delta_min_GHz: Option<f64>,
    pub delta_max_GHz: Option<f64>,
    pub delta_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub format: Option<String>,
}

/// Charge-basis transmon sweep for the `spectrum` experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonSection {
    /// E_C/h in GHz.
    pub E_C_GHz: Option<f64>,
    /// E_J/h in GHz, the reference point reported in the summary.
    pub E_J_GHz: Option<f64>,
    pub n_cut: Option<usize>,
    /// Log-spaced E_J/E_C sweep at fixed E_C.
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_points: Option<usize>,
}

/// Dispersive readout of the qubit through a cavity coupled to a line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutSection {
    pub kappa_c_GHz: Option<f64>,
    /// Constant baseband input amplitude for the conditioned trajectories.
    pub b_in: Option<f64>,
    /// Probe window width in units of κ_c, centred on ω_R.
    pub probe_span_kappa: Option<f64>,
    pub probe_points: Option<usize>,
    /// Trajectory length in units of 1/κ_c.
    pub t_end_kappa: Option<f64>,
    pub trajectory_points: Option<usize>,
    pub substeps: Option<usize>,
}

/// The file as written. After [`load`] every field is filled in, so this
/// doubles as the echo of the resolved configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub dissipation: DissipationSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub transmon: TransmonSection,
    #[serde(default)]
    pub readout: ReadoutSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub omega_r: f64,
    pub omega_t: f64,
    pub g: f64,
    pub n: usize,
    pub qubit_levels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    pub amplitude: f64,
    pub omega_d: f64,
    pub target: DriveTarget,
    pub envelope: Envelope,
    pub chevron_drive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationConfig {
    pub kappa: f64,
    pub gamma: f64,
    pub n_th: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub t_end: f64,
    pub points: usize,
    pub substeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
}

impl SweepConfig {
    /// Detunings in rad/ns. A symmetric range puts δ = 0 exactly on the grid
    /// when the point count is odd.
    pub fn deltas(&self) -> Vec<f64> {
        linspace(self.delta_min, self.delta_max, self.delta_points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmonConfig {
    pub e_c: f64,
    pub e_j: f64,
    pub n_cut: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_points: usize,
}

impl TransmonConfig {
    pub fn ratios(&self) -> Vec<f64> {
        if self.ratio_points == 1 {
            return vec![self.ratio_min];
        }
        let (lo, hi) = (self.ratio_min.ln(), self.ratio_max.ln());
        let last = (self.ratio_points - 1) as f64;
        let mut r: Vec<f64> = (0..self.ratio_points)
            .map(|i| (lo + (hi - lo) * i as f64 / last).exp())
            .collect();
        // pin the ends so they are not perturbed by the exp/ln round trip
        r[0] = self.ratio_min;
        r[self.ratio_points - 1] = self.ratio_max;
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutConfig {
    pub kappa_c: f64,
    pub b_in: f64,
    pub probe_span: f64,
    pub probe_points: usize,
    pub t_end: f64,
    pub trajectory_points: usize,
    pub substeps: usize,
}

/// Validated configuration with all rates in rad/ns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub drive: DriveConfig,
    pub dissipation: DissipationConfig,
    pub grid: GridConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    pub transmon: TransmonConfig,
    pub readout: ReadoutConfig,
    /// The file with every default filled in, in file units.
    pub resolved: RawConfig,
    /// One line per field that fell back to a default.
    pub provenance: Vec<String>,
}

/// `lo + (hi − lo)·i/(n − 1)`; a single point sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let last = (n - 1) as f64;
    (0..n).map(|i| lo + (hi - lo) * (i as f64 / last)).collect()
}

struct Resolver {
    notes: Vec<String>,
}

impl Resolver {
    fn take<T: Clone + fmt::Debug>(&mut self, slot: &mut Option<T>, default: T, path: &str, why: &str) -> T {
        if let Some(v) = slot {
            return v.clone();
        }
        let note = if why.is_empty() {
            format!("{path} defaulted to {default:?}")
        } else {
            format!("{path} defaulted to {default:?} ({why})")
        };
        self.notes.push(note);
        *slot = Some(default.clone());
        default
    }
}

fn bad(path: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn finite(path: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(path, format!("must be finite, got {v}")))
    }
}

fn positive(path: &str, v: f64) -> Result<f64, CliError> {
    if finite(path, v)? > 0.0 {
        Ok(v)
    } else {
        Err(bad(path, format!("must be positive, got {v}")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<f64, CliError> {
    if finite(path, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(bad(path, format!("must be non-negative, got {v}")))
    }
}

fn at_least(path: &str, v: usize, min: usize) -> Result<usize, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(bad(path, format!("must be at least {min}, got {v}")))
    }
}

/// Parses and validates config text. Errors name the offending field.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    resolve(raw)
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn resolve(mut raw: RawConfig) -> Result<ExperimentConfig, CliError> {
    let mut r = Resolver { notes: Vec::new() };
    let rad = ghz_to_rad_per_ns;

    let s = &mut raw.system;
    let omega_r_ghz = finite(
        "system.omega_R_GHz",
        r.take(&mut s.omega_r_ghz, DEFAULT_OMEGA_R_GHZ, "system.omega_R_GHz", ""),
    )?;
    let omega_t_ghz = finite(
        "system.omega_T_GHz",
        r.take(&mut s.omega_t_ghz, DEFAULT_OMEGA_T_GHZ, "system.omega_T_GHz", ""),
    )?;
    let g_ghz = finite("system.g_GHz", r.take(&mut s.g_ghz, DEFAULT_G_GHZ, "system.g_GHz", ""))?;
    let n = at_least("system.N", r.take(&mut s.n, DEFAULT_N, "system.N", ""), 2)?;
    let qubit_levels = r.take(&mut s.qubit_levels, 2, "system.qubit_levels", "");
    if qubit_levels != 2 {
        return Err(bad(
            "system.qubit_levels",
            format!("only two-level qubits are supported, got {qubit_levels}"),
        ));
    }
    let system = SystemConfig {
        omega_r: rad(omega_r_ghz),
        omega_t: rad(omega_t_ghz),
        g: rad(g_ghz),
        n,
        qubit_levels,
    };

    let d = &mut raw.drive;
    let a_ghz = non_negative("drive.A_GHz", r.take(&mut d.a_ghz, DEFAULT_A_GHZ, "drive.A_GHz", ""))?;
    let omega_d_ghz = finite(
        "drive.omega_d_GHz",
        r.take(&mut d.omega_d_GHz, omega_t_ghz, "drive.omega_d_GHz", "resonant with the qubit"),
    )?;
    let target_name = r.take(&mut d.target, "qubit".to_string(), "drive.target", "");
    let target = target_name
        .parse::<DriveTarget>()
        .map_err(|_| bad("drive.target", format!("expected 'qubit' or 'cavity', got '{target_name}'")))?;
    let envelope_name = r.take(&mut d.envelope, "constant".to_string(), "drive.envelope", "");
    let envelope = match envelope_name.as_str() {
        "constant" => {
            for (path, v) in [("drive.start_ns", d.start_ns), ("drive.stop_ns", d.stop_ns)] {
                if v.is_some() {
                    return Err(bad(path, "only valid with envelope = \"rectangular\""));
                }
            }
            Envelope::Constant
        }
        "rectangular" => {
            let start = non_negative("drive.start_ns", r.take(&mut d.start_ns, 0.0, "drive.start_ns", ""))?;
            let Some(stop) = d.stop_ns else {
                return Err(bad("drive.stop_ns", "required for a rectangular envelope"));
            };
            if finite("drive.stop_ns", stop)? <= start {
                return Err(bad("drive.stop_ns", format!("must exceed drive.start_ns = {start}, got {stop}")));
            }
            Envelope::Rectangular { start, stop }
        }
        other => {
            return Err(bad(
                "drive.envelope",
                format!("expected 'constant' or 'rectangular', got '{other}'"),
            ))
        }
    };
    let chevron_drive = r.take(&mut d.chevron_drive, false, "drive.chevron_drive", "free vacuum Rabi");
    let drive = DriveConfig {
        amplitude: rad(a_ghz),
        omega_d: rad(omega_d_ghz),
        target,
        envelope,
        chevron_drive,
    };

    let x = &mut raw.dissipation;
    let why = "repo default, no reference value";
    let dissipation = DissipationConfig {
        kappa: rad(non_negative(
            "dissipation.kappa_GHz",
            r.take(&mut x.kappa_GHz, DEFAULT_KAPPA_GHZ, "dissipation.kappa_GHz", why),
        )?),
        gamma: rad(non_negative(
            "dissipation.gamma_GHz",
            r.take(&mut x.gamma_GHz, DEFAULT_GAMMA_GHZ, "dissipation.gamma_GHz", why),
        )?),
        n_th: non_negative("dissipation.n_th", r.take(&mut x.n_th, 0.0, "dissipation.n_th", why))?,
    };

    let gr = &mut raw.grid;
    let grid = GridConfig {
        t_end: positive("grid.t_end_ns", r.take(&mut gr.t_end_ns, DEFAULT_T_END_NS, "grid.t_end_ns", ""))?,
        points: at_least("grid.points", r.take(&mut gr.points, DEFAULT_POINTS, "grid.points", ""), 2)?,
        substeps: at_least(
            "grid.substeps",
            r.take(&mut gr.substeps, DEFAULT_SUBSTEPS, "grid.substeps", ""),
            1,
        )?,
    };

    let sw = &mut raw.sweep;
    let lo = finite("sweep.delta_min_GHz", r.take(&mut sw.delta_min_GHz, -1.0, "sweep.delta_min_GHz", ""))?;
    let hi = finite("sweep.delta_max_GHz", r.take(&mut sw.delta_max_GHz, 1.0, "sweep.delta_max_GHz", ""))?;
    let delta_points = at_least(
        "sweep.delta_points",
        r.take(&mut sw.delta_points, 41, "sweep.delta_points", ""),
        1,
    )?;
    if lo > hi || (lo == hi && delta_points > 1) {
        return Err(bad(
            "sweep.delta_max_GHz",
            format!("must exceed sweep.delta_min_GHz = {lo}, got {hi}"),
        ));
    }
    let sweep = SweepConfig {
        delta_min: rad(lo),
        delta_max: rad(hi),
        delta_points,
    };

    let o = &mut raw.output;
    let directory = r.take(&mut o.directory, PathBuf::from("out"), "output.directory", "");
    let format = r.take(&mut o.format, "csv".to_string(), "output.format", "").parse()?;
    let output = OutputConfig { directory, format };

    let t = &mut raw.transmon;
    let e_c_ghz = positive("transmon.E_C_GHz", r.take(&mut t.E_C_GHz, 0.3, "transmon.E_C_GHz", ""))?;
    let e_j_ghz = positive("transmon.E_J_GHz", r.take(&mut t.E_J_GHz, 15.0, "transmon.E_J_GHz", ""))?;
    let n_cut = at_least(
        "transmon.n_cut",
        r.take(&mut t.n_cut, 20, "transmon.n_cut", ""),
        MIN_CHARGE_CUTOFF,
    )?;
    let ratio_min = positive("transmon.ratio_min", r.take(&mut t.ratio_min, 20.0, "transmon.ratio_min", ""))?;
    let ratio_max = positive("transmon.ratio_max", r.take(&mut t.ratio_max, 500.0, "transmon.ratio_max", ""))?;
    let ratio_points = at_least(
        "transmon.ratio_points",
        r.take(&mut t.ratio_points, 25, "transmon.ratio_points", ""),
        1,
    )?;
    if ratio_min > ratio_max {
        return Err(bad(
            "transmon.ratio_max",
            format!("must not be below transmon.ratio_min = {ratio_min}, got {ratio_max}"),
        ));
    }
    let transmon = TransmonConfig {
        e_c: rad(e_c_ghz),
        e_j: rad(e_j_ghz),
        n_cut,
        ratio_min,
        ratio_max,
        ratio_points,
    };

    let ro = &mut raw.readout;
    let kappa_c = rad(positive(
        "readout.kappa_c_GHz",
        r.take(&mut ro.kappa_c_GHz, 0.05, "readout.kappa_c_GHz", "repo default"),
    )?);
    let readout = ReadoutConfig {
        kappa_c,
        b_in: finite("readout.b_in", r.take(&mut ro.b_in, 1.0, "readout.b_in", ""))?,
        probe_span: kappa_c
            * positive(
                "readout.probe_span_kappa",
                r.take(&mut ro.probe_span_kappa, 10.0, "readout.probe_span_kappa", ""),
            )?,
        probe_points: at_least(
            "readout.probe_points",
            r.take(&mut ro.probe_points, 2001, "readout.probe_points", ""),
            2,
        )?,
        t_end: positive(
            "readout.t_end_kappa",
            r.take(&mut ro.t_end_kappa, 40.0, "readout.t_end_kappa", ""),
        )? / kappa_c,
        trajectory_points: at_least(
            "readout.trajectory_points",
            r.take(&mut ro.trajectory_points, 401, "readout.trajectory_points", ""),
            2,
        )?,
        substeps: at_least(
            "readout.substeps",
            r.take(&mut ro.substeps, 32, "readout.substeps", ""),
            1,
        )?,
    };

    Ok(ExperimentConfig {
        system,
        drive,
        dissipation,
        grid,
        sweep,
        output,
        transmon,
        readout,
        resolved: raw,
        provenance: r.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_file_is_all_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg.system.n, 10);
        assert!(cfg.provenance.iter().any(|n| n.starts_with("system.N defaulted to 10")));
        assert_eq!(cfg.resolved.system.n, Some(10));
        assert_eq!(cfg.sweep.deltas()[20], 0.0);
    }

    #[test]
    fn frequencies_are_converted() {
        let cfg = parse("[system]\nomega_R_GHz = 7.0\n").unwrap();
        assert_eq!(cfg.system.omega_r, 2.0 * PI * 7.0);
        assert!(!cfg.provenance.iter().any(|n| n.starts_with("system.omega_R_GHz")));
    }

    #[test]
    fn errors_name_the_field() {
        let err = parse("[dissipation]\nkappa_GHz = -0.1\n").unwrap_err();
        assert!(err.to_string().contains("dissipation.kappa_GHz"), "{err}");
        let err = parse("[system]\nN = 1\n").unwrap_err();
        assert!(err.to_string().contains("system.N"), "{err}");
        let err = parse("[sweep]\ndelta_min_GHz = 1.0\ndelta_max_GHz = -1.0\n").unwrap_err();
        assert!(err.to_string().contains("sweep.delta_max_GHz"), "{err}");
        let err = parse("[grid]\npoints = 1\n").unwrap_err();
        assert!(err.to_string().contains("grid.points"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse("[system]\nomega_r_GHz = 7.0\n").unwrap_err();
        assert!(err.to_string().contains("omega_r_GHz"), "{err}");
        assert!(parse("[nonsense]\nx = 1\n").is_err());
    }

    #[test]
    fn rectangular_envelope_needs_a_stop() {
        assert!(parse("[drive]\nenvelope = \"rectangular\"\n").is_err());
        let cfg = parse("[drive]\nenvelope = \"rectangular\"\nstop_ns = 5.0\n").unwrap();
        assert_eq!(cfg.drive.envelope, Envelope::Rectangular { start: 0.0, stop: 5.0 });
        assert!(parse("[drive]\nstop_ns = 5.0\n").is_err());
    }

    #[test]
    fn log_ratios_hit_both_ends() {
        let cfg = parse("").unwrap();
        let r = cfg.transmon.ratios();
        assert_eq!(r.len(), 25);
        assert_eq!((r[0], r[24]), (20.0, 500.0));
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}
