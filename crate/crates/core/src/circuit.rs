//! Device formulas and Hamiltonian builders for a transmon coupled to a
//! single resonator mode.
//!
//! Frequencies and energies are angular frequencies in rad/ns (ℏ = 1) unless
//! a function says otherwise. The Josephson relations and the coupling
//! formula's resistance quantum use SI units.

use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::{Coefficient, Envelope, HamiltonianSpec, TimeDependentTerm};
use crate::operator::{
    destroy, eigen_hermitian, identity, number, pauli, tensor, Dims, Operator, Pauli, C64,
};
use crate::units::{ELEMENTARY_CHARGE, HBAR, RESISTANCE_QUANTUM};

/// Smallest charge-basis cutoff accepted by the transmon builders.
pub const MIN_CHARGE_CUTOFF: usize = 5;
pub const DEFAULT_CHARGE_CUTOFF: usize = 20;

fn require_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {value}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams {
    pub omega_r: f64,
    /// Inductance and capacitance the frequency was derived from, if any.
    pub lc: Option<(f64, f64)>,
}

impl ResonatorParams {
    pub fn new(omega_r: f64) -> Result<Self> {
        require_positive("omega_r", omega_r)?;
        Ok(Self { omega_r, lc: None })
    }

    pub fn from_lc(inductance: f64, capacitance: f64) -> Result<Self> {
        Ok(Self {
            omega_r: resonator_frequency(inductance, capacitance)?,
            lc: Some((inductance, capacitance)),
        })
    }

    pub fn impedance(&self) -> Option<f64> {
        self.lc.map(|(l, c)| (l / c).sqrt())
    }
}

/// ω_r = 1/√(LC).
pub fn resonator_frequency(inductance: f64, capacitance: f64) -> Result<f64> {
    require_positive("inductance", inductance)?;
    require_positive("capacitance", capacitance)?;
    Ok(1.0 / (inductance * capacitance).sqrt())
}

/// Z_r = √(L/C).
pub fn resonator_impedance(inductance: f64, capacitance: f64) -> Result<f64> {
    require_positive("inductance", inductance)?;
    require_positive("capacitance", capacitance)?;
    Ok((inductance / capacitance).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JosephsonParams {
    /// Critical current in A.
    pub critical_current: f64,
}

impl JosephsonParams {
    pub fn new(critical_current: f64) -> Result<Self> {
        require_positive("critical current", critical_current)?;
        Ok(Self { critical_current })
    }

    /// From the Josephson energy in J, via I_c = 2e·E_J/ℏ.
    pub fn from_josephson_energy(e_j_joules: f64) -> Result<Self> {
        require_positive("E_J", e_j_joules)?;
        Self::new(2.0 * ELEMENTARY_CHARGE * e_j_joules / HBAR)
    }
}

/// DC Josephson relation I = I_c sin φ.
pub fn josephson_current(critical_current: f64, phase: f64) -> f64 {
    critical_current * phase.sin()
}

/// AC Josephson relation ω_J = 2eV/ℏ, in rad/s for V in volts.
pub fn josephson_frequency(voltage: f64) -> f64 {
    2.0 * ELEMENTARY_CHARGE * voltage / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub e_j: f64,
    pub e_c: f64,
    pub n_cut: usize,
    pub levels: usize,
}

impl TransmonParams {
    pub fn new(e_j: f64, e_c: f64, n_cut: usize, levels: usize) -> Result<Self> {
        require_positive("E_J", e_j)?;
        require_positive("E_C", e_c)?;
        if n_cut < MIN_CHARGE_CUTOFF {
            return Err(Error::Cutoff(n_cut));
        }
        if levels < 2 {
            return Err(Error::InvalidDimension(format!(
                "transmon truncation must keep at least 2 levels, got {levels}"
            )));
        }
        if e_j / e_c < 20.0 {
            warn!("E_J/E_C = {:.3} is outside the transmon regime (< 20)", e_j / e_c);
        }
        Ok(Self {
            e_j,
            e_c,
            n_cut,
            levels,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.e_j / self.e_c
    }
}

/// Charge-basis Hamiltonian 4E_C n̂² − E_J cos φ̂ on charge states −n_cut..=n_cut.
///
/// cos φ̂ is the Cooper-pair hopping (|k⟩⟨k+1| + h.c.)/2.
pub fn transmon_charge_hamiltonian(p: &TransmonParams) -> Result<Operator> {
    if p.n_cut < MIN_CHARGE_CUTOFF {
        return Err(Error::Cutoff(p.n_cut));
    }
    let dim = 2 * p.n_cut + 1;
    let mut m = DMatrix::zeros(dim, dim);
    let hop = C64::new(-0.5 * p.e_j, 0.0);
    for i in 0..dim {
        let k = i as f64 - p.n_cut as f64;
        m[(i, i)] = C64::new(4.0 * p.e_c * k * k, 0.0);
        if i + 1 < dim {
            m[(i, i + 1)] = hop;
            m[(i + 1, i)] = hop;
        }
    }
    Operator::new(Dims::single(dim)?, m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonFrequencies {
    /// √(8E_C E_J) − E_C.
    pub omega_q_asymptotic: f64,
    /// E₁ − E₀ from the charge basis.
    pub omega_01_numeric: f64,
    /// (E₁ − E₀) − (E₂ − E₁) from the charge basis; positive for a transmon.
    pub anharmonicity_numeric: f64,
}

pub fn transmon_frequencies(p: &TransmonParams) -> Result<TransmonFrequencies> {
    let levels = eigen_hermitian(&transmon_charge_hamiltonian(p)?)?.values;
    let e01 = levels[1] - levels[0];
    let e12 = levels[2] - levels[1];
    Ok(TransmonFrequencies {
        omega_q_asymptotic: (8.0 * p.e_c * p.e_j).sqrt() - p.e_c,
        omega_01_numeric: e01,
        anharmonicity_numeric: e01 - e12,
    })
}

/// Fock-diagonal Duffing oscillator E_k = k·ω_q − (E_C/2)·k(k−1).
pub fn duffing_hamiltonian(omega_q: f64, e_c: f64, levels: usize) -> Result<Operator> {
    if levels < 2 {
        return Err(Error::InvalidDimension(format!(
            "Duffing oscillator needs at least 2 levels, got {levels}"
        )));
    }
    let energies: Vec<f64> = (0..levels)
        .map(|k| {
            let k = k as f64;
            k * omega_q - 0.5 * e_c * k * (k - 1.0)
        })
        .collect();
    Operator::diagonal(&energies)
}

/// Cavity operator lifted to the cavity ⊗ qubit space.
fn on_cavity(op: &Operator, qubit_levels: usize) -> Result<Operator> {
    tensor(&[op, &identity(qubit_levels)?])
}

/// Qubit operator lifted to the cavity ⊗ qubit space.
fn on_qubit(op: &Operator, cavity_levels: usize) -> Result<Operator> {
    tensor(&[&identity(cavity_levels)?, op])
}

/// Jaynes-Cummings Hamiltonian ω_R a†a − (ω_T/2)σ_z + g(aσ_+ + a†σ_−) on dims (n, 2).
pub fn jc_hamiltonian(omega_r: f64, omega_t: f64, g: f64, n: usize) -> Result<HamiltonianSpec> {
    let a = on_cavity(&destroy(n)?, 2)?;
    let ad = a.dagger();
    let sp = on_qubit(&pauli(Pauli::Plus), n)?;
    let sm = on_qubit(&pauli(Pauli::Minus), n)?;
    let sz = on_qubit(&pauli(Pauli::Z), n)?;
    let n_cav = &ad * &a;
    let coupling = &(&a * &sp) + &(&ad * &sm);
    let h = &(&(&n_cav * omega_r) - &(&sz * (0.5 * omega_t))) + &(&coupling * g);
    Ok(HamiltonianSpec::new(h))
}

/// Total excitation number a†a + σ_+σ_− on dims (n, 2).
pub fn total_excitation(n: usize) -> Result<Operator> {
    let cav = on_cavity(&number(n)?, 2)?;
    let qubit = on_qubit(&(&pauli(Pauli::Plus) * &pauli(Pauli::Minus)), n)?;
    Ok(&cav + &qubit)
}

fn duffing_parts(
    omega_r: f64,
    omega_t: f64,
    e_c: f64,
    n: usize,
    levels: usize,
) -> Result<(Operator, Operator, Operator)> {
    if levels < 2 {
        return Err(Error::InvalidDimension(format!(
            "transmon truncation must keep at least 2 levels, got {levels}"
        )));
    }
    let a = on_cavity(&destroy(n)?, levels)?;
    let b = on_qubit(&destroy(levels)?, n)?;
    let ad = a.dagger();
    let bd = b.dagger();
    let kerr = &(&(&bd * &bd) * &b) * &b;
    let bare = &(&(&(&ad * &a) * omega_r) + &(&(&bd * &b) * omega_t)) - &(&kerr * (0.5 * e_c));
    Ok((bare, a, b))
}

/// Full coupled Hamiltonian with counter-rotating terms:
/// ω_R a†a + ω_T b†b − (E_C/2) b†b†bb − g(b† − b)(a† − a).
pub fn coupled_duffing_hamiltonian(
    omega_r: f64,
    omega_t: f64,
    e_c: f64,
    g: f64,
    n: usize,
    levels: usize,
) -> Result<HamiltonianSpec> {
    let (bare, a, b) = duffing_parts(omega_r, omega_t, e_c, n, levels)?;
    let coupling = &(&b.dagger() - &b) * &(&a.dagger() - &a);
    Ok(HamiltonianSpec::new(&bare - &(&coupling * g)))
}

/// The same model with the b†a† and ba terms dropped:
/// ω_R a†a + ω_T b†b − (E_C/2) b†b†bb + g(b†a + ba†).
pub fn coupled_duffing_rwa_hamiltonian(
    omega_r: f64,
    omega_t: f64,
    e_c: f64,
    g: f64,
    n: usize,
    levels: usize,
) -> Result<HamiltonianSpec> {
    let (bare, a, b) = duffing_parts(omega_r, omega_t, e_c, n, levels)?;
    let exchange = &(&b.dagger() * &a) + &(&b * &a.dagger());
    Ok(HamiltonianSpec::new(&bare + &(&exchange * g)))
}

/// g = ω_r (C_g/C_T)(E_J/2E_C)^{1/4} √(πZ_R / 2R_K), with R_K = h/e² and Z_R in Ω.
pub fn coupling_constant(
    omega_r: f64,
    c_g: f64,
    c_t: f64,
    e_j: f64,
    e_c: f64,
    z_r: f64,
) -> Result<f64> {
    if !(c_g >= 0.0) {
        return Err(Error::Domain(format!("C_g must be non-negative, got {c_g}")));
    }
    require_positive("omega_r", omega_r)?;
    require_positive("C_T", c_t)?;
    require_positive("E_J", e_j)?;
    require_positive("E_C", e_c)?;
    require_positive("Z_R", z_r)?;
    Ok(omega_r
        * (c_g / c_t)
        * (e_j / (2.0 * e_c)).powf(0.25)
        * (std::f64::consts::PI * z_r / (2.0 * RESISTANCE_QUANTUM)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveTarget {
    Cavity,
    Qubit,
}

impl FromStr for DriveTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cavity" => Ok(Self::Cavity),
            "qubit" => Ok(Self::Qubit),
            other => Err(Error::Config(format!(
                "unknown drive target '{other}', expected 'cavity' or 'qubit'"
            ))),
        }
    }
}

impl fmt::Display for DriveTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cavity => "cavity",
            Self::Qubit => "qubit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    pub amplitude: f64,
    pub omega_d: f64,
    pub envelope: Envelope,
}

impl DriveParams {
    pub fn new(amplitude: f64, omega_d: f64, envelope: Envelope) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(Error::Domain(format!(
                "drive amplitude must be non-negative, got {amplitude}"
            )));
        }
        Ok(Self {
            amplitude,
            omega_d,
            envelope,
        })
    }
}

fn target_lowering(target: DriveTarget, dims: &Dims) -> Result<Operator> {
    let &[n_cav, n_qubit] = dims.as_slice() else {
        return Err(Error::InvalidDimension(format!(
            "drives expect cavity ⊗ qubit dims, got {dims}"
        )));
    };
    match target {
        DriveTarget::Cavity => on_cavity(&destroy(n_cav)?, n_qubit),
        DriveTarget::Qubit => on_qubit(&destroy(n_qubit)?, n_cav),
    }
}

/// Lab-frame drive A(e^{−iω_d t} b† + e^{iω_d t} b) as two coefficient terms.
/// A zero amplitude yields no terms.
pub fn drive_terms(p: &DriveParams, target: DriveTarget, dims: &Dims) -> Result<Vec<TimeDependentTerm>> {
    let lower = target_lowering(target, dims)?;
    if p.amplitude == 0.0 {
        return Ok(Vec::new());
    }
    let amplitude = C64::new(p.amplitude, 0.0);
    Ok(vec![
        TimeDependentTerm {
            operator: lower.dagger(),
            coefficient: Coefficient {
                amplitude,
                omega: p.omega_d,
                envelope: p.envelope,
            },
        },
        TimeDependentTerm {
            operator: lower,
            coefficient: Coefficient {
                amplitude,
                omega: -p.omega_d,
                envelope: p.envelope,
            },
        },
    ])
}

/// Drive in the frame rotating at ω_d: Δ b†b + ε b† + ε* b with Δ = ω_target − ω_d
/// and ε = A. Only the driven mode's own term is included.
pub fn rotating_frame_drive(
    p: &DriveParams,
    target: DriveTarget,
    omega_target: f64,
    dims: &Dims,
) -> Result<Operator> {
    let lower = target_lowering(target, dims)?;
    let raise = lower.dagger();
    let detuning = omega_target - p.omega_d;
    let eps = C64::new(p.amplitude, 0.0);
    let n_op = &raise * &lower;
    Ok(&(&(&n_op * detuning) + &(&raise * eps)) + &(&lower * eps.conj()))
}
