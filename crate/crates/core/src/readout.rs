//! Input-output relations and dispersive readout of a cavity coupled to a
//! transmission line.
//!
//! A probe tone at angular frequency ω is evaluated at the Laplace point
//! s = −iω, matching the e^{−iωt} time convention of the field operators.
//! The qubit-conditioned cavity resonance is ω_r − χ/2 for the ground state
//! and ω_r + χ/2 for the excited state.

use std::fmt;

use crate::error::{Error, Result};
use crate::integrate::{rk4_step, TimeGrid};
use crate::operator::C64;
use crate::units::HBAR;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitState {
    Ground,
    Excited,
}

impl QubitState {
    /// −1 for ground, +1 for excited: the conditioned resonance is ω_r + sign·χ/2.
    pub fn sign(self) -> f64 {
        match self {
            Self::Ground => -1.0,
            Self::Excited => 1.0,
        }
    }
}

impl fmt::Display for QubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ground => "g",
            Self::Excited => "e",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutParams {
    pub omega_r: f64,
    /// Coupling rate to the line, κ_c.
    pub kappa_c: f64,
    pub chi: f64,
    pub epsilon_d: C64,
    pub omega_d: f64,
}

impl ReadoutParams {
    pub fn new(omega_r: f64, kappa_c: f64, chi: f64, epsilon_d: C64, omega_d: f64) -> Result<Self> {
        if !(kappa_c > 0.0) {
            return Err(Error::Domain(format!("kappa_c must be positive, got {kappa_c}")));
        }
        Ok(Self {
            omega_r,
            kappa_c,
            chi,
            epsilon_d,
            omega_d,
        })
    }

    pub fn conditioned_frequency(&self, qubit: QubitState) -> f64 {
        self.omega_r + qubit.sign() * 0.5 * self.chi
    }
}

/// Sampled complex amplitude ⟨ã⟩(t).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
}

/// R(s) = (s + iω_r − κ_c/2) / (s + iω_r + κ_c/2).
pub fn reflection_coefficient(s: C64, omega_r: f64, kappa_c: f64) -> Result<C64> {
    let den = s + I * omega_r + 0.5 * kappa_c;
    if den.norm() <= 1e-15 {
        return Err(Error::Domain(format!(
            "s = {s} is at the reflection pole s = -i*{omega_r} - {}",
            0.5 * kappa_c
        )));
    }
    if s.re.is_infinite() && s.im == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok((s + I * omega_r - 0.5 * kappa_c) / den)
}

/// Reflection of probe tones with the cavity resonance shifted by the qubit state.
pub fn dispersive_reflection_sweep(
    probe_omegas: &[f64],
    omega_r: f64,
    kappa_c: f64,
    chi: f64,
    qubit: QubitState,
) -> Result<Vec<C64>> {
    let shifted = omega_r + qubit.sign() * 0.5 * chi;
    probe_omegas
        .iter()
        .map(|&w| reflection_coefficient(C64::new(0.0, -w), shifted, kappa_c))
        .collect()
}

/// ξ_d = −iε_d / (κ/2 + i(ω_r − ω_d)), the steady displacement of a driven cavity.
pub fn steady_state_displacement(p: &ReadoutParams) -> C64 {
    -I * p.epsilon_d / (0.5 * p.kappa_c + I * (p.omega_r - p.omega_d))
}

fn integrate_scalar<F>(grid: &TimeGrid, mut rhs: F) -> ComplexTrace
where
    F: FnMut(f64, C64) -> C64,
{
    let dt = grid.step();
    let mut y = C64::new(0.0, 0.0);
    let mut values = Vec::with_capacity(grid.points);
    values.push(y);
    for k in 1..grid.points {
        let t0 = grid.time(k - 1);
        for s in 0..grid.substeps {
            let t = t0 + s as f64 * dt;
            y = rk4_step(&y, t, dt, |t, y| rhs(t, *y));
        }
        values.push(y);
    }
    ComplexTrace {
        times: grid.times(),
        values,
    }
}

/// dξ/dt = −i(ω_r − ω_d)ξ − (κ/2)ξ − iε_d from ξ(0) = 0; settles at
/// [`steady_state_displacement`].
pub fn displacement_trajectory(p: &ReadoutParams, grid: &TimeGrid) -> ComplexTrace {
    let detuning = p.omega_r - p.omega_d;
    let decay = 0.5 * p.kappa_c;
    integrate_scalar(grid, |_, xi| -I * detuning * xi - decay * xi - I * p.epsilon_d)
}

/// Rotating-frame cavity amplitude conditioned on the qubit state,
/// dã/dt = (∓iχ/2 − κ_c/2) ã − √κ_c b̃_in(t), from ã(0) = 0.
/// The upper sign applies to the ground state.
pub fn conditioned_cavity_trajectory<B>(
    p: &ReadoutParams,
    qubit: QubitState,
    b_in: B,
    grid: &TimeGrid,
) -> ComplexTrace
where
    B: Fn(f64) -> C64,
{
    let rate = C64::new(-0.5 * p.kappa_c, qubit.sign() * 0.5 * p.chi);
    let coupling = p.kappa_c.sqrt();
    integrate_scalar(grid, |t, a| rate * a - coupling * b_in(t))
}

/// Fixed point −√κ_c b̃_in / (κ_c/2 ± iχ/2) of the conditioned equation for a
/// constant input.
pub fn conditioned_fixed_point(p: &ReadoutParams, qubit: QubitState, b_in: C64) -> C64 {
    -p.kappa_c.sqrt() * b_in / C64::new(0.5 * p.kappa_c, -qubit.sign() * 0.5 * p.chi)
}

/// b_out = b_in + √κ_c a.
pub fn input_output(b_in: C64, a: C64, kappa_c: f64) -> C64 {
    b_in + kappa_c.sqrt() * a
}

/// V_rms = √(ℏ ω_s Z₀) |β_s| in SI units (ω_s in rad/s, Z₀ in Ω, |β_s|² in photons/s).
pub fn voltage_from_field(omega_s: f64, z0: f64, beta_s_magnitude: f64) -> Result<f64> {
    for (name, v) in [("omega_s", omega_s), ("Z0", z0), ("|beta_s|", beta_s_magnitude)] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    Ok((HBAR * omega_s * z0).sqrt() * beta_s_magnitude)
}

/// |⟨ã_g⟩(t) − ⟨ã_e⟩(t)| per sample.
pub fn readout_separation(ground: &ComplexTrace, excited: &ComplexTrace) -> Result<Vec<f64>> {
    if ground.times != excited.times {
        return Err(Error::InvalidArgument(
            "readout traces are sampled on different grids".into(),
        ));
    }
    Ok(ground
        .values
        .iter()
        .zip(&excited.values)
        .map(|(g, e)| (g - e).norm())
        .collect())
}
