//! Closed-form Jaynes-Cummings spectrum.
//!
//! Block n couples |n+1, g⟩ and |n, e⟩. With δ = ω_R − ω_T, Ω_n = 2g√(n+1)
//! and Δ_n = √(δ² + Ω_n²) the mixing angle is fixed by
//!
//! ```text
//! sin Θ_n = Ω_n / √((Δ_n − δ)² + Ω_n²),   cos Θ_n = (Δ_n − δ) / √((Δ_n − δ)² + Ω_n²)
//! ```
//!
//! and the dressed states of the block matrix
//! `[[(n+1)ω_R − ω_T/2, −g√(n+1)], [−g√(n+1), nω_R + ω_T/2]]` are
//!
//! ```text
//! |n, +⟩ = sin Θ_n |n+1, g⟩ − cos Θ_n |n, e⟩,   E₊ = (n + ½)ω_R + Δ_n/2
//! |n, −⟩ = cos Θ_n |n+1, g⟩ + sin Θ_n |n, e⟩,   E₋ = (n + ½)ω_R − Δ_n/2
//! ```
//!
//! For g = 0 and δ > 0 the angle is fixed by continuity (sin Θ = 1, cos Θ = 0),
//! so |n, +⟩ is the bare |n+1, g⟩.

use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{Dims, Operator, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcBlock {
    pub n: usize,
    /// δ = ω_R − ω_T
    pub delta: f64,
    /// Ω_n = 2g√(n+1)
    pub omega_n: f64,
    /// Δ_n = √(δ² + Ω_n²), the generalized Rabi frequency of the block.
    pub delta_n: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub e_plus: f64,
    pub e_minus: f64,
}

impl JcBlock {
    /// Amplitudes of |n, +⟩ on (|n+1, g⟩, |n, e⟩).
    pub fn plus_state(&self) -> [f64; 2] {
        [self.sin_theta, -self.cos_theta]
    }

    /// Amplitudes of |n, −⟩ on (|n+1, g⟩, |n, e⟩).
    pub fn minus_state(&self) -> [f64; 2] {
        [self.cos_theta, self.sin_theta]
    }

    /// Largest population transferred out of |n, e⟩ (or |n+1, g⟩): Ω_n²/Δ_n².
    pub fn max_transfer(&self) -> f64 {
        if self.delta_n == 0.0 {
            0.0
        } else {
            (self.omega_n / self.delta_n).powi(2)
        }
    }
}

pub fn jc_block(n: usize, omega_r: f64, omega_t: f64, g: f64) -> JcBlock {
    let delta = omega_r - omega_t;
    let omega_n = 2.0 * g * ((n + 1) as f64).sqrt();
    let delta_n = delta.hypot(omega_n);
    // Δ − δ cancels badly for δ ≫ |Ω|; use (Δ − δ)(Δ + δ) = Ω² there
    let gap = if delta > 0.0 {
        omega_n * omega_n / (delta_n + delta)
    } else {
        delta_n - delta
    };
    let norm = gap.hypot(omega_n);
    let (sin_theta, cos_theta) = if norm == 0.0 {
        (1.0, 0.0)
    } else {
        (omega_n / norm, gap / norm)
    };
    let centre = (n as f64 + 0.5) * omega_r;
    JcBlock {
        n,
        delta,
        omega_n,
        delta_n,
        sin_theta,
        cos_theta,
        e_plus: centre + 0.5 * delta_n,
        e_minus: centre - 0.5 * delta_n,
    }
}

/// The 2×2 block Hamiltonian on (|n+1, g⟩, |n, e⟩).
pub fn jc_block_matrix(n: usize, omega_r: f64, omega_t: f64, g: f64) -> Operator {
    let off = C64::new(-g * ((n + 1) as f64).sqrt(), 0.0);
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new((n + 1) as f64 * omega_r - 0.5 * omega_t, 0.0),
            off,
            off,
            C64::new(n as f64 * omega_r + 0.5 * omega_t, 0.0),
        ],
    );
    Operator::new(Dims::single(2).expect("2 > 0"), m).expect("2x2 block")
}

/// χ = g²/Δ with Δ = ω_q − ω_r. Warns outside the dispersive regime |Δ| ≥ 10g.
pub fn dispersive_shift(g: f64, delta_qr: f64) -> Result<f64> {
    if delta_qr == 0.0 {
        return Err(Error::Domain(
            "dispersive shift is undefined at zero qubit-resonator detuning".into(),
        ));
    }
    if delta_qr.abs() < 10.0 * g.abs() * (1.0 - 1e-12) {
        warn!(
            "|Δ| = {:.4} rad/ns is below 10g = {:.4} rad/ns; the dispersive approximation is poor",
            delta_qr.abs(),
            10.0 * g.abs()
        );
    }
    Ok(g * g / delta_qr)
}
