//! Unit conventions and physical constants.
//!
//! Inside the simulation ℏ = 1: energies and rates are angular frequencies in
//! rad/ns and times are in ns. Linear frequencies in GHz map onto that scale
//! by a factor of 2π. The SI constants below are the exact 2019 SI values and
//! are only used by the Josephson and transmission-line relations.

use std::f64::consts::PI;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);

/// von Klitzing constant h/e², Ω.
pub const RESISTANCE_QUANTUM: f64 = PLANCK / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);

/// Linear frequency in GHz to angular frequency in rad/ns.
#[inline]
pub fn ghz_to_rad_per_ns(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

/// Angular frequency in rad/ns to linear frequency in GHz.
#[inline]
pub fn rad_per_ns_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_round_trip_is_lossless() {
        for &f in &[0.0, 0.2, 5.0, 7.0, 0.16, 1.0e-3, 123.456] {
            let back = rad_per_ns_to_ghz(ghz_to_rad_per_ns(f));
            assert!((back - f).abs() <= 1e-15 * f.abs(), "{f} -> {back}");
        }
    }

    #[test]
    fn resistance_quantum_value() {
        assert!((RESISTANCE_QUANTUM - 25_812.807_45).abs() < 1e-2);
    }
}
