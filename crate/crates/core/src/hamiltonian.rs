//! Static-plus-driven Hamiltonians, H(t) = H₀ + Σ_k c_k(t) O_k.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{Dims, Operator, C64};

/// Time window applied to a drive coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Constant,
    /// On for `start <= t < stop` (ns), off elsewhere.
    Rectangular { start: f64, stop: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant => 1.0,
            Envelope::Rectangular { start, stop } => {
                if t >= start && t < stop {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Scalar time coefficient `amplitude · e^{−iωt} · envelope(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub amplitude: C64,
    pub omega: f64,
    pub envelope: Envelope,
}

impl Coefficient {
    pub fn constant(amplitude: C64) -> Self {
        Self {
            amplitude,
            omega: 0.0,
            envelope: Envelope::Constant,
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        let env = self.envelope.value(t);
        if env == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.amplitude * C64::from_polar(env, -self.omega * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentTerm {
    pub operator: Operator,
    pub coefficient: Coefficient,
}

/// A static operator plus coefficient-weighted time-dependent terms.
///
/// Hermiticity of H(t) is the builder's responsibility: drive terms come in
/// conjugate pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    static_part: Operator,
    terms: Vec<TimeDependentTerm>,
}

impl HamiltonianSpec {
    pub fn new(static_part: Operator) -> Self {
        Self {
            static_part,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, operator: Operator, coefficient: Coefficient) -> Result<Self> {
        self.push_term(operator, coefficient)?;
        Ok(self)
    }

    pub fn push_term(&mut self, operator: Operator, coefficient: Coefficient) -> Result<()> {
        if operator.dims() != self.static_part.dims() {
            return Err(Error::ShapeMismatch {
                expected: self.static_part.dims().as_slice().to_vec(),
                found: operator.dims().as_slice().to_vec(),
            });
        }
        self.terms.push(TimeDependentTerm {
            operator,
            coefficient,
        });
        Ok(())
    }

    pub fn extend_terms(&mut self, terms: Vec<TimeDependentTerm>) -> Result<()> {
        for term in terms {
            self.push_term(term.operator, term.coefficient)?;
        }
        Ok(())
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn terms(&self) -> &[TimeDependentTerm] {
        &self.terms
    }

    pub fn dims(&self) -> &Dims {
        self.static_part.dims()
    }

    pub fn is_static(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dense matrix of H(t).
    pub fn matrix_at(&self, t: f64) -> DMatrix<C64> {
        let mut h = self.static_part.matrix().clone();
        for term in &self.terms {
            let c = term.coefficient.eval(t);
            if c != C64::new(0.0, 0.0) {
                h += term.operator.matrix() * c;
            }
        }
        h
    }

    pub fn at(&self, t: f64) -> Operator {
        Operator::new(self.dims().clone(), self.matrix_at(t))
            .expect("terms share the static part's dims")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{create, destroy, number};

    #[test]
    fn rectangular_window_is_half_open() {
        let env = Envelope::Rectangular {
            start: 1.0,
            stop: 2.0,
        };
        assert_eq!(env.value(0.999), 0.0);
        assert_eq!(env.value(1.0), 1.0);
        assert_eq!(env.value(1.999), 1.0);
        assert_eq!(env.value(2.0), 0.0);
    }

    #[test]
    fn coefficient_rotates_clockwise() {
        let c = Coefficient {
            amplitude: C64::new(2.0, 0.0),
            omega: std::f64::consts::FRAC_PI_2,
            envelope: Envelope::Constant,
        };
        let z = c.eval(1.0);
        assert!((z - C64::new(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn driven_matrix_is_hermitian_when_paired() {
        let amp = C64::new(0.3, 0.0);
        let omega = 4.0;
        let h = HamiltonianSpec::new(number(4).unwrap())
            .with_term(
                create(4).unwrap(),
                Coefficient {
                    amplitude: amp,
                    omega,
                    envelope: Envelope::Constant,
                },
            )
            .unwrap()
            .with_term(
                destroy(4).unwrap(),
                Coefficient {
                    amplitude: amp,
                    omega: -omega,
                    envelope: Envelope::Constant,
                },
            )
            .unwrap();
        for &t in &[0.0, 0.37, 5.1] {
            assert!(h.at(t).is_hermitian(1e-15));
        }
    }

    #[test]
    fn mismatched_term_dims_are_rejected() {
        let h = HamiltonianSpec::new(number(3).unwrap());
        assert!(h
            .with_term(number(4).unwrap(), Coefficient::constant(C64::new(1.0, 0.0)))
            .is_err());
    }
}
