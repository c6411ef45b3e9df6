//! Classical fourth-order Runge-Kutta.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::operator::C64;

/// Uniform time grid: `points` samples from `t_start` to `t_end`, each
/// interval split into `substeps` RK4 steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub substeps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, points: usize, substeps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_end <= t_start {
            return Err(Error::InvalidArgument(format!(
                "time grid needs finite t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "time grid needs at least 2 points, got {points}"
            )));
        }
        if substeps < 1 {
            return Err(Error::InvalidArgument("substeps must be at least 1".into()));
        }
        Ok(Self {
            t_start,
            t_end,
            points,
            substeps,
        })
    }

    /// Spacing between recorded points.
    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.points - 1) as f64
    }

    /// RK4 step length.
    pub fn step(&self) -> f64 {
        self.spacing() / self.substeps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.t_end
        } else {
            self.t_start + k as f64 * self.spacing()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.time(k)).collect()
    }
}

/// One RK4 step of dy/dt = f(t, y), with the right-hand side evaluated at
/// t, t + h/2 and t + h.
pub fn rk4_step<Y, F>(y: &Y, t: f64, h: f64, mut f: F) -> Y
where
    Y: Clone + Add<Output = Y> + Mul<C64, Output = Y>,
    F: FnMut(f64, &Y) -> Y,
{
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y.clone() + k1.clone() * half));
    let k3 = f(t + 0.5 * h, &(y.clone() + k2.clone() * half));
    let k4 = f(t + h, &(y.clone() + k3.clone() * full));
    let two = C64::new(2.0, 0.0);
    y.clone() + (k1 + k2 * two + k3 * two + k4) * C64::new(h / 6.0, 0.0)
}
