//! Triplet-form sparse matrices for the integrators' hot loops. Ladder
//! operators and the Jaynes-Cummings Hamiltonian have O(n) nonzeros, so a
//! product costs O(nnz·n) instead of O(n³).

use nalgebra::{DMatrix, DVector};

use crate::operator::C64;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    pub(crate) fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// out += c·S·v
    pub(crate) fn mul_vec_acc(&self, c: C64, v: &DVector<C64>, out: &mut DVector<C64>) {
        for &(i, j, s) in &self.entries {
            out[i] += c * s * v[j];
        }
    }

    /// out += c·S·M
    pub(crate) fn left_mul_acc(&self, c: C64, m: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        for &(i, j, s) in &self.entries {
            let cs = c * s;
            for col in 0..m.ncols() {
                out[(i, col)] += cs * m[(j, col)];
            }
        }
    }

    /// out += c·M·S
    pub(crate) fn right_mul_acc(&self, c: C64, m: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        for &(i, j, s) in &self.entries {
            let cs = c * s;
            for row in 0..m.nrows() {
                out[(row, j)] += cs * m[(row, i)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: f64) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |i, j| {
            if (i * 7 + j * 3) % 4 == 0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new((seed + i as f64).sin(), (seed * j as f64).cos())
            }
        })
    }

    #[test]
    fn products_match_dense() {
        let a = sample(6, 0.3);
        let m = sample(6, 1.7);
        let v = DVector::from_fn(6, |i, _| C64::new(i as f64, -0.5));
        let s = Sparse::from_dense(&a);
        let c = C64::new(0.2, -1.1);

        let mut out = DVector::zeros(6);
        s.mul_vec_acc(c, &v, &mut out);
        assert!((out - &a * &v * c).norm() < 1e-13);

        let mut out = DMatrix::zeros(6, 6);
        s.left_mul_acc(c, &m, &mut out);
        assert!((out - &a * &m * c).norm() < 1e-13);

        let mut out = DMatrix::zeros(6, 6);
        s.right_mul_acc(c, &m, &mut out);
        assert!((out - &m * &a * c).norm() < 1e-13);
    }
}
