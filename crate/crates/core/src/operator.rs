//! Truncated Hilbert-space operator algebra.
//!
//! Composite spaces follow a fixed tensor order: cavity first, qubit second,
//! so a basis label |n, s⟩ maps to the flat index `n * dim_qubit + s`.
//!
//! Qubit convention: |0⟩ is the ground state and |1⟩ the excited state, and
//! σ_z = |0⟩⟨0| − |1⟩⟨1|. With the qubit term written as −(ω_T/2)σ_z the
//! ground state therefore sits at −ω_T/2, below the excited state.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Numeric slack used when checking operator and state invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum elementwise |M − M†|.
    pub hermiticity: f64,
    /// Maximum deviation of ‖ψ‖ or Tr ρ from one.
    pub normalization: f64,
    /// Most negative eigenvalue accepted for a density matrix (a negative number).
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            normalization: 1e-10,
            positivity: -1e-8,
        }
    }
}

/// Ordered subsystem truncation sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension("dimension list is empty".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDimension(format!(
                "subsystem {pos} has dimension 0"
            )));
        }
        Ok(Self(dims))
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Product of all subsystem sizes.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Flat index of a product basis state, with the last subsystem varying fastest.
    pub fn flat_index(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.0.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels given for {} subsystems",
                labels.len(),
                self.0.len()
            )));
        }
        let mut idx = 0;
        for (k, (&label, &dim)) in labels.iter().zip(&self.0).enumerate() {
            if label >= dim {
                return Err(Error::InvalidArgument(format!(
                    "label {label} out of range for subsystem {k} of dimension {dim}"
                )));
            }
            idx = idx * dim + label;
        }
        Ok(idx)
    }

    fn concat(&self, other: &Dims) -> Dims {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Dims(v)
    }

    fn ensure_same(&self, other: &Dims) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: self.0.clone(),
                found: other.0.clone(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A dense complex matrix acting on the space described by `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Dims,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(dims: Dims, matrix: DMatrix<C64>) -> Result<Self> {
        let n = dims.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "matrix is {}x{} but dims {} require {n}x{n}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn identity(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: DMatrix::zeros(n, n),
        }
    }

    /// Real diagonal operator on a single subsystem.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dims = Dims::single(values.len())?;
        let diag = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Ok(Self {
            dims,
            matrix: DMatrix::from_diagonal(&diag),
        })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// max |M − M†| over all entries.
    pub fn hermiticity_residue(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residue() <= tol
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn try_add(&self, other: &Operator) -> Result<Self> {
        self.dims.ensure_same(&other.dims)?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_mul(&self, other: &Operator) -> Result<Self> {
        self.dims.ensure_same(&other.dims)?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// [A, B] = AB − BA.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.dims.ensure_same(&other.dims)?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidDimension(format!(
                "vector of length {} for operator of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(&self.matrix * v)
    }
}

// Arithmetic on references panics on mismatched dims, like nalgebra does on
// mismatched shapes. The `try_*` methods are the checked versions.
impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator dims must match")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.dims.ensure_same(&rhs.dims).expect("operator dims must match");
        Operator {
            dims: self.dims.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("operator dims must match")
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scaled(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scaled(-ONE)
    }
}

fn check_ladder_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!(
            "ladder operators need a truncation of at least 2, got {n}"
        )));
    }
    Ok(())
}

/// Annihilation operator â on an n-level Fock space: â|k⟩ = √k |k−1⟩.
pub fn destroy(n: usize) -> Result<Operator> {
    check_ladder_size(n)?;
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Operator::new(Dims::single(n)?, m)
}

/// Creation operator â†. The top level is absorbed: â†|n−1⟩ = 0.
pub fn create(n: usize) -> Result<Operator> {
    Ok(destroy(n)?.dagger())
}

/// Number operator â†â = diag(0, 1, …, n−1).
pub fn number(n: usize) -> Result<Operator> {
    check_ladder_size(n)?;
    let values: Vec<f64> = (0..n).map(|k| k as f64).collect();
    Operator::diagonal(&values)
}

/// Identity on a single n-level subsystem.
pub fn identity(n: usize) -> Result<Operator> {
    Ok(Operator::identity(Dims::single(n)?))
}

/// |k⟩⟨k| on an n-level subsystem.
pub fn projector(n: usize, k: usize) -> Result<Operator> {
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "level {k} out of range for dimension {n}"
        )));
    }
    let mut m = DMatrix::zeros(n, n);
    m[(k, k)] = ONE;
    Operator::new(Dims::single(n)?, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    /// |0⟩⟨0| − |1⟩⟨1|
    Z,
    /// σ_+ = |1⟩⟨0|, raises ground to excited.
    Plus,
    /// σ_− = |0⟩⟨1|
    Minus,
}

pub fn pauli(which: Pauli) -> Operator {
    let mut m = DMatrix::zeros(2, 2);
    match which {
        Pauli::Z => {
            m[(0, 0)] = ONE;
            m[(1, 1)] = -ONE;
        }
        Pauli::Plus => m[(1, 0)] = ONE,
        Pauli::Minus => m[(0, 1)] = ONE,
    }
    Operator {
        dims: Dims(vec![2]),
        matrix: m,
    }
}

/// Kronecker product in list order; dims are concatenated.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor of an empty operator list".into()))?;
    let mut acc = (*first).clone();
    for op in rest {
        acc = Operator {
            dims: acc.dims.concat(&op.dims),
            matrix: acc.matrix.kronecker(&op.matrix),
        };
    }
    Ok(acc)
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }
}

pub fn eigen_hermitian(op: &Operator) -> Result<Eigen> {
    let residue = op.hermiticity_residue();
    if residue > 1e-10 {
        return Err(Error::Contract(format!(
            "eigen_hermitian needs a Hermitian operator, |M - M†| = {residue:e}"
        )));
    }
    let n = op.dim();
    let eig = op.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// A pure state vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    dims: Dims,
    data: StateData,
}

impl QuantumState {
    /// Pure state; fails unless ‖ψ‖ = 1 within the default tolerance.
    pub fn pure(dims: Dims, psi: DVector<C64>) -> Result<Self> {
        let s = Self::pure_unchecked(dims, psi)?;
        s.validate(&Tolerances::default())?;
        Ok(s)
    }

    /// Pure state rescaled to unit norm.
    pub fn pure_normalized(dims: Dims, psi: DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize a vector of norm {norm}"
            )));
        }
        Self::pure_unchecked(dims, psi.unscale(norm))
    }

    fn pure_unchecked(dims: Dims, psi: DVector<C64>) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::InvalidDimension(format!(
                "state vector of length {} for dims {}",
                psi.len(),
                dims
            )));
        }
        Ok(Self {
            dims,
            data: StateData::Pure(psi),
        })
    }

    /// Density matrix; fails unless trace, Hermiticity and positivity hold.
    pub fn mixed(dims: Dims, rho: DMatrix<C64>) -> Result<Self> {
        let n = dims.total();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::InvalidDimension(format!(
                "density matrix is {}x{} for dims {}",
                rho.nrows(),
                rho.ncols(),
                dims
            )));
        }
        let s = Self {
            dims,
            data: StateData::Mixed(rho),
        };
        s.validate(&Tolerances::default())?;
        Ok(s)
    }

    /// Product basis state |labels⟩.
    pub fn basis(dims: Dims, labels: &[usize]) -> Result<Self> {
        let idx = dims.flat_index(labels)?;
        let mut psi = DVector::zeros(dims.total());
        psi[idx] = ONE;
        Self::pure_unchecked(dims, psi)
    }

    /// Fock state |k⟩ of an n-level mode.
    pub fn fock(n: usize, k: usize) -> Result<Self> {
        Self::basis(Dims::single(n)?, &[k])
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Mixed(_) => None,
        }
    }

    /// ρ = |ψ⟩⟨ψ| for pure states, the matrix itself otherwise.
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            data: StateData::Mixed(self.density_matrix()),
        }
    }

    /// Tensor product of two states; mixed if either factor is mixed.
    pub fn tensor(&self, other: &QuantumState) -> Self {
        let dims = self.dims.concat(&other.dims);
        let data = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => StateData::Pure(a.kronecker(b)),
            _ => StateData::Mixed(self.density_matrix().kronecker(&other.density_matrix())),
        };
        Self { dims, data }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        match &self.data {
            StateData::Pure(v) => {
                let dev = (v.norm() - 1.0).abs();
                if dev > tol.normalization {
                    return Err(Error::Contract(format!(
                        "state norm deviates from 1 by {dev:e}"
                    )));
                }
            }
            StateData::Mixed(m) => {
                let dev = (m.trace() - ONE).norm();
                if dev > tol.normalization {
                    return Err(Error::Contract(format!(
                        "density matrix trace deviates from 1 by {dev:e}"
                    )));
                }
                let op = Operator {
                    dims: self.dims.clone(),
                    matrix: m.clone(),
                };
                let herm = op.hermiticity_residue();
                if herm > tol.hermiticity {
                    return Err(Error::Contract(format!(
                        "density matrix is not Hermitian, |rho - rho†| = {herm:e}"
                    )));
                }
                let min_eig = eigen_hermitian(&op)?.values[0];
                if min_eig < tol.positivity {
                    return Err(Error::Contract(format!(
                        "density matrix has eigenvalue {min_eig:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Coherent state |α⟩ truncated to n Fock levels and renormalized.
pub fn coherent_state(n: usize, alpha: C64) -> Result<QuantumState> {
    if n == 0 {
        return Err(Error::InvalidDimension("coherent state needs n >= 1".into()));
    }
    let mean = alpha.norm_sqr();
    if mean > n as f64 / 4.0 {
        warn!(
            "coherent state with |alpha|^2 = {mean} is poorly represented in {n} Fock levels"
        );
    }
    // c_k = e^{-|α|²/2} α^k / √k!, built recursively
    let mut psi = DVector::zeros(n);
    let mut c = C64::new((-0.5 * mean).exp(), 0.0);
    psi[0] = c;
    for k in 1..n {
        c = c * alpha / (k as f64).sqrt();
        psi[k] = c;
    }
    QuantumState::pure_normalized(Dims::single(n)?, psi)
}

/// ⟨ψ|O|ψ⟩ or Tr(ρO).
pub fn expectation(obs: &Operator, state: &QuantumState) -> Result<C64> {
    obs.dims.ensure_same(&state.dims)?;
    let m = &obs.matrix;
    Ok(match &state.data {
        StateData::Pure(v) => v.dotc(&(m * v)),
        StateData::Mixed(rho) => trace_product(rho, m),
    })
}

/// Expectation of an observable declared Hermitian; the imaginary residue
/// must stay below 1e-9.
pub fn expectation_real(obs: &Operator, state: &QuantumState) -> Result<f64> {
    let z = expectation(obs, state)?;
    if z.im.abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "expectation of a Hermitian observable has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Tr(AB) without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
