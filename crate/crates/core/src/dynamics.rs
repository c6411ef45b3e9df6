//! Closed (Schrödinger) and open (Lindblad) time evolution with observable
//! tracking.
//!
//! Both integrators use fixed-step RK4. After every step the state is
//! corrected: a pure state is rescaled to unit norm, a density matrix is
//! symmetrized and trace-normalized. The size of each correction is recorded
//! in [`Diagnostics`] and a drift above [`MAX_STEP_DRIFT`] aborts the run.

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hamiltonian::{Coefficient, HamiltonianSpec};
use crate::integrate::{rk4_step, TimeGrid};
use crate::operator::{
    destroy, eigen_hermitian, identity, number, projector, tensor, trace_product, Dims, Operator,
    QuantumState, StateData, C64,
};
use crate::sparse::Sparse;

/// Largest per-step norm or trace drift tolerated before renormalization.
pub const MAX_STEP_DRIFT: f64 = 1e-6;

/// Population allowed in the two highest cavity Fock levels.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

const I: C64 = C64::new(0.0, 1.0);

/// A jump operator with its rate folded in (√rate · L).
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub label: String,
}

/// Cavity loss, thermal excitation and qubit relaxation on cavity ⊗ qubit dims:
/// √(κ(1+n_th)) a, √(κ n_th) a†, √γ σ_−. Channels with zero rate are omitted.
pub fn collapse_set(kappa: f64, gamma: f64, n_th: f64, dims: &Dims) -> Result<Vec<CollapseChannel>> {
    for (name, v) in [("kappa", kappa), ("gamma", gamma), ("n_th", n_th)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    let &[n_cav, n_qubit] = dims.as_slice() else {
        return Err(Error::InvalidDimension(format!(
            "collapse operators expect cavity ⊗ qubit dims, got {dims}"
        )));
    };
    let a = tensor(&[&destroy(n_cav)?, &identity(n_qubit)?])?;
    let sm = tensor(&[&identity(n_cav)?, &destroy(n_qubit)?])?;
    let mut channels = Vec::new();
    let decay = kappa * (1.0 + n_th);
    if decay > 0.0 {
        channels.push(CollapseChannel {
            operator: &a * decay.sqrt(),
            label: "cavity_decay".into(),
        });
    }
    let thermal = kappa * n_th;
    if thermal > 0.0 {
        channels.push(CollapseChannel {
            operator: &a.dagger() * thermal.sqrt(),
            label: "cavity_thermal".into(),
        });
    }
    if gamma > 0.0 {
        channels.push(CollapseChannel {
            operator: &sm * gamma.sqrt(),
            label: "qubit_relaxation".into(),
        });
    }
    Ok(channels)
}

/// Sparse pieces of the Lindblad generator. With A(t) = −iH_eff(t) and
/// H_eff = H − (i/2) Σ L†L,
/// dρ/dt = A ρ + ρ A† + Σ L ρ L†.
struct Generator {
    fixed: Sparse,
    fixed_adj: Sparse,
    /// (coefficient, −iO, (−iO)†) per drive term
    driven: Vec<(Coefficient, Sparse, Sparse)>,
    jumps: Vec<(Sparse, Sparse)>,
}

impl Generator {
    fn new(h: &HamiltonianSpec, channels: &[CollapseChannel]) -> Result<Self> {
        let dims = h.dims();
        let n = dims.total();
        let mut damping = DMatrix::zeros(n, n);
        let mut jumps = Vec::with_capacity(channels.len());
        for ch in channels {
            if ch.operator.dims() != dims {
                return Err(Error::ShapeMismatch {
                    expected: dims.as_slice().to_vec(),
                    found: ch.operator.dims().as_slice().to_vec(),
                });
            }
            let l = ch.operator.matrix();
            let ld = l.adjoint();
            damping += &ld * l * C64::new(0.5, 0.0);
            jumps.push((Sparse::from_dense(l), Sparse::from_dense(&ld)));
        }
        let a0 = h.static_part().matrix() * (-I) - damping;
        let driven = h
            .terms()
            .iter()
            .map(|term| {
                let a = term.operator.matrix() * (-I);
                (term.coefficient, Sparse::from_dense(&a), Sparse::from_dense(&a.adjoint()))
            })
            .collect();
        Ok(Self {
            fixed: Sparse::from_dense(&a0),
            fixed_adj: Sparse::from_dense(&a0.adjoint()),
            driven,
            jumps,
        })
    }

    fn rhs(&self, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let one = C64::new(1.0, 0.0);
        let n = rho.nrows();
        let mut out = DMatrix::zeros(n, n);
        // ρA† is formed directly rather than as (Aρ)†, which would assume a
        // Hermitian ρ that RK4 stage states need not be
        self.fixed.left_mul_acc(one, rho, &mut out);
        self.fixed_adj.right_mul_acc(one, rho, &mut out);
        for (coefficient, a, a_adj) in &self.driven {
            let c = coefficient.eval(t);
            if c != C64::new(0.0, 0.0) {
                a.left_mul_acc(c, rho, &mut out);
                a_adj.right_mul_acc(c.conj(), rho, &mut out);
            }
        }
        let mut tmp = DMatrix::zeros(n, n);
        for (l, ld) in &self.jumps {
            tmp.fill(C64::new(0.0, 0.0));
            ld.right_mul_acc(one, rho, &mut tmp);
            l.left_mul_acc(one, &tmp, &mut out);
        }
        out
    }
}

/// −iH(t) as sparse pieces for the Schrödinger equation.
struct UnitaryGenerator {
    fixed: Sparse,
    driven: Vec<(Coefficient, Sparse)>,
}

impl UnitaryGenerator {
    fn new(h: &HamiltonianSpec) -> Self {
        Self {
            fixed: Sparse::from_dense(&(h.static_part().matrix() * (-I))),
            driven: h
                .terms()
                .iter()
                .map(|term| (term.coefficient, Sparse::from_dense(&(term.operator.matrix() * (-I)))))
                .collect(),
        }
    }

    fn rhs(&self, t: f64, psi: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(psi.len());
        self.fixed.mul_vec_acc(C64::new(1.0, 0.0), psi, &mut out);
        for (coefficient, a) in &self.driven {
            let c = coefficient.eval(t);
            if c != C64::new(0.0, 0.0) {
                a.mul_vec_acc(c, psi, &mut out);
            }
        }
        out
    }
}

/// dρ/dt = −i[H, ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
pub fn lindblad_rhs(
    h: &Operator,
    rho: &DMatrix<C64>,
    channels: &[CollapseChannel],
) -> Result<DMatrix<C64>> {
    let n = h.dims().total();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::InvalidDimension(format!(
            "density matrix is {}x{}, Hamiltonian dims {}",
            rho.nrows(),
            rho.ncols(),
            h.dims()
        )));
    }
    Ok(Generator::new(&HamiltonianSpec::new(h.clone()), channels)?.rhs(0.0, rho))
}

/// Per-run integrator health.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Largest |‖ψ‖ − 1| or |Tr ρ − 1| seen before a renormalization.
    pub max_norm_drift: f64,
    /// Largest max|ρ − ρ†| seen before symmetrization (0 for pure states).
    pub max_hermiticity_residue: f64,
    /// Smallest eigenvalue of ρ over all recorded points (master equation only).
    pub min_eigenvalue: Option<f64>,
    /// Largest population of the two highest levels of the first subsystem.
    pub max_top_population: f64,
    pub steps: usize,
}

impl Diagnostics {
    fn new() -> Self {
        Self {
            max_norm_drift: 0.0,
            max_hermiticity_residue: 0.0,
            min_eigenvalue: None,
            max_top_population: 0.0,
            steps: 0,
        }
    }

    pub fn truncation_ok(&self) -> bool {
        self.max_top_population < TRUNCATION_LIMIT
    }
}

/// Expectation-value series on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub diagnostics: Diagnostics,
    pub final_state: QuantumState,
}

impl EvolutionResult {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// A named observable.
pub type Observable = (String, Operator);

/// n_cavity = a†a ⊗ I, p_excited = I ⊗ |1⟩⟨1|, top_fock = |N−1⟩⟨N−1| ⊗ I.
pub fn default_observables(dims: &Dims) -> Result<Vec<Observable>> {
    let &[n_cav, n_qubit] = dims.as_slice() else {
        return Err(Error::InvalidDimension(format!(
            "default observables expect cavity ⊗ qubit dims, got {dims}"
        )));
    };
    let i_cav = identity(n_cav)?;
    let i_qubit = identity(n_qubit)?;
    Ok(vec![
        ("n_cavity".into(), tensor(&[&number(n_cav)?, &i_qubit])?),
        ("p_excited".into(), tensor(&[&i_cav, &projector(n_qubit, 1)?])?),
        ("top_fock".into(), tensor(&[&projector(n_cav, n_cav - 1)?, &i_qubit])?),
    ])
}

/// Projector onto the two highest levels of the first subsystem, if it has
/// more than two levels.
fn top_levels_projector(dims: &Dims) -> Result<Option<DMatrix<C64>>> {
    let first = dims.as_slice()[0];
    if first <= 2 {
        return Ok(None);
    }
    let rest: usize = dims.as_slice()[1..].iter().product();
    let mut p = DMatrix::zeros(first, first);
    p[(first - 1, first - 1)] = C64::new(1.0, 0.0);
    p[(first - 2, first - 2)] = C64::new(1.0, 0.0);
    Ok(Some(p.kronecker(&DMatrix::<C64>::identity(rest, rest))))
}

fn check_observables(dims: &Dims, observables: &[Observable]) -> Result<()> {
    for (name, op) in observables {
        if op.dims() != dims {
            return Err(Error::ShapeMismatch {
                expected: dims.as_slice().to_vec(),
                found: op.dims().as_slice().to_vec(),
            });
        }
        if !op.is_hermitian(1e-12) {
            return Err(Error::Contract(format!("observable '{name}' is not Hermitian")));
        }
    }
    Ok(())
}

fn real_part(z: C64, name: &str) -> Result<f64> {
    if z.im.abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "observable '{name}' has imaginary expectation {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn drift_error(kind: &str, drift: f64, t: f64, grid: &TimeGrid) -> Error {
    Error::StepSize(format!(
        "{kind} drifted by {drift:e} in one step at t = {t} ns (step {} ns); increase substeps",
        grid.step()
    ))
}

fn warn_truncation(diag: &Diagnostics) {
    if !diag.truncation_ok() {
        warn!(
            "population {:e} reached the two highest Fock levels; raise the cavity truncation",
            diag.max_top_population
        );
    }
}

/// Lindblad evolution of `rho0` (a pure state is promoted to a density matrix).
pub fn evolve_master(
    h: &HamiltonianSpec,
    rho0: &QuantumState,
    channels: &[CollapseChannel],
    grid: &TimeGrid,
    observables: &[Observable],
) -> Result<EvolutionResult> {
    let dims = h.dims();
    if rho0.dims() != dims {
        return Err(Error::ShapeMismatch {
            expected: dims.as_slice().to_vec(),
            found: rho0.dims().as_slice().to_vec(),
        });
    }
    check_observables(dims, observables)?;
    let generator = Generator::new(h, channels)?;
    let top = top_levels_projector(dims)?;

    let mut rho = rho0.density_matrix();
    let mut diag = Diagnostics::new();
    let mut series: Vec<(String, Vec<f64>)> = observables
        .iter()
        .map(|(n, _)| (n.clone(), Vec::with_capacity(grid.points)))
        .collect();
    let dt = grid.step();
    let mut min_eig = f64::INFINITY;

    let mut record = |rho: &DMatrix<C64>,
                      diag: &mut Diagnostics,
                      series: &mut Vec<(String, Vec<f64>)>|
     -> Result<()> {
        for ((name, op), (_, out)) in observables.iter().zip(series.iter_mut()) {
            out.push(real_part(trace_product(rho, op.matrix()), name)?);
        }
        if let Some(p) = &top {
            diag.max_top_population = diag.max_top_population.max(trace_product(rho, p).re);
        }
        let op = Operator::new(dims.clone(), rho.clone())?;
        min_eig = min_eig.min(eigen_hermitian(&op)?.values[0]);
        Ok(())
    };

    record(&rho, &mut diag, &mut series)?;
    for k in 1..grid.points {
        let t0 = grid.time(k - 1);
        for s in 0..grid.substeps {
            let t = t0 + s as f64 * dt;
            let next = rk4_step(&rho, t, dt, |t, r| generator.rhs(t, r));
            let drift = (next.trace() - C64::new(1.0, 0.0)).norm();
            let herm = (&next - next.adjoint()).camax();
            diag.max_norm_drift = diag.max_norm_drift.max(drift);
            diag.max_hermiticity_residue = diag.max_hermiticity_residue.max(herm);
            if drift > MAX_STEP_DRIFT {
                return Err(drift_error("trace", drift, t, grid));
            }
            // RK4 conserves the trace of a Lindblad step exactly, so an unstable
            // step shows up as purity above one instead
            let excess = next.norm_squared() / next.trace().norm_sqr() - 1.0;
            if excess > MAX_STEP_DRIFT {
                return Err(drift_error("purity", excess, t, grid));
            }
            let sym = (&next + next.adjoint()) * C64::new(0.5, 0.0);
            let tr = sym.trace();
            rho = sym / tr;
            diag.steps += 1;
        }
        record(&rho, &mut diag, &mut series)?;
    }
    diag.min_eigenvalue = Some(min_eig);
    warn_truncation(&diag);
    Ok(EvolutionResult {
        times: grid.times(),
        series,
        diagnostics: diag,
        final_state: QuantumState::mixed(dims.clone(), rho)?,
    })
}

/// Unitary evolution i dψ/dt = H(t) ψ of a pure state.
pub fn evolve_schrodinger(
    h: &HamiltonianSpec,
    psi0: &QuantumState,
    grid: &TimeGrid,
    observables: &[Observable],
) -> Result<EvolutionResult> {
    let dims = h.dims();
    if psi0.dims() != dims {
        return Err(Error::ShapeMismatch {
            expected: dims.as_slice().to_vec(),
            found: psi0.dims().as_slice().to_vec(),
        });
    }
    let StateData::Pure(psi_init) = psi0.data() else {
        return Err(Error::InvalidArgument(
            "Schrödinger evolution needs a pure state".into(),
        ));
    };
    check_observables(dims, observables)?;
    let top = top_levels_projector(dims)?;
    let generator = UnitaryGenerator::new(h);

    let mut psi: DVector<C64> = psi_init.clone();
    let mut diag = Diagnostics::new();
    let mut series: Vec<(String, Vec<f64>)> = observables
        .iter()
        .map(|(n, _)| (n.clone(), Vec::with_capacity(grid.points)))
        .collect();
    let dt = grid.step();

    let record = |psi: &DVector<C64>,
                  diag: &mut Diagnostics,
                  series: &mut Vec<(String, Vec<f64>)>|
     -> Result<()> {
        for ((name, op), (_, out)) in observables.iter().zip(series.iter_mut()) {
            out.push(real_part(psi.dotc(&(op.matrix() * psi)), name)?);
        }
        if let Some(p) = &top {
            diag.max_top_population = diag.max_top_population.max(psi.dotc(&(p * psi)).re);
        }
        Ok(())
    };

    record(&psi, &mut diag, &mut series)?;
    for k in 1..grid.points {
        let t0 = grid.time(k - 1);
        for s in 0..grid.substeps {
            let t = t0 + s as f64 * dt;
            let next = rk4_step(&psi, t, dt, |t, v| generator.rhs(t, v));
            let norm = next.norm();
            let drift = (norm - 1.0).abs();
            diag.max_norm_drift = diag.max_norm_drift.max(drift);
            if drift > MAX_STEP_DRIFT {
                return Err(drift_error("norm", drift, t, grid));
            }
            psi = next.unscale(norm);
            diag.steps += 1;
        }
        record(&psi, &mut diag, &mut series)?;
    }
    warn_truncation(&diag);
    Ok(EvolutionResult {
        times: grid.times(),
        series,
        diagnostics: diag,
        final_state: QuantumState::pure(dims.clone(), psi)?,
    })
}
