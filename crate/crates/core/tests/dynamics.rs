use std::f64::consts::TAU;

use cqed::circuit::jc_hamiltonian;
use cqed::dynamics::{collapse_set, default_observables, evolve_master, evolve_schrodinger};
use cqed::jc::jc_block;
use cqed::{Dims, QuantumState, TimeGrid};

fn excited_vacuum(n: usize) -> QuantumState {
    QuantumState::basis(Dims::new(vec![n, 2]).unwrap(), &[0, 1]).unwrap()
}

/// Off resonance the single excitation only partly leaves the qubit:
/// p_e(t) = 1 − (Ω²/Δ²) sin²(Δt/2).
#[test]
fn detuned_single_excitation_matches_closed_form() {
    let (wr, wt, g, n) = (TAU * 1.0, TAU * 1.1, TAU * 0.05, 4);
    let h = jc_hamiltonian(wr, wt, g, n).unwrap();
    let obs = default_observables(h.dims()).unwrap();
    let grid = TimeGrid::new(0.0, 20.0, 201, 50).unwrap();
    let run = evolve_schrodinger(&h, &excited_vacuum(n), &grid, &obs).unwrap();

    let b = jc_block(0, wr, wt, g);
    let p = run.series("p_excited").unwrap();
    let cavity = run.series("n_cavity").unwrap();
    for ((t, pe), nc) in run.times.iter().zip(p).zip(cavity) {
        let exact = 1.0 - b.max_transfer() * (0.5 * b.delta_n * t).sin().powi(2);
        assert!((pe - exact).abs() < 1e-8, "t = {t}: {pe} vs {exact}");
        // the excitation is shared between qubit and cavity only
        assert!((pe + nc - 1.0).abs() < 1e-10);
    }
}

#[test]
fn cavity_decay_empties_a_coherent_field_at_rate_kappa() {
    let (wr, wt, g, n) = (TAU * 1.0, TAU * 3.0, 0.0, 12);
    let kappa = 0.5;
    let h = jc_hamiltonian(wr, wt, g, n).unwrap();
    let dims = h.dims().clone();
    let field = cqed::operator::coherent_state(n, cqed::C64::new(1.5, 0.0)).unwrap();
    let qubit = QuantumState::fock(2, 0).unwrap();
    let rho0 = field.tensor(&qubit);
    let channels = collapse_set(kappa, 0.0, 0.0, &dims).unwrap();
    let obs = default_observables(&dims).unwrap();
    let grid = TimeGrid::new(0.0, 4.0, 41, 80).unwrap();
    let run = evolve_master(&h, &rho0, &channels, &grid, &obs).unwrap();

    let cavity = run.series("n_cavity").unwrap();
    let n0 = cavity[0];
    for (t, nc) in run.times.iter().zip(cavity) {
        assert!((nc - n0 * (-kappa * t).exp()).abs() < 1e-7 * n0, "t = {t}");
    }
    // a damped coherent state stays pure, so the null eigenvalues expose the
    // RK4 local error (it falls ~32x per halving of the step)
    let m = run.diagnostics.min_eigenvalue.unwrap();
    assert!(m > -1e-7, "{m}");
}

#[test]
fn thermal_bath_drives_cavity_towards_n_th() {
    let n = 18;
    let (kappa, n_th) = (1.0, 0.3);
    let h = jc_hamiltonian(TAU * 1.0, TAU * 3.0, 0.0, n).unwrap();
    let dims = h.dims().clone();
    let channels = collapse_set(kappa, 0.0, n_th, &dims).unwrap();
    let obs = default_observables(&dims).unwrap();
    let grid = TimeGrid::new(0.0, 3.0, 31, 40).unwrap();
    let rho0 = QuantumState::basis(dims, &[0, 0]).unwrap();
    let run = evolve_master(&h, &rho0, &channels, &grid, &obs).unwrap();

    // ⟨n⟩(t) = n_th (1 − e^{−κt}) while truncation is negligible
    for (t, nc) in run.times.iter().zip(run.series("n_cavity").unwrap()) {
        let exact = n_th * (1.0 - (-kappa * t).exp());
        assert!((nc - exact).abs() < 1e-6, "t = {t}: {nc} vs {exact}");
    }
}
