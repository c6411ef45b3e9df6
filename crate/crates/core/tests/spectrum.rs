use std::f64::consts::TAU;

use cqed::circuit::{jc_hamiltonian, transmon_frequencies, TransmonParams};
use cqed::jc::{jc_block, jc_block_matrix};
use cqed::operator::eigen_hermitian;
use proptest::prelude::*;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// The truncated JC spectrum is the ground level, the N−1 doublets and the
/// uncoupled top state |N−1, e⟩.
#[test]
fn full_spectrum_is_the_union_of_blocks() {
    let (wr, wt, g, n) = (TAU * 7.0, TAU * 5.0, TAU * 0.2, 12);
    let h = jc_hamiltonian(wr, wt, g, n).unwrap();
    let numeric = eigen_hermitian(h.static_part()).unwrap().values;

    let mut expected = vec![-0.5 * wt, (n - 1) as f64 * wr + 0.5 * wt];
    for k in 0..n - 1 {
        let b = jc_block(k, wr, wt, g);
        expected.extend([b.e_plus, b.e_minus]);
    }
    let expected = sorted(expected);
    assert_eq!(numeric.len(), expected.len());
    for (a, b) in numeric.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9 * wr, "{a} vs {b}");
    }
}

#[test]
fn transmon_levels_converge_in_charge_cutoff() {
    let (e_c, e_j) = (TAU * 0.3, TAU * 15.0);
    let at = |n_cut| transmon_frequencies(&TransmonParams::new(e_j, e_c, n_cut, 3).unwrap()).unwrap();
    let (coarse, fine) = (at(15), at(40));
    assert!(((coarse.omega_01_numeric - fine.omega_01_numeric) / fine.omega_01_numeric).abs() < 1e-10);
    assert!(((coarse.anharmonicity_numeric - fine.anharmonicity_numeric) / e_c).abs() < 1e-9);
}

#[test]
fn transmon_frequency_approaches_asymptote_with_ratio() {
    let e_c = TAU * 0.3;
    let gap = |ratio: f64| {
        let f = transmon_frequencies(&TransmonParams::new(ratio * e_c, e_c, 30, 3).unwrap()).unwrap();
        ((f.omega_01_numeric - f.omega_q_asymptotic) / f.omega_01_numeric).abs()
    };
    let gaps: Vec<f64> = [20.0, 50.0, 100.0, 300.0].into_iter().map(gap).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn block_eigenpairs_match_diagonalisation(
        n in 0usize..30,
        wr in 1.0f64..60.0,
        detuning in -20.0f64..20.0,
        g in 0.0f64..3.0,
    ) {
        let wt = wr + detuning;
        let b = jc_block(n, wr, wt, g);
        let m = jc_block_matrix(n, wr, wt, g);
        let eig = eigen_hermitian(&m).unwrap();
        let scale = wr * (n + 1) as f64 + wt.abs();
        prop_assert!((eig.values[0] - b.e_minus).abs() < 1e-11 * scale);
        prop_assert!((eig.values[1] - b.e_plus).abs() < 1e-11 * scale);

        // H|±⟩ = E±|±⟩ with the real 2×2 matrix
        let h = m.matrix().map(|z| z.re);
        for (v, e) in [(b.plus_state(), b.e_plus), (b.minus_state(), b.e_minus)] {
            let hv = [h[(0, 0)] * v[0] + h[(0, 1)] * v[1], h[(1, 0)] * v[0] + h[(1, 1)] * v[1]];
            prop_assert!((hv[0] - e * v[0]).abs() < 1e-10 * scale);
            prop_assert!((hv[1] - e * v[1]).abs() < 1e-10 * scale);
        }
        let (p, q) = (b.plus_state(), b.minus_state());
        prop_assert!((p[0] * q[0] + p[1] * q[1]).abs() < 1e-14);
        prop_assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn splitting_is_bounded_below_by_detuning_and_coupling(
        n in 0usize..30,
        detuning in -20.0f64..20.0,
        g in 0.0f64..3.0,
    ) {
        let b = jc_block(n, 40.0, 40.0 + detuning, g);
        prop_assert!(b.e_plus - b.e_minus >= detuning.abs() - 1e-12);
        prop_assert!(b.e_plus - b.e_minus >= b.omega_n - 1e-12);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&b.max_transfer()));
    }
}
