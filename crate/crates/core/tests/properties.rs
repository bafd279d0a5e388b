use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use dfs_core::gates::{cnot_sequence, gate_r, logical_hadamard, pauli_correction, Correction, PairGateKind};
use dfs_core::measure::{measure_distribution, sample_outcome};
use dfs_core::noise::collective_dephase;
use dfs_core::state::{embed_logical_to_physical, fidelity, project_physical_to_logical};
use dfs_core::unitary::apply;
use dfs_core::{Complex64, Layout, PureState, Unitary};

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn state(layout: Layout) -> impl Strategy<Value = PureState> {
    amplitudes(layout.dim()).prop_map(move |v| PureState::from_slice(&v, layout).unwrap())
}

/// Haar-ish unitary from the QR factor of a random complex matrix.
fn unitary(dim: usize) -> impl Strategy<Value = Unitary> {
    amplitudes(dim * dim).prop_map(move |v| {
        let m = DMatrix::from_row_slice(dim, dim, &v);
        let q = m.qr().q();
        Unitary::new(q).unwrap()
    })
}

fn subsystems() -> impl Strategy<Value = usize> {
    1usize..=4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn apply_preserves_norm(
        (n, s, u, targets) in subsystems().prop_flat_map(|n| {
            (1..=n).prop_flat_map(move |k| {
                (Just(n), state(Layout::logical(n)), unitary(1 << k),
                 Just((0..n).collect::<Vec<_>>()).prop_shuffle()
                    .prop_map(move |mut t| { t.truncate(k); t }))
            })
        })
    ) {
        let _ = n;
        let out = apply(&u, &s, &targets).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn apply_composes(
        (s, u1, u2, targets) in (1usize..=4).prop_flat_map(|k| {
            (state(Layout::physical(4)), unitary(1 << k), unitary(1 << k),
             Just((0..4).collect::<Vec<_>>()).prop_shuffle()
                .prop_map(move |mut t| { t.truncate(k); t }))
        })
    ) {
        let stepwise = apply(&u2, &apply(&u1, &s, &targets).unwrap(), &targets).unwrap();
        let product = u2.compose(&u1).unwrap();
        let at_once = apply(&product, &s, &targets).unwrap();
        prop_assert!(stepwise.max_abs_diff(&at_once) <= 1e-10);
    }

    #[test]
    fn r_is_additive(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let ra = gate_r(a).unwrap().unitary;
        let rb = gate_r(b).unwrap().unitary;
        let rab = gate_r(a + b).unwrap().unitary;
        prop_assert!(ra.compose(&rb).unwrap().max_abs_diff(&rab) <= 1e-12);
    }

    #[test]
    fn r_block_structure(theta in -10.0f64..10.0) {
        let r = gate_r(theta).unwrap().unitary;
        prop_assert!(r.unitarity_deviation() <= 1e-12);
        // blocks {0, 3} and {1, 2} never mix
        for (i, j) in [(0, 1), (0, 2), (3, 1), (3, 2)] {
            prop_assert_eq!(r.entry(i, j), Complex64::new(0.0, 0.0));
            prop_assert_eq!(r.entry(j, i), Complex64::new(0.0, 0.0));
        }
        for (i, j) in [(0, 3), (3, 0), (1, 2), (2, 1)] {
            prop_assert!((r.entry(i, j) - Complex64::new(0.0, -theta.sin())).norm() <= 1e-15);
        }
        for i in 0..4 {
            prop_assert!((r.entry(i, i) - Complex64::new(theta.cos(), 0.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn measurement_probabilities_sum_to_one(
        (s, targets) in (1usize..=5).prop_flat_map(|n| {
            (state(Layout::physical(n)),
             (1..=n).prop_flat_map(move |k| Just((0..n).collect::<Vec<_>>()).prop_shuffle()
                .prop_map(move |mut t| { t.truncate(k); t })))
        })
    ) {
        let dist = measure_distribution(&s, &targets).unwrap();
        let total: f64 = dist.iter().map(|r| r.probability).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for r in &dist {
            prop_assert!((r.post_state.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(r.probability >= 0.0 && r.probability <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn embed_then_project_is_identity(s in (1usize..=3).prop_flat_map(|k| state(Layout::logical(k)))) {
        let phys = embed_logical_to_physical(&s).unwrap();
        prop_assert!((phys.norm() - 1.0).abs() <= 1e-12);
        let back = project_physical_to_logical(&phys).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-12);
    }

    #[test]
    fn collective_dephasing_spares_code_states(
        s in (1usize..=3).prop_flat_map(|k| state(Layout::logical(k))),
        phi in -20.0f64..20.0,
    ) {
        let phys = embed_logical_to_physical(&s).unwrap();
        let noisy = collective_dephase(&phys, phi).unwrap();
        prop_assert!((noisy.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((fidelity(&phys, &noisy).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_seed_deterministic(s in state(Layout::physical(3)), seed in any::<u64>()) {
        let dist = measure_distribution(&s, &[0, 1, 2]).unwrap();
        let a = sample_outcome(&dist, seed).unwrap();
        let b = sample_outcome(&dist, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn measurement_normalization_on_1000_states() {
    let mut x = 0x2545f4914f6cdd1du64;
    let mut next = || {
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        (x.wrapping_mul(0x2545f4914f6cdd1d) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let layout = Layout::physical(6);
    for _ in 0..1000 {
        let amps: Vec<Complex64> = (0..layout.dim()).map(|_| Complex64::new(next(), next())).collect();
        let s = PureState::normalized(DVector::from_vec(amps), layout).unwrap();
        let dist = measure_distribution(&s, &[0, 2, 4, 5]).unwrap();
        let total: f64 = dist.iter().map(|r| r.probability).sum();
        assert!((total - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn every_named_gate_is_unitary() {
    let mut gates: Vec<Unitary> = [
        PairGateKind::I,
        PairGateKind::H,
        PairGateKind::P,
        PairGateKind::Pinv,
        PairGateKind::X,
        PairGateKind::Z,
    ]
    .iter()
    .map(|k| k.matrix())
    .collect();
    gates.extend(Correction::ALL.iter().map(|&c| pauli_correction(c)));
    gates.push(logical_hadamard());
    gates.push(cnot_sequence().1);
    for k in 0..100 {
        gates.push(gate_r(k as f64 * 0.0731 * PI).unwrap().unitary);
    }
    for g in gates {
        assert!(g.unitarity_deviation() <= 1e-12);
    }
}
