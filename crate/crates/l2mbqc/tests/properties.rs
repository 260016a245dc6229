//! Property tests for compilation and simulation.

mod common;

use l2mbqc::gates::{self, Axis};
use l2mbqc::mbqc::{compile_to_cluster, mod3_protocol, with_full_adaptation};
use l2mbqc::onequbit::{Gate, OneQubitProgram};
use l2mbqc::qsp::{self, QspAngles};
use l2mbqc::sim::{
    cross_engine_deviation, effective_circuit, exact_distribution, marginal_trace, run_shot, EngineKind,
    MAX_ENUMERATION_QUBITS,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_program(n: usize, len: usize, seed: u64) -> OneQubitProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = (0..len)
        .map(|_| {
            let axis = if rng.gen() { Axis::X } else { Axis::Z };
            let theta = rng.gen_range(-3.0..3.0);
            let mask = rng.gen_range(1..1u64 << n);
            match rng.gen_range(0..3) {
                0 => Gate::fixed(axis, theta),
                1 => Gate::select(axis, theta, mask),
                _ => Gate::sign(axis, theta, mask, rng.gen()),
            }
        })
        .collect();
    OneQubitProgram::new(n, gates).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compiled_programs_are_sound(n in 1usize..=3, len in 0usize..6, seed in any::<u64>()) {
        let prog = random_program(n, len, seed);
        let s = compile_to_cluster(&prog).unwrap();
        for q in &s.qubits {
            for &a in &q.a_ids {
                prop_assert!(s.qubit(a).round < q.round);
            }
        }
        for x in 0..1u64 << n {
            let want = prog.evaluate(x).probabilities;
            let got = effective_circuit(&s, x).unwrap().probabilities;
            prop_assert!((want[0] - got[0]).abs() < 1e-10);
            if s.len() <= MAX_ENUMERATION_QUBITS {
                let d = exact_distribution(&s, x).unwrap();
                prop_assert!((want[0] - d[0]).abs() < 1e-10, "x = {x}: {want:?} vs {d:?}");
            }
        }
    }

    #[test]
    fn marginals_normalized_and_engines_agree(n in 1usize..=2, len in 0usize..5, seed in any::<u64>(), shot in any::<u64>()) {
        let s = compile_to_cluster(&random_program(n, len, seed)).unwrap();
        for x in 0..1u64 << n {
            prop_assert!(cross_engine_deviation(&s, x, shot).unwrap() < 1e-12);
            let m = run_shot(&s, x, shot, EngineKind::Mps).unwrap().m;
            for kind in [EngineKind::Dense, EngineKind::Mps] {
                for p in marginal_trace(&s, x, &m, kind).unwrap() {
                    prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ghz_parity_matches_commuting_circuit(seed in any::<u64>(), big_n in 1usize..=10) {
        let angles = common::random_angles(&mut ChaCha8Rng::seed_from_u64(seed), big_n);
        let d = exact_distribution(&common::ghz_schedule(&angles), 0).unwrap();
        prop_assert!((d[1] - common::commuting_p1(&angles)).abs() < 1e-10);
    }

    #[test]
    fn chain_matches_alternating_circuit(seed in any::<u64>(), half in 0usize..=5) {
        let angles = common::random_angles(&mut ChaCha8Rng::seed_from_u64(seed), 2 * half + 1);
        let d = exact_distribution(&common::chain_schedule(&angles), 0).unwrap();
        prop_assert!((d[1] - common::alternating_p1(&angles)).abs() < 1e-10);
    }

    #[test]
    fn seeded_shots_repeat(seed in any::<u64>(), x in 0u64..8) {
        let s = mod3_protocol(3).unwrap();
        let a = run_shot(&s, x, seed, EngineKind::Mps).unwrap();
        prop_assert_eq!(&a, &run_shot(&s, x, seed, EngineKind::Mps).unwrap());
        prop_assert_eq!(&a, &run_shot(&s, x, seed, EngineKind::Dense).unwrap());
    }

    #[test]
    fn qsp_reconstruction_is_unitary(xi in proptest::collection::vec(-4.0f64..4.0, 1..20), phi in -7.0f64..7.0) {
        let a = QspAngles { l: xi.len(), xi, xi0: None, target: None, residual: None };
        prop_assert!(gates::unitarity_deviation(&qsp::reconstruct_unitary(&a, phi)) < 1e-13);
    }
}

#[test]
fn pi_exemption_does_not_change_outputs() {
    for n in 1..=2 {
        let s = mod3_protocol(n).unwrap();
        let full = with_full_adaptation(&s).unwrap();
        assert!(full.qubits.iter().map(|q| q.a_ids.len()).sum::<usize>() > s.qubits.iter().map(|q| q.a_ids.len()).sum());
        for x in 0..1u64 << n {
            let a = exact_distribution(&s, x).unwrap();
            let b = exact_distribution(&full, x).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-12, "n = {n}, x = {x}");
        }
    }
}

#[test]
fn mod_p_series_has_period_p() {
    for p in [3u32, 5, 7] {
        let pair = qsp::solve_mod_p_coeffs(p, 0).unwrap();
        for w in 0..p {
            let phi = |w: u32| 4.0 * std::f64::consts::PI * w as f64 / p as f64;
            assert!((pair.eval_a(phi(w)) - pair.eval_a(phi(w + p))).abs() < 1e-10);
        }
    }
}
