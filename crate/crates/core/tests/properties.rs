use proptest::prelude::*;

use prq::circuit::{apply_layers, pr_iteration, CircuitConfig};
use prq::gates::{sample_haar_su2, GateEnsemble};
use prq::markov::{build_chain, initial_distribution, lump_to_reduced, reduced_rotation, averaged_rotation, Space};
use prq::mbqc::{compile_to_circuit, execute_pattern, AngleSource, ClusterPattern, OutcomePolicy, PatternMode, StandardPlacement};
use prq::metrics::{meyer_wallach_q, tv_distance};
use prq::pauli::{apply_cz_layer, apply_cz_layer_reduced, cz_permutation_full, reduce, PauliString, Topology};
use prq::rng::realization_rng;
use prq::state::StateVector;

fn topology(n: usize, closed: bool) -> Topology {
    if closed && n >= 3 {
        Topology::closed_chain(n)
    } else {
        Topology::open_chain(n)
    }
}

fn random_state(n: usize, seed: u64, layers: usize) -> StateVector {
    let cfg = CircuitConfig::new(n, layers, GateEnsemble::Haar, seed);
    let mut rng = realization_rng(seed, 0);
    let mut s = StateVector::zero(n);
    for _ in 0..layers {
        pr_iteration(&mut s, &cfg, &mut rng).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cz_layer_is_an_involution(n in 1usize..7, closed: bool, raw in any::<u64>()) {
        let t = topology(n, closed);
        let s = PauliString::from_index(raw as usize % 4usize.pow(n as u32), n);
        let twice = apply_cz_layer(&apply_cz_layer(&s, &t).unwrap(), &t).unwrap();
        prop_assert_eq!(twice, s);
    }

    #[test]
    fn cz_permutation_is_a_bijection(n in 1usize..6, closed: bool) {
        let mut p = cz_permutation_full(&topology(n, closed));
        p.sort_unstable();
        prop_assert!(p.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn reduction_commutes_with_cz(n in 1usize..7, closed: bool, raw in any::<u64>()) {
        let t = topology(n, closed);
        let s = PauliString::from_index(raw as usize % 4usize.pow(n as u32), n);
        let lhs = reduce(&apply_cz_layer(&s, &t).unwrap());
        let rhs = apply_cz_layer_reduced(&reduce(&s), &t).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduced_chain_is_column_stochastic(n in 1usize..5, c in 0.0f64..=1.0, closed: bool, drop_identity: bool) {
        let m = build_chain(n, &reduced_rotation(c).unwrap(), &topology(n, closed), drop_identity).unwrap();
        let csc = m.to_csc().unwrap();
        prop_assert!(csc.triplets().all(|(_, _, v)| v >= -1e-15));
        for s in csc.column_sums() {
            prop_assert!((s - 1.0).abs() < 1e-12, "column sum {}", s);
        }
    }

    #[test]
    fn gates_stay_unitary_and_states_normalized(n in 1usize..7, seed in any::<u64>(), layers in 0usize..6) {
        let mut rng = realization_rng(seed, 1);
        prop_assert!(sample_haar_su2(&mut rng).is_unitary(1e-12));
        let s = random_state(n, seed, layers);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_weights_form_a_distribution(n in 1usize..5, seed in any::<u64>(), layers in 0usize..5) {
        let w = random_state(n, seed, layers).pauli_sq_coefficients().unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((w[0] - 0.5f64.powi(n as i32)).abs() < 1e-14);
    }

    #[test]
    fn q_lies_in_the_unit_interval(n in 1usize..7, seed in any::<u64>(), layers in 0usize..6) {
        let q = meyer_wallach_q(&random_state(n, seed, layers));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&q));
        if layers == 0 {
            prop_assert!(q.abs() < 1e-12);
        }
    }

    #[test]
    fn tv_is_a_bounded_metric(raw in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..20)) {
        let norm = |v: Vec<f64>| { let s: f64 = v.iter().sum::<f64>() + 1e-300; v.into_iter().map(|x| x / s).collect::<Vec<_>>() };
        let p = norm(raw.iter().map(|x| x.0).collect());
        let q = norm(raw.iter().map(|x| x.1).collect());
        let d = tv_distance(&p, &q).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!((d - tv_distance(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!(tv_distance(&p, &p).unwrap() < 1e-15);
    }

    #[test]
    fn enhanced_pattern_matches_its_compiled_circuit(rows in 1usize..4, columns in 2usize..9, seed in any::<u64>()) {
        let mut rng = realization_rng(seed, 2);
        let t = Topology::open_chain(rows);
        let p = ClusterPattern::from_columns(rows, columns, PatternMode::Enhanced, StandardPlacement::default(), AngleSource::Uniform, &t, &mut rng).unwrap();
        let run = execute_pattern(&p, OutcomePolicy::Sampled, &mut rng).unwrap();
        let mut reference = StateVector::zero(rows);
        apply_layers(&mut reference, &compile_to_circuit(&p, &run.record).unwrap()).unwrap();
        prop_assert!(run.state.fidelity(&reference) > 1.0 - 1e-10);
    }
}

// The full chain built from any of the ensembles lumps exactly onto the
// reduced chain with the same z-invariance.
#[test]
fn full_chain_lumps_onto_reduced_chain() {
    for e in [GateEnsemble::Haar, GateEnsemble::Hz, GateEnsemble::ZRotation, GateEnsemble::Mixture(0.6)] {
        for (n, closed) in [(3, false), (4, true)] {
            let t = topology(n, closed);
            let full = build_chain(n, &averaged_rotation(&e).unwrap(), &t, false).unwrap();
            let red = build_chain(n, &reduced_rotation(e.z_invariance()).unwrap(), &t, false).unwrap();
            let fd = initial_distribution(n, Space::Full, false).evolve(&full, 8).unwrap();
            let rd = initial_distribution(n, Space::Reduced, false).evolve(&red, 8).unwrap();
            for (f, r) in fd.iter().zip(&rd) {
                let lumped = lump_to_reduced(f).unwrap();
                let err = lumped.probs.iter().zip(&r.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-13, "{e} n={n}: {err}");
            }
        }
    }
}
