use chp_core::codewords::OracleWord;
use chp_core::oracle_circuit::{merge_two_to_one, run_pipeline, Pairing, PhaseOracle, Transform};
use chp_core::spin_core::{spin_operators, uncertainty_triplet, Axis, SpinSystem, StateVector};
use chp_core::transforms::{dft, walsh_hadamard};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_state(n: u32) -> impl Strategy<Value = StateVector> {
    let dim = 1usize << n;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            StateVector::normalized(DVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| Complex64::new(a, b))))
                .unwrap()
        })
}

proptest! {
    #[test]
    fn transforms_preserve_norm(psi in random_state(5)) {
        prop_assert!((walsh_hadamard(&psi).unwrap().norm_squared() - 1.0).abs() < 1e-12);
        prop_assert!((dft(&psi, false).norm_squared() - 1.0).abs() < 1e-12);
        let back = dft(&dft(&psi, false), true);
        prop_assert!(back.max_deviation(&psi) < 1e-12);
    }

    #[test]
    fn pipeline_and_merge_preserve_norm(psi in random_state(4), z in prop::collection::vec(0u8..2, 16)) {
        let word = OracleWord::Bits(z);
        let mut oracle = PhaseOracle::new(&word);
        let out = run_pipeline(&mut oracle, &psi, Transform::Hadamard).unwrap();
        prop_assert!((out.norm_squared() - 1.0).abs() < 1e-12);
        prop_assert_eq!(oracle.query_count(), 1);
        for pairing in [Pairing::Symmetric, Pairing::Adjacent] {
            let merged = merge_two_to_one(&out, pairing).unwrap();
            prop_assert!((merged.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heisenberg_relation_holds(psi in random_state(3)) {
        let sys = SpinSystem::new(3).unwrap();
        let ops = spin_operators(&sys).unwrap();
        for axes in [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)] {
            let t = uncertainty_triplet(&psi, &ops, axes);
            prop_assert!(t.heisenberg_slack() >= -1e-10);
        }
    }
}
