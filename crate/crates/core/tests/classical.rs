use chp_core::classical::{
    classical_decide_noisy, classical_identify, comparison_table, min_decision_tree_depth, noisy_accuracy, BitOracle,
};
use chp_core::codewords::{hadamard_codeword, syndromes, Label};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exhaustive search over every deterministic tree of bounded depth.
fn separable_within(dim: usize, candidates: &[usize], depth: usize) -> bool {
    let has_a = candidates.contains(&(dim / 2 - 1));
    if !has_a || candidates.len() == 1 {
        return true;
    }
    if depth == 0 {
        return false;
    }
    (0..dim).any(|x| {
        let (ones, zeros): (Vec<usize>, Vec<usize>) =
            candidates.iter().partition(|&&j| hadamard_codeword(dim, j).unwrap().bits()[x] == 1);
        separable_within(dim, &ones, depth - 1) && separable_within(dim, &zeros, depth - 1)
    })
}

#[test]
fn identify_uses_log_queries() {
    for n in 2..=10u32 {
        let dim = 1usize << n;
        for j in (0..dim / 2).step_by((dim / 64).max(1)) {
            let mut oracle = BitOracle::new(hadamard_codeword(dim, j).unwrap().bits().to_vec()).unwrap();
            let id = classical_identify(&mut oracle);
            assert_eq!((id.j, id.queries, id.inconsistent), (j, n as usize, false));
            assert_eq!(oracle.query_count(), id.queries);
        }
    }
}

#[test]
fn tree_depth_matches_bounded_search() {
    for dim in [4usize, 8, 16] {
        let depth = min_decision_tree_depth(dim).unwrap();
        let all: Vec<usize> = (0..dim / 2).collect();
        assert!(separable_within(dim, &all, depth));
        assert!(!separable_within(dim, &all, depth - 1));
        assert!(depth <= dim.trailing_zeros() as usize);
    }
    let depths: Vec<usize> = [4, 8, 16].iter().map(|&d| min_decision_tree_depth(d).unwrap()).collect();
    assert!(depths.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn noisy_strategy_on_single_restricted_errors() {
    // Every eight-bit string one restricted flip from a codeword, probe sets of three.
    let mut correct = 0;
    let mut total = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for j in 0..4 {
        let w = hadamard_codeword(8, j).unwrap();
        for s in syndromes(8, 1, true).unwrap().iter() {
            let mut oracle = BitOracle::new(w.with_errors(&s).unwrap()).unwrap();
            let dec = classical_decide_noisy(&mut oracle, 3, 1, &mut rng);
            assert_eq!(dec.queries, 2 * 3 * 3);
            correct += usize::from(dec.decision == if j == 3 { Label::A } else { Label::B });
            total += 1;
        }
    }
    assert_eq!(total, 16);
    assert!(correct > 0);
}

#[test]
fn noisy_accuracy_is_reproducible() {
    let a = noisy_accuracy(32, 3, true, 9, 200, 5).unwrap();
    let b = noisy_accuracy(32, 3, true, 9, 200, 5).unwrap();
    assert_eq!(a, b);
    assert!(a.correct <= a.trials);
    assert!((a.mean_queries - (2 * 9 * 5) as f64).abs() < 1e-12);
}

#[test]
fn comparison_rows() {
    let rows = comparison_table(&[8, 16, 32, 1024]).unwrap();
    let queries: Vec<usize> = rows.iter().map(|r| r.classical_queries).collect();
    assert_eq!(queries, vec![3, 4, 5, 10]);
    assert!(rows.iter().all(|r| r.quantum_queries == 1));
    assert_eq!(rows[0].classical_min_depth, Some(2));
    assert_eq!(rows[3].classical_min_depth, None);
}
