//! Classical bit-query strategies and an exhaustive decision-tree search.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codewords::{
    check_dim, designated_codeword, hadamard_bit, hadamard_codeword, sample_instance, ErrorWeights, Label, OracleWord,
    Variant,
};
use crate::error::{Error, Result};

/// Largest `N` for which the adversary search runs.
pub const MAX_TREE_DIM: usize = 16;

/// Returns single bits of `z` and counts every query.
#[derive(Debug, Clone)]
pub struct BitOracle {
    bits: Vec<u8>,
    queries: usize,
}

impl BitOracle {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        check_dim(bits.len())?;
        Ok(Self { bits, queries: 0 })
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn query(&mut self, x: usize) -> u8 {
        self.queries += 1;
        self.bits[x]
    }

    pub fn query_count(&self) -> usize {
        self.queries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Identification {
    pub j: usize,
    pub queries: usize,
    /// Set when the answers decode to an index outside `Z_{N/2}`.
    pub inconsistent: bool,
}

/// Reads `j` off the unit-vector positions `x = 2^t`, since `W_j(2^t)` is bit `t` of `j`.
pub fn classical_identify(oracle: &mut BitOracle) -> Identification {
    let dim = oracle.dim();
    let n = dim.trailing_zeros();
    let j = (0..n).fold(0, |j, t| j | (usize::from(oracle.query(1 << t)) << t));
    Identification { j, queries: oracle.query_count(), inconsistent: j >= dim / 2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NoisyDecision {
    pub decision: Label,
    pub j: usize,
    pub queries: usize,
}

/// Probe-set majority: bit `t` of `j` is voted on over `probes` random pairs
/// `(r, r ⊕ 2^t)`, each of which reveals `j_t` unless one of its two bits is
/// flipped. With `d = 0` or no probes this is [`classical_identify`].
pub fn classical_decide_noisy<R: Rng + ?Sized>(
    oracle: &mut BitOracle,
    probes: usize,
    d: usize,
    rng: &mut R,
) -> NoisyDecision {
    let dim = oracle.dim();
    let j = if d == 0 || probes == 0 {
        classical_identify(oracle).j
    } else {
        let n = dim.trailing_zeros();
        (0..n).fold(0, |j, t| {
            let votes = (0..probes)
                .filter(|_| {
                    let r = rng.random_range(0..dim);
                    oracle.query(r) != oracle.query(r ^ (1 << t))
                })
                .count();
            j | (usize::from(2 * votes > probes) << t)
        })
    };
    let decision = if j == designated_codeword(dim) { Label::A } else { Label::B };
    NoisyDecision { decision, j, queries: oracle.query_count() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyAccuracy {
    pub dim: usize,
    pub errors: usize,
    pub restricted: bool,
    pub probes: usize,
    pub trials: usize,
    pub correct: usize,
    pub mean_queries: f64,
}

/// Measured accuracy of [`classical_decide_noisy`] on sampled instances
/// carrying exactly `d` errors. Trial `t` uses stream `t` of `seed`.
pub fn noisy_accuracy(
    dim: usize,
    d: usize,
    restricted: bool,
    probes: usize,
    trials: usize,
    seed: u64,
) -> Result<NoisyAccuracy> {
    let variant = if restricted { Variant::Restricted } else { Variant::Unrestricted };
    let outcomes: Vec<(bool, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, usize)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let inst = sample_instance(variant, dim, ErrorWeights::Exact(d), &mut rng)?;
            let OracleWord::Bits(z) = inst.z else { unreachable!("hadamard variants load bit strings") };
            let mut oracle = BitOracle::new(z)?;
            let dec = classical_decide_noisy(&mut oracle, probes, d, &mut rng);
            Ok((dec.decision == inst.label, dec.queries))
        })
        .collect::<Result<_>>()?;
    let correct = outcomes.iter().filter(|o| o.0).count();
    let total_queries: usize = outcomes.iter().map(|o| o.1).sum();
    Ok(NoisyAccuracy {
        dim,
        errors: d,
        restricted,
        probes,
        trials,
        correct,
        mean_queries: total_queries as f64 / trials.max(1) as f64,
    })
}

/// Exact worst-case depth of the best deterministic bit-query tree that
/// separates `W_{N/2−1}` from `W_k`, `k < N/2 − 1`.
pub fn min_decision_tree_depth(dim: usize) -> Result<usize> {
    check_dim(dim)?;
    if !(4..=MAX_TREE_DIM).contains(&dim) {
        return Err(Error::Resource(format!("decision-tree search supports 4 <= N <= {MAX_TREE_DIM}, got {dim}")));
    }
    let candidates = dim / 2;
    let full: u32 = (1 << candidates) - 1;
    let mut memo = HashMap::new();
    Ok(tree_depth(dim, full, &mut memo))
}

fn tree_depth(dim: usize, set: u32, memo: &mut HashMap<u32, usize>) -> usize {
    let a_bit = 1u32 << designated_codeword(dim);
    if set & a_bit == 0 || set == a_bit {
        return 0;
    }
    if let Some(&d) = memo.get(&set) {
        return d;
    }
    let mut best = usize::MAX;
    for x in 0..dim {
        let ones = (0..dim / 2).filter(|&j| set >> j & 1 == 1 && hadamard_bit(j, x) == 1).fold(0u32, |m, j| m | 1 << j);
        let zeros = set & !ones;
        if ones == 0 || zeros == 0 {
            continue;
        }
        let depth = 1 + tree_depth(dim, ones, memo).max(tree_depth(dim, zeros, memo));
        best = best.min(depth);
    }
    memo.insert(set, best);
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    #[serde(rename = "N")]
    pub dim: usize,
    pub quantum_queries: usize,
    pub classical_queries: usize,
    pub classical_min_depth: Option<usize>,
}

/// Query counts of the single-shot circuit against [`classical_identify`],
/// with the exhaustive tree depth where it is feasible.
pub fn comparison_table(dims: &[usize]) -> Result<Vec<ComparisonRow>> {
    dims.iter()
        .map(|&dim| {
            let codeword = hadamard_codeword(dim, designated_codeword(dim))?;
            let id = classical_identify(&mut BitOracle::new(codeword.bits().to_vec())?);
            let min_depth = if (4..=MAX_TREE_DIM).contains(&dim) { Some(min_decision_tree_depth(dim)?) } else { None };
            Ok(ComparisonRow { dim, quantum_queries: 1, classical_queries: id.queries, classical_min_depth: min_depth })
        })
        .collect()
}
