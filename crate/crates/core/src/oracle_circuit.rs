//! Transform, oracle, inverse transform, merge and measure.
//!
//! The input `|Ψ0⟩ = (|N/2−1⟩ + |N/2⟩)/√2` is the two-component state the
//! squeezer approximates. With the Hadamard transform and `z = W_j` the
//! pipeline returns `(|N/2−1−j⟩ + |N/2+j⟩)/√2`; the symmetric merge then
//! sends `j = N/2−1` to `|N−1⟩`. With the Fourier transform and `z = T_j`
//! the output is shifted by `j` and the adjacent merge targets `|N−2⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codewords::{
    designated_codeword, hadamard_codeword, in_phase_syndrome, sample_instance, ErrorWeights, Label, OracleWord,
    ProblemInstance, Variant,
};
use crate::error::{Error, Result};
use crate::spin_core::{SpinSystem, StateVector};
use crate::transforms::{dft_in_place, walsh_hadamard_in_place};

/// Reports include the full outcome distribution only up to this size.
pub const PER_OUTCOME_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Hadamard,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Blocks `(N/2−1−j, N/2+j)`.
    Symmetric,
    /// Blocks `(2k, 2k+1)`.
    Adjacent,
}

impl Pairing {
    /// Basis state the `A` codeword is merged onto.
    pub fn designated_outcome(self, dim: usize) -> usize {
        match self {
            Pairing::Symmetric => dim - 1,
            Pairing::Adjacent => dim - 2,
        }
    }
}

/// Diagonal phase oracle `U_z|x⟩ = e^{iπ z_x}|x⟩` with a query counter.
#[derive(Debug, Clone)]
pub struct PhaseOracle {
    phases: Vec<Complex64>,
    queries: usize,
}

impl PhaseOracle {
    pub fn new(z: &OracleWord) -> Self {
        Self { phases: z.phases(), queries: 0 }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn query_count(&self) -> usize {
        self.queries
    }

    pub fn apply(&mut self, buf: &mut [Complex64]) -> Result<()> {
        if buf.len() != self.phases.len() {
            return Err(Error::LengthMismatch { expected: self.phases.len(), actual: buf.len() });
        }
        buf.iter_mut().zip(&self.phases).for_each(|(a, p)| *a *= p);
        self.queries += 1;
        Ok(())
    }
}

pub fn input_state(sys: &SpinSystem) -> StateVector {
    two_component(sys.dim(), sys.dim() / 2 - 1, sys.dim() / 2)
}

/// `(|a⟩ + |b⟩)/√2` for distinct `a`, `b`.
pub fn two_component(dim: usize, a: usize, b: usize) -> StateVector {
    debug_assert!(a != b && a < dim && b < dim);
    let mut amps = DVector::zeros(dim);
    amps[a] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[b] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_unitary_image(amps)
}

/// `R† U_z R |input⟩`; one oracle query.
pub fn run_pipeline(oracle: &mut PhaseOracle, input: &StateVector, transform: Transform) -> Result<StateVector> {
    if input.dim() != oracle.dim() {
        return Err(Error::LengthMismatch { expected: oracle.dim(), actual: input.dim() });
    }
    let mut amps = input.amps().clone();
    let buf = amps.as_mut_slice();
    match transform {
        Transform::Hadamard => {
            walsh_hadamard_in_place(buf)?;
            oracle.apply(buf)?;
            walsh_hadamard_in_place(buf)?;
        }
        Transform::Fourier => {
            dft_in_place(buf, false);
            oracle.apply(buf)?;
            dft_in_place(buf, true);
        }
    }
    Ok(StateVector::from_unitary_image(amps))
}

/// Block-Hadamard merge: each pair `(lo, hi)` maps `(|lo⟩+|hi⟩)/√2` onto a
/// single basis state and `(|lo⟩−|hi⟩)/√2` onto the other.
pub fn merge_two_to_one(state: &StateVector, pairing: Pairing) -> Result<StateVector> {
    let dim = state.dim();
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::Config(format!("merge needs an even dimension, got {dim}")));
    }
    let mut amps = state.amps().clone();
    for j in 0..dim / 2 {
        // (plus, minus) receive (a+b)/√2 and (a−b)/√2.
        let (plus, minus) = match pairing {
            Pairing::Symmetric => (dim / 2 + j, dim / 2 - 1 - j),
            Pairing::Adjacent => (2 * j, 2 * j + 1),
        };
        let (a, b) = (state.amp(minus), state.amp(plus));
        amps[plus] = (a + b) * FRAC_1_SQRT_2;
        amps[minus] = (a - b) * FRAC_1_SQRT_2;
    }
    Ok(StateVector::from_unitary_image(amps))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub index: usize,
    pub pr_top: f64,
    pub per_outcome: Vec<f64>,
}

/// Exact probability of the designated outcome.
pub fn measure_designated(state: &StateVector, index: usize) -> Result<Measurement> {
    if index >= state.dim() {
        return Err(Error::Config(format!("outcome {index} out of range for dimension {}", state.dim())));
    }
    let per_outcome = state.probabilities();
    Ok(Measurement { index, pr_top: per_outcome[index], per_outcome })
}

/// Draws one outcome from `|amps|²`.
pub fn sample_outcome<R: Rng + ?Sized>(state: &StateVector, rng: &mut R) -> Result<usize> {
    let dist = WeightedIndex::new(state.probabilities())
        .map_err(|e| Error::Numerical(format!("outcome distribution: {e}")))?;
    Ok(dist.sample(rng))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionReport {
    pub variant: Variant,
    #[serde(rename = "N")]
    pub dim: usize,
    pub hidden_j: usize,
    pub decision: Label,
    pub pr_top: f64,
    pub queries: usize,
    pub repetitions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_outcome: Option<Vec<f64>>,
}

impl DecisionReport {
    pub fn is_correct(&self, instance: &ProblemInstance) -> bool {
        self.decision == instance.label
    }
}

fn expect_variant(instance: &ProblemInstance, variant: Variant) -> Result<()> {
    if instance.variant != variant {
        return Err(Error::Config(format!("expected a {variant} instance, got {}", instance.variant)));
    }
    Ok(())
}

fn circuit(instance: &ProblemInstance) -> (Transform, Pairing) {
    match instance.variant {
        Variant::Fourier => (Transform::Fourier, Pairing::Adjacent),
        _ => (Transform::Hadamard, Pairing::Symmetric),
    }
}

/// One pass through the circuit for `instance`, returning the merged state.
pub fn merged_output(instance: &ProblemInstance, oracle: &mut PhaseOracle) -> Result<StateVector> {
    let sys = SpinSystem::from_dim(instance.dim)?;
    let (transform, pairing) = circuit(instance);
    let out = run_pipeline(oracle, &input_state(&sys), transform)?;
    merge_two_to_one(&out, pairing)
}

fn exact_report(instance: &ProblemInstance) -> Result<DecisionReport> {
    let mut oracle = PhaseOracle::new(&instance.z);
    let merged = merged_output(instance, &mut oracle)?;
    let m = measure_designated(&merged, circuit(instance).1.designated_outcome(instance.dim))?;
    Ok(DecisionReport {
        variant: instance.variant,
        dim: instance.dim,
        hidden_j: instance.hidden_j,
        decision: if m.pr_top > 0.5 { Label::A } else { Label::B },
        pr_top: m.pr_top,
        queries: oracle.query_count(),
        repetitions: 1,
        per_outcome: (instance.dim <= PER_OUTCOME_MAX_DIM).then_some(m.per_outcome),
    })
}

/// Single-query decision in exact-probability mode.
pub fn decide_restricted(instance: &ProblemInstance) -> Result<DecisionReport> {
    expect_variant(instance, Variant::Restricted)?;
    exact_report(instance)
}

/// Fourier variant, exact mode: `pr_top` is the probability of `|N−2⟩`.
pub fn decide_fourier(instance: &ProblemInstance) -> Result<DecisionReport> {
    expect_variant(instance, Variant::Fourier)?;
    exact_report(instance)
}

/// `q` sampled rounds, deciding `A` when the designated outcome appears in
/// more than half of them.
pub fn decide_unrestricted<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    q: usize,
    rng: &mut R,
) -> Result<DecisionReport> {
    expect_variant(instance, Variant::Unrestricted)?;
    if q == 0 {
        return Err(Error::Config("at least one repetition is required".into()));
    }
    if instance.error_weight() >= Variant::Unrestricted.weight_bound(instance.dim) {
        return Err(Error::Config(format!(
            "{} errors violate l < N/16 for N={}",
            instance.error_weight(),
            instance.dim
        )));
    }
    let designated = Pairing::Symmetric.designated_outcome(instance.dim);
    let mut oracle = PhaseOracle::new(&instance.z);
    let mut hits = 0;
    let mut last = None;
    for _ in 0..q {
        let merged = merged_output(instance, &mut oracle)?;
        if sample_outcome(&merged, rng)? == designated {
            hits += 1;
        }
        last = Some(merged);
    }
    let m = measure_designated(&last.expect("q >= 1"), designated)?;
    Ok(DecisionReport {
        variant: instance.variant,
        dim: instance.dim,
        hidden_j: instance.hidden_j,
        decision: if 2 * hits > q { Label::A } else { Label::B },
        pr_top: m.pr_top,
        queries: oracle.query_count(),
        repetitions: q,
        per_outcome: (instance.dim <= PER_OUTCOME_MAX_DIM).then_some(m.per_outcome),
    })
}

/// Probability of the designated outcome for every `j ∈ Z_N` of the Fourier variant.
pub fn fourier_probability_table(dim: usize) -> Result<Vec<f64>> {
    (0..dim).map(|j| Ok(decide_fourier(&ProblemInstance::fourier(dim, j)?)?.pr_top)).collect()
}

/// Amplitudes of the `A` pipeline output with `l` in-phase errors.
pub fn in_phase_output(dim: usize, l: usize) -> Result<StateVector> {
    let sys = SpinSystem::from_dim(dim)?;
    let syndrome = in_phase_syndrome(dim, l)?;
    let z = hadamard_codeword(dim, designated_codeword(dim))?.with_errors(&syndrome)?;
    run_pipeline(&mut PhaseOracle::new(&OracleWord::Bits(z)), &input_state(&sys), Transform::Hadamard)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    /// Uniform over all weight-`l` syndromes.
    Random,
    /// The coherent worst case of [`in_phase_syndrome`].
    InPhase,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub instance: ProblemInstance,
    /// One report per requested repetition count, in order.
    pub reports: Vec<DecisionReport>,
}

/// Runs `trials` unrestricted instances with `l` errors through the
/// majority vote for every `q` in `qs`.
///
/// Trial `t` draws its instance on stream `t` of `seed` and replays the same
/// stream position for every `q`, so the curves share random numbers.
pub fn unrestricted_trials(
    dim: usize,
    l: usize,
    model: ErrorModel,
    qs: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    let worst = match model {
        ErrorModel::InPhase => Some(in_phase_syndrome(dim, l)?),
        ErrorModel::Random => None,
    };
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let instance = match &worst {
                Some(syndrome) => {
                    let j = rng.random_range(0..dim / 2);
                    ProblemInstance::hadamard(Variant::Unrestricted, dim, j, syndrome.clone())?
                }
                None => sample_instance(Variant::Unrestricted, dim, ErrorWeights::Exact(l), &mut rng)?,
            };
            let reports =
                qs.iter().map(|&q| decide_unrestricted(&instance, q, &mut rng.clone())).collect::<Result<_>>()?;
            Ok(TrialOutcome { instance, reports })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ErrorPoint {
    pub repetitions: usize,
    pub trials: usize,
    pub errors: usize,
    pub rate: f64,
    pub mean_queries: f64,
}

/// Decision error per repetition count over a batch of trials.
pub fn error_curve(outcomes: &[TrialOutcome], qs: &[usize]) -> Vec<ErrorPoint> {
    let trials = outcomes.len();
    qs.iter()
        .enumerate()
        .map(|(i, &q)| {
            let errors = outcomes.iter().filter(|o| !o.reports[i].is_correct(&o.instance)).count();
            let queries: usize = outcomes.iter().map(|o| o.reports[i].queries).sum();
            ErrorPoint {
                repetitions: q,
                trials,
                errors,
                rate: errors as f64 / trials.max(1) as f64,
                mean_queries: queries as f64 / trials.max(1) as f64,
            }
        })
        .collect()
}

/// Worst-case majority-vote error: `l` in-phase errors, hidden index
/// uniform over `Z_{N/2}`.
pub fn majority_error_curve(dim: usize, l: usize, qs: &[usize], trials: usize, seed: u64) -> Result<Vec<ErrorPoint>> {
    Ok(error_curve(&unrestricted_trials(dim, l, ErrorModel::InPhase, qs, trials, seed)?, qs))
}
