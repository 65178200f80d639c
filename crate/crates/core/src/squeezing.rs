//! Two-axis counter-twisting of the equatorial coherent state.
//!
//! The squeezed state is `U(μ)|π/2, 0⟩` with
//! `U(μ) = exp(iθ_r Sx) · exp(iμ (Sz² − Sy²))`. The twist shears the
//! uncertainty disk along the ±45° diagonals of the y–z plane; the rotation
//! about x then brings the narrow diagonal onto z, so `V₋ = ⟨Sz²⟩` is the
//! reduced variance. Both factors are exponentiated through an eigendecomposition
//! of their real symmetric generator.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymmetricSpectrum;
use crate::minimize::golden_section;
use crate::spin_core::{coherent_state, raising_coefficient, OperatorFlags, OperatorMatrix, SpinSystem, StateVector};

/// Rotation angle about x applied after the twist.
///
/// With `|π/2, 0⟩` pointing along +x, a negative quarter turn puts the
/// squeezed diagonal on z for positive μ.
pub const ROTATION_ANGLE: f64 = -FRAC_PI_4;

/// Largest allowed `|P_i − P_{N−1−i}|` and central-pair mismatch.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Largest qubit count for which the dense `N × N` spectra are built.
pub const DENSE_MAX_QUBITS: u32 = 10;

/// Number of scan points used to locate the minima before refinement.
const SCAN_POINTS: usize = 96;
const WIDEN_ATTEMPTS: usize = 3;

/// `Sz² − Sy²` as a real symmetric matrix.
///
/// From `Sy² = [2(s(s+1) − m²) − S₊² − S₋²] / 4`, the generator has diagonal
/// `m² − (s(s+1) − m²)/2` and couples `m ↔ m ± 2` with `⟨m+2|S₊²|m⟩ / 4`.
pub fn twist_generator(sys: &SpinSystem) -> DMatrix<f64> {
    let dim = sys.dim();
    let s = sys.s();
    let casimir = s * (s + 1.0);
    let mut g = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = sys.dicke_label(i);
        g[(i, i)] = m * m - 0.5 * (casimir - m * m);
        if i + 2 < dim {
            let c = 0.25 * raising_coefficient(sys, i) * raising_coefficient(sys, i + 1);
            g[(i + 2, i)] = c;
            g[(i, i + 2)] = c;
        }
    }
    g
}

/// `Sx` as a real symmetric tridiagonal matrix.
pub fn sx_real(sys: &SpinSystem) -> DMatrix<f64> {
    let dim = sys.dim();
    let mut sx = DMatrix::zeros(dim, dim);
    for i in 0..dim - 1 {
        let c = 0.5 * raising_coefficient(sys, i);
        sx[(i + 1, i)] = c;
        sx[(i, i + 1)] = c;
    }
    sx
}

/// Cached spectra for repeatedly squeezing the equatorial coherent state.
#[derive(Debug, Clone)]
pub struct Squeezer {
    sys: SpinSystem,
    rotation: SymmetricSpectrum,
    twist: SymmetricSpectrum,
    input: StateVector,
}

impl Squeezer {
    pub fn new(sys: SpinSystem) -> Result<Self> {
        if sys.n() > DENSE_MAX_QUBITS {
            return Err(Error::Resource(format!(
                "dense squeezing needs N <= {}, got N={}",
                1usize << DENSE_MAX_QUBITS,
                sys.dim()
            )));
        }
        Ok(Self {
            sys,
            rotation: SymmetricSpectrum::decompose(sx_real(&sys))?,
            twist: SymmetricSpectrum::decompose(twist_generator(&sys))?,
            input: coherent_state(&sys, std::f64::consts::FRAC_PI_2, 0.0)?,
        })
    }

    pub fn system(&self) -> SpinSystem {
        self.sys
    }

    /// The unsqueezed input `|π/2, 0⟩`.
    pub fn input(&self) -> &StateVector {
        &self.input
    }

    /// Dense `U(μ)`.
    pub fn operator(&self, mu: f64) -> Result<OperatorMatrix> {
        if !mu.is_finite() {
            return Err(Error::Config(format!("squeezing parameter {mu} is not finite")));
        }
        let u = self.rotation.exp_i(ROTATION_ANGLE) * self.twist.exp_i(mu);
        OperatorMatrix::new(u, OperatorFlags::UNITARY)
    }

    /// `U(μ)|π/2, 0⟩`.
    pub fn state(&self, mu: f64) -> StateVector {
        let twisted = self.twist.apply_exp_i(mu, self.input.amps());
        StateVector::from_unitary_image(self.rotation.apply_exp_i(ROTATION_ANGLE, &twisted))
    }

    pub fn reduced_variance(&self, mu: f64) -> f64 {
        reduced_variance(&self.state(mu), &self.sys)
    }

    /// Minimizes `V₋(μ)` over `μ ≥ 0`.
    ///
    /// Scans `[0, 4/s]`, refines every interior local minimum of the scan by
    /// golden-section search to width `tol`, and keeps the lowest variance
    /// (smallest μ on ties, since `V₋` is periodic in μ for small `s`). When
    /// the scan keeps falling towards the right edge the bracket is doubled.
    pub fn optimize(&self, tol: f64) -> Result<SqueezeResult> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Config(format!("mu tolerance must be positive, got {tol}")));
        }
        let mut upper = 4.0 / self.sys.s();
        let mut trace = Vec::new();
        for _ in 0..WIDEN_ATTEMPTS {
            let grid: Vec<f64> = (0..SCAN_POINTS).map(|k| upper * k as f64 / (SCAN_POINTS - 1) as f64).collect();
            let values: Vec<f64> = grid.iter().map(|&mu| self.reduced_variance(mu)).collect();
            let interior: Vec<usize> =
                (1..SCAN_POINTS - 1).filter(|&k| values[k] <= values[k - 1] && values[k] <= values[k + 1]).collect();
            let falling_at_edge = values[SCAN_POINTS - 1] < values[SCAN_POINTS - 2];
            let best_scan = values.iter().cloned().fold(f64::INFINITY, f64::min);
            trace.push(format!(
                "bracket [0, {upper:.6}]: {} interior minima, best scanned V = {best_scan:.9}",
                interior.len()
            ));
            if interior.is_empty() || (falling_at_edge && values[SCAN_POINTS - 1] <= best_scan) {
                upper *= 2.0;
                continue;
            }
            let mut best: Option<(f64, f64)> = None;
            for &k in &interior {
                let m = golden_section(|mu| self.reduced_variance(mu), grid[k - 1], grid[k + 1], tol);
                let better = match best {
                    None => true,
                    Some((_, v)) => m.value < v - SYMMETRY_TOL,
                };
                if better {
                    best = Some((m.x, m.value));
                }
            }
            let (mu, _) = best.expect("at least one interior minimum");
            return SqueezeResult::new(self.sys, mu, self.state(mu));
        }
        Err(Error::Numerical(format!(
            "no interior minimum of the reduced variance for s = {}; scan trace: {}",
            self.sys.s(),
            trace.join("; ")
        )))
    }
}

/// `exp(iθ_r Sx) exp(iμ(Sz² − Sy²))` as a verified unitary.
pub fn squeeze_operator(sys: &SpinSystem, mu: f64) -> Result<OperatorMatrix> {
    Squeezer::new(*sys)?.operator(mu)
}

/// `⟨Sz²⟩ − ⟨Sz⟩²`.
pub fn reduced_variance(state: &StateVector, sys: &SpinSystem) -> f64 {
    let (mut first, mut second) = (0.0, 0.0);
    for (i, a) in state.amps().iter().enumerate() {
        let m = sys.dicke_label(i);
        let p = a.norm_sqr();
        first += m * p;
        second += m * m * p;
    }
    second - first * first
}

/// `Σ i² P_i − (Σ i P_i)²` over qudit indices.
pub fn distribution_variance(p: &[f64]) -> f64 {
    let (mut first, mut second) = (0.0, 0.0);
    for (i, &pi) in p.iter().enumerate() {
        let x = i as f64;
        first += x * pi;
        second += x * x * pi;
    }
    second - first * first
}

/// Exact variance of a rational distribution over qudit indices.
pub fn exact_distribution_variance(p: &[Ratio<i64>]) -> Ratio<i64> {
    let mut first = Ratio::from_integer(0);
    let mut second = Ratio::from_integer(0);
    for (i, &pi) in p.iter().enumerate() {
        let x = Ratio::from_integer(i as i64);
        first += x * pi;
        second += x * x * pi;
    }
    second - first * first
}

/// `P_{N/2−1}`, after checking it matches its mirror `P_{N/2}`.
pub fn central_probability(p: &[f64]) -> Result<f64> {
    let dim = p.len();
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::Config(format!("central probability needs an even length, got {dim}")));
    }
    let (lo, hi) = (p[dim / 2 - 1], p[dim / 2]);
    if (lo - hi).abs() >= SYMMETRY_TOL {
        return Err(Error::InvariantViolation(format!(
            "central components differ: P[{}] = {lo}, P[{}] = {hi}",
            dim / 2 - 1,
            dim / 2
        )));
    }
    Ok(lo)
}

/// `|⟨Ψ₀|ψ⟩|²` with `|Ψ₀⟩ = (|N/2−1⟩ + |N/2⟩)/√2`.
pub fn ideal_overlap(state: &StateVector) -> f64 {
    let dim = state.dim();
    (state.amp(dim / 2 - 1) + state.amp(dim / 2)).norm_sqr() / 2.0
}

/// An optimally squeezed state and its statistics.
#[derive(Debug, Clone)]
pub struct SqueezeResult {
    pub sys: SpinSystem,
    pub mu: f64,
    pub state: StateVector,
    pub v_minus: f64,
    pub distribution: Vec<f64>,
}

impl SqueezeResult {
    fn new(sys: SpinSystem, mu: f64, state: StateVector) -> Result<Self> {
        let distribution = state.probabilities();
        let dim = distribution.len();
        for i in 0..dim / 2 {
            let gap = (distribution[i] - distribution[dim - 1 - i]).abs();
            if gap >= SYMMETRY_TOL {
                return Err(Error::InvariantViolation(format!(
                    "squeezed distribution not mirror symmetric at index {i}: gap {gap:e}"
                )));
            }
        }
        Ok(Self { sys, mu, v_minus: reduced_variance(&state, &sys), state, distribution })
    }

    pub fn central_probability(&self) -> Result<f64> {
        central_probability(&self.distribution)
    }

    pub fn ideal_overlap(&self) -> f64 {
        ideal_overlap(&self.state)
    }
}

pub fn optimize_mu(sys: &SpinSystem, tol: f64) -> Result<SqueezeResult> {
    Squeezer::new(*sys)?.optimize(tol)
}

/// The tail-bounding template: `ε/3, 2ε/3, 0` on either side of the central
/// pair `1/2 − ε`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundingDistribution {
    #[serde(serialize_with = "ratio_as_f64")]
    pub epsilon: Ratio<i64>,
    #[serde(serialize_with = "ratio_as_f64")]
    pub pc: Ratio<i64>,
}

fn ratio_as_f64<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_to_f64(*r))
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl BoundingDistribution {
    /// Template probabilities for dimension `dim ≥ 8`.
    pub fn template(&self, dim: usize) -> Result<Vec<Ratio<i64>>> {
        bounding_template(dim, self.epsilon)
    }

    pub fn template_f64(&self, dim: usize) -> Result<Vec<f64>> {
        Ok(self.template(dim)?.into_iter().map(ratio_to_f64).collect())
    }
}

pub fn bounding_template(dim: usize, epsilon: Ratio<i64>) -> Result<Vec<Ratio<i64>>> {
    if dim < 8 || !dim.is_multiple_of(2) {
        return Err(Error::Config(format!("bounding template needs an even dimension >= 8, got {dim}")));
    }
    let zero = Ratio::from_integer(0);
    let third = epsilon / 3;
    let central = Ratio::new(1, 2) - epsilon;
    let lo = dim / 2 - 1;
    let hi = dim / 2;
    let mut p = vec![zero; dim];
    p[lo - 3] = third;
    p[lo - 2] = third * 2;
    p[lo] = central;
    p[hi] = central;
    p[hi + 2] = third * 2;
    p[hi + 3] = third;
    Ok(p)
}

/// Solves `Var[template(ε)] = 1/2` exactly.
///
/// The template is mirror symmetric, so its mean is pinned at `(N−1)/2` and
/// the variance is affine in ε; two exact evaluations determine it.
pub fn bounding_epsilon() -> BoundingDistribution {
    let dim = 8;
    let at = |eps: Ratio<i64>| exact_distribution_variance(&bounding_template(dim, eps).expect("dim 8 is valid"));
    let base = at(Ratio::from_integer(0));
    let slope = at(Ratio::from_integer(1)) - base;
    let epsilon = (Ratio::new(1, 2) - base) / slope;
    BoundingDistribution { epsilon, pc: Ratio::new(1, 2) - epsilon }
}

/// One point of the squeezing sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub n: u32,
    pub s: f64,
    pub mu_opt: f64,
    pub v_min: f64,
    pub p_c: f64,
    pub overlap: f64,
    #[serde(skip)]
    pub distribution: Vec<f64>,
}

/// Optimizes every system in `ns` in parallel; results keep the input order.
pub fn squeeze_sweep(ns: &[u32], tol: f64) -> Result<Vec<SweepPoint>> {
    ns.par_iter()
        .map(|&n| {
            let sys = SpinSystem::new(n)?;
            let res = optimize_mu(&sys, tol)?;
            Ok(SweepPoint {
                n,
                s: sys.s(),
                mu_opt: res.mu,
                v_min: res.v_minus,
                p_c: res.central_probability()?,
                overlap: res.ideal_overlap(),
                distribution: res.distribution,
            })
        })
        .collect()
}

/// Convenience: `U(μ)` applied to an arbitrary state.
pub fn apply_squeeze(sys: &SpinSystem, mu: f64, state: &StateVector) -> Result<StateVector> {
    let u = squeeze_operator(sys, mu)?;
    let out: DVector<Complex64> = u.apply(state)?;
    Ok(StateVector::from_unitary_image(out))
}
