//! Spin systems, Dicke-basis operators and coherent spin states.
//!
//! # Index convention
//!
//! A system of total spin `s` has dimension `N = 2s + 1`. Dicke kets `|m⟩`
//! with `m = −s, …, s` map onto qudit indices by `i = m + s`:
//!
//! | qudit `i` | Dicke `m`  | coherent-state sum index `k = s − m` |
//! |-----------|------------|--------------------------------------|
//! | `0`       | `−s`       | `N − 1`                              |
//! | `N/2 − 1` | `−1/2`     | `N/2`                                |
//! | `N/2`     | `+1/2`     | `N/2 − 1`                            |
//! | `N − 1`   | `+s`       | `0`                                  |
//!
//! Every module in the crate uses this table.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, unitarity_defect};

pub const MIN_QUBITS: u32 = 2;
pub const MAX_QUBITS: u32 = 14;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// Dimensions of a spin-`s` system with `N = 2^n = 2s + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinSystem {
    n: u32,
    dim: usize,
}

impl SpinSystem {
    pub fn new(n: u32) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!("n = {n} outside supported range {MIN_QUBITS}..={MAX_QUBITS}")));
        }
        Ok(Self { n, dim: 1 << n })
    }

    /// Spin system of dimension `dim`, which must be a supported power of two.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::Config(format!("dimension {dim} is not a power of two")));
        }
        Self::new(dim.trailing_zeros())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `N = 2^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `2s = N − 1`, always odd.
    pub fn two_s(&self) -> usize {
        self.dim - 1
    }

    pub fn s(&self) -> f64 {
        self.two_s() as f64 / 2.0
    }

    /// Dicke label `m = i − s` of qudit index `i`.
    pub fn dicke_label(&self, index: usize) -> f64 {
        index as f64 - self.s()
    }

    /// Qudit index of Dicke label `m`, given as `2m` to stay exact.
    pub fn index_of(&self, two_m: i64) -> Option<usize> {
        let two_i = two_m + self.two_s() as i64;
        (two_i >= 0 && two_i % 2 == 0 && (two_i / 2) < self.dim as i64).then_some((two_i / 2) as usize)
    }
}

/// Shorthand for [`SpinSystem::new`].
pub fn make_spin_system(n: u32) -> Result<SpinSystem> {
    SpinSystem::new(n)
}

/// A normalized pure state in the qudit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Wraps `amps`, rejecting vectors whose norm differs from one by more than `1e-12`.
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvariantViolation(format!(
                "state norm {norm} differs from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(Self { amps })
    }

    pub fn from_vec(amps: Vec<Complex64>) -> Result<Self> {
        Self::new(DVector::from_vec(amps))
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical(format!("cannot normalize vector of norm {norm}")));
        }
        Ok(Self { amps: amps / Complex64::new(norm, 0.0) })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Config(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Trusted constructor for unitary images of normalized states.
    pub(crate) fn from_unitary_image(amps: DVector<Complex64>) -> Self {
        debug_assert!((amps.norm_squared() - 1.0).abs() < 1e-9);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn into_amps(self) -> DVector<Complex64> {
        self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `|amps_i|²` for every index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `|⟨self|other⟩|`, blind to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    /// Largest amplitude deviation from `other`, after removing the global phase
    /// that best aligns the two states.
    pub fn max_deviation_up_to_phase(&self, other: &StateVector) -> f64 {
        let ip = self.inner(other);
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`, phase included.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        (&self.amps - &other.amps).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Complex64 {
        self.amps.dotc(&(op.entries() * &self.amps))
    }
}

/// Serializes as a JSON array of `[re, im]` pairs.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim()))?;
        for a in self.amps.iter() {
            seq.serialize_element(&[a.re, a.im])?;
        }
        seq.end()
    }
}

/// Structural properties an [`OperatorMatrix`] claims, verified at construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OperatorFlags {
    pub hermitian: bool,
    pub unitary: bool,
    pub diagonal: bool,
}

impl OperatorFlags {
    pub const NONE: Self = Self { hermitian: false, unitary: false, diagonal: false };
    pub const HERMITIAN: Self = Self { hermitian: true, unitary: false, diagonal: false };
    pub const UNITARY: Self = Self { hermitian: false, unitary: true, diagonal: false };
}

/// A dense `N×N` operator whose declared flags have been checked.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    flags: OperatorFlags,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<Complex64>, flags: OperatorFlags) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Config(format!("operator must be square, got {}x{}", entries.nrows(), entries.ncols())));
        }
        if flags.hermitian {
            let defect = hermiticity_defect(&entries);
            if defect >= HERMITIAN_TOL {
                return Err(Error::InvariantViolation(format!("declared Hermitian but max |M - M^dag| = {defect:e}")));
            }
        }
        if flags.unitary {
            let defect = unitarity_defect(&entries);
            if defect >= UNITARY_TOL {
                return Err(Error::InvariantViolation(format!("declared unitary but max |M^dag M - I| = {defect:e}")));
            }
        }
        if flags.diagonal {
            let off = entries
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx % entries.nrows() != idx / entries.nrows())
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            if off != 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "declared diagonal but has off-diagonal entry of size {off:e}"
                )));
            }
        }
        Ok(Self { entries, flags })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn flags(&self) -> OperatorFlags {
        self.flags
    }

    pub fn apply(&self, state: &StateVector) -> Result<DVector<Complex64>> {
        if state.dim() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), actual: state.dim() });
        }
        Ok(&self.entries * state.amps())
    }
}

/// `⟨m+1|S₊|m⟩ = √((s − m)(s + m + 1))` for the Dicke level at qudit `index`.
///
/// With `i = m + s` this is `√((2s − i)(i + 1))`, exact in integers.
pub fn raising_coefficient(sys: &SpinSystem, index: usize) -> f64 {
    debug_assert!(index < sys.two_s());
    (((sys.two_s() - index) * (index + 1)) as f64).sqrt()
}

/// The spin operator set of one system.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: OperatorMatrix,
    pub sy: OperatorMatrix,
    pub sz: OperatorMatrix,
    pub splus: OperatorMatrix,
    pub sminus: OperatorMatrix,
    pub s2: OperatorMatrix,
}

impl SpinOperators {
    pub fn get(&self, axis: Axis) -> &OperatorMatrix {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }
}

pub fn spin_operators(sys: &SpinSystem) -> Result<SpinOperators> {
    let dim = sys.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut splus = DMatrix::from_element(dim, dim, zero);
    for i in 0..dim - 1 {
        splus[(i + 1, i)] = Complex64::new(raising_coefficient(sys, i), 0.0);
    }
    let sminus = splus.transpose();
    let sz = DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::new(sys.dicke_label(i), 0.0) } else { zero });
    let sx = (&splus + &sminus) * Complex64::new(0.5, 0.0);
    // (S₊ − S₋) / 2i
    let sy = (&splus - &sminus) * Complex64::new(0.0, -0.5);
    let s2 = &sx * &sx + &sy * &sy + &sz * &sz;
    Ok(SpinOperators {
        sx: OperatorMatrix::new(sx, OperatorFlags::HERMITIAN)?,
        sy: OperatorMatrix::new(sy, OperatorFlags::HERMITIAN)?,
        sz: OperatorMatrix::new(sz, OperatorFlags { hermitian: true, unitary: false, diagonal: true })?,
        splus: OperatorMatrix::new(splus, OperatorFlags::NONE)?,
        sminus: OperatorMatrix::new(sminus, OperatorFlags::NONE)?,
        s2: OperatorMatrix::new(s2, OperatorFlags::HERMITIAN)?,
    })
}

/// Coherent spin state `|θ, φ⟩`.
///
/// The amplitude on `|s − k⟩` is `C(2s,k)^{1/2} cos^{2s−k}(θ/2) sin^k(θ/2) e^{ikφ}`,
/// the product form of `(1 + tan²(θ/2))^{−s} C(2s,k)^{1/2} (e^{iφ} tan(θ/2))^k`
/// that stays finite at `θ = π`. `θ = 0` puts all weight on `|s⟩`.
pub fn coherent_state(sys: &SpinSystem, theta: f64, phi: f64) -> Result<StateVector> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Config(format!("theta = {theta} outside [0, pi]")));
    }
    if !(0.0..std::f64::consts::TAU).contains(&phi) {
        return Err(Error::Config(format!("phi = {phi} outside [0, 2pi)")));
    }
    let two_s = sys.two_s();
    let (sin, cos) = (theta / 2.0).sin_cos();
    let mut amps = DVector::from_element(sys.dim(), Complex64::new(0.0, 0.0));
    for k in 0..=two_s {
        let magnitude = binomial_weight(two_s, k, cos, sin);
        amps[two_s - k] = Complex64::from_polar(magnitude, k as f64 * phi);
    }
    StateVector::normalized(amps)
}

/// `C(n,k)^{1/2} a^{n−k} b^k` for `a, b ≥ 0`, evaluated in log space so large
/// `n` neither overflows the binomial nor underflows the powers prematurely.
pub(crate) fn binomial_weight(n: usize, k: usize, a: f64, b: f64) -> f64 {
    let pow_a = n - k;
    if (a == 0.0 && pow_a > 0) || (b == 0.0 && k > 0) {
        return 0.0;
    }
    let mut log = 0.5 * ln_binomial(n as u64, k as u64);
    if pow_a > 0 {
        log += pow_a as f64 * a.ln();
    }
    if k > 0 {
        log += k as f64 * b.ln();
    }
    log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Variances along two axes and the mean along the third.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyTriplet {
    pub var_i: f64,
    pub var_j: f64,
    pub mean_k: f64,
}

impl UncertaintyTriplet {
    /// Slack in `ΔS_i² ΔS_j² ≥ ¼⟨S_k⟩²`; non-negative for every physical state.
    pub fn heisenberg_slack(&self) -> f64 {
        self.var_i * self.var_j - 0.25 * self.mean_k * self.mean_k
    }
}

pub fn variance(state: &StateVector, op: &OperatorMatrix) -> f64 {
    let mean = state.expectation(op).re;
    let image = op.entries() * state.amps();
    image.norm_squared() - mean * mean
}

/// `(ΔS_i², ΔS_j², ⟨S_k⟩)` for the axes `(i, j, k)`.
pub fn uncertainty_triplet(state: &StateVector, ops: &SpinOperators, axes: (Axis, Axis, Axis)) -> UncertaintyTriplet {
    let (i, j, k) = axes;
    UncertaintyTriplet {
        var_i: variance(state, ops.get(i)),
        var_j: variance(state, ops.get(j)),
        mean_k: state.expectation(ops.get(k)).re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exp_i_hermitian;
    use std::f64::consts::PI;

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn system_dimensions() {
        let sys = make_spin_system(2).unwrap();
        assert_eq!((sys.dim(), sys.s()), (4, 1.5));
        let sys = make_spin_system(3).unwrap();
        assert_eq!((sys.dim(), sys.s()), (8, 3.5));
        let sys = make_spin_system(6).unwrap();
        assert_eq!((sys.dim(), sys.s()), (64, 31.5));
        assert_eq!(sys.two_s() % 2, 1);
        assert!(make_spin_system(1).is_err());
        assert!(make_spin_system(15).is_err());
        assert!(SpinSystem::from_dim(12).is_err());
    }

    #[test]
    fn index_convention() {
        let sys = make_spin_system(3).unwrap();
        assert_eq!(sys.dicke_label(0), -3.5);
        assert_eq!(sys.dicke_label(7), 3.5);
        assert_eq!(sys.index_of(-1), Some(3));
        assert_eq!(sys.index_of(1), Some(4));
        assert_eq!(sys.index_of(2), None);
        assert_eq!(sys.index_of(9), None);
    }

    #[test]
    fn sz_ladder_for_spin_three_halves() {
        let ops = spin_operators(&make_spin_system(2).unwrap()).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| ops.sz.entries()[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn lowering_annihilates_ground_state() {
        let sys = make_spin_system(3).unwrap();
        let ops = spin_operators(&sys).unwrap();
        let ground = StateVector::basis(sys.dim(), 0).unwrap();
        assert_eq!(ops.sminus.apply(&ground).unwrap().camax(), 0.0);
        let top = StateVector::basis(sys.dim(), sys.dim() - 1).unwrap();
        assert_eq!(ops.splus.apply(&top).unwrap().camax(), 0.0);
    }

    #[test]
    fn commutators_and_casimir() {
        for n in 2..=6 {
            let sys = make_spin_system(n).unwrap();
            let ops = spin_operators(&sys).unwrap();
            let (x, y, z) = (ops.sx.entries(), ops.sy.entries(), ops.sz.entries());
            let i = Complex64::new(0.0, 1.0);
            assert!(max_abs(&(x * y - y * x - z * i)) < 1e-12);
            assert!(max_abs(&(y * z - z * y - x * i)) < 1e-12);
            assert!(max_abs(&(z * x - x * z - y * i)) < 1e-12);
            let casimir =
                DMatrix::<Complex64>::identity(sys.dim(), sys.dim()) * Complex64::new(sys.s() * (sys.s() + 1.0), 0.0);
            assert!(max_abs(&(ops.s2.entries() - casimir)) < 1e-12, "n={n}");
            let ladder = ops.splus.entries() - (x + y * i);
            assert!(max_abs(&ladder) < 1e-13);
        }
    }

    #[test]
    fn operator_flag_checks() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        assert!(OperatorMatrix::new(m.clone(), OperatorFlags::HERMITIAN).is_err());
        assert!(OperatorMatrix::new(m.clone(), OperatorFlags::UNITARY).is_err());
        assert!(OperatorMatrix::new(m.clone(), OperatorFlags { diagonal: true, ..OperatorFlags::NONE }).is_err());
        assert!(OperatorMatrix::new(m, OperatorFlags::NONE).is_ok());
    }

    #[test]
    fn coherent_pole_and_equator() {
        let sys = make_spin_system(3).unwrap();
        let pole = coherent_state(&sys, 0.0, 0.0).unwrap();
        assert_eq!(pole.amp(sys.dim() - 1), Complex64::new(1.0, 0.0));
        assert!(pole.probabilities()[..sys.dim() - 1].iter().all(|&p| p == 0.0));

        let eq = coherent_state(&sys, PI / 2.0, 0.0).unwrap();
        let binom = [1.0, 7.0, 21.0, 35.0, 35.0, 21.0, 7.0, 1.0];
        for (k, c) in binom.iter().enumerate() {
            let expected = (c as &f64).sqrt() / 2f64.powf(sys.s());
            assert!((eq.amp(sys.two_s() - k).re - expected).abs() < 1e-15);
            assert!(eq.amp(k).im.abs() < 1e-15);
        }

        let south = coherent_state(&sys, PI, 1.0).unwrap();
        assert!((south.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_matches_exponentiated_rotation() {
        let sys = make_spin_system(3).unwrap();
        let ops = spin_operators(&sys).unwrap();
        let top = StateVector::basis(sys.dim(), sys.dim() - 1).unwrap();
        for &(theta, phi) in &[(0.3f64, 0.2f64), (PI / 2.0, 0.0), (1.2, 2.5), (PI, 4.0), (2.9, 6.0)] {
            let gen =
                ops.sx.entries() * Complex64::new(phi.sin(), 0.0) - ops.sy.entries() * Complex64::new(phi.cos(), 0.0);
            let rot = exp_i_hermitian(&gen, theta).unwrap();
            let rotated = StateVector::normalized(rot * top.amps()).unwrap();
            let closed = coherent_state(&sys, theta, phi).unwrap();
            assert!((rotated.overlap(&closed) - 1.0).abs() < 1e-10, "theta={theta} phi={phi}");
        }
    }

    #[test]
    fn coherent_norm_on_grid() {
        for n in [2, 5, 10] {
            let sys = make_spin_system(n).unwrap();
            for t in 0..5 {
                for p in 0..5 {
                    let theta = PI * t as f64 / 4.0;
                    let phi = 2.0 * PI * p as f64 / 5.0;
                    let st = coherent_state(&sys, theta, phi).unwrap();
                    assert!((st.norm_squared() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coherent_rejects_bad_angles() {
        let sys = make_spin_system(2).unwrap();
        assert!(coherent_state(&sys, -0.1, 0.0).is_err());
        assert!(coherent_state(&sys, 0.1, 2.0 * PI).is_err());
    }

    #[test]
    fn equatorial_uncertainty() {
        let sys = make_spin_system(4).unwrap();
        let ops = spin_operators(&sys).unwrap();
        let st = coherent_state(&sys, PI / 2.0, 0.0).unwrap();
        let u = uncertainty_triplet(&st, &ops, (Axis::Z, Axis::Y, Axis::X));
        // Brute-force binomial variance of m with p = 1/2.
        let probs = st.probabilities();
        let mean: f64 = probs.iter().enumerate().map(|(i, p)| sys.dicke_label(i) * p).sum();
        let var: f64 = probs.iter().enumerate().map(|(i, p)| (sys.dicke_label(i) - mean).powi(2) * p).sum();
        assert!((var - sys.s() / 2.0).abs() < 1e-12);
        assert!((u.var_i - sys.s() / 2.0).abs() < 1e-10);
        assert!((u.var_j - sys.s() / 2.0).abs() < 1e-10);
        assert!((u.mean_k - sys.s()).abs() < 1e-10);
        assert!(u.heisenberg_slack() > -1e-10);
    }

    #[test]
    fn ground_state_is_minimum_uncertainty() {
        let sys = make_spin_system(3).unwrap();
        let ops = spin_operators(&sys).unwrap();
        let ground = StateVector::basis(sys.dim(), 0).unwrap();
        let u = uncertainty_triplet(&ground, &ops, (Axis::X, Axis::Y, Axis::Z));
        assert!((u.var_i * u.var_j - (sys.s() / 2.0).powi(2)).abs() < 1e-10);
        assert_eq!(u.mean_k, -sys.s());
        assert!(u.heisenberg_slack().abs() < 1e-10);
    }

    #[test]
    fn serializes_as_pairs() {
        let st = StateVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        assert_eq!(serde_json::to_string(&st).unwrap(), "[[0.6,0.0],[0.0,0.8]]");
    }
}
