//! Hadamard and Fourier codewords, error syndromes and problem instances.
//!
//! Bit `x` of the Hadamard codeword `W_j` is the parity of `j & x`
//! (Sylvester order). The Fourier codeword `T_j` has entries `2jk/N`
//! reduced modulo 2 into `(−1, 1]`, stored as exact rationals.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Serialize, Serializer};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

/// Syndrome sets at or below this size are enumerated, larger ones sampled.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

const MAX_DIM: usize = 1 << 20;

/// Hidden index of the "A" codeword, `N/2 − 1`.
pub const fn designated_codeword(dim: usize) -> usize {
    dim / 2 - 1
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 || !dim.is_power_of_two() || dim > MAX_DIM {
        return Err(Error::Config(format!("codeword length must be a power of two in [2, {MAX_DIM}], got {dim}")));
    }
    Ok(())
}

fn check_index(dim: usize, j: usize) -> Result<()> {
    if j >= dim {
        return Err(Error::Config(format!("codeword index {j} out of range for N={dim}")));
    }
    Ok(())
}

/// Binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(c)
}

#[inline]
pub fn hadamard_bit(j: usize, x: usize) -> u8 {
    ((j & x).count_ones() & 1) as u8
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    index: usize,
    bits: Vec<u8>,
}

impl Codeword {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.weight() == self.len()
    }

    /// `self ⊕ mask`.
    pub fn with_errors(&self, syndrome: &ErrorSyndrome) -> Result<Vec<u8>> {
        xor_bits(&self.bits, syndrome.mask())
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bit_string(&self.bits))
    }
}

pub fn xor_bits(a: &[u8], b: &[u8]) -> Result<Vec<u8>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

pub fn hadamard_codeword(dim: usize, j: usize) -> Result<Codeword> {
    check_dim(dim)?;
    check_index(dim, j)?;
    Ok(Codeword { index: j, bits: (0..dim).map(|x| hadamard_bit(j, x)).collect() })
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> Result<usize> {
    Ok(xor_bits(a, b)?.iter().filter(|&&b| b == 1).count())
}

/// Reduces a rational into `(−1, 1]` modulo 2.
pub fn reduce_mod2(mut t: Ratio<i64>) -> Ratio<i64> {
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    while t > one {
        t -= two;
    }
    while t <= -one {
        t += two;
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalWord {
    index: usize,
    vals: Vec<Ratio<i64>>,
}

impl FractionalWord {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn vals(&self) -> &[Ratio<i64>] {
        &self.vals
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Componentwise sum reduced modulo 2.
    pub fn add(&self, other: &FractionalWord) -> Result<Vec<Ratio<i64>>> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(self.vals.iter().zip(&other.vals).map(|(a, b)| reduce_mod2(a + b)).collect())
    }
}

fn fraction_string(vals: &[Ratio<i64>]) -> String {
    vals.iter().map(|v| v.to_string()).join(",")
}

impl fmt::Display for FractionalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fraction_string(&self.vals))
    }
}

pub fn fourier_codeword(dim: usize, j: usize) -> Result<FractionalWord> {
    check_dim(dim)?;
    check_index(dim, j)?;
    let (n, half) = (dim as i64, dim as i64 / 2);
    let vals = (0..n)
        .map(|k| {
            // 2jk/N = r/(N/2) with r = jk mod N, shifted into (−N/2, N/2].
            let r = (j as i64 * k) % n;
            let r = if r > half { r - n } else { r };
            Ratio::new(r, half)
        })
        .collect();
    Ok(FractionalWord { index: j, vals })
}

/// A bit-flip pattern of weight `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorSyndrome {
    mask: Vec<u8>,
    restricted: bool,
}

impl ErrorSyndrome {
    pub fn from_positions(dim: usize, positions: &[usize], restricted: bool) -> Result<Self> {
        let mut mask = vec![0u8; dim];
        for &x in positions {
            if x >= dim || mask[x] == 1 {
                return Err(Error::Config(format!("invalid or repeated error position {x} for N={dim}")));
            }
            if restricted && hadamard_bit(dim - 1, x) == 0 {
                return Err(Error::Config(format!("position {x} is not dominated by W_{}", dim - 1)));
            }
            mask[x] = 1;
        }
        Ok(Self { mask, restricted })
    }

    pub fn none(dim: usize) -> Self {
        Self { mask: vec![0; dim], restricted: true }
    }

    pub fn mask(&self) -> &[u8] {
        &self.mask
    }

    pub fn weight(&self) -> usize {
        self.mask.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    /// True if every error bit lies where `W_{N−1}` has a one.
    pub fn dominated_by_parity_word(&self) -> bool {
        let top = self.mask.len() - 1;
        self.mask.iter().enumerate().all(|(x, &b)| b == 0 || hadamard_bit(top, x) == 1)
    }

    pub fn positions(&self) -> Vec<usize> {
        self.mask.iter().positions(|&b| b == 1).collect()
    }
}

impl fmt::Display for ErrorSyndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bit_string(&self.mask))
    }
}

/// All syndromes of a fixed weight, restricted or unrestricted.
#[derive(Debug, Clone)]
pub struct SyndromeSet {
    dim: usize,
    weight: usize,
    restricted: bool,
    allowed: Vec<usize>,
}

pub fn syndromes(dim: usize, d: usize, restricted: bool) -> Result<SyndromeSet> {
    check_dim(dim)?;
    let allowed: Vec<usize> =
        if restricted { (0..dim).filter(|&x| hadamard_bit(dim - 1, x) == 1).collect() } else { (0..dim).collect() };
    if d > allowed.len() {
        return Err(Error::Config(format!(
            "error weight {d} exceeds the {} available positions (N={dim}, restricted={restricted})",
            allowed.len()
        )));
    }
    Ok(SyndromeSet { dim, weight: d, restricted, allowed })
}

impl SyndromeSet {
    pub fn weight(&self) -> usize {
        self.weight
    }

    /// `C(N, d)` or `C(N/2, d)`; `None` if it overflows `u128`.
    pub fn count(&self) -> Option<u128> {
        binomial(self.allowed.len() as u64, self.weight as u64)
    }

    pub fn is_enumerable(&self) -> bool {
        self.count().is_some_and(|c| c <= ENUMERATION_LIMIT)
    }

    /// Lexicographic enumeration of every member.
    pub fn iter(&self) -> impl Iterator<Item = ErrorSyndrome> + '_ {
        self.allowed.iter().copied().combinations(self.weight).map(move |pos| {
            let mut mask = vec![0u8; self.dim];
            pos.iter().for_each(|&x| mask[x] = 1);
            ErrorSyndrome { mask, restricted: self.restricted }
        })
    }

    /// Uniform draw from the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ErrorSyndrome {
        let mut mask = vec![0u8; self.dim];
        for i in rand::seq::index::sample(rng, self.allowed.len(), self.weight) {
            mask[self.allowed[i]] = 1;
        }
        ErrorSyndrome { mask, restricted: self.restricted }
    }

    /// Every member when the set is small enough, otherwise `samples` uniform draws.
    pub fn members<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Vec<ErrorSyndrome> {
        if self.is_enumerable() {
            self.iter().collect()
        } else {
            (0..samples).map(|_| self.sample(rng)).collect()
        }
    }
}

/// `Σ_{m<N/4} C(N/2, m)`, the number of strings within restricted distance of one codeword.
pub fn restricted_set_size(dim: usize) -> Result<u128> {
    check_dim(dim)?;
    if dim < 4 {
        return Err(Error::Config(format!("restricted sets need N >= 4, got {dim}")));
    }
    (0..dim / 4).try_fold(0u128, |acc, m| {
        binomial(dim as u64 / 2, m as u64)
            .and_then(|c| acc.checked_add(c))
            .ok_or_else(|| Error::Resource(format!("restricted set size overflows u128 at N={dim}")))
    })
}

/// Worst-case coherent error pattern: the `l` smallest even positions of
/// even parity. Every such flip lowers both principal output amplitudes of
/// the `j = N/2 − 1` pipeline by the same amount.
pub fn in_phase_syndrome(dim: usize, l: usize) -> Result<ErrorSyndrome> {
    check_dim(dim)?;
    let positions: Vec<usize> = (0..dim).step_by(2).filter(|&x| hadamard_bit(dim - 1, x) == 0).take(l).collect();
    if positions.len() < l {
        return Err(Error::Config(format!("only {} in-phase positions exist for N={dim}", positions.len())));
    }
    ErrorSyndrome::from_positions(dim, &positions, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupReport {
    pub dim: usize,
    pub laws: Vec<LawCheck>,
}

/// Verifies the additive group structure of both codeword families.
pub fn group_properties_check(dim: usize) -> Result<GroupReport> {
    check_dim(dim)?;
    let h: Vec<Codeword> = (0..dim).map(|j| hadamard_codeword(dim, j)).collect::<Result<_>>()?;
    let t: Vec<FractionalWord> = (0..dim).map(|j| fourier_codeword(dim, j)).collect::<Result<_>>()?;
    let mut laws = Vec::new();

    let fail = |law, j, k| Err(Error::GroupLaw { law, j, k });

    for (j, w) in h.iter().enumerate() {
        if xor_bits(&w.bits, &w.bits)? != h[0].bits {
            return fail("W_j xor W_j = W_0", j, j);
        }
    }
    laws.push(LawCheck { law: "W_j xor W_j = W_0", cases: dim });

    for (j, w) in h.iter().enumerate() {
        if xor_bits(&w.bits, &h[dim - 1 - j].bits)? != h[dim - 1].bits {
            return fail("W_j xor W_{N-1-j} = W_{N-1}", j, dim - 1 - j);
        }
    }
    laws.push(LawCheck { law: "W_j xor W_{N-1-j} = W_{N-1}", cases: dim });

    for (j, k) in (0..dim).cartesian_product(0..dim) {
        if xor_bits(&h[j].bits, &h[k].bits)? != h[j ^ k].bits {
            return fail("W_j xor W_k = W_{j^k}", j, k);
        }
    }
    laws.push(LawCheck { law: "W_j xor W_k = W_{j^k}", cases: dim * dim });

    for j in 0..dim {
        let k = (dim - j) % dim;
        if t[j].add(&t[k])? != t[0].vals {
            return fail("T_j + T_{N-j} = T_0", j, k);
        }
    }
    laws.push(LawCheck { law: "T_j + T_{N-j} = T_0", cases: dim });

    for j in 0..=dim / 2 {
        let k = dim / 2 - j;
        if t[j].add(&t[k])? != t[dim / 2].vals {
            return fail("T_j + T_{N/2-j} = T_{N/2}", j, k);
        }
    }
    laws.push(LawCheck { law: "T_j + T_{N/2-j} = T_{N/2}", cases: dim / 2 + 1 });

    Ok(GroupReport { dim, laws })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Restricted,
    Unrestricted,
    Fourier,
}

impl Variant {
    /// Exclusive upper bound on the error weight: `Z_{N/4}`, `Z_{N/16}`, or `{0}`.
    pub fn weight_bound(self, dim: usize) -> usize {
        match self {
            Variant::Restricted => dim / 4,
            Variant::Unrestricted => dim / 16,
            Variant::Fourier => 1,
        }
    }

    pub fn is_restricted(self) -> bool {
        self == Variant::Restricted
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Restricted => "restricted",
            Variant::Unrestricted => "unrestricted",
            Variant::Fourier => "fourier",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restricted" => Ok(Variant::Restricted),
            "unrestricted" => Ok(Variant::Unrestricted),
            "fourier" => Ok(Variant::Fourier),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    A,
    B,
}

/// The string loaded into the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleWord {
    Bits(Vec<u8>),
    Fractions(Vec<Ratio<i64>>),
}

impl OracleWord {
    pub fn len(&self) -> usize {
        match self {
            OracleWord::Bits(b) => b.len(),
            OracleWord::Fractions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Oracle phases `e^{iπ z_x}`.
    pub fn phases(&self) -> Vec<Complex64> {
        match self {
            OracleWord::Bits(bits) => {
                bits.iter().map(|&b| Complex64::new(if b == 1 { -1.0 } else { 1.0 }, 0.0)).collect()
            }
            OracleWord::Fractions(vals) => vals
                .iter()
                .map(|t| match (*t.numer(), *t.denom()) {
                    (0, _) => Complex64::new(1.0, 0.0),
                    (1, 1) => Complex64::new(-1.0, 0.0),
                    (p, q) => Complex64::from_polar(1.0, std::f64::consts::PI * p as f64 / q as f64),
                })
                .collect(),
        }
    }
}

impl fmt::Display for OracleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleWord::Bits(b) => f.write_str(&bit_string(b)),
            OracleWord::Fractions(v) => f.write_str(&fraction_string(v)),
        }
    }
}

impl Serialize for OracleWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// How the error weight of a sampled instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorWeights {
    Exact(usize),
    /// Any weight in `0..=max`, weighted so the string is uniform over the union.
    UpTo(usize),
    /// Every weight the variant allows.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub variant: Variant,
    pub dim: usize,
    pub z: OracleWord,
    pub hidden_j: usize,
    pub syndrome: Option<ErrorSyndrome>,
    pub label: Label,
}

fn label_for(dim: usize, j: usize) -> Label {
    if j == designated_codeword(dim) {
        Label::A
    } else {
        Label::B
    }
}

fn degenerate(variant: Variant, dim: usize, d: usize) -> Error {
    Error::DegenerateInstanceClass(format!(
        "{variant} instances with N={dim} allow error weights below {}, requested {d}",
        variant.weight_bound(dim)
    ))
}

impl ProblemInstance {
    /// `z = W_j ⊕ syndrome` for a Hadamard variant.
    pub fn hadamard(variant: Variant, dim: usize, j: usize, syndrome: ErrorSyndrome) -> Result<Self> {
        if variant == Variant::Fourier {
            return Err(Error::Config("fourier instances carry no syndrome".into()));
        }
        check_dim(dim)?;
        if dim < 4 {
            return Err(Error::Config(format!("decision problems need N >= 4, got {dim}")));
        }
        if j >= dim / 2 {
            return Err(Error::Config(format!("hidden index {j} outside Z_{}", dim / 2)));
        }
        let d = syndrome.weight();
        if d >= variant.weight_bound(dim) {
            return Err(degenerate(variant, dim, d));
        }
        if variant.is_restricted() && !syndrome.dominated_by_parity_word() {
            return Err(Error::Config("restricted instance with an undominated syndrome".into()));
        }
        let z = hadamard_codeword(dim, j)?.with_errors(&syndrome)?;
        Ok(Self {
            variant,
            dim,
            z: OracleWord::Bits(z),
            hidden_j: j,
            syndrome: Some(syndrome),
            label: label_for(dim, j),
        })
    }

    pub fn fourier(dim: usize, j: usize) -> Result<Self> {
        if dim < 4 {
            return Err(Error::Config(format!("decision problems need N >= 4, got {dim}")));
        }
        let t = fourier_codeword(dim, j)?;
        Ok(Self {
            variant: Variant::Fourier,
            dim,
            z: OracleWord::Fractions(t.vals),
            hidden_j: j,
            syndrome: None,
            label: label_for(dim, j),
        })
    }

    pub fn error_weight(&self) -> usize {
        self.syndrome.as_ref().map_or(0, ErrorSyndrome::weight)
    }
}

/// Draws an instance uniformly from `A ∪ B` of the chosen variant.
pub fn sample_instance<R: Rng + ?Sized>(
    variant: Variant,
    dim: usize,
    weights: ErrorWeights,
    rng: &mut R,
) -> Result<ProblemInstance> {
    check_dim(dim)?;
    let bound = variant.weight_bound(dim);
    let max_d = match weights {
        ErrorWeights::Exact(d) | ErrorWeights::UpTo(d) => d,
        ErrorWeights::All => bound.saturating_sub(1),
    };
    if bound == 0 || max_d >= bound {
        return Err(degenerate(variant, dim, max_d));
    }
    if variant == Variant::Fourier {
        return ProblemInstance::fourier(dim, rng.random_range(0..dim));
    }
    let j = rng.random_range(0..dim / 2);
    let d = match weights {
        ErrorWeights::Exact(d) => d,
        _ => {
            let free = if variant.is_restricted() { dim / 2 } else { dim } as u64;
            let ln: Vec<f64> = (0..=max_d).map(|d| ln_binomial(free, d as u64)).collect();
            let top = ln.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w = WeightedIndex::new(ln.iter().map(|l| (l - top).exp()))
                .map_err(|e| Error::Numerical(format!("error-weight distribution: {e}")))?;
            w.sample(rng)
        }
    };
    let syndrome = syndromes(dim, d, variant.is_restricted())?.sample(rng);
    ProblemInstance::hadamard(variant, dim, j, syndrome)
}

/// Every restricted instance for `N`: all `j ∈ Z_{N/2}`, all weights `d < N/4`.
pub fn enumerate_restricted_instances(dim: usize) -> Result<Vec<ProblemInstance>> {
    let total = restricted_set_size(dim)?.saturating_mul(dim as u128 / 2);
    if total > ENUMERATION_LIMIT {
        return Err(Error::Resource(format!("{total} restricted instances at N={dim} exceed the enumeration limit")));
    }
    let mut out = Vec::with_capacity(total as usize);
    for j in 0..dim / 2 {
        for d in 0..dim / 4 {
            for syndrome in syndromes(dim, d, true)?.iter() {
                out.push(ProblemInstance::hadamard(Variant::Restricted, dim, j, syndrome)?);
            }
        }
    }
    Ok(out)
}
