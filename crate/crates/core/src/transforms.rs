//! Unitary transforms used by the decision circuit: the Walsh–Hadamard
//! transform `H^{⊗n}` and the discrete Fourier transform with kernel
//! `ω^{jk}/√N`, `ω = e^{2πi/N}`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::spin_core::StateVector;

/// In-place fast Walsh–Hadamard transform, normalized by `1/√N`.
pub fn walsh_hadamard_in_place(buf: &mut [Complex64]) -> Result<()> {
    let len = buf.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Config(format!("Walsh-Hadamard transform needs a power-of-two length, got {len}")));
    }
    let mut half = 1;
    while half < len {
        for block in buf.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    let scale = 1.0 / (len as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
    Ok(())
}

pub fn walsh_hadamard(state: &StateVector) -> Result<StateVector> {
    let mut amps = state.amps().clone();
    walsh_hadamard_in_place(amps.as_mut_slice())?;
    Ok(StateVector::from_unitary_image(amps))
}

/// In-place unitary DFT, `x_k ← Σ_j ω^{±jk} x_j / √N` with the minus sign
/// when `inverse` is set.
pub fn dft_in_place(buf: &mut [Complex64], inverse: bool) {
    let len = buf.len();
    if len == 0 {
        return;
    }
    // rustfft's forward direction uses e^{-2πi/N}.
    let direction = if inverse { FftDirection::Forward } else { FftDirection::Inverse };
    FftPlanner::new().plan_fft(len, direction).process(buf);
    let scale = 1.0 / (len as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
}

pub fn dft(state: &StateVector, inverse: bool) -> StateVector {
    let mut amps = state.amps().clone();
    dft_in_place(amps.as_mut_slice(), inverse);
    StateVector::from_unitary_image(amps)
}
