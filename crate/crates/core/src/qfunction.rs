//! Spherical Q-function on a `(θ, φ)` grid.
//!
//! `Q(θ, φ) = |Σ_k C(2s,k)^{1/2} sin^k(θ/2) cos^{2s−k}(θ/2) α_k e^{ikφ}|²`
//! where `α_k` is the amplitude on qudit `k`. Rows run over
//! `θ ∈ [0, π]` inclusive and columns over `φ ∈ [0, 2π)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::sig9;
use crate::spin_core::{binomial_weight, SpinSystem, StateVector};

pub const MIN_STEPS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    theta_steps: usize,
    phi_steps: usize,
    values: Vec<f64>,
}

impl SphericalGrid {
    pub fn theta_steps(&self) -> usize {
        self.theta_steps
    }

    pub fn phi_steps(&self) -> usize {
        self.phi_steps
    }

    pub fn theta(&self, t: usize) -> f64 {
        PI * t as f64 / (self.theta_steps - 1) as f64
    }

    pub fn phi(&self, p: usize) -> f64 {
        2.0 * PI * p as f64 / self.phi_steps as f64
    }

    pub fn value(&self, t: usize, p: usize) -> f64 {
        self.values[t * self.phi_steps + p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(t, p)` of the largest value, first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let i = self.values.iter().enumerate().fold(0, |best, (i, &v)| if v > self.values[best] { i } else { best });
        (i / self.phi_steps, i % self.phi_steps)
    }

    /// `Σ Q sinθ ΔθΔφ · (2s+1)/(4π)`, close to one for a fine grid.
    pub fn normalization(&self, sys: &SpinSystem) -> f64 {
        let (dt, dp) = (PI / (self.theta_steps - 1) as f64, 2.0 * PI / self.phi_steps as f64);
        let sum: f64 = (0..self.theta_steps)
            .map(|t| self.theta(t).sin() * (0..self.phi_steps).map(|p| self.value(t, p)).sum::<f64>())
            .sum();
        sum * dt * dp * sys.dim() as f64 / (4.0 * PI)
    }

    /// Cells at or above half of the maximum along the row and column through it.
    pub fn half_max_widths(&self) -> (usize, usize) {
        let (t0, p0) = self.argmax();
        let half = 0.5 * self.value(t0, p0);
        let theta_width = (0..self.theta_steps).filter(|&t| self.value(t, p0) >= half).count();
        let phi_width = (0..self.phi_steps).filter(|&p| self.value(t0, p) >= half).count();
        (theta_width, phi_width)
    }

    /// Row-major CSV with header `theta,phi,q`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,phi,q")?;
        for t in 0..self.theta_steps {
            for p in 0..self.phi_steps {
                writeln!(out, "{},{},{}", sig9(self.theta(t)), sig9(self.phi(p)), sig9(self.value(t, p)))?;
            }
        }
        Ok(())
    }
}

/// Q at a single point.
pub fn q_value(state: &StateVector, sys: &SpinSystem, theta: f64, phi: f64) -> f64 {
    let two_s = sys.two_s();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let amp: Complex64 = state
        .amps()
        .iter()
        .enumerate()
        .map(|(k, a)| a * binomial_weight(two_s, k, c, s) * Complex64::from_polar(1.0, k as f64 * phi))
        .sum();
    amp.norm_sqr()
}

pub fn q_function(
    state: &StateVector,
    sys: &SpinSystem,
    theta_steps: usize,
    phi_steps: usize,
) -> Result<SphericalGrid> {
    if state.dim() != sys.dim() {
        return Err(Error::LengthMismatch { expected: sys.dim(), actual: state.dim() });
    }
    if theta_steps < MIN_STEPS || phi_steps < MIN_STEPS {
        return Err(Error::Config(format!(
            "grid needs at least {MIN_STEPS} steps per axis, got {theta_steps}x{phi_steps}"
        )));
    }
    let mut grid = SphericalGrid { theta_steps, phi_steps, values: vec![0.0; theta_steps * phi_steps] };
    let rows: Vec<Vec<f64>> = (0..theta_steps)
        .into_par_iter()
        .map(|t| (0..phi_steps).map(|p| q_value(state, sys, grid.theta(t), grid.phi(p))).collect())
        .collect();
    grid.values = rows.concat();
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_core::coherent_state;

    #[test]
    fn ground_state_at_north_pole() {
        let sys = SpinSystem::new(3).unwrap();
        let psi = StateVector::basis(8, 0).unwrap();
        assert!((q_value(&psi, &sys, 0.0, 0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equatorial_state_peaks_on_equator() {
        let sys = SpinSystem::new(4).unwrap();
        let psi = coherent_state(&sys, PI / 2.0, 0.0).unwrap();
        let grid = q_function(&psi, &sys, 33, 32).unwrap();
        assert_eq!(grid.argmax(), (16, 0));
    }

    #[test]
    fn small_grid_rejected() {
        let sys = SpinSystem::new(2).unwrap();
        let psi = StateVector::basis(4, 0).unwrap();
        assert!(q_function(&psi, &sys, 4, 16).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let sys = SpinSystem::new(2).unwrap();
        let psi = StateVector::basis(4, 0).unwrap();
        let grid = q_function(&psi, &sys, 8, 8).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta,phi,q");
        assert_eq!(lines.len(), 65);
        assert_eq!(lines[1], "0,0,1");
    }
}
