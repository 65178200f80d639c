use std::f64::consts::{FRAC_PI_2, PI};

use chp_core::qfunction::{q_function, q_value};
use chp_core::spin_core::{coherent_state, SpinSystem, StateVector};
use chp_core::squeezing::optimize_mu;
use nalgebra::DVector;
use num_complex::Complex64;

/// Midpoint quadrature of `∫ Q sinθ dθ dφ · (2s+1)/(4π)` on a fine grid.
fn quadrature(state: &StateVector, sys: &SpinSystem, steps: usize) -> f64 {
    let (dt, dp) = (PI / steps as f64, 2.0 * PI / steps as f64);
    let mut sum = 0.0;
    for t in 0..steps {
        let theta = (t as f64 + 0.5) * dt;
        for p in 0..steps {
            sum += q_value(state, sys, theta, (p as f64 + 0.5) * dp) * theta.sin();
        }
    }
    sum * dt * dp * sys.dim() as f64 / (4.0 * PI)
}

fn mixed_state(dim: usize) -> StateVector {
    let amps = DVector::from_fn(dim, |i, _| Complex64::new((1.0 + i as f64).sqrt().sin(), (0.3 * i as f64).cos()));
    StateVector::normalized(amps).unwrap()
}

#[test]
fn grid_normalization_matches_quadrature() {
    for n in [2u32, 4, 5] {
        let sys = SpinSystem::new(n).unwrap();
        for psi in [coherent_state(&sys, FRAC_PI_2, 0.0).unwrap(), mixed_state(sys.dim())] {
            let exact = quadrature(&psi, &sys, 400);
            assert!((exact - 1.0).abs() < 1e-3, "quadrature {exact}");
            let grid = q_function(&psi, &sys, 128, 128).unwrap();
            assert!((grid.normalization(&sys) - 1.0).abs() < 0.02);
        }
    }
}

#[test]
fn non_negative_and_periodic() {
    let sys = SpinSystem::new(4).unwrap();
    let psi = mixed_state(sys.dim());
    let grid = q_function(&psi, &sys, 17, 24).unwrap();
    assert!(grid.values().iter().all(|&q| q >= 0.0));
    for t in 0..grid.theta_steps() {
        let theta = grid.theta(t);
        assert!((q_value(&psi, &sys, theta, 2.0 * PI) - grid.value(t, 0)).abs() < 1e-12);
    }
}

#[test]
fn coherent_state_peak() {
    let sys = SpinSystem::new(6).unwrap();
    let psi = coherent_state(&sys, FRAC_PI_2, 0.0).unwrap();
    let grid = q_function(&psi, &sys, 65, 64).unwrap();
    let (t, p) = grid.argmax();
    assert!((grid.theta(t) - FRAC_PI_2).abs() <= PI / 64.0);
    assert_eq!(p, 0);
}

#[test]
fn squeezed_state_is_wider_in_azimuth() {
    let sys = SpinSystem::new(5).unwrap();
    let coherent = q_function(&coherent_state(&sys, FRAC_PI_2, 0.0).unwrap(), &sys, 128, 128).unwrap();
    let squeezed = q_function(&optimize_mu(&sys, 1e-9).unwrap().state, &sys, 128, 128).unwrap();
    let (ct, cp) = coherent.half_max_widths();
    let (st, sp) = squeezed.half_max_widths();
    // Widths in radians: θ cells span π/127, φ cells 2π/128.
    let theta_width = |cells: usize| cells as f64 * PI / 127.0;
    let phi_width = |cells: usize| cells as f64 * 2.0 * PI / 128.0;
    assert!(phi_width(sp) > theta_width(st));
    assert!(theta_width(st) < theta_width(ct));
    assert!(phi_width(sp) > phi_width(cp));
}
