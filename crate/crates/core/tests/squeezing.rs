use std::f64::consts::{FRAC_PI_2, PI};

use chp_core::spin_core::{coherent_state, SpinSystem, StateVector};
use chp_core::squeezing::{
    bounding_epsilon, central_probability, distribution_variance, ideal_overlap, optimize_mu, reduced_variance,
    squeeze_operator, squeeze_sweep, Squeezer, ROTATION_ANGLE,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense reference built from the matrix elements alone.
mod reference {
    use super::*;

    pub fn spin_matrices(dim: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>) {
        let s = (dim as f64 - 1.0) / 2.0;
        let mut plus = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim - 1 {
            let m = i as f64 - s;
            plus[(i + 1, i)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let minus = plus.adjoint();
        let sx = (&plus + &minus) * Complex64::new(0.5, 0.0);
        let sy = (&plus - &minus) * Complex64::new(0.0, -0.5);
        let sz =
            DMatrix::from_fn(
                dim,
                dim,
                |r, c| if r == c { Complex64::new(r as f64 - s, 0.0) } else { Complex64::default() },
            );
        (sx, sy, sz)
    }

    /// `exp(i t h)` by scaling and squaring a truncated Taylor series.
    pub fn expm_i(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        let a = h * Complex64::new(0.0, t);
        let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
        let squarings = norm.max(1.0).log2().ceil() as i32 + 4;
        let a = a / Complex64::new(2f64.powi(squarings), 0.0);
        let dim = a.nrows();
        let mut sum = DMatrix::<Complex64>::identity(dim, dim);
        let mut term = sum.clone();
        for k in 1..30 {
            term = &term * &a / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    pub fn binomial_equator(dim: usize) -> DVector<Complex64> {
        let n = dim - 1;
        let mut c = 1.0f64;
        let mut amps = DVector::zeros(dim);
        for k in 0..=n {
            amps[k] = Complex64::new((c / 2f64.powi(n as i32)).sqrt(), 0.0);
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        amps
    }

    pub fn squeezed(dim: usize, mu: f64, rotation: f64) -> DVector<Complex64> {
        let (sx, sy, sz) = spin_matrices(dim);
        let twist = &sz * &sz - &sy * &sy;
        expm_i(&sx, rotation) * (expm_i(&twist, mu) * binomial_equator(dim))
    }

    pub fn sz_variance(psi: &DVector<Complex64>) -> f64 {
        let dim = psi.len();
        let s = (dim as f64 - 1.0) / 2.0;
        let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let mean: f64 = p.iter().enumerate().map(|(i, w)| (i as f64 - s) * w).sum();
        p.iter().enumerate().map(|(i, w)| (i as f64 - s - mean).powi(2) * w).sum()
    }
}

fn state(amps: DVector<Complex64>) -> StateVector {
    StateVector::new(amps).unwrap()
}

#[test]
fn library_state_matches_taylor_reference() {
    for n in [2u32, 4, 6] {
        let sys = SpinSystem::new(n).unwrap();
        let sq = Squeezer::new(sys).unwrap();
        for mu in [0.0, 0.5 / sys.s(), 1.0 / sys.s(), 2.0 / sys.s()] {
            let want = state(reference::squeezed(sys.dim(), mu, ROTATION_ANGLE));
            assert!(sq.state(mu).max_deviation_up_to_phase(&want) < 1e-10, "n={n} mu={mu}");
        }
    }
}

#[test]
fn taylor_reference_reproduces_four_level_optimum() {
    let psi = reference::squeezed(4, PI / (6.0 * 3f64.sqrt()), ROTATION_ANGLE);
    let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    for (got, want) in p.iter().zip([0.0, 0.5, 0.5, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn opposite_rotation_sense_does_not_squeeze() {
    // With exp(+iπ/4 Sx) the same twist widens the Sz distribution.
    let dim = 64;
    let s = 31.5;
    let v = reference::sz_variance(&reference::squeezed(dim, 1.0 / s, -ROTATION_ANGLE));
    assert!(v > s / 2.0, "variance {v}");
}

#[test]
fn sixty_four_levels_frozen_by_reference_scan() {
    // Coarse scan of the reference construction brackets the minimum.
    let dim = 64;
    let s = 31.5;
    let grid: Vec<f64> = (1..=80).map(|k| 4.0 / s * k as f64 / 80.0).collect();
    let vs: Vec<f64> =
        grid.iter().map(|&mu| reference::sz_variance(&reference::squeezed(dim, mu, ROTATION_ANGLE))).collect();
    let k = (0..vs.len()).min_by(|&a, &b| vs[a].total_cmp(&vs[b])).unwrap();
    assert!(k > 0 && k < vs.len() - 1, "minimum at scan edge");

    let res = optimize_mu(&SpinSystem::new(6).unwrap(), 1e-10).unwrap();
    assert!(res.mu > grid[k - 1] && res.mu < grid[k + 1]);
    assert!(res.v_minus <= vs[k] + 1e-12);
    assert!(res.v_minus > 0.25 && res.v_minus < 0.5);
    assert!((0.5..=2.0).contains(&(s * res.mu)));

    let reference_state = reference::squeezed(dim, res.mu, ROTATION_ANGLE);
    let p: Vec<f64> = reference_state.iter().map(|z| z.norm_sqr()).collect();
    assert!((res.v_minus - reference::sz_variance(&reference_state)).abs() < 1e-10);
    assert!((res.central_probability().unwrap() - p[31]).abs() < 1e-10);

    assert!((res.mu - 0.036043086).abs() < 1e-6);
    assert!((res.v_minus - 0.433048402).abs() < 1e-8);
    assert!((res.central_probability().unwrap() - 0.481227069).abs() < 1e-8);
    assert!((res.ideal_overlap() - 0.962454137).abs() < 1e-8);
}

#[test]
fn equatorial_variance_is_half_spin() {
    for n in 2..=7 {
        let sys = SpinSystem::new(n).unwrap();
        let psi = coherent_state(&sys, FRAC_PI_2, 0.0).unwrap();
        let brute = reference::sz_variance(&reference::binomial_equator(sys.dim()));
        assert!((reduced_variance(&psi, &sys) - sys.s() / 2.0).abs() < 1e-9);
        assert!((brute - sys.s() / 2.0).abs() < 1e-9);
    }
}

#[test]
fn distribution_and_state_variances_agree() {
    let sys = SpinSystem::new(5).unwrap();
    let sq = Squeezer::new(sys).unwrap();
    for mu in [0.0, 0.02, 0.06, 0.1] {
        let psi = sq.state(mu);
        assert!((distribution_variance(&psi.probabilities()) - reduced_variance(&psi, &sys)).abs() < 1e-9);
    }
}

#[test]
fn squeeze_operator_unitary_across_range() {
    for n in 2..=6 {
        let sys = SpinSystem::new(n).unwrap();
        for mu in [0.0, 1.0 / sys.s(), 2.0 / sys.s()] {
            assert!(squeeze_operator(&sys, mu).unwrap().flags().unitary);
        }
    }
}

#[test]
fn sweep_variance_rises_towards_half() {
    let points = squeeze_sweep(&[2, 3, 4, 5, 6, 7], 1e-9).unwrap();
    for pair in points.windows(2) {
        assert!(pair[1].v_min >= pair[0].v_min - 1e-6);
    }
    assert!(points.iter().all(|p| p.v_min < 0.5));
    assert!((points[0].v_min - 0.25).abs() < 1e-9);
}

#[test]
fn central_pair_stays_near_template_value() {
    // Measured central probabilities. They cross below 31/64 from N = 32 on
    // and level off near 0.4788.
    let bound = 31.0 / 64.0;
    let points = squeeze_sweep(&[3, 4, 5, 7], 1e-9).unwrap();
    let pc: Vec<f64> = points.iter().map(|p| p.p_c).collect();
    assert!((pc[0] - 0.494733803).abs() < 1e-8);
    assert!((pc[1] - 0.488417497).abs() < 1e-8);
    assert!((pc[2] - 0.483816513).abs() < 1e-8);
    assert!((pc[3] - 0.479908333).abs() < 1e-8);
    assert!(pc[1] > bound && pc[2] < bound);
    assert!(pc.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn neighbours_of_central_pair() {
    // P_{N/2+1} at the optimum: below 1e-3 only for N = 8.
    let points = squeeze_sweep(&[3, 4, 6], 1e-9).unwrap();
    let neighbour = |i: usize| {
        let d = &points[i].distribution;
        let n = d.len();
        assert!((d[n / 2 + 1] - d[n / 2 - 2]).abs() < 1e-9);
        d[n / 2 + 1]
    };
    assert!(neighbour(0) < 1e-3);
    assert!((neighbour(1) - 3.243e-3).abs() < 1e-5);
    assert!((neighbour(2) - 7.933e-3).abs() < 1e-5);
}

#[test]
fn bounding_template_variance() {
    let b = bounding_epsilon();
    for dim in [8, 16, 64] {
        let p = b.template_f64(dim).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((distribution_variance(&p) - 0.5).abs() < 1e-12);
        assert_eq!(central_probability(&p).unwrap(), 0.484375);
    }
}

#[test]
fn overlap_of_four_level_optimum() {
    let res = optimize_mu(&SpinSystem::new(2).unwrap(), 1e-10).unwrap();
    assert!((ideal_overlap(&res.state) - 1.0).abs() < 1e-9);
}
