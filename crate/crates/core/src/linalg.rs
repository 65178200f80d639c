//! Dense Hermitian eigendecompositions and the unitary exponentials built on them.
//!
//! A generator `G` with spectrum `G = V diag(λ) V†` exponentiates as
//! `exp(i t G) = V diag(exp(i t λ)) V†`, which stays unitary up to round-off
//! for any `t`. Every spin generator used here (`Sx`, `Sz² − Sy²`) is real
//! symmetric in the Dicke basis, so the real path carries the heavy lifting.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 0; // nalgebra: 0 means iterate until convergence

/// Eigenpairs of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    pub fn decompose(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() {
            return Err(Error::Numerical(format!(
                "eigendecomposition needs a square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Numerical(format!("generator is not symmetric: max |M - M^T| = {asym:e} (dim {dim})")));
        }
        let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
            Error::Numerical(format!(
                "symmetric eigensolver did not converge (dim {dim}, max entry {:e}, frobenius norm {:e})",
                matrix.amax(),
                matrix.norm()
            ))
        })?;
        let residual = residual(&matrix, &eig.eigenvectors, &eig.eigenvalues);
        if residual > 1e-10 * scale {
            return Err(Error::Numerical(format!(
                "eigendecomposition residual {residual:e} too large (dim {dim}, max entry {scale:e})"
            )));
        }
        Ok(Self { values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// Dense `exp(i t G)`.
    pub fn exp_i(&self, t: f64) -> DMatrix<Complex64> {
        let v = self.vectors.map(|x| Complex64::new(x, 0.0));
        let mut scaled = v.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(self.values.iter()) {
            col *= Complex64::from_polar(1.0, t * lambda);
        }
        scaled * v.transpose()
    }

    /// `exp(i t G) |psi>` without forming the dense exponential.
    pub fn apply_exp_i(&self, t: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let re = psi.map(|z| z.re);
        let im = psi.map(|z| z.im);
        let c_re = self.vectors.tr_mul(&re);
        let c_im = self.vectors.tr_mul(&im);
        let mut out_re = DVector::zeros(self.dim());
        let mut out_im = DVector::zeros(self.dim());
        let mut rot_re = DVector::zeros(self.dim());
        let mut rot_im = DVector::zeros(self.dim());
        for k in 0..self.dim() {
            let phase = Complex64::from_polar(1.0, t * self.values[k]);
            let c = Complex64::new(c_re[k], c_im[k]) * phase;
            rot_re[k] = c.re;
            rot_im[k] = c.im;
        }
        out_re.gemv(1.0, &self.vectors, &rot_re, 0.0);
        out_im.gemv(1.0, &self.vectors, &rot_im, 0.0);
        DVector::from_iterator(self.dim(), out_re.iter().zip(out_im.iter()).map(|(&r, &i)| Complex64::new(r, i)))
    }
}

fn residual(a: &DMatrix<f64>, v: &DMatrix<f64>, lambda: &DVector<f64>) -> f64 {
    let av = a * v;
    let mut vl = v.clone();
    for (mut col, &l) in vl.column_iter_mut().zip(lambda.iter()) {
        col *= l;
    }
    (av - vl).amax()
}

/// Dense `exp(i t G)` for a Hermitian `G`, using the real path whenever the
/// generator has no imaginary part.
pub fn exp_i_hermitian(generator: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    let dim = generator.nrows();
    let scale = generator.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let herm = (generator - generator.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > 1e-12 * scale {
        return Err(Error::Numerical(format!("generator is not Hermitian: max |G - G^dag| = {herm:e} (dim {dim})")));
    }
    if generator.iter().all(|z| z.im == 0.0) {
        return Ok(SymmetricSpectrum::decompose(generator.map(|z| z.re))?.exp_i(t));
    }
    let eig = SymmetricEigen::try_new(generator.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::Numerical(format!("Hermitian eigensolver did not converge (dim {dim}, max entry {scale:e})"))
    })?;
    let mut scaled = eig.eigenvectors.clone();
    for (mut col, &lambda) in scaled.column_iter_mut().zip(eig.eigenvalues.iter()) {
        col *= Complex64::from_polar(1.0, t * lambda);
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

/// Largest entry of `|M† M − I|`.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Largest entry of `|M − M†|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
