//! The Gaussian determinant estimator of the permanent.
//!
//! Draw X with X_ij = sqrt(a_ij) * x_ij and form Z = X'X (conjugate transpose
//! in the complex case); det Z is an unbiased estimator of per A by
//! Cauchy-Binet. The log-determinant is always computed from the singular
//! values of X, never by factoring Z: forming Z squares the condition number,
//! which is exactly the failure mode near the small-eigenvalue edge that the
//! spectral statistics in this crate are about.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{domain, substream};
use crate::stats;

/// Entry field of the Gaussian sketch.
///
/// `Real` uses standard normals (E x = 0, E x^2 = 1). `Complex` uses
/// x = (x_R + i x_I)/sqrt(2), so E|x|^2 = 1 and the two fields share one
/// scaling convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

/// One draw of the estimator: ln det Z (or -inf when Z underflows to
/// singular) with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRun {
    pub log_det: f64,
    pub field: FieldKind,
    pub seed: u64,
    pub shape: (usize, usize),
}

/// The Gaussian sketch X(A), real or complex.
#[derive(Debug, Clone)]
pub enum SampleMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex<f64>>),
}

impl SampleMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            SampleMatrix::Real(m) => m.nrows(),
            SampleMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            SampleMatrix::Real(m) => m.ncols(),
            SampleMatrix::Complex(m) => m.ncols(),
        }
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match self {
            SampleMatrix::Real(m) => Some(m),
            SampleMatrix::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&DMatrix<Complex<f64>>> {
        match self {
            SampleMatrix::Complex(m) => Some(m),
            SampleMatrix::Real(_) => None,
        }
    }

    /// Singular values, ascending.
    pub fn singular_values_ascending(&self) -> Result<Vec<f64>> {
        let mut sv: Vec<f64> = match self {
            SampleMatrix::Real(m) => svd_values_real(m)?,
            SampleMatrix::Complex(m) => {
                let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
                    .ok_or(Error::DecompositionFailed)?;
                svd.singular_values.iter().copied().collect()
            }
        };
        stats::sort_f64(&mut sv);
        Ok(sv)
    }

    /// Column-deleted copy.
    pub fn delete_column(&self, k: usize) -> Result<SampleMatrix> {
        if k >= self.ncols() {
            return Err(Error::IndexOutOfRange);
        }
        Ok(match self {
            SampleMatrix::Real(m) => SampleMatrix::Real(m.clone().remove_column(k)),
            SampleMatrix::Complex(m) => SampleMatrix::Complex(m.clone().remove_column(k)),
        })
    }

    fn diagonal_moduli(&self) -> Option<Vec<f64>> {
        if self.nrows() != self.ncols() {
            return None;
        }
        let n = self.nrows();
        match self {
            SampleMatrix::Real(m) => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j && m[(i, j)] != 0.0 {
                            return None;
                        }
                    }
                }
                Some((0..n).map(|i| m[(i, i)].abs()).collect())
            }
            SampleMatrix::Complex(m) => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j && (m[(i, j)].re != 0.0 || m[(i, j)].im != 0.0) {
                            return None;
                        }
                    }
                }
                Some(
                    (0..n)
                        .map(|i| {
                            let c = m[(i, i)];
                            libm::sqrt(c.re * c.re + c.im * c.im)
                        })
                        .collect(),
                )
            }
        }
    }
}

pub(crate) fn svd_values_real(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed)?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Sample X(A) for the given trial substream. Entries are drawn row-major;
/// the complex field draws (re, im) per entry. Zero weights still consume
/// their draws so that trial alignment does not depend on sparsity.
pub fn sample_x_trial(a: &DenseMatrix, field: FieldKind, seed: u64, trial: u64) -> SampleMatrix {
    let (n, m) = a.shape();
    let mut rng = substream(seed, domain::ESTIMATOR, trial);
    match field {
        FieldKind::Real => {
            let mut data = Vec::with_capacity(n * m);
            for i in 0..n {
                for j in 0..m {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    data.push(libm::sqrt(a.get(i, j)) * x);
                }
            }
            SampleMatrix::Real(DMatrix::from_row_slice(n, m, &data))
        }
        FieldKind::Complex => {
            let inv_sqrt2 = 1.0 / libm::sqrt(2.0);
            let mut data = Vec::with_capacity(n * m);
            for i in 0..n {
                for j in 0..m {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    let w = libm::sqrt(a.get(i, j)) * inv_sqrt2;
                    data.push(Complex::new(w * re, w * im));
                }
            }
            SampleMatrix::Complex(DMatrix::from_row_slice(n, m, &data))
        }
    }
}

/// Sample X(A) = (sqrt(a_ij) x_ij); deterministic given (A, field, seed).
pub fn sample_x(a: &DenseMatrix, field: FieldKind, seed: u64) -> SampleMatrix {
    sample_x_trial(a, field, seed, 0)
}

/// ln det Z from a sketch: 2 sum ln sigma_i over the m singular values of X.
/// Any zero singular value yields -inf. Diagonal square sketches skip the
/// SVD; their singular values are the diagonal moduli.
pub fn log_det_from_sample(x: &SampleMatrix) -> Result<f64> {
    let sv = match x.diagonal_moduli() {
        Some(d) => d,
        None => x.singular_values_ascending()?,
    };
    let mut acc = stats::Neumaier::new();
    for &s in &sv {
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc.add(libm::log(s));
    }
    Ok(2.0 * acc.total())
}

/// One estimator draw for trial index `trial` of the given seed.
pub fn log_det_estimate_trial(
    a: &DenseMatrix,
    field: FieldKind,
    seed: u64,
    trial: u64,
) -> Result<EstimateRun> {
    let x = sample_x_trial(a, field, seed, trial);
    Ok(EstimateRun {
        log_det: log_det_from_sample(&x)?,
        field,
        seed,
        shape: a.shape(),
    })
}

/// One estimator draw; deterministic given (A, field, seed).
pub fn log_det_estimate(a: &DenseMatrix, field: FieldKind, seed: u64) -> Result<EstimateRun> {
    log_det_estimate_trial(a, field, seed, 0)
}

/// `trials` independent draws of ln det Z, one substream per trial.
pub fn log_det_series(
    a: &DenseMatrix,
    field: FieldKind,
    seed: u64,
    trials: usize,
) -> Result<Vec<f64>> {
    (0..trials as u64)
        .map(|t| log_det_estimate_trial(a, field, seed, t).map(|r| r.log_det))
        .collect()
}

/// Sample mean of det Z over `trials` independent draws, with its standard
/// error. Requires at least two trials (the SE is undefined otherwise).
pub fn averaged_estimate(
    a: &DenseMatrix,
    trials: usize,
    field: FieldKind,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "averaged estimate needs at least 2 trials",
        ));
    }
    let dets: Vec<f64> = log_det_series(a, field, seed, trials)?
        .into_iter()
        .map(libm::exp)
        .collect();
    Ok(stats::mean_se(&dets))
}

/// Chebyshev bound on P(|Y - per| > delta * per) for the N-sample mean Y of
/// det Z(J_{nm}) in the flat case: (variance_ratio - 1) / (delta^2 N).
pub fn chebyshev_coverage_bound(n: usize, m: usize, delta: f64, n_samples: usize) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument("delta must be positive and finite"));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive"));
    }
    let ratio = crate::flat::flat_moments(n, m)?.variance_ratio;
    Ok((ratio - 1.0) / (delta * delta * n_samples as f64))
}
