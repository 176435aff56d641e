//! Eigenvalue analytics for Z(~A): cutoff determinants, the small-eigenvalue
//! tail statistic, the determinant factorization identity and its quadratic
//! form bounds, Fan's multiplicative eigenvalue inequality, and interlacing
//! under column deletion.
//!
//! Eigenvalues of Z(~A) are always obtained as squared singular values of
//! X(~A): factoring Z itself squares the condition number and destroys
//! accuracy exactly where these statistics live, at the bottom of the
//! spectrum.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::estimator::{sample_x_trial, FieldKind, SampleMatrix};
use crate::matrix::DenseMatrix;
use crate::stats;

/// Cutoff parameters: the eigenvalue floor epsilon and the normalizer s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParams {
    pub epsilon: f64,
    pub s: f64,
}

impl CutoffParams {
    pub fn new(epsilon: f64, s: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(
                "epsilon must be positive and finite",
            ));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(
                "normalizer s must be positive and finite",
            ));
        }
        Ok(Self { epsilon, s })
    }
}

/// Ascending eigenvalues of Z(~A) with the cutoff parameters they will be
/// summarized under. Values below the -1e-10 PSD slack are rejected; small
/// negative rounding residue is clamped to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    eigenvalues: Vec<f64>,
    pub epsilon: f64,
    pub s: f64,
}

impl SpectrumReport {
    pub fn new(mut eigenvalues: Vec<f64>, cutoff: CutoffParams) -> Result<Self> {
        for ev in eigenvalues.iter_mut() {
            if !ev.is_finite() || *ev < -1e-10 {
                return Err(Error::InvalidArgument("eigenvalue below PSD slack"));
            }
            if *ev < 0.0 {
                *ev = 0.0;
            }
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("eigenvalues must be ascending"));
        }
        Ok(Self {
            eigenvalues,
            epsilon: cutoff.epsilon,
            s: cutoff.s,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// Ascending-to-descending conversion (the tail statistics use the ascending
/// convention; Fan's inequality indexes the largest eigenvalue first).
pub fn descending(ascending: &[f64]) -> Vec<f64> {
    ascending.iter().rev().copied().collect()
}

/// Eigenvalues of Z(~A) = X(~A)*X(~A) as squared singular values of X(~A).
pub fn eigenvalues_of_z(
    a: &DenseMatrix,
    field: FieldKind,
    seed: u64,
    cutoff: CutoffParams,
) -> Result<SpectrumReport> {
    eigenvalues_of_z_trial(a, field, seed, 0, cutoff)
}

/// Trial-indexed variant for Monte Carlo sweeps.
pub fn eigenvalues_of_z_trial(
    a: &DenseMatrix,
    field: FieldKind,
    seed: u64,
    trial: u64,
    cutoff: CutoffParams,
) -> Result<SpectrumReport> {
    let x = sample_x_trial(&a.scale_tilde(), field, seed, trial);
    let sv = x.singular_values_ascending()?;
    SpectrumReport::new(sv.iter().map(|s| s * s).collect(), cutoff)
}

/// log det_eps = sum_i ln(lambda_i v eps); always >= the uncut log det.
pub fn log_det_cutoff(report: &SpectrumReport) -> f64 {
    let mut acc = stats::Neumaier::new();
    for &ev in report.eigenvalues() {
        acc.add(libm::log(ev.max(report.epsilon)));
    }
    acc.total()
}

/// Uncut log determinant, -inf when any eigenvalue is zero.
pub fn plain_log_det(report: &SpectrumReport) -> f64 {
    let mut acc = stats::Neumaier::new();
    for &ev in report.eigenvalues() {
        if ev == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc.add(libm::log(ev));
    }
    acc.total()
}

/// The small-eigenvalue tail statistic (1/s) sum_{lambda < eps} ln(1/lambda),
/// plus the cutoff gap (1/s)(log det_eps - log det).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailStatistic {
    pub value: f64,
    pub count_below: usize,
    /// (1/s) sum_{lambda < eps} ln(eps / lambda); at most `value` for eps < 1.
    pub cutoff_gap: f64,
}

/// Requires eps < 1. A zero eigenvalue flags the statistic as +inf rather
/// than raising an error.
pub fn tail_statistic(report: &SpectrumReport) -> Result<TailStatistic> {
    if report.epsilon >= 1.0 {
        return Err(Error::InvalidArgument(
            "tail statistic requires epsilon < 1",
        ));
    }
    let mut value = stats::Neumaier::new();
    let mut gap = stats::Neumaier::new();
    let mut count = 0usize;
    let mut saw_zero = false;
    for &ev in report.eigenvalues() {
        if ev < report.epsilon {
            count += 1;
            if ev == 0.0 {
                saw_zero = true;
            } else {
                value.add(-libm::log(ev));
                gap.add(libm::log(report.epsilon) - libm::log(ev));
            }
        }
    }
    if saw_zero {
        return Ok(TailStatistic {
            value: f64::INFINITY,
            count_below: count,
            cutoff_gap: f64::INFINITY,
        });
    }
    Ok(TailStatistic {
        value: value.total() / report.s,
        count_below: count,
        cutoff_gap: gap.total() / report.s,
    })
}

/// Closed-form bound on the expected tail statistic for the class
/// M(n, m, [a, b]): (eps |ln eps| / a) * (n+m) m / (n (n-m+1)).
/// Requires n > m + 3, 0 < eps <= 1/e, a > 0.
pub fn prop31_rhs(n: usize, m: usize, a: f64, eps: f64) -> Result<f64> {
    prop31_rhs_with_dof(n, m, a, eps, (n - m) as f64 + 1.0)
}

/// Same bound with the inverse-chi-square mean constant n-m-1 in place of
/// n-m+1 (E[1/chi^2_d] = 1/(d-2) for d = n-m+1 degrees of freedom).
pub fn prop31_rhs_corrected(n: usize, m: usize, a: f64, eps: f64) -> Result<f64> {
    prop31_rhs_with_dof(n, m, a, eps, (n - m) as f64 - 1.0)
}

fn prop31_rhs_with_dof(n: usize, m: usize, a: f64, eps: f64, dof: f64) -> Result<f64> {
    if m == 0 || n <= m + 3 {
        return Err(Error::InvalidShape { n, m });
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(
            "lower entry bound a must be positive",
        ));
    }
    let e_max = libm::exp(-1.0);
    if !(eps > 0.0 && eps <= e_max) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1/e]"));
    }
    let log_eps = libm::log(eps);
    Ok(eps * log_eps.abs() / a * ((n + m) as f64 * m as f64) / (n as f64 * dof))
}

/// Gram matrix V*V of a real matrix.
fn gram(v: &DMatrix<f64>) -> DMatrix<f64> {
    v.transpose() * v
}

/// Quadratic form v_k' P_k v_k via the Gram route: |v_k|^2 - w' G_k^{-1} w
/// with w = V_k' v_k. Returns the deleted Gram determinant as well.
fn projected_norm_real(v: &DMatrix<f64>, k: usize) -> Result<(f64, f64)> {
    let vk = v.column(k).into_owned();
    let rest = v.clone().remove_column(k);
    let g = gram(&rest);
    let chol = nalgebra::Cholesky::new(g).ok_or(Error::RankDeficient)?;
    let det_rest = {
        let l = chol.l();
        let mut acc = 1.0f64;
        for i in 0..l.nrows() {
            acc *= l[(i, i)] * l[(i, i)];
        }
        acc
    };
    let w = rest.transpose() * &vk;
    let y = chol.solve(&w);
    let q = vk.dot(&vk) - w.dot(&y);
    Ok((q, det_rest))
}

fn projected_norm_complex(v: &DMatrix<Complex<f64>>, k: usize) -> Result<f64> {
    let vk = v.column(k).into_owned();
    let rest = v.clone().remove_column(k);
    let g = rest.adjoint() * &rest;
    let chol = nalgebra::Cholesky::new(g).ok_or(Error::RankDeficient)?;
    let w = rest.adjoint() * &vk;
    let y = chol.solve(&w);
    let q = vk.dotc(&vk) - w.dotc(&y);
    Ok(q.re)
}

/// Relative gap of the determinant factorization
/// det(V'V) = det(V_k'V_k) * (v_k' P_k v_k), P_k the projection onto the
/// orthocomplement of the other columns. Requires full column rank.
pub fn factorization_identity_gap(v: &DMatrix<f64>, k: usize) -> Result<f64> {
    if k >= v.ncols() {
        return Err(Error::IndexOutOfRange);
    }
    if v.ncols() < 2 {
        return Err(Error::InvalidArgument("need at least two columns"));
    }
    let full = nalgebra::Cholesky::new(gram(v)).ok_or(Error::RankDeficient)?;
    let det_full = {
        let l = full.l();
        let mut acc = 1.0f64;
        for i in 0..l.nrows() {
            acc *= l[(i, i)] * l[(i, i)];
        }
        acc
    };
    let (q, det_rest) = projected_norm_real(v, k)?;
    Ok((det_full - det_rest * q).abs() / det_full)
}

/// Diagonal of Z(~A)^{-1}, entry k computed as (v_k' P_k v_k)^{-1}.
pub fn inverse_diagonal(a: &DenseMatrix, field: FieldKind, seed: u64) -> Result<Vec<f64>> {
    inverse_diagonal_trial(a, field, seed, 0)
}

pub fn inverse_diagonal_trial(
    a: &DenseMatrix,
    field: FieldKind,
    seed: u64,
    trial: u64,
) -> Result<Vec<f64>> {
    let x = sample_x_trial(&a.scale_tilde(), field, seed, trial);
    let m = x.ncols();
    let mut out = Vec::with_capacity(m);
    match &x {
        SampleMatrix::Real(v) => {
            if m == 1 {
                let q = v.column(0).dot(&v.column(0));
                if q <= 0.0 {
                    return Err(Error::SingularMatrix);
                }
                return Ok(alloc::vec![1.0 / q]);
            }
            for k in 0..m {
                let (q, _) = projected_norm_real(v, k).map_err(|_| Error::SingularMatrix)?;
                if q <= 0.0 {
                    return Err(Error::SingularMatrix);
                }
                out.push(1.0 / q);
            }
        }
        SampleMatrix::Complex(v) => {
            if m == 1 {
                let q = v.column(0).dotc(&v.column(0)).re;
                if q <= 0.0 {
                    return Err(Error::SingularMatrix);
                }
                return Ok(alloc::vec![1.0 / q]);
            }
            for k in 0..m {
                let q = projected_norm_complex(v, k).map_err(|_| Error::SingularMatrix)?;
                if q <= 0.0 {
                    return Err(Error::SingularMatrix);
                }
                out.push(1.0 / q);
            }
        }
    }
    Ok(out)
}

/// Check the eigenvalue sandwich a * lambda_i(P_k) <= lambda_i(D_k P_k D_k)
/// <= b * lambda_i(P_k) for A in M(n, m, [a, b]): with P_k a rank n-m+1
/// projection this means exactly m-1 near-zero eigenvalues and the rest in
/// [a, b] up to slack. Near-zero threshold is 1e-8 relative to b.
pub fn quadratic_form_bounds_check(
    a: &DenseMatrix,
    k: usize,
    field: FieldKind,
    seed: u64,
) -> Result<bool> {
    let (n, m) = a.shape();
    if k >= m {
        return Err(Error::IndexOutOfRange);
    }
    let lo = a.entry_min();
    let hi = a.entry_max();
    if !(lo > 0.0) {
        return Err(Error::InvalidArgument("class lower bound must be positive"));
    }
    // D_k from the k-th column of the unscaled A
    let d: Vec<f64> = (0..n).map(|i| libm::sqrt(a.get(i, k))).collect();
    let x = sample_x_trial(a, field, seed, 0);
    let eigs: Vec<f64> = match &x {
        SampleMatrix::Real(v) => {
            let rest = v.clone().remove_column(k);
            let chol = nalgebra::Cholesky::new(gram(&rest)).ok_or(Error::RankDeficient)?;
            let inv = chol.inverse();
            let p = DMatrix::<f64>::identity(n, n) - &rest * inv * rest.transpose();
            let mut dpd = p;
            for i in 0..n {
                for j in 0..n {
                    dpd[(i, j)] *= d[i] * d[j];
                }
            }
            let sym = 0.5 * (&dpd + dpd.transpose());
            nalgebra::SymmetricEigen::new(sym)
                .eigenvalues
                .iter()
                .copied()
                .collect()
        }
        SampleMatrix::Complex(v) => {
            let rest = v.clone().remove_column(k);
            let chol =
                nalgebra::Cholesky::new(rest.adjoint() * &rest).ok_or(Error::RankDeficient)?;
            let inv = chol.inverse();
            let p = DMatrix::<Complex<f64>>::identity(n, n) - &rest * inv * rest.adjoint();
            let mut dpd = p;
            for i in 0..n {
                for j in 0..n {
                    dpd[(i, j)] *= Complex::new(d[i] * d[j], 0.0);
                }
            }
            let sym = (dpd.clone() + dpd.adjoint()) * Complex::new(0.5, 0.0);
            nalgebra::SymmetricEigen::new(sym)
                .eigenvalues
                .iter()
                .copied()
                .collect()
        }
    };
    let zero_threshold = 1e-8 * hi;
    let slack = 1e-10 * hi.max(1.0);
    let mut zeros = 0usize;
    for &ev in &eigs {
        if ev.abs() <= zero_threshold {
            zeros += 1;
        } else if ev < lo - slack || ev > hi + slack {
            return Ok(false);
        }
    }
    Ok(zeros == m - 1)
}

fn symmetric_eigs_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = 0.5 * (m + m.transpose());
    let mut e: Vec<f64> = nalgebra::SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    stats::sort_f64(&mut e);
    e.reverse();
    e
}

/// Fan's inequality lambda_{i+j+1}(M2) <= lambda_{i+1}(M1 M2) *
/// lambda_{j+1}(M1^{-1}) for PSD M1 (invertible), M2; eigenvalues in
/// decreasing order, i and j zero-based. The product spectrum is taken from
/// the symmetrization M1^{1/2} M2 M1^{1/2}.
pub fn fan_inequality_check(
    m1: &DMatrix<f64>,
    m2: &DMatrix<f64>,
    i: usize,
    j: usize,
) -> Result<bool> {
    let dim = m1.nrows();
    if m1.ncols() != dim || m2.nrows() != dim || m2.ncols() != dim {
        return Err(Error::NotSquare {
            n: m1.nrows(),
            m: m1.ncols(),
        });
    }
    if i + j + 1 > dim {
        return Err(Error::IndexOutOfRange);
    }
    let sym1 = 0.5 * (m1 + m1.transpose());
    let eig1 = nalgebra::SymmetricEigen::new(sym1);
    if eig1.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::SingularMatrix);
    }
    let sqrt1 = {
        let mut d = eig1.eigenvalues.clone();
        for v in d.iter_mut() {
            *v = libm::sqrt(*v);
        }
        &eig1.eigenvectors * DMatrix::from_diagonal(&d) * eig1.eigenvectors.transpose()
    };
    let product = &sqrt1 * m2 * &sqrt1;
    let prod_desc = symmetric_eigs_desc(&product);
    let m2_desc = symmetric_eigs_desc(m2);
    let mut inv_desc: Vec<f64> = eig1.eigenvalues.iter().map(|&l| 1.0 / l).collect();
    stats::sort_f64(&mut inv_desc);
    inv_desc.reverse();

    let lhs = m2_desc[i + j];
    let rhs = prod_desc[i] * inv_desc[j];
    Ok(lhs <= rhs + 1e-12 * rhs.abs().max(1.0))
}

/// Interlacing of Z(~A) eigenvalues under deletion of column k:
/// lambda_l(Z) <= lambda_l(Z_k) <= lambda_{l+1}(Z) for every l, with 1e-10
/// relative slack, both spectra from the same draw of X(~A).
pub fn interlacing_check(a: &DenseMatrix, k: usize, field: FieldKind, seed: u64) -> Result<bool> {
    let m = a.m();
    if m < 2 {
        return Err(Error::InvalidShape { n: a.n(), m });
    }
    if k >= m {
        return Err(Error::IndexOutOfRange);
    }
    let x = sample_x_trial(&a.scale_tilde(), field, seed, 0);
    let full: Vec<f64> = x
        .singular_values_ascending()?
        .iter()
        .map(|s| s * s)
        .collect();
    let deleted: Vec<f64> = x
        .delete_column(k)?
        .singular_values_ascending()?
        .iter()
        .map(|s| s * s)
        .collect();
    let scale = full.last().copied().unwrap_or(1.0).max(1.0);
    let slack = 1e-10 * scale;
    for l in 0..m - 1 {
        if !(full[l] <= deleted[l] + slack && deleted[l] <= full[l + 1] + slack) {
            return Ok(false);
        }
    }
    Ok(true)
}
