//! Exact permanent oracles.
//!
//! Ground truth for every Monte Carlo test in the crate: a factorial-time
//! injection sum for tiny matrices, Ryser's inclusion-exclusion formula up to
//! n = 24, a padding reduction for rectangular inputs, and closed forms for
//! flat and rank-one matrices. All values are carried in log space; the raw
//! value is attached when it fits comfortably in an f64.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::special::{ln_factorial, ln_gamma};
use crate::stats::Neumaier;

const NAIVE_LIMIT: usize = 10;
const RYSER_LIMIT: usize = 24;
/// Raw values are reported only below this magnitude.
const VALUE_CAP: f64 = 1e300;

/// A permanent, always as a natural log, with the raw value when representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermValue {
    pub log_value: f64,
    pub value: Option<f64>,
}

impl PermValue {
    /// From an exact nonnegative value (0 maps to log = -inf).
    fn from_value(v: f64) -> Self {
        Self {
            log_value: libm::log(v),
            value: Some(v),
        }
    }

    fn from_log(log_value: f64) -> Self {
        let value = if log_value < libm::log(VALUE_CAP) {
            Some(libm::exp(log_value))
        } else {
            None
        };
        Self { log_value, value }
    }
}

/// Exact permanent by direct summation over injections of columns into rows.
///
/// Guarded at n <= 10 (the sum has n!/(n-m)! terms); accumulation is
/// compensated to keep rounding drift below the cross-oracle tolerance.
pub fn perm_naive(a: &DenseMatrix) -> Result<PermValue> {
    if a.n() > NAIVE_LIMIT {
        return Err(Error::SizeGuard {
            limit: NAIVE_LIMIT,
            got: a.n(),
        });
    }
    let mut acc = Neumaier::new();
    let mut used = 0u16;
    fn descend(a: &DenseMatrix, col: usize, used: &mut u16, prod: f64, acc: &mut Neumaier) {
        if col == a.m() {
            acc.add(prod);
            return;
        }
        for row in 0..a.n() {
            let bit = 1u16 << row;
            if *used & bit == 0 {
                *used |= bit;
                descend(a, col + 1, used, prod * a.get(row, col), acc);
                *used &= !bit;
            }
        }
    }
    descend(a, 0, &mut used, 1.0, &mut acc);
    Ok(PermValue::from_value(acc.total()))
}

/// Ryser's formula for square matrices, Gray-code ordered.
///
/// Row sums over the current column subset are updated by a single column per
/// step; the signed products go through a compensated accumulator.
pub fn perm_ryser(a: &DenseMatrix) -> Result<PermValue> {
    if !a.is_square() {
        return Err(Error::NotSquare { n: a.n(), m: a.m() });
    }
    let n = a.n();
    if n > RYSER_LIMIT {
        return Err(Error::SizeGuard {
            limit: RYSER_LIMIT,
            got: n,
        });
    }
    let mut row_sums = alloc::vec![0.0f64; n];
    let mut acc = Neumaier::new();
    let mut popcount = 0u32;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize; // bit flipped by this Gray step
        let gray = step ^ (step >> 1);
        if gray & (1 << j) != 0 {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs += a.get(i, j);
            }
            popcount += 1;
        } else {
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs -= a.get(i, j);
            }
            popcount -= 1;
        }
        let mut prod = 1.0f64;
        for &rs in &row_sums {
            prod *= rs;
        }
        // sign (-1)^{n - |S|}
        if (n as u32 - popcount) % 2 == 0 {
            acc.add(prod);
        } else {
            acc.add(-prod);
        }
    }
    // permanents of nonnegative matrices cannot be negative; tiny negative
    // totals are rounding residue of an exact zero
    Ok(PermValue::from_value(acc.total().max(0.0)))
}

/// Exact rectangular permanent via the padding identity
/// per A = per([A | J_{n,n-m}]) / (n-m)!, reducing to square Ryser.
pub fn perm_rect(a: &DenseMatrix) -> Result<PermValue> {
    if a.is_square() {
        return perm_ryser(a);
    }
    let (n, m) = a.shape();
    if n > RYSER_LIMIT {
        return Err(Error::SizeGuard {
            limit: RYSER_LIMIT,
            got: n,
        });
    }
    let padded = DenseMatrix::from_fn(n, n, |i, j| if j < m { a.get(i, j) } else { 1.0 })?;
    let padded_perm = perm_ryser(&padded)?;
    Ok(PermValue::from_log(
        padded_perm.log_value - ln_factorial(n - m),
    ))
}

/// per J_{nm} = n! / (n-m)! via log-gamma; m = 0 gives the empty product 1.
pub fn perm_flat(n: usize, m: usize) -> Result<PermValue> {
    if n == 0 || m > n {
        return Err(Error::InvalidShape { n, m });
    }
    Ok(PermValue::from_log(
        ln_gamma(n as f64 + 1.0) - ln_gamma((n - m) as f64 + 1.0),
    ))
}

/// per(u v') = m! * e_m(u) * prod_j v_j, with e_m the m-th elementary
/// symmetric polynomial of u. Stable in log space: the DP for e_m runs on
/// entries scaled by max(u) with an explicit rescale guard.
pub fn perm_rank_one(u: &[f64], v: &[f64]) -> Result<PermValue> {
    let (n, m) = (u.len(), v.len());
    if n == 0 || m == 0 || m > n {
        return Err(Error::InvalidShape { n, m });
    }
    if u.iter().chain(v).any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveEntry);
    }
    let scale = u.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let log_e_m = {
        // e[j] holds e_j of the scaled prefix; log_offset tracks rescales.
        let mut e = alloc::vec![0.0f64; m + 1];
        e[0] = 1.0;
        let mut log_offset = 0.0f64;
        for &ui in u {
            let x = ui / scale;
            for j in (1..=m).rev() {
                e[j] += x * e[j - 1];
            }
            let peak = e.iter().fold(0.0f64, |acc, &t| acc.max(t));
            if peak > 1e250 {
                for t in e.iter_mut() {
                    *t *= 1e-250;
                }
                log_offset += 250.0 * core::f64::consts::LN_10;
            }
        }
        libm::log(e[m]) + log_offset + m as f64 * libm::log(scale)
    };
    let log_prod_v: f64 = {
        let mut acc = Neumaier::new();
        for &vj in v {
            acc.add(libm::log(vj));
        }
        acc.total()
    };
    Ok(PermValue::from_log(ln_factorial(m) + log_e_m + log_prod_v))
}

/// Brute-force elementary symmetric polynomial (test oracle).
#[doc(hidden)]
pub fn elementary_symmetric_naive(u: &[f64], m: usize) -> f64 {
    fn rec(u: &[f64], start: usize, left: usize, prod: f64, acc: &mut Vec<f64>) {
        if left == 0 {
            acc.push(prod);
            return;
        }
        for i in start..=u.len().saturating_sub(left) {
            rec(u, i + 1, left - 1, prod * u[i], acc);
        }
    }
    let mut terms = Vec::new();
    rec(u, 0, m, 1.0, &mut terms);
    crate::stats::sum(&terms)
}
