//! The complex-Wishart eigenvalue density in Laguerre form, and singular
//! integrals against it.
//!
//! For the square complex Gaussian matrix Y with E|Y_ij|^2 = 1/n, the mean
//! eigenvalue density of Y*Y is
//!
//!   p_n(x) = e^{-nx} sum_{k=0}^{n-1} (L_k^0(nx))^2
//!          = n e^{-nx} [ (L_{n-1}^1(nx))^2 - L_n^1(nx) L_{n-2}^1(nx) ],
//!
//! the second line by Christoffel-Darboux. Raw Laguerre values overflow f64
//! near k ~ n ~ 100, so every evaluation here runs the three-term recurrence
//! with the e^{-x/2} damping folded in and an explicit rescale guard for the
//! far tail.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad::AdaptiveQuad;
use crate::rng::{domain, substream};
use crate::stats;

/// Evaluation context: matrix size n; densities take their argument as nx.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaguerreContext {
    n: usize,
}

impl LaguerreContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("context size n must be at least 1"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Both density forms at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEval {
    pub x: f64,
    pub sum_form: f64,
    pub cd_form: f64,
}

const RESCALE_LIMIT: f64 = 1e250;

/// Run the damped recurrence for l_k = e^{-z/2} L_k^beta(z), visiting every
/// index 0..=k_max as (k, mantissa, log_scale) with l_k = mantissa *
/// exp(log_scale). The seed damping is carried in the scale so that z beyond
/// ~1416 (where e^{-z/2} underflows) still evaluates.
fn damped_recurrence<F: FnMut(usize, f64, f64)>(beta: f64, z: f64, k_max: usize, mut visit: F) {
    let rescale_log = 250.0 * core::f64::consts::LN_10;
    let mut log_scale = -0.5 * z;
    let mut l0 = 1.0f64;
    let mut l1 = 1.0 + beta - z;
    visit(0, l0, log_scale);
    if k_max == 0 {
        return;
    }
    visit(1, l1, log_scale);
    for k in 1..k_max {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + beta - z) * l1 - (kf + beta) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
        let mag = l0.abs().max(l1.abs());
        if mag > RESCALE_LIMIT {
            l0 /= RESCALE_LIMIT;
            l1 /= RESCALE_LIMIT;
            log_scale += rescale_log;
        } else if mag > 0.0 && mag < 1.0 / RESCALE_LIMIT {
            l0 *= RESCALE_LIMIT;
            l1 *= RESCALE_LIMIT;
            log_scale -= rescale_log;
        }
        visit(k + 1, l1, log_scale);
    }
}

fn to_value(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        return 0.0;
    }
    let t = log_scale + libm::log(mantissa.abs());
    if t < -745.0 {
        return 0.0;
    }
    libm::copysign(libm::exp(t), mantissa)
}

/// e^{-x/2} L_k^beta(x) for beta in {0, 1}, x >= 0.
pub fn laguerre_scaled(k: usize, beta: u32, x: f64) -> Result<f64> {
    if beta > 1 {
        return Err(Error::InvalidArgument("beta must be 0 or 1"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument("x must be finite and nonnegative"));
    }
    let mut out = 0.0;
    damped_recurrence(beta as f64, x, k, |kk, m, s| {
        if kk == k {
            out = to_value(m, s);
        }
    });
    Ok(out)
}

/// p_n(x) as the sum of squares e^{-nx} sum_{k<n} (L_k^0(nx))^2.
pub fn density_sum_form(ctx: &LaguerreContext, x: f64) -> f64 {
    let z = ctx.n as f64 * x;
    let mut acc = stats::Neumaier::new();
    if z < 600.0 {
        // fast path: mantissas already carry the damping
        let mut l0 = libm::exp(-0.5 * z);
        acc.add(l0 * l0);
        if ctx.n == 1 {
            return acc.total();
        }
        let mut l1 = (1.0 - z) * l0;
        acc.add(l1 * l1);
        for k in 1..ctx.n - 1 {
            let kf = k as f64;
            let l2 = ((2.0 * kf + 1.0 - z) * l1 - kf * l0) / (kf + 1.0);
            l0 = l1;
            l1 = l2;
            acc.add(l1 * l1);
        }
        return acc.total();
    }
    damped_recurrence(0.0, z, ctx.n - 1, |_, m, s| {
        if m != 0.0 {
            let t = s + libm::log(m.abs());
            if t > -372.0 {
                acc.add(libm::exp(2.0 * t));
            }
        }
    });
    acc.total()
}

/// p_n(x) in Christoffel-Darboux form,
/// n e^{-nx} [ (L_{n-1}^1)^2 - L_n^1 L_{n-2}^1 ] at nx. Requires n >= 2.
pub fn density_cd_form(ctx: &LaguerreContext, x: f64) -> Result<f64> {
    if ctx.n < 2 {
        return Err(Error::InvalidArgument(
            "Christoffel-Darboux form requires n >= 2",
        ));
    }
    let z = ctx.n as f64 * x;
    let (mut v_nm2, mut v_nm1, mut v_n) = (0.0f64, 0.0f64, 0.0f64);
    let n = ctx.n;
    damped_recurrence(1.0, z, n, |k, m, s| {
        if k == n - 2 {
            v_nm2 = to_value(m, s);
        } else if k == n - 1 {
            v_nm1 = to_value(m, s);
        } else if k == n {
            v_n = to_value(m, s);
        }
    });
    Ok(n as f64 * (v_nm1 * v_nm1 - v_n * v_nm2))
}

/// Evaluate both forms.
pub fn density_eval(ctx: &LaguerreContext, x: f64) -> Result<DensityEval> {
    Ok(DensityEval {
        x,
        sum_form: density_sum_form(ctx, x),
        cd_form: density_cd_form(ctx, x)?,
    })
}

/// Quarter-wavelength panel cap for the O(n sqrt(x)) oscillation of p_n.
fn oscillation_cap(n: usize, x: f64) -> f64 {
    if x <= 0.25 / ((n * n) as f64) {
        // below the first oscillation; no cap needed
        return f64::INFINITY;
    }
    let nf = n as f64;
    let sqrt_x = libm::sqrt(x);
    0.25 * core::f64::consts::PI * (sqrt_x / nf).min(1.0 / (2.0 * nf * sqrt_x))
}

/// The singular integral int_0^eps x^{-alpha} p_n(x) dx for 0 <= alpha < 1,
/// 0 < eps <= 1. The substitution u = x^{1-alpha} removes the endpoint
/// singularity; the integrand is then bounded by n/(1-alpha).
///
/// Converged results carry an absolute error estimate below 1e-8;
/// non-convergence is reported with the achieved error.
pub fn integral_a2(ctx: &LaguerreContext, eps: f64, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in [0, 1)"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument("eps must lie in (0, 1]"));
    }
    let one_m_a = 1.0 - alpha;
    let u_max = libm::pow(eps, one_m_a);
    let n = ctx.n;
    let quad = AdaptiveQuad::new(1e-9);
    let f = |u: f64| {
        if u <= 0.0 {
            return n as f64 / one_m_a;
        }
        let x = libm::pow(u, 1.0 / one_m_a);
        density_sum_form(ctx, x) / one_m_a
    };
    let width_cap = |u: f64| {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        let x = libm::pow(u, 1.0 / one_m_a);
        let cap_x = oscillation_cap(n, x);
        if cap_x.is_infinite() {
            return f64::INFINITY;
        }
        // map the x-cap through du/dx = (1-alpha) x^{-alpha}
        let du = one_m_a * libm::pow(x, -alpha) * cap_x;
        du.max(u_max * 1e-7)
    };
    let r = quad.integrate_capped(f, 0.0, u_max, width_cap);
    if !r.converged || r.error_estimate > 1e-8 {
        return Err(Error::QuadratureNoConvergence {
            value: r.value,
            error: r.error_estimate,
        });
    }
    Ok(r.value)
}

/// Ascending eigenvalues of Y*Y for the square complex Gaussian matrix
/// Y_ij = (x_R + i x_I)/sqrt(2n); deterministic given the seed.
pub fn complex_wishart_eigs(n: usize, seed: u64) -> Result<Vec<f64>> {
    complex_wishart_eigs_trial(n, seed, 0)
}

pub fn complex_wishart_eigs_trial(n: usize, seed: u64, trial: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size must be at least 1"));
    }
    let mut rng = substream(seed, domain::WISHART, trial);
    let scale = 1.0 / libm::sqrt(2.0 * n as f64);
    let mut data = Vec::with_capacity(n * n);
    for _i in 0..n {
        for _j in 0..n {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            data.push(Complex::new(scale * re, scale * im));
        }
    }
    let y = DMatrix::from_row_slice(n, n, &data);
    let svd = nalgebra::SVD::try_new(y, false, false, f64::EPSILON, 0)
        .ok_or(Error::DecompositionFailed)?;
    let mut eigs: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    stats::sort_f64(&mut eigs);
    Ok(eigs)
}

/// Table of E[(1/n) sum_{lambda < eps} lambda^{-alpha}] = int_0^eps x^{-alpha}
/// p_n(x) dx over a grid of (n, eps); exact in the complex case.
#[derive(Debug, Clone)]
pub struct PropA1Scan {
    pub n_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub alpha: f64,
    /// values[i][j] is the integral at (n_values[i], eps_values[j]).
    pub values: Vec<Vec<f64>>,
}

impl PropA1Scan {
    /// The iterated-limit proxy: the entry at the largest n, smallest eps.
    pub fn corner_value(&self) -> f64 {
        let i = self
            .n_values
            .iter()
            .enumerate()
            .max_by_key(|(_, &n)| n)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let j = self
            .eps_values
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.total_cmp(b))
            .map(|(j, _)| j)
            .unwrap_or(0);
        self.values[i][j]
    }
}

/// Requires alpha < 1/2 (the regime of the vanishing iterated limit).
pub fn prop_a1_scan(n_list: &[usize], eps_list: &[f64], alpha: f64) -> Result<PropA1Scan> {
    if !(alpha < 0.5) {
        return Err(Error::InvalidArgument("scan requires alpha < 1/2"));
    }
    let mut values = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ctx = LaguerreContext::new(n)?;
        let mut row = Vec::with_capacity(eps_list.len());
        for &eps in eps_list {
            row.push(integral_a2(&ctx, eps, alpha)?);
        }
        values.push(row);
    }
    Ok(PropA1Scan {
        n_values: n_list.to_vec(),
        eps_values: eps_list.to_vec(),
        alpha,
        values,
    })
}
