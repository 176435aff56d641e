//! Adaptive panel quadrature on finite intervals.
//!
//! Panels are integrated with a 16-point Gauss-Legendre rule; a panel is
//! accepted when bisecting it changes the estimate by less than its share of
//! the absolute tolerance. An optional per-point width cap forces refinement
//! of oscillatory integrands regardless of the error estimate.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated bisection-difference estimate of the absolute error.
    pub error_estimate: f64,
    pub converged: bool,
    pub panels: usize,
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; order];
    let mut weights = alloc::vec![0.0; order];
    let nf = order as f64;
    for i in 0..order {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // P_n' from P_n and P_{n-1}
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

pub struct AdaptiveQuad {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl AdaptiveQuad {
    pub fn new(abs_tol: f64) -> Self {
        let (nodes, weights) = gauss_legendre(16);
        Self {
            nodes,
            weights,
            abs_tol,
            max_panels: 500_000,
        }
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadResult {
        self.integrate_capped(f, a, b, |_| f64::INFINITY)
    }

    /// Integrate with a per-point maximum panel width: any panel wider than
    /// `max_width(midpoint)` is split even if its error estimate is small.
    pub fn integrate_capped<F, W>(&self, f: F, a: f64, b: f64, max_width: W) -> QuadResult
    where
        F: Fn(f64) -> f64,
        W: Fn(f64) -> f64,
    {
        let total_len = b - a;
        if total_len == 0.0 {
            return QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                converged: true,
                panels: 0,
            };
        }
        let width_floor = total_len * 1e-13;
        let mut stack: Vec<(f64, f64, f64)> = Vec::new();
        stack.push((a, b, self.panel(&f, a, b)));
        let mut value = crate::stats::Neumaier::new();
        let mut err_acc = 0.0f64;
        let mut panels = 0usize;
        let mut converged = true;
        while let Some((lo, hi, whole)) = stack.pop() {
            panels += 1;
            let mid = 0.5 * (lo + hi);
            let left = self.panel(&f, lo, mid);
            let right = self.panel(&f, mid, hi);
            let refined = left + right;
            let diff = (refined - whole).abs();
            let len = hi - lo;
            let within_tol = diff <= self.abs_tol * (len / total_len).max(1e-300);
            let narrow_enough = len <= max_width(mid);
            if (within_tol && narrow_enough) || len < width_floor || panels >= self.max_panels {
                value.add(refined);
                err_acc += diff;
                if !(within_tol && narrow_enough) {
                    converged = false;
                }
            } else {
                stack.push((lo, mid, left));
                stack.push((mid, hi, right));
            }
        }
        QuadResult {
            value: value.total(),
            error_estimate: err_acc,
            converged,
            panels,
        }
    }
}
