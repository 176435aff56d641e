//! Order-robust summary statistics and the two-sample Kolmogorov-Smirnov test.
//!
//! Aggregation here is used by concurrent trial runners, so everything is a
//! deterministic function of the value *sequence*: compensated summation
//! keeps results stable to ~1 ulp under regrouping.

use alloc::vec::Vec;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.total()
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sum(xs) / xs.len() as f64
}

/// Sample mean and its standard error (ddof = 1). SE is 0 for one sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = mean(xs);
    if n == 1 {
        return (m, 0.0);
    }
    let mut acc = Neumaier::new();
    for &x in xs {
        let d = x - m;
        acc.add(d * d);
    }
    let var = acc.total() / (n as f64 - 1.0);
    (m, libm::sqrt(var / n as f64))
}

/// Sample standard deviation (ddof = 1).
pub fn sample_sd(xs: &[f64]) -> f64 {
    let (_, se) = mean_se(xs);
    se * libm::sqrt(xs.len() as f64)
}

/// Sort in place with a total order (NaN sorts last).
pub fn sort_f64(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
}

/// Linear-interpolation quantile (the "type 7" convention) of a sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let q = q.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Fraction of values strictly above `threshold`.
pub fn tail_fraction(xs: &[f64], threshold: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().filter(|&&x| x > threshold).count() as f64 / xs.len() as f64
}

/// Bin counts over `[lo, hi)` with equal widths; out-of-range values are dropped.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut counts = alloc::vec![0u64; bins];
    let scale = bins as f64 / (hi - lo);
    for &v in values {
        if v >= lo && v < hi {
            let idx = ((v - lo) * scale) as usize;
            counts[idx.min(bins - 1)] += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q(sqrt(n1 n2/(n1+n2)) * D).
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> KsTest {
    let mut xs: Vec<f64> = xs.to_vec();
    let mut ys: Vec<f64> = ys.to_vec();
    sort_f64(&mut xs);
    sort_f64(&mut ys);
    let (n1, n2) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n1 && j < n2 {
        let v = xs[i].min(ys[j]);
        while i < n1 && xs[i] <= v {
            i += 1;
        }
        while j < n2 && ys[j] <= v {
            j += 1;
        }
        let gap = (i as f64 / n1 as f64 - j as f64 / n2 as f64).abs();
        if gap > d {
            d = gap;
        }
    }
    let en = libm::sqrt(n1 as f64 * n2 as f64 / (n1 + n2) as f64);
    KsTest {
        statistic: d,
        p_value: kolmogorov_sf(en * d),
    }
}

/// Survival function of the Kolmogorov distribution:
/// Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.15 {
        // Q(0.15) differs from 1 by under 1e-20.
        return 1.0;
    }
    let mut acc = 0.0f64;
    let mut sign = 1.0f64;
    for k in 1..200 {
        let term = libm::exp(-2.0 * (k as f64) * (k as f64) * t * t);
        acc += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * acc).clamp(0.0, 1.0)
}
