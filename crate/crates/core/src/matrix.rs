//! Matrix data model, entry-bound classes, and deterministic ensemble
//! generators.
//!
//! A [`DenseMatrix`] is a rectangular `n x m` grid of finite nonnegative
//! 64-bit floats with `m <= n` (the rectangular permanent is defined only for
//! at least as many rows as columns). Generators are pure functions of
//! `(shape, bounds, seed)`, and every matrix is immutable after construction.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::rng::{domain, substream};

/// Rectangular nonnegative matrix, row-major, with cached entry extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
    entry_min: f64,
    entry_max: f64,
}

impl DenseMatrix {
    /// Build from row-major entries; validates shape and entry constraints.
    pub fn from_rows(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 || m > n {
            return Err(Error::InvalidShape { n, m });
        }
        if data.len() != n * m {
            return Err(Error::InvalidArgument("entry count does not match shape"));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidEntry {
                    row: idx / m,
                    col: idx % m,
                    value: v,
                });
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(Self {
            n,
            m,
            data,
            entry_min: lo,
            entry_max: hi,
        })
    }

    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        Self::from_rows(n, m, data)
    }

    /// Square identity matrix.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }).expect("valid shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Smallest entry.
    pub fn entry_min(&self) -> f64 {
        self.entry_min
    }

    /// Largest entry.
    pub fn entry_max(&self) -> f64 {
        self.entry_max
    }

    pub fn is_square(&self) -> bool {
        self.n == self.m
    }

    /// True when the matrix is square with zero off-diagonal entries.
    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.n).all(|i| (0..self.m).all(|j| i == j || self.get(i, j) == 0.0))
    }

    /// Entrywise positive rescale; `c` must be finite and positive.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(
                "scale factor must be positive and finite",
            ));
        }
        Self::from_rows(self.n, self.m, self.data.iter().map(|&v| c * v).collect())
    }

    /// The normalized matrix used throughout the spectral statistics:
    /// every entry divided by sqrt(n + m). The ratio det Z(A) / per A is
    /// invariant under this rescale.
    pub fn scale_tilde(&self) -> Self {
        let c = 1.0 / libm::sqrt((self.n + self.m) as f64);
        self.scaled(c).expect("positive finite factor")
    }

    /// Column-deleted copy (for interlacing checks); fails for m = 1.
    pub fn delete_column(&self, k: usize) -> Result<Self> {
        if k >= self.m {
            return Err(Error::IndexOutOfRange);
        }
        if self.m == 1 {
            return Err(Error::InvalidShape { n: self.n, m: 0 });
        }
        let mut data = Vec::with_capacity(self.n * (self.m - 1));
        for i in 0..self.n {
            for j in 0..self.m {
                if j != k {
                    data.push(self.get(i, j));
                }
            }
        }
        Self::from_rows(self.n, self.m - 1, data)
    }

    /// nalgebra view of the same entries.
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.m, &self.data)
    }
}

/// Entry-bound class [a, b]: 0 <= a <= b, b > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryBounds {
    lower: f64,
    upper: f64,
}

impl EntryBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || lower > upper || upper <= 0.0
        {
            return Err(Error::InvalidBounds { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

/// Parameters of the sparse-column ensemble: columns of an n x ceil(theta n)
/// matrix carry at most ceil(gamma n) zeros each, all other entries in
/// [a, b] with a > 0, and gamma + theta < 1.
#[derive(Debug, Clone, Copy)]
pub struct SparseColumnSpec {
    pub gamma: f64,
    pub theta: f64,
    pub bounds: EntryBounds,
}

impl SparseColumnSpec {
    pub fn new(gamma: f64, theta: f64, bounds: EntryBounds) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidArgument("gamma must lie in [0, 1)"));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidArgument("theta must lie in (0, 1)"));
        }
        if gamma + theta >= 1.0 {
            return Err(Error::InvalidArgument("gamma + theta must be below 1"));
        }
        if bounds.lower() <= 0.0 {
            return Err(Error::InvalidBounds {
                lower: bounds.lower(),
                upper: bounds.upper(),
            });
        }
        Ok(Self {
            gamma,
            theta,
            bounds,
        })
    }
}

/// True iff every entry of `a` lies in the class `[bounds.lower, bounds.upper]`.
pub fn validate_class(a: &DenseMatrix, bounds: &EntryBounds) -> bool {
    a.entry_min() >= bounds.lower() && a.entry_max() <= bounds.upper()
}

/// All-ones n x m matrix.
pub fn gen_flat(n: usize, m: usize) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(n, m, alloc::vec![1.0; n.checked_mul(m).unwrap_or(0)])
}

/// Entries i.i.d. uniform on [a, b] with a > 0; deterministic given the seed.
pub fn gen_uniform(n: usize, m: usize, bounds: &EntryBounds, seed: u64) -> Result<DenseMatrix> {
    if bounds.lower() <= 0.0 {
        return Err(Error::InvalidBounds {
            lower: bounds.lower(),
            upper: bounds.upper(),
        });
    }
    let mut rng = substream(seed, domain::MATRIX_GEN, 0);
    let dist = Uniform::new_inclusive(bounds.lower(), bounds.upper()).map_err(|_| {
        Error::InvalidBounds {
            lower: bounds.lower(),
            upper: bounds.upper(),
        }
    })?;
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n * m {
        data.push(dist.sample(&mut rng));
    }
    DenseMatrix::from_rows(n, m, data)
}

/// Rank-one matrix A_ij = u_i v_j from strictly positive vectors.
pub fn gen_rank_one(u: &[f64], v: &[f64]) -> Result<DenseMatrix> {
    if u.iter().chain(v).any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveEntry);
    }
    DenseMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
}

/// Sparse-column ensemble of shape (n, ceil(theta n)): each column gets a
/// uniform number of zeros in 0..=ceil(gamma n) at uniform positions, all
/// remaining entries uniform in [a, b]. Deterministic given the seed.
pub fn gen_sparse_column(n: usize, spec: &SparseColumnSpec, seed: u64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidShape { n, m: 0 });
    }
    let m = libm::ceil(spec.theta * n as f64) as usize;
    if m == 0 || m > n {
        return Err(Error::InvalidShape { n, m });
    }
    let max_zeros = libm::ceil(spec.gamma * n as f64) as usize;
    let mut rng = substream(seed, domain::MATRIX_GEN, 1);
    let dist = Uniform::new_inclusive(spec.bounds.lower(), spec.bounds.upper()).map_err(|_| {
        Error::InvalidBounds {
            lower: spec.bounds.lower(),
            upper: spec.bounds.upper(),
        }
    })?;
    let mut data = alloc::vec![0.0f64; n * m];
    for j in 0..m {
        for i in 0..n {
            data[i * m + j] = dist.sample(&mut rng);
        }
        let zeros = if max_zeros > 0 {
            Uniform::new_inclusive(0u64, max_zeros as u64)
                .expect("valid range")
                .sample(&mut rng) as usize
        } else {
            0
        };
        if zeros > 0 {
            for idx in rand::seq::index::sample(&mut rng, n, zeros).iter() {
                data[idx * m + j] = 0.0;
            }
        }
    }
    DenseMatrix::from_rows(n, m, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(a: f64, b: f64) -> EntryBounds {
        EntryBounds::new(a, b).unwrap()
    }

    #[test]
    fn validate_class_examples() {
        let j3 = gen_flat(3, 3).unwrap();
        assert!(validate_class(&j3, &bounds(1.0, 1.0)));

        let a = DenseMatrix::from_rows(2, 2, alloc::vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(!validate_class(&a, &bounds(1.0, 3.0)));

        let id = DenseMatrix::identity(3);
        assert!(!validate_class(&id, &bounds(0.5, 2.0)));
    }

    #[test]
    fn scale_tilde_examples() {
        let j22 = gen_flat(2, 2).unwrap().scale_tilde();
        assert!(j22.entries().iter().all(|&v| (v - 0.5).abs() < 1e-15));

        let j31 = gen_flat(3, 1).unwrap().scale_tilde();
        assert!(j31.entries().iter().all(|&v| (v - 0.5).abs() < 1e-15));

        let a = DenseMatrix::from_rows(1, 1, alloc::vec![4.0])
            .unwrap()
            .scale_tilde();
        assert!((a.get(0, 0) - 4.0 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scale_tilde_is_linear() {
        let a = gen_uniform(5, 3, &bounds(0.5, 2.0), 11).unwrap();
        let lhs = a.scaled(3.0).unwrap().scale_tilde();
        let rhs = a.scale_tilde().scaled(3.0).unwrap();
        for (x, y) in lhs.entries().iter().zip(rhs.entries()) {
            assert!((x - y).abs() <= 1e-15 * x.abs());
        }
    }

    #[test]
    fn gen_flat_examples() {
        assert_eq!(gen_flat(2, 2).unwrap().entries(), &[1.0; 4]);
        assert_eq!(gen_flat(3, 1).unwrap().shape(), (3, 1));
        assert!(matches!(gen_flat(1, 2), Err(Error::InvalidShape { .. })));
    }

    #[test]
    fn gen_uniform_contract() {
        let b = bounds(0.5, 2.0);
        let a1 = gen_uniform(4, 3, &b, 99).unwrap();
        let a2 = gen_uniform(4, 3, &b, 99).unwrap();
        assert_eq!(a1, a2);
        assert!(validate_class(&a1, &b));
        assert_ne!(a1, gen_uniform(4, 3, &b, 100).unwrap());

        let degenerate = gen_uniform(3, 2, &bounds(1.0, 1.0), 5).unwrap();
        assert_eq!(degenerate, gen_flat(3, 2).unwrap());

        assert!(gen_uniform(3, 2, &bounds(0.0, 1.0), 5).is_err());
    }

    #[test]
    fn gen_rank_one_examples() {
        assert_eq!(
            gen_rank_one(&[1.0, 1.0], &[1.0, 1.0]).unwrap(),
            gen_flat(2, 2).unwrap()
        );
        let a = gen_rank_one(&[1.0, 2.0], &[3.0]).unwrap();
        assert_eq!(a.entries(), &[3.0, 6.0]);
        assert!(gen_rank_one(&[1.0, -1.0], &[1.0]).is_err());

        let u = [1.25, 1.5, 2.0];
        let v = [0.5, 3.0];
        let a = gen_rank_one(&u, &v).unwrap();
        assert!(a.entry_min() >= 1.25 * 0.5 - 1e-15);
        assert!(a.entry_max() <= 2.0 * 3.0 + 1e-15);
    }

    #[test]
    fn gen_sparse_column_contract() {
        let spec = SparseColumnSpec::new(0.25, 0.5, bounds(1.0, 2.0)).unwrap();
        let a = gen_sparse_column(8, &spec, 7).unwrap();
        assert_eq!(a.shape(), (8, 4));
        for j in 0..4 {
            let zeros = (0..8).filter(|&i| a.get(i, j) == 0.0).count();
            assert!(zeros <= 2, "column {j} has {zeros} zeros");
        }
        // every nonzero entry within bounds
        assert!(a
            .entries()
            .iter()
            .all(|&v| v == 0.0 || (1.0..=2.0).contains(&v)));

        // gamma = 0 keeps the matrix inside [a, b]
        let dense_spec = SparseColumnSpec::new(0.0, 0.5, bounds(1.0, 2.0)).unwrap();
        let d = gen_sparse_column(8, &dense_spec, 7).unwrap();
        assert!(validate_class(&d, &bounds(1.0, 2.0)));

        assert!(SparseColumnSpec::new(0.6, 0.5, bounds(1.0, 2.0)).is_err());
    }

    #[test]
    fn constructor_rejects_bad_entries() {
        assert!(DenseMatrix::from_rows(2, 2, alloc::vec![1.0, 2.0, -0.5, 1.0]).is_err());
        assert!(DenseMatrix::from_rows(2, 2, alloc::vec![1.0, f64::NAN, 0.5, 1.0]).is_err());
        assert!(DenseMatrix::from_rows(1, 2, alloc::vec![1.0, 2.0]).is_err());
        assert!(DenseMatrix::from_rows(2, 2, alloc::vec![1.0]).is_err());
    }

    #[test]
    fn entry_extremes_cached() {
        let a = DenseMatrix::from_rows(2, 2, alloc::vec![0.5, 2.0, 1.0, 1.5]).unwrap();
        assert_eq!(a.entry_min(), 0.5);
        assert_eq!(a.entry_max(), 2.0);
    }
}
