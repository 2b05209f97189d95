//! Dense matrices and thin singular value decomposition.
//!
//! [`DenseMatrix`] stores entries row-major and refuses non-finite values at
//! construction. The decomposition itself is delegated to `nalgebra`'s
//! bidiagonal SVD; this module normalises its output (sorted, non-negative
//! singular values, thin factors) and turns non-convergence into an error.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Iteration cap handed to the bidiagonal QR sweep.
const SVD_MAX_ITERS: usize = 10_000;

/// A real `rows x cols` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
                value: data[pos],
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec_unchecked(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Square matrix with `diag` on its diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Fills entry `(i, j)` with `f(i, j)`.
    ///
    /// # Panics
    ///
    /// Panics if `f` returns a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry {v} at ({i}, {j})");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `min(rows, cols)`, the number of singular values.
    #[inline]
    pub fn rank_bound(&self) -> usize {
        self.rows.min(self.cols)
    }

    /// Row-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub(crate) fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    /// Entrywise `f(a, b)` of two equally shaped matrices.
    pub(crate) fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_vec_unchecked(self.rows, self.cols, data)
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data = self.data.iter().map(|&a| f(a)).collect();
        Self::from_vec_unchecked(self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|a| a * factor)
    }

    /// Clamps every entry into `[lo, hi]`.
    pub fn clamp(&self, lo: f64, hi: f64) -> Self {
        self.map(|a| a.clamp(lo, hi))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, rhs.cols),
                found: rhs.shape(),
            });
        }
        Ok(Self::from_nalgebra(
            &(self.to_nalgebra() * rhs.to_nalgebra()),
        ))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(m.row(i).iter().copied());
        }
        Self::from_vec_unchecked(rows, cols, data)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD factors `U diag(sigma) V^T` with `r = min(M, N)` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFactors {
    /// `M x r`, orthonormal columns.
    pub left: DenseMatrix,
    /// Non-increasing, non-negative.
    pub singular_values: Vec<f64>,
    /// `N x r`, orthonormal columns.
    pub right: DenseMatrix,
}

impl SpectralFactors {
    /// `U diag(sigmas) V^T` using these factors but replacement singular values.
    pub fn reconstruct_with(&self, sigmas: &[f64]) -> Result<DenseMatrix> {
        let r = self.singular_values.len();
        if self.left.cols() != r || self.right.cols() != r {
            return Err(Error::DimensionMismatch {
                expected: (self.left.rows(), r),
                found: self.left.shape(),
            });
        }
        if sigmas.len() != r {
            return Err(Error::LengthMismatch {
                expected: r,
                found: sigmas.len(),
            });
        }
        let m = self.left.rows();
        let n = self.right.rows();
        // Only columns with a non-zero singular value contribute.
        let active: Vec<usize> = (0..r).filter(|&k| sigmas[k] != 0.0).collect();
        if active.is_empty() {
            return Ok(DenseMatrix::zeros(m, n));
        }
        let scaled_left = DMatrix::from_fn(m, active.len(), |i, a| {
            self.left[(i, active[a])] * sigmas[active[a]]
        });
        let right = DMatrix::from_fn(n, active.len(), |j, a| self.right[(j, active[a])]);
        Ok(DenseMatrix::from_nalgebra(
            &(scaled_left * right.transpose()),
        ))
    }
}

/// Thin SVD of `m`.
pub fn svd(m: &DenseMatrix) -> Result<SpectralFactors> {
    let (rows, cols) = m.shape();
    let r = rows.min(cols);
    if r == 0 {
        return Ok(SpectralFactors {
            left: DenseMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            right: DenseMatrix::zeros(cols, 0),
        });
    }
    let decomposition =
        nalgebra::linalg::SVD::try_new(m.to_nalgebra(), true, true, f64::EPSILON, SVD_MAX_ITERS)
            .ok_or(Error::SvdDidNotConverge { rows, cols })?;
    let (Some(u), Some(v_t)) = (decomposition.u, decomposition.v_t) else {
        return Err(Error::SvdDidNotConverge { rows, cols });
    };
    let sigma = decomposition.singular_values;
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::SvdDidNotConverge { rows, cols });
    }

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

    let left = DenseMatrix::from_fn(rows, r, |i, k| u[(i, order[k])]);
    let right = DenseMatrix::from_fn(cols, r, |j, k| v_t[(order[k], j)]);
    let singular_values = order.iter().map(|&k| sigma[k].max(0.0)).collect();
    Ok(SpectralFactors {
        left,
        singular_values,
        right,
    })
}

/// `U diag(sigma) V^T`.
pub fn reconstruct(f: &SpectralFactors) -> Result<DenseMatrix> {
    f.reconstruct_with(&f.singular_values)
}

pub fn frobenius_distance(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.ensure_same_shape(b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}
