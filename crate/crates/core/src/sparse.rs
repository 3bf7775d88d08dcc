//! Compressed-row sparse matrices and the matrix-free operator trait.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;

use crate::error::{invalid, Error, Result};

/// Default row count above which dense conversion is refused.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// A square or rectangular operator that can be applied to a vector.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `y = A x`. `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Sparse matrix in compressed-row storage with sorted, duplicate-free
/// column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed in the order they appear; explicit zeros are kept.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows || c >= ncols {
                return Err(invalid!("triplet ({r}, {c}) outside {nrows}x{ncols}"));
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // Stable bucket by row, then sort each row by column.
        let mut slot = counts.clone();
        let mut order = vec![0usize; triplets.len()];
        for (t, &(r, _, _)) in triplets.iter().enumerate() {
            order[slot[r]] = t;
            slot[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let bucket = &mut order[counts[r]..counts[r + 1]];
            bucket.sort_by_key(|&t| triplets[t].1);
            let mut last_col = usize::MAX;
            for &t in bucket.iter() {
                let (_, c, v) = triplets[t];
                if c == last_col {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last_col = c;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `i` as `(column, value)` pairs, in column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                triplets.push((j, i, v));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &triplets)
            .expect("transpose indices are in range")
    }

    /// Exact (bitwise) symmetry of the stored pattern and values.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest distance `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// `alpha * self + beta * other` for equally shaped matrices.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(invalid!(
                "shape mismatch: {}x{} vs {}x{}",
                self.nrows,
                self.ncols,
                other.nrows,
                other.ncols
            ));
        }
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.nrows {
            triplets.extend(self.row(i).map(|(j, v)| (i, j, alpha * v)));
            triplets.extend(other.row(i).map(|(j, v)| (i, j, beta * v)));
        }
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// Symmetric permutation `P A P^T` where row `i` moves to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self> {
        if self.nrows != self.ncols || perm.len() != self.nrows {
            return Err(invalid!("permutation length does not match matrix"));
        }
        let mut triplets = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            triplets.extend(self.row(i).map(|(j, v)| (perm[i], perm[j], v)));
        }
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// Dense copy, refused above `limit` rows.
    pub fn to_dense(&self, limit: usize) -> Result<Mat<f64>> {
        if self.nrows > limit || self.ncols > limit {
            return Err(Error::Capacity(format!(
                "{}x{} matrix exceeds dense limit {limit}",
                self.nrows, self.ncols
            )));
        }
        let mut dense = Mat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                dense[(i, j)] = v;
            }
        }
        Ok(dense)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.apply(x, &mut y);
        y
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "operand length");
        assert_eq!(y.len(), self.nrows, "output length");
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }
}

impl LinearOperator for Mat<f64> {
    fn nrows(&self) -> usize {
        Mat::nrows(self)
    }

    fn ncols(&self) -> usize {
        Mat::ncols(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), Mat::ncols(self), "operand length");
        assert_eq!(y.len(), Mat::nrows(self), "output length");
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x.iter().enumerate().map(|(j, b)| self[(i, j)] * b).sum();
        }
    }
}
