//! Dense small-matrix linear algebra.
//!
//! Everything here is sized for dictionaries of a few dozen rows: singular
//! values come from one-sided Jacobi, which keeps high relative accuracy on
//! the small singular values the certification bounds divide by.

mod io;
mod oracle;
mod solve;
mod subsets;
mod svd;

pub use io::{
    format_matrix, format_vector, parse_matrix, parse_vector, read_matrix, read_vector,
    write_matrix, write_vector,
};
pub use oracle::oracle_spectrum;
pub use solve::{min_norm_solve, MinNormSolver};
pub use subsets::{binomial, enumerate_subsets, ln_binomial, Budget, Subsets, DEFAULT_BUDGET};
pub(crate) use subsets::chunked_fold;
pub use svd::{pseudoinverse_frobenius, singular_spectrum};

use crate::error::{invalid, Result};

/// Relative rank tolerance: a singular value at or below `RANK_TOL * sigma_max`
/// counts as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Dense real matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|row| row.as_ref().len() != c) {
            return Err(invalid("ragged rows"));
        }
        let data = rows.iter().flat_map(|row| row.as_ref().iter().copied()).collect();
        Matrix::new(r, c, data)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map(|col| col.as_ref().len()).unwrap_or(0);
        if columns.iter().any(|col| col.as_ref().len() != r) {
            return Err(invalid("columns of unequal length"));
        }
        let mut data = vec![0.0; r * c];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.as_ref().iter().enumerate() {
                data[i * c + j] = *v;
            }
        }
        Matrix::new(r, c, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix::new(n, n, data)
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(invalid(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, v) in sq.iter_mut().zip(self.row(i)) {
                *acc += v * v;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Divides every column by its Euclidean norm. Fails on a zero column.
    pub fn normalize_columns(&self) -> Result<Matrix> {
        let norms = self.column_norms();
        if let Some(j) = norms.iter().position(|&n| n == 0.0) {
            return Err(invalid(format!("column {j} is zero and cannot be normalized")));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * self.cols + j] /= norms[j];
            }
        }
        Ok(out)
    }

    /// Appends one column on the right.
    pub fn with_column(&self, col: &[f64]) -> Result<Matrix> {
        if col.len() != self.rows {
            return Err(invalid("appended column has the wrong length"));
        }
        let mut cols: Vec<Vec<f64>> = (0..self.cols).map(|j| self.column(j)).collect();
        cols.push(col.to_vec());
        Matrix::from_columns(&cols)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Gathers columns given by raw indices without validation; callers own
    /// the bounds.
    pub(crate) fn gather_columns(&self, idx: &[usize]) -> Matrix {
        let k = idx.len();
        let mut data = Vec::with_capacity(self.rows * k);
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        Matrix { rows: self.rows, cols: k, data }
    }
}

/// Strictly increasing, non-empty set of column indices of a parent matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSubset {
    indices: Vec<usize>,
    parent_cols: usize,
}

impl ColumnSubset {
    pub fn new(indices: Vec<usize>, parent_cols: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("column subset must be non-empty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("column subset indices must be strictly increasing"));
        }
        if let Some(&last) = indices.last() {
            if last >= parent_cols {
                return Err(invalid(format!(
                    "column index {last} out of range for {parent_cols} columns"
                )));
            }
        }
        Ok(ColumnSubset { indices, parent_cols })
    }

    pub fn all(parent_cols: usize) -> Result<Self> {
        ColumnSubset::new((0..parent_cols).collect(), parent_cols)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn parent_cols(&self) -> usize {
        self.parent_cols
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Columns not in this subset, or `None` when the subset is everything.
    pub fn complement(&self) -> Option<ColumnSubset> {
        let rest = complement_indices(&self.indices, self.parent_cols);
        if rest.is_empty() {
            None
        } else {
            Some(ColumnSubset { indices: rest, parent_cols: self.parent_cols })
        }
    }
}

impl std::fmt::Display for ColumnSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn complement_indices(idx: &[usize], cols: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(cols.saturating_sub(idx.len()));
    let mut it = idx.iter().peekable();
    for c in 0..cols {
        if it.peek() == Some(&&c) {
            it.next();
        } else {
            out.push(c);
        }
    }
    out
}

/// Singular values in descending order; always `min(rows, cols)` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub(crate) fn from_unsorted(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        SingularSpectrum { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum is never empty")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when the smallest value is zero within the relative rank tolerance.
    pub fn is_rank_deficient(&self) -> bool {
        self.min() <= RANK_TOL * self.max()
    }
}

/// The `n x |S|` submatrix of `m` holding the columns in `subset`, in order.
pub fn take_columns(m: &Matrix, subset: &ColumnSubset) -> Result<Matrix> {
    if subset.parent_cols() != m.cols() {
        return Err(invalid(format!(
            "subset built for {} columns applied to a matrix with {}",
            subset.parent_cols(),
            m.cols()
        )));
    }
    Ok(m.gather_columns(subset.indices()))
}
