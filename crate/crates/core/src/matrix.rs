//! Sparse and dense matrix containers and the squared-distance primitive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Compressed-row sparse matrix over `f64`.
///
/// Within each row the column indices are strictly increasing and no zero
/// values are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSR arrays, validating the storage invariants.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::InvalidDims(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != values.len() {
            return Err(Error::InvalidDims(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidDims(
                "col_indices and values differ in length".into(),
            ));
        }
        for w in row_offsets.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidDims("row_offsets must be non-decreasing".into()));
            }
        }
        for i in 0..n_rows {
            let (s, e) = (row_offsets[i], row_offsets[i + 1]);
            for t in s..e {
                if col_indices[t] >= n_cols {
                    return Err(Error::InvalidDims(format!(
                        "column index {} out of range in row {}",
                        col_indices[t], i
                    )));
                }
                if t > s && col_indices[t] <= col_indices[t - 1] {
                    return Err(Error::InvalidDims(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
                if values[t] == 0.0 {
                    return Err(Error::InvalidDims(format!("stored zero in row {i}")));
                }
                if !values[t].is_finite() {
                    return Err(Error::InvalidDims(format!("non-finite value in row {i}")));
                }
            }
        }
        Ok(Self { n_rows, n_cols, row_offsets, col_indices, values })
    }

    /// Builds a matrix from per-row `(cols, vals)` pairs. Entries may be
    /// unsorted; zeros are dropped.
    pub fn from_rows(n_cols: usize, rows: &[(Vec<usize>, Vec<f64>)]) -> Result<Self> {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for (cols, vals) in rows {
            if cols.len() != vals.len() {
                return Err(Error::InvalidDims("cols and vals differ in length".into()));
            }
            let mut entries: Vec<(usize, f64)> = cols
                .iter()
                .copied()
                .zip(vals.iter().copied())
                .filter(|&(_, v)| v != 0.0)
                .collect();
            entries.sort_unstable_by_key(|&(c, _)| c);
            for w in entries.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidDims("duplicate column in row".into()));
                }
            }
            for (c, v) in entries {
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(values.len());
        }
        Self::new(rows.len(), n_cols, row_offsets, col_indices, values)
    }

    /// Converts a dense matrix, dropping exact zeros.
    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..dense.n_rows() {
            for (j, &v) in dense.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self {
            n_rows: dense.n_rows(),
            n_cols: dense.n_cols(),
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.n_rows).map(|i| self.row_nnz(i)).max().unwrap_or(0)
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        let (_, vals) = self.row(i);
        vals.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// True when no value is stored (zero matrix).
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Dense copy; intended for desk-scale inputs.
    pub fn densify(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.set(i, c, v);
            }
        }
        out
    }

    /// New matrix holding `weights[s] * row(indices[s])` for each selection.
    /// Scaling by a nonzero weight preserves the row's nonzero pattern.
    pub fn select_weighted_rows(&self, indices: &[usize], weights: &[f64]) -> Result<Self> {
        if indices.len() != weights.len() {
            return Err(Error::InvalidDims("indices and weights differ in length".into()));
        }
        let mut rows = Vec::with_capacity(indices.len());
        for (&i, &w) in indices.iter().zip(weights) {
            if i >= self.n_rows {
                return Err(Error::InvalidDims(format!("row index {i} out of range")));
            }
            let (cols, vals) = self.row(i);
            rows.push((cols.to_vec(), vals.iter().map(|v| v * w).collect::<Vec<_>>()));
        }
        Self::from_rows(self.n_cols, &rows)
    }

    /// `y = A x` for a dense vector `x` of length `n_cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_cols);
        par::map_indexed(self.n_rows, |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
        })
    }

    /// `y = A^T x` for a dense vector `x` of length `n_rows`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xi;
            }
        }
        y
    }
}

/// Row-major dense matrix over `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, values: vec![0.0; n_rows * n_cols] }
    }

    pub fn from_row_major(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::InvalidDims(format!(
                "expected {} values, got {}",
                n_rows * n_cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDims("non-finite value".into()));
        }
        Ok(Self { n_rows, n_cols, values })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// `self * other`, plain triple loop; fine at desk scale.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for l in 0..self.n_cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    let v = out.get(i, j) + a * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Max absolute deviation of `X^T X` from the identity.
    pub fn orthonormal_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for a in 0..self.n_cols {
            for b in a..self.n_cols {
                let dot: f64 = (0..self.n_rows).map(|i| self.get(i, a) * self.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((dot - target).abs());
            }
        }
        dev
    }

    /// Writes the matrix as CSV, one row per line, shortest-roundtrip floats.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n_rows {
            let line = self.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Sum of squared distances from the rows of `A` to the subspace whose
/// orthogonal complement is spanned by the columns of `X`; equals
/// `sum_i ||A_i X||^2`.
pub fn sum_sq_dist(a: &SparseMatrix, x: &DenseMatrix) -> Result<f64> {
    if x.n_rows() != a.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "X has {} rows, matrix has {} columns",
            x.n_rows(),
            a.n_cols()
        )));
    }
    if x.n_cols() > x.n_rows() {
        return Err(Error::InvalidDims("X has more columns than rows".into()));
    }
    let deviation = x.orthonormal_deviation();
    if deviation > 1e-8 {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(par::sum_indexed(a.n_rows(), |i| row_proj_norm_sq(a, i, x)))
}

/// `||A_i X||^2` for one sparse row; O(nnz(row) * cols(X)).
pub(crate) fn row_proj_norm_sq(a: &SparseMatrix, i: usize, x: &DenseMatrix) -> f64 {
    let (cols, vals) = a.row(i);
    let m = x.n_cols();
    let mut acc = vec![0.0; m];
    for (&c, &v) in cols.iter().zip(vals) {
        let xr = x.row(c);
        for (t, &xv) in xr.iter().enumerate() {
            acc[t] += v * xv;
        }
    }
    acc.iter().map(|v| v * v).sum()
}
