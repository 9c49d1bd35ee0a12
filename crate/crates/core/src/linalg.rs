//! Dense row-major matrices, a Cholesky factor type and the handful of
//! kernels the samplers are built from.
//!
//! Nothing here is tuned beyond cache-friendly loop ordering: products walk
//! contiguous rows, and the Cholesky factorization is row oriented so every
//! inner loop is a dot product over two row prefixes.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense vectors are plain `Vec<f64>`; slices are accepted wherever a vector
/// is only read.
pub type DenseVector = Vec<f64>;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("DenseMatrix::new", rows * cols, data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::dims("DenseMatrix::from_rows", cols, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> DenseVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                t.data[j * self.rows + i] = v;
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Returns `self * factor` entrywise.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Multiplies column `j` by `d[j]`, i.e. forms `self * diag(d)`.
    pub fn scale_columns(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.cols {
            return Err(Error::dims("scale_columns", self.cols, d.len()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, s) in out.row_mut(i).iter_mut().zip(d) {
                *v *= s;
            }
        }
        Ok(out)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims("DenseMatrix::sub", self.data.len(), other.data.len()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest absolute asymmetry relative to the largest entry; the first
    /// offending index pair is returned when it exceeds `rel_tol`.
    pub fn check_symmetric(&self, rel_tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::dims("symmetric matrix", self.rows, self.cols));
        }
        let tol = rel_tol * self.max_abs();
        for i in 0..self.rows {
            for j in 0..i {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        gemm(self, other)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<DenseVector> {
        gemv(self, x)
    }

    /// Computes `selfᵀ x` without materializing the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Result<DenseVector> {
        if x.len() != self.rows {
            return Err(Error::dims("tr_matvec", self.rows, x.len()));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut out);
        }
        Ok(out)
    }

    /// Computes `self * otherᵀ` as row dot products. When `symmetric` is set
    /// the result is known to be symmetric and only the lower half is
    /// computed, then mirrored.
    pub fn mul_transpose(&self, other: &Self, symmetric: bool) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::dims("mul_transpose", self.cols, other.cols));
        }
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            let upto = if symmetric { i + 1 } else { other.rows };
            for k in 0..upto {
                out.data[i * other.rows + k] = dot(a, other.row(k));
            }
        }
        if symmetric {
            for i in 0..self.rows {
                for k in (i + 1)..other.rows {
                    out.data[i * other.rows + k] = out.data[k * other.rows + i];
                }
            }
        }
        Ok(out)
    }

    /// Adds `value` to every diagonal entry in place.
    pub fn add_to_diagonal(&mut self, value: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += value;
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Dot product with four independent accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Matrix product `a * b` in i-k-j order (contiguous inner loop).
pub fn gemm(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::dims("gemm", a.cols, b.rows));
    }
    let mut c = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let crow = &mut c.data[i * b.cols..(i + 1) * b.cols];
        for (k, &aik) in a.row(i).iter().enumerate() {
            axpy(aik, b.row(k), crow);
        }
    }
    Ok(c)
}

/// Matrix-vector product `a * x`.
pub fn gemv(a: &DenseMatrix, x: &[f64]) -> Result<DenseVector> {
    if a.cols != x.len() {
        return Err(Error::dims("gemv", a.cols, x.len()));
    }
    Ok((0..a.rows).map(|i| dot(a.row(i), x)).collect())
}

/// Lower-triangular Cholesky factor `L` of a symmetric positive definite
/// matrix, stored densely (strict upper triangle is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFactor {
    dim: usize,
    lower: Vec<f64>,
}

/// Relative symmetry tolerance accepted by [`cholesky`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Pivots at or below `PIVOT_TOL * trace(A) / dim` are treated as a loss of
/// positive definiteness.
pub const PIVOT_TOL: f64 = 1e-12;

/// Cholesky factorization `A = L Lᵀ` (row-oriented Cholesky–Banachiewicz).
pub fn cholesky(a: &DenseMatrix) -> Result<SpdFactor> {
    a.check_symmetric(SYMMETRY_TOL)?;
    cholesky_unchecked(a)
}

/// Factorization without the O(n²) symmetry scan. Only the lower triangle
/// of `a` is read.
pub(crate) fn cholesky_unchecked(a: &DenseMatrix) -> Result<SpdFactor> {
    let threshold = PIVOT_TOL * a.trace() / a.rows.max(1) as f64;
    cholesky_with_threshold(a, threshold)
}

/// Factorization that rejects any pivot at or below `threshold`.
pub(crate) fn cholesky_with_threshold(a: &DenseMatrix, threshold: f64) -> Result<SpdFactor> {
    let n = a.rows;
    if n == 0 {
        return Ok(SpdFactor {
            dim: 0,
            lower: Vec::new(),
        });
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let (head, tail) = l.split_at_mut(i * n);
            let row_i = &tail[..n];
            let s = if j == i {
                a[(i, i)] - dot(&row_i[..i], &row_i[..i])
            } else {
                a[(i, j)] - dot(&row_i[..j], &head[j * n..j * n + j])
            };
            if j == i {
                if !(s > threshold) {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                }
                tail[i] = s.sqrt();
            } else {
                tail[j] = s / head[j * n + j];
            }
        }
    }
    Ok(SpdFactor { dim: n, lower: l })
}

/// Solves `(L Lᵀ) x = b` for a factored SPD matrix.
pub fn solve_spd(factor: &SpdFactor, b: &[f64]) -> Result<DenseVector> {
    factor.solve(b)
}

impl SpdFactor {
    /// Builds a factor directly from a lower-triangular matrix.
    pub fn from_lower(lower: &DenseMatrix) -> Result<Self> {
        if !lower.is_square() {
            return Err(Error::dims("SpdFactor::from_lower", lower.rows, lower.cols));
        }
        let n = lower.rows;
        let mut l = lower.data.clone();
        for i in 0..n {
            if !(l[i * n + i] > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: l[i * n + i],
                });
            }
            for v in &mut l[i * n + i + 1..(i + 1) * n] {
                *v = 0.0;
            }
        }
        Ok(Self { dim: n, lower: l })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.lower[i * self.dim..(i + 1) * self.dim]
    }

    /// The factor as a dense lower-triangular matrix.
    pub fn lower(&self) -> DenseMatrix {
        DenseMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.lower.clone(),
        }
    }

    /// `L Lᵀ`
    pub fn reconstruct(&self) -> DenseMatrix {
        let l = self.lower();
        l.mul_transpose(&l, true).expect("square factor")
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Result<DenseVector> {
        if b.len() != self.dim {
            return Err(Error::dims("solve_lower", self.dim, b.len()));
        }
        let mut y = b.to_vec();
        for i in 0..self.dim {
            let row = self.row(i);
            y[i] = (y[i] - dot(&row[..i], &y[..i])) / row[i];
        }
        Ok(y)
    }

    /// Solves `Lᵀ x = y`, sweeping rows of `L` so access stays contiguous.
    pub fn solve_upper(&self, y: &[f64]) -> Result<DenseVector> {
        if y.len() != self.dim {
            return Err(Error::dims("solve_upper", self.dim, y.len()));
        }
        let mut x = y.to_vec();
        for i in (0..self.dim).rev() {
            let row = self.row(i);
            x[i] /= row[i];
            let xi = x[i];
            axpy(-xi, &row[..i], &mut x[..i]);
        }
        Ok(x)
    }

    pub fn solve(&self, b: &[f64]) -> Result<DenseVector> {
        let y = self.solve_lower(b)?;
        self.solve_upper(&y)
    }

    /// `L z`
    pub fn mul_lower(&self, z: &[f64]) -> Result<DenseVector> {
        if z.len() != self.dim {
            return Err(Error::dims("mul_lower", self.dim, z.len()));
        }
        Ok((0..self.dim).map(|i| dot(&self.row(i)[..=i], &z[..=i])).collect())
    }

    /// `log |L Lᵀ|`
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.lower[i * self.dim + i].ln()).sum::<f64>()
    }

    /// Inverse of the factored matrix, column by column.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension checked");
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        // Symmetrize to remove roundoff asymmetry.
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        inv
    }
}
