//! Small dense row-major matrices and the two factorizations the estimators
//! need: Householder QR for least squares and partially pivoted LU for the
//! square cross-moment solves.
//!
//! Design matrices here are tall and narrow (thousands of rows, at most a few
//! dozen columns), so everything below is plain O(n·k²) loops over contiguous
//! rows with no blocking.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reciprocal-condition-number floor. Cross-moment matrices whose 1-norm
/// rcond falls below this are treated as singular.
pub const RCOND_MIN: f64 = 1e-12;

/// Dense row-major matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation("matrix must have at least one row and column"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("entry count != rows * cols"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// All-zero matrix. Panics on a zero dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out.data[i * n + i] = 1.0;
        }
        out
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

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Column means, i.e. the 1×k vector of sample averages.
    pub fn col_means(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            for (acc, v) in out.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let n = self.rows as f64;
        for acc in &mut out {
            *acc /= n;
        }
        out
    }

    /// `self · x` for a k-vector `x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch("matvec operand length"));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `N⁻¹ Σᵢ selfᵢ · otherᵢ′`: the k×k average cross moment of two designs
    /// sharing the same rows.
    pub fn cross_moment(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("cross-moment row counts"));
        }
        let (k, l) = (self.cols, other.cols);
        let mut out = Matrix::zeros(k, l);
        for i in 0..self.rows {
            let a = self.row(i);
            let b = other.row(i);
            for (r, &av) in a.iter().enumerate() {
                let dst = &mut out.data[r * l..(r + 1) * l];
                for (d, &bv) in dst.iter_mut().zip(b) {
                    *d += av * bv;
                }
            }
        }
        let n = self.rows as f64;
        for v in &mut out.data {
            *v /= n;
        }
        Ok(out)
    }

    /// `N⁻¹ Σᵢ selfᵢ yᵢ`: the k-vector average moment against a response.
    pub fn mean_weighted_rows(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch("response length"));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (acc, &v) in out.iter_mut().zip(self.row(i)) {
                *acc += v * yi;
            }
        }
        let n = self.rows as f64;
        for acc in &mut out {
            *acc /= n;
        }
        Ok(out)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Thin Householder QR of a tall design, with the reflections applied to the
/// response as they are formed.
///
/// Returns the k×k upper-triangular factor `R` and the first k entries of
/// `Q′y`, which is all back substitution needs. Zero-norm pivot columns leave
/// a zero on the diagonal; callers detect rank problems through the Gram
/// rcond check rather than here.
pub fn qr_reduce(design: &Matrix, y: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let (n, k) = (design.rows(), design.cols());
    if y.len() != n {
        return Err(Error::DimensionMismatch("response length"));
    }
    if n < k {
        return Err(Error::Validation("least squares needs rows >= cols"));
    }

    let mut a = design.clone();
    let mut qty: Vec<f64> = y.to_vec();

    for j in 0..k {
        // Norm of column j below the diagonal.
        let mut norm_sq = 0.0;
        for i in j..n {
            let v = a.get(i, j);
            norm_sq += v * v;
        }
        let norm = libm::sqrt(norm_sq);
        if norm == 0.0 {
            continue; // exactly dependent column; R keeps the zero
        }

        let ajj = a.get(j, j);
        let alpha = if ajj >= 0.0 { -norm } else { norm };
        // Householder vector v = x - alpha e_j, stored implicitly.
        let v0 = ajj - alpha;
        // ||v||^2 = 2 alpha (alpha - a_jj)
        let vnorm_sq = v0 * v0 + (norm_sq - ajj * ajj);
        if vnorm_sq == 0.0 {
            continue;
        }

        a.set(j, j, v0);
        // Apply H = I - 2 v v'/||v||^2 to the remaining columns and to y.
        for col in (j + 1)..k {
            let mut proj = 0.0;
            for i in j..n {
                proj += a.get(i, j) * a.get(i, col);
            }
            let scale = 2.0 * proj / vnorm_sq;
            for i in j..n {
                let upd = a.get(i, col) - scale * a.get(i, j);
                a.set(i, col, upd);
            }
        }
        let mut proj = 0.0;
        for i in j..n {
            proj += a.get(i, j) * qty[i];
        }
        let scale = 2.0 * proj / vnorm_sq;
        for i in j..n {
            qty[i] -= scale * a.get(i, j);
        }
        a.set(j, j, alpha);
    }

    let mut r = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r.set(i, j, a.get(i, j));
        }
    }
    qty.truncate(k);
    Ok((r, qty))
}

/// Solves `R b = rhs` for upper-triangular `R`.
pub fn back_substitute(r: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let k = r.cols();
    if r.rows() != k || rhs.len() != k {
        return Err(Error::DimensionMismatch("triangular solve shape"));
    }
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..k {
            acc -= r.get(i, j) * b[j];
        }
        let diag = r.get(i, i);
        if diag == 0.0 {
            return Err(Error::SingularDesign { rcond: 0.0 });
        }
        b[i] = acc / diag;
    }
    Ok(b)
}

/// LU factorization with partial pivoting, kept in-place.
struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

fn lu_decompose(a: &Matrix) -> Result<Lu> {
    let k = a.cols();
    if a.rows() != k {
        return Err(Error::DimensionMismatch("LU needs a square matrix"));
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..k).collect();

    for col in 0..k {
        let mut pivot_row = col;
        let mut pivot_val = lu.get(col, col).abs();
        for r in (col + 1)..k {
            let v = lu.get(r, col).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return Err(Error::SingularDesign { rcond: 0.0 });
        }
        if pivot_row != col {
            perm.swap(pivot_row, col);
            for j in 0..k {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
        }
        let pivot = lu.get(col, col);
        for r in (col + 1)..k {
            let factor = lu.get(r, col) / pivot;
            lu.set(r, col, factor);
            for j in (col + 1)..k {
                let upd = lu.get(r, j) - factor * lu.get(col, j);
                lu.set(r, j, upd);
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let k = self.lu.cols();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 1..k {
            for j in 0..i {
                x[i] -= self.lu.get(i, j) * x[j];
            }
        }
        for i in (0..k).rev() {
            for j in (i + 1)..k {
                x[i] -= self.lu.get(i, j) * x[j];
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }
}

/// Inverts a square matrix via pivoted LU and rejects it as singular when the
/// 1-norm reciprocal condition number `1 / (‖A‖₁ ‖A⁻¹‖₁)` is below
/// [`RCOND_MIN`].
pub fn invert_checked(a: &Matrix) -> Result<Matrix> {
    let k = a.cols();
    let lu = lu_decompose(a)?;
    let mut inv = Matrix::zeros(k, k);
    let mut unit = vec![0.0; k];
    for j in 0..k {
        unit[j] = 1.0;
        let col = lu.solve(&unit);
        unit[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::SingularDesign { rcond: 0.0 });
            }
            inv.set(i, j, v);
        }
    }
    let rcond = 1.0 / (a.one_norm() * inv.one_norm());
    if !(rcond >= RCOND_MIN) {
        return Err(Error::SingularDesign { rcond });
    }
    Ok(inv)
}

/// `R′R / n`: reconstructs the average Gram matrix of the original design
/// from its QR factor.
pub fn gram_from_r(r: &Matrix, n: usize) -> Matrix {
    let k = r.cols();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            // R is upper triangular: row m contributes only for m <= min(i, j).
            for m in 0..=i.min(j) {
                acc += r.get(m, i) * r.get(m, j);
            }
            g.set(i, j, acc / n as f64);
        }
    }
    g
}
