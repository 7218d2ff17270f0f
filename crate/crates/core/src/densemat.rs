//! Dense real matrices.
//!
//! A small row-major `f64` matrix with the handful of factorizations the
//! canonical-form machinery needs: products, LU with partial pivoting
//! (inverse, determinant) and a complete-pivoting rank estimate.
//!
//! Storage is row-major: `data[i * cols + j]` holds entry `(i, j)`.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting empty shapes,
    /// length mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape {
                op: "Matrix::new",
                expected: "positive dimensions".into(),
                got: format!("{rows}x{cols}"),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Matrix::new",
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::Shape {
                op: "Matrix::from_rows",
                expected: format!("{cols} columns in every row"),
                got: format!("{} columns in row {bad}", rows[bad].as_ref().len()),
            });
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn row_vector(values: &[f64]) -> Result<Self> {
        Self::new(1, values.len(), values.to_vec())
    }

    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Unit vector `e_k` as a `1 x n` row.
    pub fn unit_row(n: usize, k: usize) -> Self {
        let mut m = Self::zeros(1, n);
        m.data[k] = 1.0;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entrywise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                op,
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        finite_or_overflow(self.rows, self.cols, data, op)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                op: "matmul",
                expected: format!("{} rows on the right operand", self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out = &mut data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        finite_or_overflow(self.rows, other.cols, data, "matmul")
    }

    /// Threshold below which a pivot counts as zero: `n * eps * max|a|`.
    pub fn default_tolerance(&self) -> f64 {
        self.rows.max(self.cols) as f64 * f64::EPSILON * self.max_abs()
    }

    /// LU factorization with partial (row) pivoting, `P a = L U`.
    pub fn lu_decompose(&self) -> Result<LuFactors> {
        self.require_square("lu_decompose")?;
        let n = self.rows;
        let threshold = self.default_tolerance();
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        let mut first_singular = None;

        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                parity = -parity;
            }
            if pmax < threshold || pmax == 0.0 {
                first_singular.get_or_insert(k);
            }
            let pivot = lu[k * n + k];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }

        Ok(LuFactors {
            lu: finite_or_overflow(n, n, lu, "lu_decompose")?,
            perm,
            parity,
            singular_pivot: first_singular,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        self.lu_decompose()?.inverse()
    }

    pub fn determinant(&self) -> Result<f64> {
        Ok(self.lu_decompose()?.determinant())
    }

    /// Numerical rank by Gaussian elimination with complete pivoting.
    ///
    /// A pivot counts when its magnitude exceeds `tol`; `tol == 0` selects
    /// [`Matrix::default_tolerance`].
    pub fn rank_with_tolerance(&self, tol: f64) -> usize {
        let tol = if tol > 0.0 {
            tol
        } else {
            self.default_tolerance()
        };
        let (m, n) = self.shape();
        let mut w = self.data.clone();
        let mut rank = 0;
        for k in 0..m.min(n) {
            let mut best = (k, k, 0.0);
            for i in k..m {
                for j in k..n {
                    let v = w[i * n + j].abs();
                    if v > best.2 {
                        best = (i, j, v);
                    }
                }
            }
            if best.2 <= tol {
                break;
            }
            let (pi, pj, _) = best;
            if pi != k {
                for j in 0..n {
                    w.swap(k * n + j, pi * n + j);
                }
            }
            if pj != k {
                for i in 0..m {
                    w.swap(i * n + k, i * n + pj);
                }
            }
            rank += 1;
            let pivot = w[k * n + k];
            for i in k + 1..m {
                let factor = w[i * n + k] / pivot;
                for j in k..n {
                    w[i * n + j] -= factor * w[k * n + j];
                }
            }
        }
        rank
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape {
                op,
                expected: "square matrix".into(),
                got: format!("{}x{}", self.rows, self.cols),
            })
        }
    }
}

fn finite_or_overflow(
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    op: &'static str,
) -> Result<Matrix> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(Matrix { rows, cols, data })
    } else {
        Err(Error::NumericOverflow { op })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        for i in 0..self.rows {
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>w$.prec$}", v, w = prec + 6)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

/// Packed `L\U` factors with the row permutation that produced them.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Matrix,
    perm: Vec<usize>,
    parity: f64,
    singular_pivot: Option<usize>,
}

impl LuFactors {
    /// Combined storage: strict lower part is `L` (unit diagonal implied),
    /// upper part including the diagonal is `U`.
    pub fn packed(&self) -> &Matrix {
        &self.lu
    }

    /// `perm[i]` is the row of the original matrix now in position `i`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn parity(&self) -> f64 {
        self.parity
    }

    pub fn is_singular(&self) -> bool {
        self.singular_pivot.is_some()
    }

    pub fn singular_pivot(&self) -> Option<usize> {
        self.singular_pivot
    }

    pub fn lower(&self) -> Matrix {
        let n = self.lu.rows();
        let mut l = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l.set(i, j, self.lu.get(i, j));
            }
        }
        l
    }

    pub fn upper(&self) -> Matrix {
        let n = self.lu.rows();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u.set(i, j, self.lu.get(i, j));
            }
        }
        u
    }

    pub fn permutation_matrix(&self) -> Matrix {
        let n = self.perm.len();
        let mut p = Matrix::zeros(n, n);
        for (i, &src) in self.perm.iter().enumerate() {
            p.set(i, src, 1.0);
        }
        p
    }

    pub fn determinant(&self) -> f64 {
        if self.is_singular() {
            return 0.0;
        }
        let n = self.lu.rows();
        (0..n).map(|i| self.lu.get(i, i)).product::<f64>() * self.parity
    }

    /// Solves `a x = b` for every column of `b`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if let Some(pivot) = self.singular_pivot {
            return Err(Error::Singular { pivot });
        }
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::Shape {
                op: "LuFactors::solve",
                expected: format!("{n} rows"),
                got: format!("{}x{}", b.rows(), b.cols()),
            });
        }
        let lu = self.lu.as_slice();
        let mut x = Matrix::zeros(n, b.cols());
        for c in 0..b.cols() {
            let mut y: Vec<f64> = self.perm.iter().map(|&p| b.get(p, c)).collect();
            for i in 0..n {
                let s: f64 = (0..i).map(|j| lu[i * n + j] * y[j]).sum();
                y[i] -= s;
            }
            for i in (0..n).rev() {
                let s: f64 = (i + 1..n).map(|j| lu[i * n + j] * y[j]).sum();
                y[i] = (y[i] - s) / lu[i * n + i];
            }
            for (i, v) in y.into_iter().enumerate() {
                x.set(i, c, v);
            }
        }
        finite_or_overflow(n, b.cols(), x.data, "LuFactors::solve")
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.lu.rows()))
    }
}
