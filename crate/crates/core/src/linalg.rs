//! Small dense linear algebra: row-major matrices, LU with partial pivoting
//! and a reciprocal condition number in the 1-norm, plus 2x2 helpers.
//!
//! The systems handled here are vertex blocks (a few rows) and global flow
//! matrices (2m rows for m edges), so everything is dense and the condition
//! estimate is computed exactly from the explicit inverse.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

/// Dense row-major matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix built from the listed columns of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.add(&rhs.scale(-1.0))
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.abs()).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    /// Column sums.
    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)]).sum())
            .collect()
    }

    /// Copy with every row scaled to unit max-norm (zero rows untouched).
    pub fn row_equilibrated(&self) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            let s = self.row(i).iter().fold(0.0, |m: f64, x| m.max(x.abs()));
            if s > 0.0 {
                for j in 0..self.cols {
                    out[(i, j)] /= s;
                }
            }
        }
        out
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| *x >= 0.0)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// LU factorization `P A = L U` with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    rcond: f64,
}

impl Lu {
    /// Factors a square matrix. A zero pivot does not abort the
    /// factorization; it is reported through [`Lu::rcond`] being zero.
    pub fn factor(a: &Matrix) -> Lu {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut exact_zero_pivot = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                exact_zero_pivot = true;
                continue;
            }
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= l * lu[(k, j)];
                    }
                }
            }
        }
        let mut out = Lu {
            lu,
            perm,
            rcond: 0.0,
        };
        if n == 0 {
            out.rcond = 1.0;
        } else if !exact_zero_pivot {
            let anorm = a.norm_one();
            let inv = out.inverse_unchecked();
            let inorm = inv.norm_one();
            out.rcond = if anorm == 0.0 || !inorm.is_finite() {
                0.0
            } else {
                1.0 / (anorm * inorm)
            };
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Reciprocal condition number `1 / (|A|_1 |A^-1|_1)`; zero when singular.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn is_singular(&self, threshold: f64) -> bool {
        !(self.rcond >= threshold)
    }

    pub fn determinant(&self) -> f64 {
        let n = self.dim();
        let mut det = 1.0;
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        // parity of the permutation
        let mut seen = vec![false; n];
        let mut swaps = 0usize;
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0usize;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            swaps += len - 1;
        }
        if swaps % 2 == 1 {
            -det
        } else {
            det
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.lu[(i, k)] * x[k];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.rows(), self.dim());
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    fn inverse_unchecked(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.dim()))
    }

    pub fn inverse(&self) -> Matrix {
        self.inverse_unchecked()
    }
}

/// 2x2 real matrix stored as `[[a, b], [c, d]]`.
pub type Mat2 = [[f64; 2]; 2];

pub fn mat2_det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat2_trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

/// Inverse by the adjugate formula; `None` when the determinant is zero.
pub fn mat2_inv(m: &Mat2) -> Option<Mat2> {
    let det = mat2_det(m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    mat2_add(a, &mat2_scale(b, -1.0))
}

pub fn mat2_scale(a: &Mat2, s: f64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_apply(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(0.0, |m: f64, x| m.max(x.abs()))
}

pub const MAT2_IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
pub const MAT2_ZERO: Mat2 = [[0.0, 0.0], [0.0, 0.0]];

/// Matrix exponential of a 2x2 matrix in closed form.
///
/// With `mu = tr/2` and `s^2 = mu^2 - det`, `exp(A) = e^mu (C I + S (A - mu I))`
/// where `C = cosh s, S = sinh(s)/s` for `s^2 > 0` and the trigonometric
/// counterparts for `s^2 < 0`. Near `s = 0` the Taylor series of both
/// factors is used.
pub fn mat2_expm(a: &Mat2) -> Mat2 {
    let mu = 0.5 * mat2_trace(a);
    let p = 0.5 * (a[0][0] - a[1][1]);
    let s2 = p * p + a[0][1] * a[1][0];
    let (c, s) = if s2.abs() < 1e-8 {
        // cosh(s) = 1 + s2/2 + s2^2/24, sinh(s)/s = 1 + s2/6 + s2^2/120
        (
            1.0 + s2 / 2.0 + s2 * s2 / 24.0,
            1.0 + s2 / 6.0 + s2 * s2 / 120.0,
        )
    } else if s2 > 0.0 {
        let r = libm::sqrt(s2);
        (libm::cosh(r), libm::sinh(r) / r)
    } else {
        let r = libm::sqrt(-s2);
        (libm::cos(r), libm::sin(r) / r)
    };
    let e = libm::exp(mu);
    [
        [e * (c + s * (a[0][0] - mu)), e * s * a[0][1]],
        [e * s * a[1][0], e * (c + s * (a[1][1] - mu))],
    ]
}
