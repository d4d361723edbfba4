//! Small dense matrices: pivoted LU, inverse and symmetric inertia.
//!
//! Gram matrices in this crate are at most ~12×12, so everything is a plain
//! row-major `Vec` with no blocking.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, k| if i == k { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for k in 0..cols {
                data.push(f(i, k));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, k| if i == k { diag[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, k| self[(k, i)])
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|k| self[(i, k)] == self[(k, i)]))
    }

    /// Largest absolute entry, zero for an empty matrix.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, v| acc.max_of(v.abs()))
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Determinant by LU with partial pivoting. An exactly zero pivot column
    /// short-circuits to an exact zero.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        match Lu::factor(self) {
            Some(lu) => lu.determinant(),
            None => T::zero(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let lu = Lu::factor(self).ok_or(GeomError::Singular)?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[c] = T::one();
            let col = lu.solve(&e);
            for r in 0..n {
                inv[(r, c)] = col[r];
            }
        }
        Ok(inv)
    }

    /// Sylvester inertia of a symmetric matrix.
    ///
    /// Symmetric elimination with 1×1 pivots where the diagonal dominates and
    /// 2×2 pivots (always one positive and one negative eigenvalue) where an
    /// off-diagonal entry dominates, as in Bunch–Kaufman. Works over any
    /// ordered field, so rational matrices get an exact answer.
    pub fn inertia(&self) -> Inertia {
        assert!(self.is_square(), "inertia of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inertia = Inertia::default();
        let half = T::one() / (T::one() + T::one());
        let mut k = 0;
        while k < n {
            let mut diag = (k, T::zero());
            let mut off = (k, k, T::zero());
            for i in k..n {
                let d = a[(i, i)].abs();
                if d > diag.1 {
                    diag = (i, d);
                }
                for j in (i + 1)..n {
                    let o = a[(i, j)].abs();
                    if o > off.2 {
                        off = (i, j, o);
                    }
                }
            }
            if diag.1.is_zero() && off.2.is_zero() {
                inertia.zero += n - k;
                break;
            }
            if diag.1 >= half * off.2 {
                a.symmetric_swap(k, diag.0);
                let d = a[(k, k)];
                if d > T::zero() {
                    inertia.positive += 1;
                } else {
                    inertia.negative += 1;
                }
                for i in (k + 1)..n {
                    let f = a[(i, k)] / d;
                    for j in (k + 1)..n {
                        let v = a[(k, j)];
                        a[(i, j)] = a[(i, j)] - f * v;
                    }
                }
                k += 1;
            } else {
                // k <= off.0 < off.1, so the first swap leaves off.1 in place
                a.symmetric_swap(k, off.0);
                a.symmetric_swap(k + 1, off.1);
                let (p, b, c) = (a[(k, k)], a[(k, k + 1)], a[(k + 1, k + 1)]);
                let det = p * c - b * b;
                inertia.positive += 1;
                inertia.negative += 1;
                for i in (k + 2)..n {
                    let (u0, u1) = (a[(i, k)], a[(i, k + 1)]);
                    // row vector u · E⁻¹
                    let w0 = (u0 * c - u1 * b) / det;
                    let w1 = (u1 * p - u0 * b) / det;
                    for j in (k + 2)..n {
                        let v = w0 * a[(k, j)] + w1 * a[(k + 1, j)];
                        a[(i, j)] = a[(i, j)] - v;
                    }
                }
                k += 2;
            }
        }
        inertia
    }

    fn symmetric_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.cols;
        for c in 0..n {
            self.data.swap(i * n + c, j * n + c);
        }
        for r in 0..self.rows {
            self.data.swap(r * n + i, r * n + j);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, k| {
            (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * rhs[(j, k)])
        })
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Packed LU factors with the row permutation.
struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Scalar> Lu<T> {
    /// Returns `None` when a pivot column is exactly zero.
    fn factor(m: &Matrix<T>) -> Option<Self> {
        let n = m.rows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for c in 0..n {
            let (p, best) = (c..n)
                .map(|r| (r, lu[(r, c)].abs()))
                .fold((c, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.is_zero() {
                return None;
            }
            if p != c {
                for k in 0..n {
                    lu.data.swap(p * n + k, c * n + k);
                }
                perm.swap(p, c);
                swaps += 1;
            }
            let pivot = lu[(c, c)];
            for r in (c + 1)..n {
                let f = lu[(r, c)] / pivot;
                lu[(r, c)] = f;
                for k in (c + 1)..n {
                    let v = lu[(c, k)];
                    lu[(r, k)] = lu[(r, k)] - f * v;
                }
            }
        }
        Some(Self { lu, perm, swaps })
    }

    fn determinant(&self) -> T {
        let n = self.lu.rows;
        let det = (0..n).fold(T::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.swaps % 2 == 1 {
            -det
        } else {
            det
        }
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for k in 0..r {
                y[r] = y[r] - self.lu[(r, k)] * y[k];
            }
        }
        for r in (0..n).rev() {
            for k in (r + 1)..n {
                y[r] = y[r] - self.lu[(r, k)] * y[k];
            }
            y[r] = y[r] / self.lu[(r, r)];
        }
        y
    }
}
