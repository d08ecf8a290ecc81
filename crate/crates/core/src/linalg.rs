//! Small dense linear algebra: one-sided Jacobi SVD, nullspaces and determinants.
//!
//! Matrices in this crate are at most 16 columns wide, so a simple, accurate
//! Jacobi sweep is preferable to pulling in a LAPACK binding that would also pin
//! the scalar type.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Default relative singular-value threshold for rank and nullspace decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from equally long rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
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

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..o.cols {
                    r[(i, j)] += a * o[(k, j)];
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Scales every non-zero row to unit Euclidean norm.
    pub fn normalize_rows(&mut self) {
        for i in 0..self.rows {
            let n = norm(self.row(i));
            if n > T::zero() {
                for j in 0..self.cols {
                    self[(i, j)] /= n;
                }
            }
        }
    }

    pub fn stack(&self, below: &Self) -> Self {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Self { rows: self.rows + below.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<&[T]> = idx.iter().map(|&i| self.row(i)).collect();
        Self::from_rows(&rows)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Singular values (descending) and right singular vectors of an `m×n` matrix.
///
/// `v` is `n×n`; column `k` belongs to `s[k]`. When `m < n` the trailing
/// `n − m` values are zero and their columns span (part of) the nullspace.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD.
pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows, a.cols);
    // Work on columns: w = a·v, rotate until the columns are mutually orthogonal.
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[p][i], w[q][i]);
                    w[p][i] = c * x - s * y;
                    w[q][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let sv: Vec<T> = w.iter().map(|c| norm(c)).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut vs = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            vs[(i, k)] = v[(i, j)];
        }
    }
    Svd { s: order.iter().map(|&j| sv[j]).collect(), v: vs }
}

pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    svd(a).s
}

/// Numerical rank with singular values above `rel_tol·σ_max`.
pub fn rank<T: Scalar>(a: &Matrix<T>, rel_tol: T) -> usize {
    let s = svd(a).s;
    let smax = s.first().copied().unwrap_or(T::zero());
    if smax == T::zero() {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Orthonormal nullspace basis (one vector per entry) using the threshold
/// `rel_tol·σ_max`. A zero matrix has the whole space as nullspace.
pub fn nullspace<T: Scalar>(a: &Matrix<T>, rel_tol: T) -> Vec<Vec<T>> {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(T::zero());
    (0..a.cols)
        .filter(|&k| smax == T::zero() || d.s[k] <= rel_tol * smax)
        .map(|k| d.v.column(k))
        .collect()
}

/// Right singular vector of the smallest singular value, with that value
/// relative to the largest one.
pub fn smallest_right_vector<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, T) {
    let d = svd(a);
    let n = a.cols;
    let smax = d.s[0];
    let rel = if smax == T::zero() { T::zero() } else { d.s[n - 1] / smax };
    (d.v.column(n - 1), rel)
}

/// Minimum-norm least-squares solution of `a·x ≈ b`, ignoring singular values
/// below `rel_tol·σ_max`.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T], rel_tol: T) -> Vec<T> {
    let d = svd(a);
    let n = a.cols;
    let mut x = vec![T::zero(); n];
    let smax = d.s.first().copied().unwrap_or(T::zero());
    for k in 0..n {
        let s = d.s[k];
        if s == T::zero() || s <= rel_tol * smax {
            continue;
        }
        let vk = d.v.column(k);
        let coef = dot(&a.mul_vec(&vk), b) / (s * s);
        for i in 0..n {
            x[i] += coef * vk[i];
        }
    }
    x
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det<T: Scalar>(a: &Matrix<T>) -> T {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut d = T::one();
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if m[(i, k)].abs() > m[(piv, k)].abs() {
                piv = i;
            }
        }
        if m[(piv, k)] == T::zero() {
            return T::zero();
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            d = -d;
        }
        let p = m[(k, k)];
        d *= p;
        for i in k + 1..n {
            let f = m[(i, k)] / p;
            if f != T::zero() {
                for j in k + 1..n {
                    let t = m[(k, j)];
                    m[(i, j)] -= f * t;
                }
            }
        }
    }
    d
}

/// Distance between the row spaces of two matrices: spectral-free Frobenius
/// norm of the difference of the orthogonal projectors.
pub fn row_space_distance<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, rel_tol: T) -> T {
    let pa = row_space_projector(a, rel_tol);
    let pb = row_space_projector(b, rel_tol);
    let mut s = T::zero();
    for i in 0..pa.rows {
        for j in 0..pa.cols {
            let d = pa[(i, j)] - pb[(i, j)];
            s += d * d;
        }
    }
    s.sqrt()
}

fn row_space_projector<T: Scalar>(a: &Matrix<T>, rel_tol: T) -> Matrix<T> {
    let d = svd(a);
    let n = a.cols;
    let smax = d.s[0];
    let mut p = Matrix::zeros(n, n);
    for k in 0..n {
        if smax == T::zero() || d.s[k] <= rel_tol * smax {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += d.v[(i, k)] * d.v[(j, k)];
            }
        }
    }
    p
}
