//! Small dense linear algebra: Cholesky, cyclic Jacobi eigendecomposition,
//! inverse square roots and Gram–Schmidt.
//!
//! Everything here targets the handful of dimensions the bounds need
//! (whitening of a d×d covariance and a ≤3-dimensional direction subspace),
//! so the routines favour accuracy and simplicity over asymptotic speed.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Numerical thresholds used across the linear algebra routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative asymmetry allowed before a matrix is rejected.
    pub symmetry_rel: f64,
    /// A Gram–Schmidt residual below `rank_rel * ‖v‖` counts as dependent.
    pub rank_rel: f64,
    /// Vectors with norm below this are treated as exactly zero.
    pub zero_abs: f64,
    /// Cap on full Jacobi sweeps before reporting `NumericalFailure`.
    pub jacobi_max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry_rel: 1e-12,
            rank_rel: 1e-10,
            zero_abs: 1e-14,
            jacobi_max_sweeps: 100,
        }
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        m
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
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

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// Largest `|m[i][j] - m[j][i]|`, with its location.
    fn max_asymmetry(&self) -> (usize, usize, T) {
        let mut worst = (0, 0, T::zero());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap > worst.2 {
                    worst = (i, j, gap);
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric positive definite matrix, validated on construction.
///
/// The Cholesky factor is computed once and kept alongside the entries.
/// Equality compares the stored entries exactly.
#[derive(Debug, Clone)]
pub struct SpdMatrix<T> {
    entries: Matrix<T>,
    chol: Matrix<T>,
}

impl<T: Real> SpdMatrix<T> {
    pub fn new(entries: Matrix<T>) -> Result<Self> {
        Self::with_tolerances(entries, &Tolerances::default())
    }

    pub fn with_tolerances(entries: Matrix<T>, tol: &Tolerances) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.rows(),
                found: entries.cols(),
            });
        }
        if entries.rows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite("covariance matrix"));
        }
        let (row, col, gap) = entries.max_asymmetry();
        let scale = entries.frobenius_norm();
        if gap > T::lit(tol.symmetry_rel) * scale {
            return Err(Error::NotSymmetric {
                row,
                col,
                gap: gap.to_f64_lossy(),
            });
        }
        let chol = cholesky(&entries)?;
        Ok(Self { entries, chol })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(Matrix::identity(d)).expect("identity is SPD")
    }

    /// 1×1 covariance holding `variance`.
    pub fn scalar(variance: T) -> Result<Self> {
        Self::new(Matrix::from_row_major(1, 1, vec![variance]))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    /// Lower-triangular `L` with `L·Lᵀ = self`.
    pub fn cholesky_factor(&self) -> &Matrix<T> {
        &self.chol
    }

    /// `vᵀ·Σ·v`, evaluated as `‖Lᵀv‖²` so it is never negative.
    pub fn quad_form(&self, v: &[T]) -> T {
        let d = self.dim();
        assert_eq!(v.len(), d);
        let mut acc = T::zero();
        for j in 0..d {
            let mut s = T::zero();
            for i in j..d {
                s = s + self.chol[(i, j)] * v[i];
            }
            acc = acc + s * s;
        }
        acc
    }

    /// Solves `L·y = v` by forward substitution.
    pub fn solve_lower(&self, v: &[T]) -> Vec<T> {
        let d = self.dim();
        assert_eq!(v.len(), d);
        let mut y = vec![T::zero(); d];
        for i in 0..d {
            let mut s = v[i];
            for k in 0..i {
                s = s - self.chol[(i, k)] * y[k];
            }
            y[i] = s / self.chol[(i, i)];
        }
        y
    }

    /// Squared Mahalanobis norm `vᵀ·Σ⁻¹·v`.
    pub fn mahalanobis_sq(&self, v: &[T]) -> T {
        self.solve_lower(v).iter().map(|&x| x * x).sum()
    }

    /// `log det Σ`.
    pub fn log_det(&self) -> T {
        let two = T::one() + T::one();
        (0..self.dim())
            .map(|i| two * self.chol[(i, i)].ln())
            .sum()
    }

    pub fn largest_eigenvalue(&self) -> Result<T> {
        Ok(sym_eig(&self.entries)?.values[0])
    }
}

impl<T: PartialEq> PartialEq for SpdMatrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

/// Cholesky factorization of a symmetric matrix (only the lower triangle is read).
pub fn cholesky<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot = pivot - l[(j, k)] * l[(j, k)];
        }
        if !(pivot > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: pivot.to_f64_lossy(),
            });
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEig<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix<T>,
}

impl<T: Real> SymEig<T> {
    /// `U·diag(f(λ))·Uᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                let uik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + uik * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigendecomposition.
pub fn sym_eig<T: Real>(m: &Matrix<T>) -> Result<SymEig<T>> {
    sym_eig_with(m, &Tolerances::default())
}

pub fn sym_eig_with<T: Real>(m: &Matrix<T>, tol: &Tolerances) -> Result<SymEig<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix passed to sym_eig"));
    }
    let n = m.rows();
    let (row, col, gap) = m.max_asymmetry();
    let scale = m.frobenius_norm();
    if gap > T::lit(tol.symmetry_rel) * scale {
        return Err(Error::NotSymmetric {
            row,
            col,
            gap: gap.to_f64_lossy(),
        });
    }

    let mut a = m.clone();
    // symmetrize so rounding asymmetry does not leak into the rotations
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)]) * crate::scalar::half();
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    let target = T::epsilon() * scale;

    let mut converged = n < 2;
    for _sweep in 0..tol.jacobi_max_sweeps {
        let off: T = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<T>()
            .sqrt();
        if off <= target || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let two = T::one() + T::one();
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = {
                    let denom = theta.abs() + (theta * theta + T::one()).sqrt();
                    let mag = T::one() / denom;
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "Jacobi did not converge in {} sweeps",
            tol.jacobi_max_sweeps
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, k)] = v[(i, src)];
        }
    }
    Ok(SymEig { values, vectors })
}

/// `Σ^{-1/2}` via the eigendecomposition of `Σ`.
pub fn inv_sqrt<T: Real>(m: &SpdMatrix<T>) -> Result<SpdMatrix<T>> {
    let eig = sym_eig(m.matrix())?;
    if let Some((k, &lam)) = eig
        .values
        .iter()
        .enumerate()
        .find(|(_, &lam)| !(lam > T::zero()))
    {
        return Err(Error::NotPositiveDefinite {
            pivot: k,
            value: lam.to_f64_lossy(),
        });
    }
    let mut r = eig.reconstruct_with(|lam| T::one() / lam.sqrt());
    let n = r.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (r[(i, j)] + r[(j, i)]) * crate::scalar::half();
            r[(i, j)] = avg;
            r[(j, i)] = avg;
        }
    }
    SpdMatrix::new(r)
}

/// Orthonormal basis of `span(vs)` by twice-iterated modified Gram–Schmidt.
///
/// The output length is the numerical rank of the input under the
/// thresholds in [`Tolerances`].
pub fn orthonormal_basis<T: Real>(vs: &[Vec<T>]) -> Vec<Vec<T>> {
    orthonormal_basis_with(vs, &Tolerances::default())
}

pub fn orthonormal_basis_with<T: Real>(vs: &[Vec<T>], tol: &Tolerances) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vs {
        let vnorm = norm(v);
        if !(vnorm >= T::lit(tol.zero_abs)) {
            continue;
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let wnorm = norm(&w);
        if wnorm <= T::lit(tol.rank_rel) * vnorm || wnorm < T::lit(tol.zero_abs) {
            continue;
        }
        for x in &mut w {
            *x = *x / wnorm;
        }
        basis.push(w);
    }
    basis
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Real>(alpha: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| alpha * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn rel_frob(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
        a.sub(b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    fn random_spd(d: usize, seed: &[f64]) -> Matrix<f64> {
        // A·Aᵀ + d·I from a deterministic fill
        let a = Matrix::from_row_major(d, d, (0..d * d).map(|k| seed[k % seed.len()] + 0.1 * k as f64).collect());
        let mut m = a.matmul(&a.transpose());
        for i in 0..d {
            m[(i, i)] += d as f64;
        }
        m
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let id = Matrix::<f64>::identity(3);
        assert_eq!(cholesky(&id).unwrap(), id);
        let m = Matrix::diag(&[4.0, 1.0]);
        assert_eq!(cholesky(&m).unwrap(), Matrix::diag(&[2.0, 1.0]));
    }

    #[test]
    fn cholesky_round_trip_2x2() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert_eq!(l[(0, 1)], 0.0);
        assert!(rel_frob(&l.matmul(&l.transpose()), &m) < 1e-10);
    }

    #[test]
    fn cholesky_reports_pivot() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        match cholesky(&m) {
            Err(Error::NotPositiveDefinite { pivot, value }) => {
                assert_eq!(pivot, 1);
                assert_abs_diff_eq!(value, -3.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let msg = SpdMatrix::new(m).unwrap_err().to_string();
        assert!(msg.contains("pivot 1"), "{msg}");
    }

    #[test]
    fn spd_rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.5, 2.0]]).unwrap();
        assert!(matches!(SpdMatrix::new(m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = sym_eig(&Matrix::<f64>::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 1.0));
        let e = sym_eig(&Matrix::<f64>::diag(&[1.0, 4.0])).unwrap();
        assert_eq!(e.values, vec![4.0, 1.0]);
        assert_abs_diff_eq!(e.vectors[(1, 0)].abs(), 1.0);
        assert_abs_diff_eq!(e.vectors[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn eig_reconstructs_3x3() {
        let m = Matrix::from_rows(&[
            vec![2.0, -0.7, 0.3],
            vec![-0.7, 1.5, 0.9],
            vec![0.3, 0.9, -0.4],
        ])
        .unwrap();
        let e = sym_eig(&m).unwrap();
        assert!(rel_frob(&e.reconstruct_with(|x| x), &m) < 1e-12);
        for k in 0..3 {
            let u = e.vectors.column(k);
            let mu = m.matvec(&u);
            for i in 0..3 {
                assert!((mu[i] - e.values[k] * u[i]).abs() <= 1e-9 * m.frobenius_norm());
            }
        }
        let utu = e.vectors.transpose().matmul(&e.vectors);
        assert!(utu.sub(&Matrix::identity(3)).frobenius_norm() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn inv_sqrt_examples() {
        let id = SpdMatrix::<f64>::identity(3);
        assert!(rel_frob(inv_sqrt(&id).unwrap().matrix(), &Matrix::identity(3)) < 1e-15);
        let d = SpdMatrix::new(Matrix::diag(&[4.0, 1.0])).unwrap();
        let r = inv_sqrt(&d).unwrap();
        assert!(rel_frob(r.matrix(), &Matrix::diag(&[0.5, 1.0])) < 1e-15);
        let m = SpdMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let r = inv_sqrt(&m).unwrap();
        let rmr = r.matrix().matmul(m.matrix()).matmul(r.matrix());
        assert!(rel_frob(&rmr, &Matrix::identity(2)) < 1e-8);
    }

    #[test]
    fn basis_examples() {
        let e1 = vec![1.0, 0.0, 0.0];
        let e2 = vec![0.0, 1.0, 0.0];
        assert_eq!(orthonormal_basis(&[e1.clone(), e2.clone()]), vec![e1.clone(), e2]);
        assert_eq!(orthonormal_basis(&[e1.clone(), vec![2.0, 0.0, 0.0]]), vec![e1]);
        let b = orthonormal_basis(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert_eq!(b.len(), 2);
        assert_abs_diff_eq!(dot(&b[0], &b[1]), 0.0, epsilon = 1e-10);
        for v in [vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]] {
            let mut r = v.clone();
            for q in &b {
                axpy(-dot(&v, q), q, &mut r);
            }
            assert!(norm(&r) <= 1e-8 * norm(&v));
        }
        assert!(orthonormal_basis::<f64>(&[]).is_empty());
        assert!(orthonormal_basis(&[vec![0.0, 0.0], vec![1e-15, 0.0]]).is_empty());
    }

    #[test]
    fn generic_over_f32() {
        let m = SpdMatrix::<f32>::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = inv_sqrt(&m).unwrap();
        assert!((r.matrix()[(0, 0)] - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn prop_cholesky_round_trip(d in 1usize..=16, seed in prop::collection::vec(-3.0f64..3.0, 1..20)) {
            let m = random_spd(d, &seed);
            let l = cholesky(&m).unwrap();
            prop_assert!(rel_frob(&l.matmul(&l.transpose()), &m) < 1e-9);
        }

        #[test]
        fn prop_inv_sqrt_commutes(d in 1usize..=8, seed in prop::collection::vec(-3.0f64..3.0, 1..20)) {
            let m = SpdMatrix::new(random_spd(d, &seed)).unwrap();
            let r = inv_sqrt(&m).unwrap();
            let rm = r.matrix().matmul(m.matrix());
            let mr = m.matrix().matmul(r.matrix());
            prop_assert!(rel_frob(&rm, &mr) < 1e-8);
            let rmr = rm.matmul(r.matrix());
            prop_assert!(rel_frob(&rmr, &Matrix::identity(d)) < 1e-8);
        }

        #[test]
        fn prop_basis_size_is_rank(
            a in prop::collection::vec(-5.0f64..5.0, 4),
            b in prop::collection::vec(-5.0f64..5.0, 4),
            k in -3.0f64..3.0,
        ) {
            prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
            let cos = dot(&a, &b).abs() / (norm(&a) * norm(&b));
            prop_assume!(cos < 0.999);
            // third vector is a combination of the first two
            let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + k * y).collect();
            let basis = orthonormal_basis(&[a.clone(), b.clone(), c]);
            prop_assert_eq!(basis.len(), 2);
            for i in 0..2 {
                prop_assert!((norm(&basis[i]) - 1.0).abs() < 1e-10);
            }
            prop_assert!(dot(&basis[0], &basis[1]).abs() < 1e-10);
        }
    }
}
