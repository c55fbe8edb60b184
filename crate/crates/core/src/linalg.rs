//! Dense complex matrices and vectors, Hermitian spectra, and the two matrix
//! norms used throughout the crate (trace norm and entrywise 1-norm).
//!
//! Matrices are stored row-major. Spectral work is delegated to `nalgebra`;
//! this module owns the tolerance conventions.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for positive semidefiniteness tests.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Relative tolerance for Hermitian symmetry; scaled by `max(1, max |a_ij|)`.
pub const HERMITIAN_REL_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { real(1.0) } else { real(0.0) })
    }

    /// The all-ones matrix `J_n`.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, n, |_, _| real(1.0))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Ragged {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    /// Convenience constructor for real matrices; panics on ragged input.
    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        Self::from_fn(rows.len(), N, |i, j| real(rows[i][j]))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { real(0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { real(diag[i]) } else { real(0.0) })
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.ensure_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (other.rows, other.cols);
        Self::from_fn(self.rows * r, self.cols * c, |i, j| {
            self[(i / r, j / c)] * other[(i % r, j % c)]
        })
    }

    /// Largest deviation `|a_ij - conj(a_ji)|` together with its position.
    pub fn hermitian_deviation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.rows {
            for j in i..self.cols.min(self.rows) {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }

    pub fn hermitian_tolerance(&self) -> f64 {
        HERMITIAN_REL_TOL * self.max_abs().max(1.0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_deviation().2 <= self.hermitian_tolerance()
    }

    fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                if z.im == 0.0 {
                    write!(f, "{:>10.4} ", z.re)?;
                } else {
                    write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        Ok(Self { data })
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self {
            data: data.iter().map(|&x| real(x)).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: vec![real(0.0); n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            data: vec![real(1.0); n],
        }
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[i] = real(1.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.data.iter()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// Entrywise `|v_i|^2`, i.e. `v ⊙ conj(v)`.
    pub fn abs_sq(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self, other>`, conjugate-linear in the first argument.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        ensure_dims(self.dim(), other.dim())?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        hadamard(self, other)
    }

    /// Rank-one matrix `self · other*`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| self.data[i] * other.data[j].conj())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.norm() <= tol)
    }

    /// Reorders entries so that `out[perm[i]] = self[i]`.
    pub fn scatter(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.dim());
        for (i, &p) in perm.iter().enumerate() {
            out.data[p] = self.data[i];
        }
        out
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(data: Vec<Complex64>) -> Self {
        Self { data }
    }
}

fn ensure_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn hadamard(u: &ComplexVector, v: &ComplexVector) -> Result<ComplexVector> {
    ensure_dims(u.dim(), v.dim())?;
    Ok(ComplexVector {
        data: u.data.iter().zip(&v.data).map(|(a, b)| a * b).collect(),
    })
}

fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    a.ensure_square()?;
    let (row, col, deviation) = a.hermitian_deviation();
    let tolerance = a.hermitian_tolerance();
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            row,
            col,
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Hermitian part `(A + A*)/2`, used to feed an exactly Hermitian matrix to the solver.
fn hermitian_part(a: &ComplexMatrix) -> DMatrix<Complex64> {
    let m = a.to_nalgebra();
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// All eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_hermitian(a)?;
    if a.rows() == 0 {
        return Ok(Vec::new());
    }
    let mut vals: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// Eigenvalues (descending) with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    ensure_hermitian(a)?;
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = a.rows();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

/// PSD test: Hermitian within tolerance and
/// `λ_min >= -scale_tol · max(1, ||A||_tr)`.
pub fn is_psd(a: &ComplexMatrix, scale_tol: f64) -> Result<bool> {
    a.ensure_square()?;
    if a.rows() == 0 {
        return Ok(true);
    }
    if !a.is_hermitian() {
        return Ok(false);
    }
    let vals = hermitian_eigenvalues(a)?;
    Ok(psd_from_spectrum(&vals, scale_tol))
}

pub(crate) fn psd_from_spectrum(vals: &[f64], scale_tol: f64) -> bool {
    let trace_norm: f64 = vals.iter().map(|v| v.abs()).sum();
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    min >= -scale_tol * trace_norm.max(1.0)
}

/// Singular values, sorted descending.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = a.to_nalgebra().singular_values().iter().copied().collect();
    vals.sort_by(|x, y| y.total_cmp(x));
    vals
}

/// Sum of singular values. Hermitian inputs use `Σ|λ_i|`.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    if a.is_square() && a.rows() > 0 && a.is_hermitian() {
        if let Ok(vals) = hermitian_eigenvalues(a) {
            return vals.iter().map(|v| v.abs()).sum();
        }
    }
    singular_values(a).iter().sum()
}

pub fn entrywise_one_norm(a: &ComplexMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm()).sum()
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dominant_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![real(2.0), real(1.0), real(-1.0)],
            vec![real(1.0), real(3.0), c64(0.0, 2.0)],
            vec![real(-1.0), c64(0.0, -2.0), real(3.0)],
        ])
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn eigenvalues_of_simple_matrices() {
        let id = hermitian_eigenvalues(&ComplexMatrix::identity(3)).unwrap();
        assert!(close(&id, &[1.0, 1.0, 1.0], 1e-12));
        let j = hermitian_eigenvalues(&ComplexMatrix::ones(3)).unwrap();
        assert!(close(&j, &[3.0, 0.0, 0.0], 1e-12));
        let d = hermitian_eigenvalues(&ComplexMatrix::from_real_diagonal(&[2.0, -1.0])).unwrap();
        assert!(close(&d, &[2.0, -1.0], 1e-12));
    }

    #[test]
    fn eigenvalue_errors() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigenvalues(&rect), Err(Error::NotSquare { .. })));
        let skew = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eigenvalues(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&ComplexMatrix::ones(3), DEFAULT_PSD_TOL).unwrap());
        let swap = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(!is_psd(&swap, DEFAULT_PSD_TOL).unwrap());
        assert!(is_psd(&dominant_x(), DEFAULT_PSD_TOL).unwrap());
        assert!(is_psd(&ComplexMatrix::zeros(2, 3), DEFAULT_PSD_TOL).is_err());
    }

    #[test]
    fn norms_of_all_ones() {
        let j = ComplexMatrix::ones(3);
        assert!((trace_norm(&j) - 3.0).abs() < 1e-12);
        assert!((entrywise_one_norm(&j) - 9.0).abs() < 1e-12);
        assert_eq!(entrywise_one_norm(&ComplexMatrix::zeros(4, 4)), 0.0);
        for n in 1..6 {
            assert!((trace_norm(&ComplexMatrix::identity(n)) - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_trace_norm_uses_svd() {
        // diag-free 2x2 nilpotent: singular values (3, 0)
        let a = ComplexMatrix::from_real_rows(&[[0.0, 3.0], [0.0, 0.0]]);
        assert!((trace_norm(&a) - 3.0).abs() < 1e-12);
        let rect = ComplexMatrix::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]);
        assert!((trace_norm(&rect) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_products() {
        let u = ComplexVector::from_real(&[1.0, 2.0]);
        let v = ComplexVector::from_real(&[3.0, 4.0]);
        assert_eq!(hadamard(&u, &v).unwrap(), ComplexVector::from_real(&[3.0, 8.0]));
        assert_eq!(hadamard(&u, &ComplexVector::ones(2)).unwrap(), u);
        let a = ComplexVector::new(vec![real(1.0), c64(0.0, 1.0)]).unwrap();
        assert_eq!(hadamard(&a, &a.conj()).unwrap(), ComplexVector::from_real(&[1.0, 1.0]));
        assert!(matches!(
            hadamard(&u, &ComplexVector::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(
            ComplexMatrix::from_row_major(1, 2, vec![real(f64::NAN), real(0.0)]),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![real(1.0)], vec![real(1.0), real(2.0)]]),
            Err(Error::Ragged { row: 1, .. })
        ));
        assert!(ComplexVector::new(vec![real(f64::INFINITY)]).is_err());
    }

    #[test]
    fn rank_and_kron() {
        assert_eq!(numerical_rank(&ComplexMatrix::ones(4), 1e-9), 1);
        assert_eq!(
            numerical_rank(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]), 1e-9),
            3
        );
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::ones(2));
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 1)], real(1.0));
        assert_eq!(k[(0, 2)], real(0.0));
    }
}
