//! Dense complex matrices, a row-sorted sparse companion for applying
//! operators with few nonzeros, and a Hermitian eigenvalue routine.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data; `data.len()` must be `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `|psi⟩⟨psi|`.
    pub fn outer(psi: &[Complex64]) -> Self {
        Self::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj())
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Sum of the diagonal (of the leading square block for non-square input).
    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product; the left factor's index varies slowest.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        ComplexMatrix::from_fn(rows, cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: Complex64, x: &ComplexMatrix) {
        assert_eq!(self.shape(), x.shape(), "axpy shape mismatch");
        for (y, &xv) in self.data.iter_mut().zip(&x.data) {
            *y += a * xv;
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// The matrix is embedded as the real symmetric `[[Re, -Im], [Im, Re]]`,
    /// whose spectrum is that of the input with every eigenvalue doubled, and
    /// diagonalized by cyclic Jacobi rotations.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                op: "hermitian_eigenvalues",
                left: self.shape(),
                right: self.shape(),
            });
        }
        let n = self.rows;
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for r in 0..n {
            for c in 0..n {
                // symmetrize so small anti-Hermitian noise does not bias the result
                let z = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                a[r * m + c] = z.re;
                a[(r + n) * m + (c + n)] = z.re;
                a[r * m + (c + n)] = -z.im;
                a[(r + n) * m + c] = z.im;
            }
        }
        let mut vals = jacobi_eigenvalues(&mut a, m);
        vals.sort_by(|x, y| x.total_cmp(y));
        Ok(vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
    }

    pub fn min_hermitian_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .hermitian_eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0))
    }
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    let total: f64 = a.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(ONE, rhs);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.axpy(-ONE, rhs);
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Nonzero entries of an operator, sorted by row.
///
/// Operators on the truncated qubit-resonator space are dense in storage but
/// have O(N) nonzeros, so products against a dense state are done through this.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows {
            for c in 0..m.cols {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        SparseMatrix {
            rows: m.rows,
            cols: m.cols,
            entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `out += s * self * x`.
    pub fn mul_left_into(&self, x: &ComplexMatrix, s: Complex64, out: &mut ComplexMatrix) {
        assert_eq!(self.cols, x.rows, "sparse left product shape mismatch");
        assert_eq!(out.shape(), (self.rows, x.cols), "sparse left product output shape");
        let n = x.cols;
        for &(r, c, v) in &self.entries {
            let w = s * v;
            let src = &x.data[c * n..(c + 1) * n];
            let dst = &mut out.data[r * n..(r + 1) * n];
            for (d, &xv) in dst.iter_mut().zip(src) {
                *d += w * xv;
            }
        }
    }

    /// `out += s * x * self`.
    pub fn mul_right_into(&self, x: &ComplexMatrix, s: Complex64, out: &mut ComplexMatrix) {
        assert_eq!(x.cols, self.rows, "sparse right product shape mismatch");
        assert_eq!(out.shape(), (x.rows, self.cols), "sparse right product output shape");
        let (xc, oc) = (x.cols, out.cols);
        for &(r, c, v) in &self.entries {
            let w = s * v;
            for i in 0..x.rows {
                out.data[i * oc + c] += x.data[i * xc + r] * w;
            }
        }
    }
}
