//! Dense complex linear algebra: matrices, Hermitian eigenproblems, singular
//! values and the rank decisions every other module relies on.

mod eigen;
mod factor;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;

pub use eigen::{eigh, Eigh};
pub use factor::Cholesky;
pub use svd::{singular_values, svd, Svd};

use crate::error::{input, Error, Result};

/// Relative tolerance separating analytic-zero singular values from noise.
pub const RANK_TOL: f64 = 1e-9;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Scale used by every relative tolerance: `max(1, ‖·‖_F)`.
pub fn scale_of(norm: f64) -> f64 {
    norm.max(1.0)
}

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return input(format!(
                "matrix data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return input("matrix has non-finite entries");
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(*d, 0.0);
        }
        m
    }

    /// Column vector from a slice.
    pub fn column_vector(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Kronecker product, row index `(i, μ) ↦ i·rhs.rows + μ`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (p, q) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * p, self.cols * q, |a, b| {
            self[(a / p, b / q)] * rhs[(a % p, b % q)]
        })
    }

    /// Sub-block `[r0, r0+nr) × [c0, c0+nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// ‖A − A†‖_F.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn check_same_shape(&self, rhs: &Self) {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs);
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
        self.check_same_shape(rhs);
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
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Square matrix equal to its conjugate transpose.
///
/// Construction symmetrizes `(A + A†)/2`, so the stored matrix is Hermitian to
/// rounding regardless of small asymmetries in the input.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return input(format!("Hermitian matrix must be square, got {}x{}", m.rows, m.cols));
        }
        if !m.is_finite() {
            return input("Hermitian matrix has non-finite entries");
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(m: ComplexMatrix) -> Self {
        let n = m.rows;
        let inner = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Self { inner }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn scale(&self) -> f64 {
        scale_of(self.frobenius_norm())
    }

    /// Entrywise conjugate (equivalently the transpose) of the matrix.
    pub fn conj(&self) -> Self {
        Self {
            inner: self.inner.conj(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale_re(s),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            inner: &self.inner + &rhs.inner,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            inner: &self.inner - &rhs.inner,
        }
    }

    /// `U† H U` for a square `U`.
    pub fn congruence(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(&(&u.adjoint() * &self.inner) * u)
    }

    /// `v† H v`, real for Hermitian `H`.
    pub fn quadratic(&self, v: &[C64]) -> f64 {
        let hv = self.inner.matvec(v);
        v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    pub fn eigh(&self) -> Eigh {
        eigh(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh().values[0]
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::new(self)
    }

    /// Ratio of extreme eigenvalues; infinite unless positive definite.
    pub fn condition_number(&self) -> f64 {
        let e = self.eigh();
        let lo = e.values[0];
        let hi = *e.values.last().unwrap_or(&0.0);
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Inverse of an invertible Hermitian matrix via its eigen-decomposition.
    pub fn inverse(&self) -> Result<Self> {
        let e = self.eigh();
        let floor = 1e-12 * self.scale();
        if e.values.iter().any(|l| l.abs() <= floor) {
            return Err(Error::DegenerateMetric("matrix is numerically singular".into()));
        }
        let inv: Vec<f64> = e.values.iter().map(|l| 1.0 / l).collect();
        let d = HermitianMatrix::from_real_diagonal(&inv);
        Ok(d.congruence(&e.vectors.adjoint()))
    }

    /// Inverse of a positive-definite matrix; fails when the condition number
    /// exceeds `max_condition`.
    pub fn pd_inverse(&self, max_condition: f64) -> Result<Self> {
        let cond = self.condition_number();
        if !(cond <= max_condition) {
            return Err(Error::DegenerateMetric(format!(
                "matrix not positive definite or condition number {cond:.3e} exceeds {max_condition:.1e}"
            )));
        }
        Ok(Self::symmetrized(self.cholesky()?.inverse()))
    }
}

/// Tensor `Σ coeffs[i][μ] ∂_i ⊗ e_μ` in `ℂⁿ ⊗ ℂʳ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoint {
    coeffs: ComplexMatrix,
}

impl TensorPoint {
    pub fn new(coeffs: ComplexMatrix) -> Result<Self> {
        if !coeffs.is_finite() {
            return input("tensor has non-finite coefficients");
        }
        Ok(Self { coeffs })
    }

    /// From a flat vector indexed row-major by `(i, μ)`.
    pub fn from_vec(n: usize, r: usize, v: Vec<C64>) -> Result<Self> {
        Self::new(ComplexMatrix::new(n, r, v)?)
    }

    /// Decomposable tensor `ξ ⊗ v`.
    pub fn decomposable(xi: &[C64], v: &[C64]) -> Self {
        Self {
            coeffs: ComplexMatrix::from_fn(xi.len(), v.len(), |i, m| xi[i] * v[m]),
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn r(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn as_slice(&self) -> &[C64] {
        self.coeffs.as_slice()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs.frobenius_norm()
    }

    pub fn normalized(&self) -> Self {
        let s = self.frobenius_norm();
        if s == 0.0 {
            return self.clone();
        }
        Self {
            coeffs: self.coeffs.scale_re(1.0 / s),
        }
    }

    /// Number of singular values above `RANK_TOL` times the largest.
    pub fn rank(&self) -> usize {
        let s = singular_values(&self.coeffs);
        match s.first() {
            Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > RANK_TOL * top).count(),
            _ => 0,
        }
    }
}

/// Sesquilinear pairing `Σ Q[a][b] T1[a] conj(T2[b])`, tensors flattened by `(i, μ)`.
pub fn biform_apply(q: &HermitianMatrix, t1: &TensorPoint, t2: &TensorPoint) -> Result<C64> {
    let d = q.dim();
    if t1.as_slice().len() != d || t2.as_slice().len() != d {
        return input(format!(
            "form of dimension {d} applied to tensors of sizes {} and {}",
            t1.as_slice().len(),
            t2.as_slice().len()
        ));
    }
    if t1.n() != t2.n() {
        return input("tensors have different chart dimensions");
    }
    let m = q.matrix();
    let a = t1.as_slice();
    let b = t2.as_slice();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..d {
            row += m[(i, j)] * b[j].conj();
        }
        acc += a[i] * row;
    }
    Ok(acc)
}
