use super::{ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Cholesky factor `H = L·L†` of a positive-definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    pub fn new(h: &HermitianMatrix) -> Result<Self> {
        let n = h.dim();
        let a = h.matrix();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(Error::DegenerateMetric(format!(
                    "matrix is not positive definite (pivot {j} = {d:.3e})"
                )));
            }
            let d = d.sqrt();
            l[(j, j)] = C64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &ComplexMatrix {
        &self.l
    }

    /// Solves `H x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.l[(i, k)] * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.l[(k, i)].conj() * y[k];
                y[i] -= t;
            }
            y[i] /= self.l[(i, i)];
        }
        y
    }

    /// Solves `H X = B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve(&b.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve_matrix(&ComplexMatrix::identity(self.l.rows()))
    }

    /// `L^{-†}`, whose columns are orthonormal for the form `H`: `W† H W = I`.
    pub fn whitening(&self) -> ComplexMatrix {
        let n = self.l.rows();
        // Solve L† W = I by back substitution.
        let mut w = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            for i in (0..n).rev() {
                let mut s = if i == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * w[(k, col)];
                }
                w[(i, col)] = s / self.l[(i, i)];
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_pd;

    #[test]
    fn solves_and_inverts() {
        let h = random_pd(5, 2);
        let ch = h.cholesky().unwrap();
        let x: Vec<C64> = (0..5).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let b = h.matrix().matvec(&x);
        let y = ch.solve(&b);
        for (a, c) in x.iter().zip(&y) {
            assert!((a - c).norm() < 1e-10);
        }
        let id = h.matrix() * &ch.inverse();
        assert!((&id - &ComplexMatrix::identity(5)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn whitening_orthonormalizes() {
        let h = random_pd(4, 8);
        let w = h.cholesky().unwrap().whitening();
        let g = h.congruence(&w);
        assert!((&g.into_matrix() - &ComplexMatrix::identity(4)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn rejects_indefinite() {
        let h = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(h.cholesky(), Err(Error::DegenerateMetric(_))));
        assert!(h.pd_inverse(1e10).is_err());
    }
}
