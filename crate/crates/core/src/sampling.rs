//! Seeded random generators for matrices, tensors and chart points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{ComplexMatrix, HermitianMatrix, TensorPoint, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// GUE-type Hermitian matrix.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrized(matrix(rng, n, n))
}

/// `A·A† + n·I`, comfortably positive definite.
pub fn positive_definite<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let a = matrix(rng, n, n);
    let g = &(&a * &a.adjoint()) + &ComplexMatrix::identity(n).scale_re(n as f64 * 0.5);
    HermitianMatrix::symmetrized(g)
}

/// Haar-distributed unitary via Gram–Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vec(rng, n);
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Unit-Frobenius tensor of rank at most `k`.
pub fn tensor_of_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize, k: usize) -> TensorPoint {
    let x = matrix(rng, n, k);
    let y = matrix(rng, r, k);
    let t = &x * &y.transpose();
    TensorPoint::new(t).expect("finite").normalized()
}

/// Chart point with independent coordinates uniform in the disk of `radius`.
pub fn chart_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let rho = radius * rng.random::<f64>().sqrt();
            let th = std::f64::consts::TAU * rng.random::<f64>();
            C64::from_polar(rho, th)
        })
        .collect()
}
