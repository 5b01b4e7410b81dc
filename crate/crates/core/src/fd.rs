//! Central finite differences in Wirtinger form with one Richardson level.

use crate::error::Result;
use crate::hermitian::{ComplexMatrix, C64, I};

/// Default step for metric derivatives.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Value, `∂_a f` and `∂_a ∂_b̄ f` of a matrix-valued function on `ℂⁿ`.
#[derive(Clone, Debug)]
pub struct WirtingerJet {
    pub value: ComplexMatrix,
    pub d: Vec<ComplexMatrix>,
    /// Row-major in `(a, b)`.
    pub dd: Vec<ComplexMatrix>,
}

impl WirtingerJet {
    pub fn dd(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.dd[a * self.d.len() + b]
    }
}

fn shifted(z: &[C64], moves: &[(usize, f64)]) -> Vec<C64> {
    let n = z.len();
    let mut w = z.to_vec();
    for &(u, h) in moves {
        if u < n {
            w[u] += h;
        } else {
            w[u - n] += I * h;
        }
    }
    w
}

struct Raw {
    grad: Vec<ComplexMatrix>,
    hess: Vec<ComplexMatrix>,
}

fn raw<F>(f: &F, z: &[C64], f0: &ComplexMatrix, h: f64) -> Result<Raw>
where
    F: Fn(&[C64]) -> Result<ComplexMatrix>,
{
    let m = 2 * z.len();
    let mut plus = Vec::with_capacity(m);
    let mut minus = Vec::with_capacity(m);
    for u in 0..m {
        plus.push(f(&shifted(z, &[(u, h)]))?);
        minus.push(f(&shifted(z, &[(u, -h)]))?);
    }
    let grad = (0..m).map(|u| (&plus[u] - &minus[u]).scale_re(0.5 / h)).collect();
    let mut hess = vec![ComplexMatrix::zeros(f0.rows(), f0.cols()); m * m];
    for u in 0..m {
        let d2 = &(&plus[u] + &minus[u]) - &f0.scale_re(2.0);
        hess[u * m + u] = d2.scale_re(1.0 / (h * h));
        for v in u + 1..m {
            let pp = f(&shifted(z, &[(u, h), (v, h)]))?;
            let pm = f(&shifted(z, &[(u, h), (v, -h)]))?;
            let mp = f(&shifted(z, &[(u, -h), (v, h)]))?;
            let mm = f(&shifted(z, &[(u, -h), (v, -h)]))?;
            let mixed = (&(&pp - &pm) - &(&mp - &mm)).scale_re(0.25 / (h * h));
            hess[v * m + u] = mixed.clone();
            hess[u * m + v] = mixed;
        }
    }
    Ok(Raw { grad, hess })
}

fn richardson(coarse: &ComplexMatrix, fine: &ComplexMatrix) -> ComplexMatrix {
    (&fine.scale_re(4.0) - coarse).scale_re(1.0 / 3.0)
}

/// Wirtinger jet of `f` at `z` by central differences with steps `h` and `h/2`.
pub fn wirtinger_jet<F>(f: &F, z: &[C64], h: f64) -> Result<WirtingerJet>
where
    F: Fn(&[C64]) -> Result<ComplexMatrix>,
{
    let n = z.len();
    let m = 2 * n;
    let value = f(z)?;
    let coarse = raw(f, z, &value, h)?;
    let fine = raw(f, z, &value, 0.5 * h)?;
    let grad: Vec<ComplexMatrix> = (0..m).map(|u| richardson(&coarse.grad[u], &fine.grad[u])).collect();
    let hess: Vec<ComplexMatrix> = (0..m * m)
        .map(|k| richardson(&coarse.hess[k], &fine.hess[k]))
        .collect();

    let d = (0..n)
        .map(|a| (&grad[a] - &grad[n + a].scale(I)).scale_re(0.5))
        .collect();
    let mut dd = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (xa, ya, xb, yb) = (a, n + a, b, n + b);
            let re = &hess[xa * m + xb] + &hess[ya * m + yb];
            let im = &hess[xa * m + yb] - &hess[ya * m + xb];
            dd.push((&re + &im.scale(I)).scale_re(0.25));
        }
    }
    Ok(WirtingerJet { value, d, dd })
}

/// Scalar convenience wrapper: returns `(value, ∂f, ∂∂̄f)` with `∂∂̄f` as an
/// `n×n` matrix indexed `(a, b)`.
pub fn scalar_jet<F>(f: &F, z: &[C64], h: f64) -> Result<(C64, Vec<C64>, ComplexMatrix)>
where
    F: Fn(&[C64]) -> Result<C64>,
{
    let g = |w: &[C64]| f(w).map(|v| ComplexMatrix::from_fn(1, 1, |_, _| v));
    let j = wirtinger_jet(&g, z, h)?;
    let n = z.len();
    let dd = ComplexMatrix::from_fn(n, n, |a, b| j.dd(a, b)[(0, 0)]);
    Ok((j.value[(0, 0)], j.d.iter().map(|m| m[(0, 0)]).collect(), dd))
}
