use rand::Rng;

use super::LineWeight;
use crate::error::{input, Result};
use crate::fd::{self, DEFAULT_STEP};
use crate::hermitian::{HermitianMatrix, C64};
use crate::sampling;

/// Coordinates beyond this modulus are outside the sampled chart.
pub const PROJECTIVE_CHART_RADIUS: f64 = 3.0;

/// Complex Hessian of `φ̂(z, w) = (r+1)·log Σ_i e^{φ_i(z)}|s^i(w)|² − Σ_i φ_i(z)`
/// with `s = (1, w_2, …, w_r)`, ordered `(z_1..z_n, w_2..w_r)`.
pub fn projectivized_twist_curvature(phis: &[LineWeight], z: &[C64], w: &[C64]) -> Result<HermitianMatrix> {
    let r = phis.len();
    if r < 2 {
        return input("projectivized twist needs at least two summands");
    }
    let n = phis[0].n();
    if phis.iter().any(|p| p.n() != n) || z.len() != n || w.len() != r - 1 {
        return input("point does not match the chart dimensions of the weights");
    }
    if z.iter().chain(w).any(|c| c.norm() + 2.0 * DEFAULT_STEP > PROJECTIVE_CHART_RADIUS) {
        return input(format!("stencil leaves the chart |·| < {PROJECTIVE_CHART_RADIUS}"));
    }
    let potential = |x: &[C64]| -> Result<C64> {
        let (zz, ww) = x.split_at(n);
        let mut sum = 0.0;
        let mut tr = 0.0;
        for (i, p) in phis.iter().enumerate() {
            let v = p.value(zz)?;
            let s2 = if i == 0 { 1.0 } else { ww[i - 1].norm_sqr() };
            sum += v.exp() * s2;
            tr += v;
        }
        Ok(C64::new((r as f64 + 1.0) * sum.ln() - tr, 0.0))
    };
    let x: Vec<C64> = z.iter().chain(w).copied().collect();
    let (_, _, hess) = fd::scalar_jet(&potential, &x, DEFAULT_STEP)?;
    Ok(HermitianMatrix::symmetrized(hess))
}

/// Weights `λ_i = e^{φ_i}|s^i|² / Σ_j e^{φ_j}|s^j|²` at `(z, w)`.
pub fn fiber_weights(phis: &[LineWeight], z: &[C64], w: &[C64]) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(phis.len());
    for (i, p) in phis.iter().enumerate() {
        let s2 = if i == 0 { 1.0 } else { w[i - 1].norm_sqr() };
        v.push(p.value(z)?.exp() * s2);
    }
    let total: f64 = v.iter().sum();
    Ok(v.into_iter().map(|x| x / total).collect())
}

/// `(r+1)·Σλ_i ω_i − Σ ω_i`.
pub fn split_twist_form(omegas: &[HermitianMatrix], lambda: &[f64]) -> HermitianMatrix {
    let r = omegas.len() as f64;
    let n = omegas[0].dim();
    let mut acc = HermitianMatrix::zeros(n);
    for (o, l) in omegas.iter().zip(lambda) {
        acc = acc.add(&o.scale_re((r + 1.0) * l - 1.0));
    }
    acc
}

/// Base block of a Hessian after eliminating the trailing fiber block.
pub fn fiber_schur_complement(hess: &HermitianMatrix, n: usize) -> Result<HermitianMatrix> {
    let m = hess.matrix();
    let f = hess.dim() - n;
    let a = m.block(0, 0, n, n);
    let b = m.block(0, n, n, f);
    let d = HermitianMatrix::new(m.block(n, n, f, f))?;
    let x = d.cholesky()?.solve_matrix(&b.adjoint());
    HermitianMatrix::new(&a - &(&b * &x))
}

#[derive(Clone, Debug)]
pub struct SplitCriterion {
    pub semipositive: bool,
    /// Smallest value of `Σλ_iω_i(ξ,ξ̄) − Σω_i(ξ,ξ̄)/(r+1)` found over unit `ξ`.
    pub min_value: f64,
    /// First violating simplex point and direction.
    pub witness: Option<(Vec<f64>, Vec<C64>)>,
}

/// Tests `Σλ_iω_i ≥ (1/(r+1))Σω_i` at the simplex vertices and `samples`
/// seeded simplex points, minimizing over unit directions at each.
pub fn split_twist_criterion(omegas: &[HermitianMatrix], samples: usize, seed: u64) -> Result<SplitCriterion> {
    let r = omegas.len();
    if r < 2 {
        return input("criterion needs at least two curvature forms");
    }
    let n = omegas[0].dim();
    if omegas.iter().any(|o| o.dim() != n) {
        return input("curvature forms have different dimensions");
    }
    let scale = omegas.iter().map(HermitianMatrix::scale).fold(1.0, f64::max);
    let mut mean = HermitianMatrix::zeros(n);
    for o in omegas {
        mean = mean.add(&o.scale_re(1.0 / (r as f64 + 1.0)));
    }

    let mut points: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let e: Vec<f64> = (0..r).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let t: f64 = e.iter().sum();
        points.push(e.into_iter().map(|x| x / t).collect());
    }

    let mut min_value = f64::INFINITY;
    let mut witness = None;
    for lambda in points {
        let mut form = mean.scale_re(-1.0);
        for (o, l) in omegas.iter().zip(&lambda) {
            form = form.add(&o.scale_re(*l));
        }
        let e = form.eigh();
        let v = e.values[0];
        if v < min_value {
            min_value = v;
        }
        if v < -1e-12 * scale && witness.is_none() {
            witness = Some((lambda, e.vector(0)));
        }
    }
    Ok(SplitCriterion {
        semipositive: witness.is_none(),
        min_value,
        witness,
    })
}
