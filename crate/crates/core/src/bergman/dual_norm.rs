use std::f64::consts::PI;

use rayon::prelude::*;

use super::gram::{gram, BasisSpec, WeightFamily};
use super::grid::DomainGrid;
use crate::error::{input, Result};
use crate::hermitian::C64;

#[derive(Clone, Debug)]
pub struct DualNormConfig {
    pub degree: usize,
    /// Gauss–Legendre nodes per radial panel.
    pub n_r: usize,
    pub n_theta: usize,
    /// Ratio of consecutive radial break points outside the kink.
    pub ratio: f64,
}

impl Default for DualNormConfig {
    fn default() -> Self {
        Self {
            degree: 12,
            n_r: 24,
            n_theta: 64,
            ratio: 1.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualNormTrack {
    pub t: Vec<f64>,
    /// `log ‖ξ_σ‖²_{t*}`.
    pub log_norm: Vec<f64>,
    pub min_first_difference: f64,
    pub min_second_difference: f64,
    pub monotone: bool,
    pub convex: bool,
    /// `h(σ, σ)(0)/π`.
    pub bound: f64,
}

impl DualNormTrack {
    /// `‖ξ_σ‖²_{t*} / bound` at the most negative `t`.
    pub fn limit_ratio(&self) -> f64 {
        self.log_norm[0].exp() / self.bound
    }
}

/// Squared dual norm of `F ↦ h(F(0), σ)` for the norm
/// `e^{−t}∫ e^{−pψ_t} h(F, F) dA`, with `ψ_t = max(log|z|² − t, 0)`.
pub fn dual_norm(base: &WeightFamily, sigma: &[C64], p: f64, t: f64, cfg: &DualNormConfig) -> Result<f64> {
    if sigma.len() != base.r() {
        return input("σ has the wrong rank");
    }
    if !(t < 0.0) {
        return input("t must be negative");
    }
    let basis = BasisSpec::new(cfg.degree, base.r());
    let family = WeightFamily::psi_family(base, p);
    let grid = DomainGrid::graded((0.5 * t).exp(), cfg.ratio, cfg.n_r, cfg.n_theta)?;
    let g = gram(&family, &[C64::new(t, 0.0)], basis, &grid)?.scaled((-t).exp());
    let a0 = base.evaluate(C64::new(0.0, 0.0), &vec![C64::new(0.0, 0.0); base.m()])?;
    let mut ell = vec![C64::new(0.0, 0.0); basis.len()];
    for lam in 0..base.r() {
        ell[basis.index(0, lam)] = (0..base.r()).map(|mu| a0.matrix()[(lam, mu)] * sigma[mu].conj()).sum();
    }
    let x = g.solver()?.solve(&ell);
    Ok(ell.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum())
}

/// `t ↦ log ‖ξ_σ‖²_{t*}` on an increasing grid, with its first and second
/// differences.
pub fn dual_norm_track(base: &WeightFamily, sigma: &[C64], p: f64, ts: &[f64], cfg: &DualNormConfig) -> Result<DualNormTrack> {
    if ts.len() < 3 || ts.windows(2).any(|w| !(w[1] > w[0])) {
        return input("t grid needs at least three increasing points");
    }
    let log_norm = ts
        .par_iter()
        .map(|&t| dual_norm(base, sigma, p, t, cfg).map(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    let first: Vec<f64> = log_norm.windows(2).map(|w| w[1] - w[0]).collect();
    let second: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    let min_first_difference = first.iter().copied().fold(f64::INFINITY, f64::min);
    let min_second_difference = second.iter().copied().fold(f64::INFINITY, f64::min);
    let a0 = base.evaluate(C64::new(0.0, 0.0), &vec![C64::new(0.0, 0.0); base.m()])?;
    Ok(DualNormTrack {
        t: ts.to_vec(),
        log_norm,
        min_first_difference,
        min_second_difference,
        monotone: min_first_difference >= -1e-6,
        convex: min_second_difference >= -1e-6,
        bound: a0.conj().quadratic(sigma) / PI,
    })
}

/// `n` equally spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
