use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{input, Result};
use crate::hermitian::C64;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let Some(deg) = NonZeroUsize::new(n) else {
        return input("quadrature needs at least one node");
    };
    let rule = GaussLegendre::new(deg);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    Ok(rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect())
}

/// Polar product grid on a disk: Gauss–Legendre panels in the radius times a
/// uniform angular grid.
#[derive(Clone, Debug)]
pub struct DomainGrid {
    breaks: Vec<f64>,
    n_r: usize,
    /// `(ρ, w)` with `w` already including the Jacobian `ρ`.
    radial: Vec<(f64, f64)>,
    angles: Vec<f64>,
}

impl DomainGrid {
    /// Single radial panel on the unit disk.
    pub fn unit_disk(n_r: usize, n_theta: usize) -> Result<Self> {
        Self::with_breaks(&[0.0, 1.0], n_r, n_theta)
    }

    /// Disk of radius `breaks.last()`, one Gauss–Legendre panel of `n_r`
    /// nodes between consecutive break points.
    pub fn with_breaks(breaks: &[f64], n_r: usize, n_theta: usize) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 {
            return input("radial break points must start at 0 and contain a panel");
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || !breaks.iter().all(|b| b.is_finite()) {
            return input("radial break points must be finite and strictly increasing");
        }
        if n_theta == 0 {
            return input("angular grid needs at least one node");
        }
        let mut radial = Vec::with_capacity(n_r * (breaks.len() - 1));
        for w in breaks.windows(2) {
            radial.extend(gauss_legendre(n_r, w[0], w[1])?.into_iter().map(|(x, wt)| (x, wt * x)));
        }
        let angles = (0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect();
        Ok(Self {
            breaks: breaks.to_vec(),
            n_r,
            radial,
            angles,
        })
    }

    /// Unit disk split at `kink`, with geometric panels of ratio at most
    /// `ratio` on both sides of it.
    pub fn graded(kink: f64, ratio: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(kink > 0.0 && kink < 1.0) || !(ratio > 1.0) {
            return input("need 0 < kink < 1 and ratio > 1");
        }
        let mut breaks = vec![0.0];
        breaks.push(kink);
        let mut b = kink;
        while b * ratio < 1.0 {
            b *= ratio;
            breaks.push(b);
        }
        breaks.push(1.0);
        Self::with_breaks(&breaks, n_r, n_theta)
    }

    pub fn radius(&self) -> f64 {
        *self.breaks.last().expect("at least one panel")
    }

    pub fn radial(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.angles.len() as f64
    }

    /// Nodes `z` with area weights, ring by ring.
    pub fn nodes(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        let dt = self.angular_weight();
        self.radial
            .iter()
            .flat_map(move |&(rho, w)| self.angles.iter().map(move |&th| (C64::from_polar(rho, th), w * dt)))
    }

    /// `∫ f dA` over the disk.
    pub fn integrate<F: Fn(C64) -> f64>(&self, f: F) -> f64 {
        self.nodes().map(|(z, w)| w * f(z)).sum()
    }

    /// Same grid with both resolutions doubled.
    pub fn refined(&self) -> Result<Self> {
        Self::with_breaks(&self.breaks, 2 * self.n_r, 2 * self.angles.len())
    }
}
