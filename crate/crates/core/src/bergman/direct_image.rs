use rand::Rng;

use super::gram::{gram, BasisSpec, WeightFamily};
use super::grid::DomainGrid;
use crate::bundle::{chern_curvature, curvature_biform, BiForm, MetricField};
use crate::error::{input, Result};
use crate::hermitian::C64;
use crate::positivity::{rank_k_min, PositivityQuery};
use crate::sampling;

/// The Gram matrix `t ↦ G(t)` as a metric on the trivial bundle with fiber
/// the truncated Bergman space.
pub fn bergman_metric(w: &WeightFamily, basis: BasisSpec, grid: &DomainGrid, step: f64) -> MetricField {
    let (w2, g2) = (w.clone(), grid.clone());
    MetricField::new(w.m(), basis.len(), move |t| Ok(gram(&w2, t, basis, &g2)?.matrix().clone()))
        .finite_difference(step)
        .with_chart_radius(w.base_radius())
}

/// Curvature of the truncated Bergman bundle at `t0`, indexed by
/// `(base direction, basis element)`.
pub fn direct_image_curvature(
    w: &WeightFamily,
    t0: &[C64],
    basis: BasisSpec,
    grid: &DomainGrid,
    step: f64,
) -> Result<BiForm> {
    if !(1..=2).contains(&w.m()) {
        return input(format!("base dimension must be 1 or 2, got {}", w.m()));
    }
    let metric = bergman_metric(w, basis, grid, step);
    Ok(curvature_biform(&chern_curvature(&metric, t0)?))
}

#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    /// Smallest curvature eigenvalue of `z ↦ h(z, t)` over the samples, relative to scale.
    pub fiber_min: f64,
    /// Smallest rank-`k` value of the curvature on `𝔻 × B`, relative to scale.
    pub total_min: f64,
    pub k: usize,
    pub pass: bool,
}

/// Samples the curvature of the weight: Nakano-nonnegative along the disk
/// and `k`-nonnegative on the total space.
pub fn check_hypotheses(w: &WeightFamily, k: usize, samples: usize, seed: u64) -> Result<HypothesisCheck> {
    let mut rng = sampling::rng(seed);
    let total = w.total_metric();
    let t_radius = (0.5 * w.base_radius()).min(0.5);
    let (mut fiber_min, mut total_min) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..samples {
        let z = sampling::chart_point(&mut rng, 1, 0.9)[0];
        let t = sampling::chart_point(&mut rng, w.m(), t_radius);
        let c = curvature_biform(&chern_curvature(&w.fiber_metric(&t), &[z])?);
        fiber_min = fiber_min.min(c.min_eigenvalue() / c.scale());

        let x: Vec<C64> = std::iter::once(z).chain(t.iter().copied()).collect();
        let c = curvature_biform(&chern_curvature(&total, &x)?);
        let v = rank_k_min(&PositivityQuery::new(c.clone(), k).restarts(8).seed(rng.random()))?.min_value;
        total_min = total_min.min(v / c.scale());
    }
    Ok(HypothesisCheck {
        fiber_min,
        total_min,
        k,
        pass: fiber_min >= -1e-6 && total_min >= -1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::DEFAULT_STEP;

    fn grid() -> DomainGrid {
        DomainGrid::unit_disk(20, 40).unwrap()
    }

    #[test]
    fn parameter_independent_weight_is_flat() {
        let w = WeightFamily::diagonal_gaussian(&[1.0, 2.0], 1);
        let c = direct_image_curvature(&w, &[C64::new(0.1, 0.2)], BasisSpec::new(4, 2), &grid(), DEFAULT_STEP).unwrap();
        assert!(c.matrix().frobenius_norm() < 1e-6);
    }

    #[test]
    fn translated_gaussian_is_nonnegative() {
        let w = WeightFamily::translated_gaussian();
        let c = direct_image_curvature(&w, &[C64::new(0.1, -0.05)], BasisSpec::new(6, 1), &grid(), DEFAULT_STEP).unwrap();
        assert!(c.min_eigenvalue() >= -1e-4 * c.scale(), "{}", c.min_eigenvalue());
    }

    #[test]
    fn hypotheses_hold_for_suite_weights() {
        assert!(check_hypotheses(&WeightFamily::translated_gaussian(), 1, 4, 1).unwrap().pass);
        assert!(check_hypotheses(&WeightFamily::coupled_gaussian(1.0), 2, 4, 2).unwrap().pass);
    }

    #[test]
    fn strong_coupling_fails_hypotheses() {
        assert!(!check_hypotheses(&WeightFamily::coupled_gaussian(3.0), 1, 8, 3).unwrap().pass);
    }

    #[test]
    fn base_dimension_is_checked() {
        let w = WeightFamily::trivial(1, 3);
        let r = direct_image_curvature(&w, &[C64::new(0.0, 0.0); 3], BasisSpec::new(1, 1), &grid(), DEFAULT_STEP);
        assert!(r.is_err());
    }
}
