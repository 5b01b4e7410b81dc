//! Weighted Bergman spaces of polynomials on the unit disk: Gram matrices,
//! minimal extensions, direct-image curvature and the degeneration checks.

mod degeneration;
mod direct_image;
mod dual_norm;
mod gram;
mod grid;
mod homogeneous;

pub use degeneration::{coarea_limit, liminf_bound_check, CoareaValue, LiminfCheck};
pub use direct_image::{bergman_metric, check_hypotheses, direct_image_curvature, HypothesisCheck};
pub use dual_norm::{dual_norm, dual_norm_track, linspace, DualNormConfig, DualNormTrack};
pub use gram::{
    evaluation_constraints, gram, minimal_extension, ot_bound_check, BasisSpec, Extension, GramMatrix, OtBound,
    ScaledSolver, WeightFamily, WeightFn, MAX_GRAM_CONDITION,
};
pub use grid::{gauss_legendre, DomainGrid};
pub use homogeneous::{
    evaluate_expansion, homogeneous_coefficients, reconstruction_error, sample_circle, weighted_norm_decomposition,
    CircleSamples, WeightedNorm,
};
