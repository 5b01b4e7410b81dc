//! Chart-local Hermitian metrics, Chern curvature and the constructors for
//! tautological, quotient and split bundles.

mod constructors;
mod curvature;
mod split;

use std::fmt;
use std::sync::Arc;

pub use constructors::{
    conformal_twist, fubini_study_weight, o_minus1_metric, quotient_metric, split_bundle, tangent_pn_metric,
    tensor_line, twisted_quotient,
};
pub use curvature::{
    chern_curvature, curvature_biform, dual_metric, duality_residual, twist_residual, BiForm, CurvaturePoint,
};
pub use split::{
    fiber_schur_complement, fiber_weights, projectivized_twist_curvature, split_twist_criterion, split_twist_form,
    SplitCriterion, PROJECTIVE_CHART_RADIUS,
};

use crate::error::{input, Error, Result};
use crate::fd::{self, DEFAULT_STEP};
use crate::hermitian::{ComplexMatrix, HermitianMatrix, C64};

/// Metric matrix `A` with `A[λ][μ] = h(e_λ, e_μ)` and its first and mixed
/// second Wirtinger derivatives.
#[derive(Clone, Debug)]
pub struct Jet {
    pub h: HermitianMatrix,
    /// `∂_a A`.
    pub d: Vec<ComplexMatrix>,
    /// `∂_a ∂_b̄ A`, row-major in `(a, b)`.
    pub dd: Vec<ComplexMatrix>,
}

impl Jet {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn dd(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.dd[a * self.n() + b]
    }

    /// `∂_b̄ A = (∂_b A)†`.
    pub fn dbar(&self, b: usize) -> ComplexMatrix {
        self.d[b].adjoint()
    }
}

pub type Evaluator = Arc<dyn Fn(&[C64]) -> Result<HermitianMatrix> + Send + Sync>;
pub type JetFn = Arc<dyn Fn(&[C64]) -> Result<Jet> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMode {
    ClosedForm,
    FiniteDifference { step: f64 },
}

/// Smooth Hermitian metric of rank `r` on a chart of `ℂⁿ`.
#[derive(Clone)]
pub struct MetricField {
    n: usize,
    r: usize,
    eval: Evaluator,
    jet: Option<JetFn>,
    mode: DerivativeMode,
    chart_radius: f64,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("n", &self.n)
            .field("r", &self.r)
            .field("mode", &self.mode)
            .field("chart_radius", &self.chart_radius)
            .finish()
    }
}

impl MetricField {
    /// Metric given by samples only; derivatives by finite differences.
    pub fn new<F>(n: usize, r: usize, eval: F) -> Self
    where
        F: Fn(&[C64]) -> Result<HermitianMatrix> + Send + Sync + 'static,
    {
        Self {
            n,
            r,
            eval: Arc::new(eval),
            jet: None,
            mode: DerivativeMode::FiniteDifference { step: DEFAULT_STEP },
            chart_radius: f64::INFINITY,
        }
    }

    /// Metric with closed-form derivatives.
    pub fn with_jet<F>(n: usize, r: usize, jet: F) -> Self
    where
        F: Fn(&[C64]) -> Result<Jet> + Send + Sync + 'static,
    {
        let jet: JetFn = Arc::new(jet);
        let j2 = jet.clone();
        Self {
            n,
            r,
            eval: Arc::new(move |z| Ok(j2(z)?.h)),
            jet: Some(jet),
            mode: DerivativeMode::ClosedForm,
            chart_radius: f64::INFINITY,
        }
    }

    /// Forces finite differences with the given step even when closed forms exist.
    pub fn finite_difference(mut self, step: f64) -> Self {
        self.mode = DerivativeMode::FiniteDifference { step };
        self
    }

    /// Restricts the chart to the polydisk `|z_a| < radius`.
    pub fn with_chart_radius(mut self, radius: f64) -> Self {
        self.chart_radius = radius;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn chart_radius(&self) -> f64 {
        self.chart_radius
    }

    pub(crate) fn closed_jet(&self) -> Option<&JetFn> {
        self.jet.as_ref()
    }

    fn check_point(&self, z: &[C64], margin: f64) -> Result<()> {
        if z.len() != self.n {
            return input(format!("chart point has {} coordinates, expected {}", z.len(), self.n));
        }
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return input("chart point is not finite");
        }
        if z.iter().any(|w| w.norm() + margin >= self.chart_radius) {
            return input(format!(
                "point (with stencil margin {margin:.1e}) leaves the chart of radius {}",
                self.chart_radius
            ));
        }
        Ok(())
    }

    /// Metric at `z`, checked positive definite.
    pub fn evaluate(&self, z: &[C64]) -> Result<HermitianMatrix> {
        self.check_point(z, 0.0)?;
        let h = (self.eval)(z)?;
        if h.dim() != self.r {
            return input(format!("evaluator returned rank {} metric, expected {}", h.dim(), self.r));
        }
        h.cholesky().map_err(|_| {
            Error::DegenerateMetric(format!("metric is not positive definite at {z:?}"))
        })?;
        Ok(h)
    }

    /// Metric and derivatives at `z` according to the derivative mode.
    pub fn jet(&self, z: &[C64]) -> Result<Jet> {
        match (self.mode, &self.jet) {
            (DerivativeMode::ClosedForm, Some(jet)) => {
                self.check_point(z, 0.0)?;
                let j = jet(z)?;
                j.h.cholesky().map_err(|_| {
                    Error::DegenerateMetric(format!("metric is not positive definite at {z:?}"))
                })?;
                Ok(j)
            }
            (DerivativeMode::FiniteDifference { step }, _) => self.fd_jet(z, step),
            (DerivativeMode::ClosedForm, None) => self.fd_jet(z, DEFAULT_STEP),
        }
    }

    fn fd_jet(&self, z: &[C64], step: f64) -> Result<Jet> {
        self.check_point(z, 2.0 * step)?;
        let f = |w: &[C64]| self.evaluate(w).map(HermitianMatrix::into_matrix);
        let j = fd::wirtinger_jet(&f, z, step)?;
        Ok(Jet {
            h: HermitianMatrix::symmetrized(j.value),
            d: j.d,
            dd: j.dd,
        })
    }
}

type ScalarJet = (f64, Vec<C64>, HermitianMatrix);
type ScalarJetFn = Arc<dyn Fn(&[C64]) -> ScalarJet + Send + Sync>;

/// Real weight `φ` on `ℂⁿ`; the corresponding line-bundle metric is `e^{−φ}`.
#[derive(Clone)]
pub struct LineWeight {
    n: usize,
    phi: Arc<dyn Fn(&[C64]) -> f64 + Send + Sync>,
    jet: Option<ScalarJetFn>,
}

impl fmt::Debug for LineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineWeight")
            .field("n", &self.n)
            .field("closed_form", &self.jet.is_some())
            .finish()
    }
}

impl LineWeight {
    pub fn new<F>(n: usize, phi: F) -> Self
    where
        F: Fn(&[C64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            n,
            phi: Arc::new(phi),
            jet: None,
        }
    }

    /// Weight with closed-form `(φ, ∂φ, ∂∂̄φ)`.
    pub fn with_jet<F>(n: usize, jet: F) -> Self
    where
        F: Fn(&[C64]) -> (f64, Vec<C64>, HermitianMatrix) + Send + Sync + 'static,
    {
        let jet: ScalarJetFn = Arc::new(jet);
        let j2 = jet.clone();
        Self {
            n,
            phi: Arc::new(move |z| j2(z).0),
            jet: Some(jet),
        }
    }

    /// `φ(z) = Σ Ω[a][b] z_a z̄_b`, so that `∂_a∂_b̄ φ = Ω[a][b]` everywhere.
    pub fn hermitian_quadratic(omega: HermitianMatrix) -> Self {
        let n = omega.dim();
        Self::with_jet(n, move |z| {
            let m = omega.matrix();
            let grad: Vec<C64> = (0..n)
                .map(|a| (0..n).map(|b| m[(a, b)] * z[b].conj()).sum())
                .collect();
            let phi: f64 = (0..n).map(|a| (z[a] * grad[a]).re).sum();
            (phi, grad, omega.clone())
        })
    }

    /// `φ(z) = c·|z|²`.
    pub fn quadratic(n: usize, c: f64) -> Self {
        Self::hermitian_quadratic(HermitianMatrix::identity(n).scale_re(c))
    }

    pub fn zero(n: usize) -> Self {
        Self::quadratic(n, 0.0)
    }

    /// Weight `c·φ`.
    pub fn scaled(&self, c: f64) -> Self {
        match &self.jet {
            Some(j) => {
                let j = j.clone();
                Self::with_jet(self.n, move |z| {
                    let (v, d, dd) = j(z);
                    (c * v, d.into_iter().map(|x| x * c).collect(), dd.scale_re(c))
                })
            }
            None => {
                let phi = self.phi.clone();
                Self::new(self.n, move |z| c * phi(z))
            }
        }
    }

    /// Weight `φ + ψ`.
    pub fn sum(&self, other: &Self) -> Self {
        match (&self.jet, &other.jet) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Self::with_jet(self.n, move |z| {
                    let (v1, d1, h1) = a(z);
                    let (v2, d2, h2) = b(z);
                    (v1 + v2, d1.iter().zip(&d2).map(|(x, y)| x + y).collect(), h1.add(&h2))
                })
            }
            _ => {
                let (a, b) = (self.phi.clone(), other.phi.clone());
                Self::new(self.n, move |z| a(z) + b(z))
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_closed_form(&self) -> bool {
        self.jet.is_some()
    }

    pub fn value(&self, z: &[C64]) -> Result<f64> {
        if z.len() != self.n {
            return input(format!("weight on ℂ^{} evaluated at a point of ℂ^{}", self.n, z.len()));
        }
        let v = (self.phi)(z);
        if !v.is_finite() {
            return input(format!("weight is not finite at {z:?}"));
        }
        Ok(v)
    }

    /// `(φ, ∂_a φ, ∂_a∂_b̄ φ)`.
    pub fn jet(&self, z: &[C64]) -> Result<(f64, Vec<C64>, HermitianMatrix)> {
        let v = self.value(z)?;
        if let Some(j) = &self.jet {
            return Ok(j(z));
        }
        let f = |w: &[C64]| self.value(w).map(|x| C64::new(x, 0.0));
        let (_, d, dd) = fd::scalar_jet(&f, z, DEFAULT_STEP)?;
        Ok((v, d, HermitianMatrix::symmetrized(dd)))
    }

    /// Complex Hessian `(∂_a∂_b̄ φ)`, the coefficient matrix of `i∂∂̄φ`.
    pub fn hessian(&self, z: &[C64]) -> Result<HermitianMatrix> {
        Ok(self.jet(z)?.2)
    }
}
