use super::{conformal_twist, DerivativeMode, Jet, LineWeight, MetricField};
use crate::error::{input, Error, Result};
use crate::hermitian::{biform_apply, ComplexMatrix, HermitianMatrix, TensorPoint, C64};

/// Largest condition number accepted when inverting a metric.
pub const MAX_METRIC_CONDITION: f64 = 1e10;

/// Curvature Hermitian form on `ℂⁿ ⊗ ℂʳ`, entry `[(i,μ),(j,ν)] = h(Θ_{ij̄} e_μ, e_ν)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiForm {
    n: usize,
    r: usize,
    matrix: HermitianMatrix,
}

impl BiForm {
    pub fn new(n: usize, r: usize, matrix: HermitianMatrix) -> Result<Self> {
        if matrix.dim() != n * r {
            return input(format!("form of dimension {} cannot index {n}×{r} tensors", matrix.dim()));
        }
        Ok(Self { n, r, matrix })
    }

    pub fn identity(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            matrix: HermitianMatrix::identity(n * r),
        }
    }

    pub fn zero(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            matrix: HermitianMatrix::zeros(n * r),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, mu: usize, j: usize, nu: usize) -> C64 {
        self.matrix.matrix()[(i * self.r + mu, j * self.r + nu)]
    }

    /// `max(1, ‖Q‖_F)`.
    pub fn scale(&self) -> f64 {
        self.matrix.scale()
    }

    /// Operator `J` with `value(T) = t† J t` for the flattened coefficient vector `t`.
    pub fn inertia(&self) -> HermitianMatrix {
        self.matrix.conj()
    }

    pub fn value(&self, t: &TensorPoint) -> Result<f64> {
        Ok(biform_apply(&self.matrix, t, t)?.re)
    }

    pub fn pairing(&self, t1: &TensorPoint, t2: &TensorPoint) -> Result<C64> {
        biform_apply(&self.matrix, t1, t2)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.n, self.r, self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::new(self.n, self.r, self.matrix.sub(&other.matrix))
    }

    /// Form expressed in new chart and frame bases: `∂_a ↦ Σ_i U[i][a] ∂_i`,
    /// `e_α ↦ Σ_μ W[μ][α] e_μ`.
    pub fn change_basis(&self, u: &ComplexMatrix, w: &ComplexMatrix) -> Result<Self> {
        let k = u.kron(w);
        let m = &(&k.transpose() * self.matrix.matrix()) * &k.conj();
        Self::new(u.cols(), w.cols(), HermitianMatrix::new(m)?)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.min_eigenvalue()
    }
}

/// Chern curvature at a chart point.
#[derive(Clone, Debug)]
pub struct CurvaturePoint {
    pub z: Vec<C64>,
    pub h: HermitianMatrix,
    n: usize,
    r: usize,
    theta: Vec<C64>,
    /// Relative Hermitian-symmetry defect of the induced form before symmetrization.
    pub hermitian_residual: f64,
}

impl CurvaturePoint {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Coefficient of `dz^i ∧ dz̄^j` in the endomorphism entry `Θ^λ_μ`.
    pub fn theta(&self, lambda: usize, mu: usize, i: usize, j: usize) -> C64 {
        let (n, r) = (self.n, self.r);
        self.theta[((lambda * r + mu) * n + i) * n + j]
    }

    pub fn is_flat(&self, tol: f64) -> bool {
        self.theta.iter().all(|z| z.norm() <= tol)
    }
}

/// Raw curvature matrix `c = −∂∂̄A + ∂A·A⁻¹·∂̄A` before symmetrization.
pub(crate) fn curvature_matrix(jet: &Jet) -> Result<ComplexMatrix> {
    let n = jet.n();
    let r = jet.h.dim();
    let ainv = jet.h.cholesky()?.inverse();
    let left: Vec<ComplexMatrix> = jet.d.iter().map(|d| d * &ainv).collect();
    let mut c = ComplexMatrix::zeros(n * r, n * r);
    for i in 0..n {
        for j in 0..n {
            let block = &(&left[i] * &jet.dbar(j)) - jet.dd(i, j);
            for mu in 0..r {
                for nu in 0..r {
                    c[(i * r + mu, j * r + nu)] = block[(mu, nu)];
                }
            }
        }
    }
    Ok(c)
}

/// Chern curvature `Θ = ∂̄(∂h·h⁻¹)` of `metric` at `z`.
pub fn chern_curvature(metric: &MetricField, z: &[C64]) -> Result<CurvaturePoint> {
    let jet = metric.jet(z)?;
    let (n, r) = (metric.n(), metric.r());
    let c = curvature_matrix(&jet)?;
    let norm = c.frobenius_norm();
    let hermitian_residual = c.hermitian_residual() / norm.max(1.0);
    let ainv = jet.h.cholesky()?.inverse();
    let mut theta = vec![C64::new(0.0, 0.0); r * r * n * n];
    for lambda in 0..r {
        for mu in 0..r {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for nu in 0..r {
                        acc += c[(i * r + mu, j * r + nu)] * ainv[(nu, lambda)];
                    }
                    theta[((lambda * r + mu) * n + i) * n + j] = acc;
                }
            }
        }
    }
    Ok(CurvaturePoint {
        z: z.to_vec(),
        h: jet.h,
        n,
        r,
        theta,
        hermitian_residual,
    })
}

/// Curvature form `h(Θ_{ij̄} e_μ, e_ν)` indexed by `(i, μ), (j, ν)`.
pub fn curvature_biform(c: &CurvaturePoint) -> BiForm {
    let (n, r) = (c.n, c.r);
    let a = c.h.matrix();
    let m = ComplexMatrix::from_fn(n * r, n * r, |row, col| {
        let (i, mu) = (row / r, row % r);
        let (j, nu) = (col / r, col % r);
        (0..r).map(|lambda| c.theta(lambda, mu, i, j) * a[(lambda, nu)]).sum()
    });
    BiForm {
        n,
        r,
        matrix: HermitianMatrix::symmetrized(m),
    }
}

fn checked_inverse(h: &HermitianMatrix) -> Result<ComplexMatrix> {
    let cond = h.condition_number();
    if !(cond <= MAX_METRIC_CONDITION) {
        return Err(Error::DegenerateMetric(format!(
            "metric condition number {cond:.3e} exceeds {MAX_METRIC_CONDITION:.0e}"
        )));
    }
    Ok(h.cholesky()?.inverse())
}

/// Dual metric on `E*` in the dual frame: `A* = (A⁻¹)ᵀ`.
pub fn dual_metric(metric: &MetricField) -> MetricField {
    let (n, r) = (metric.n(), metric.r());
    let radius = metric.chart_radius();
    let out = match (metric.derivative_mode(), metric.closed_jet()) {
        (DerivativeMode::ClosedForm, Some(jet)) => {
            let jet = jet.clone();
            MetricField::with_jet(n, r, move |z| {
                let j = jet(z)?;
                let b = checked_inverse(&j.h)?;
                let db: Vec<ComplexMatrix> = j.d.iter().map(|d| (&(&b * d) * &b).scale_re(-1.0)).collect();
                let mut dd = Vec::with_capacity(n * n);
                for a in 0..n {
                    for c in 0..n {
                        let da = &j.d[a];
                        let dc = j.dbar(c);
                        let t1 = &(&(&(&b * &dc) * &b) * da) * &b;
                        let t2 = &(&(&(&b * da) * &b) * &dc) * &b;
                        let t3 = &(&b * j.dd(a, c)) * &b;
                        dd.push((&(&t1 + &t2) - &t3).transpose());
                    }
                }
                Ok(Jet {
                    h: HermitianMatrix::symmetrized(b.transpose()),
                    d: db.iter().map(ComplexMatrix::transpose).collect(),
                    dd,
                })
            })
        }
        (mode, _) => {
            let src = metric.clone();
            let m = MetricField::new(n, r, move |z| {
                let h = src.evaluate(z)?;
                Ok(HermitianMatrix::symmetrized(checked_inverse(&h)?.transpose()))
            });
            match mode {
                DerivativeMode::FiniteDifference { step } => m.finite_difference(step),
                DerivativeMode::ClosedForm => m,
            }
        }
    };
    out.with_chart_radius(radius)
}

/// Largest `|Θ*^λ_μ + Θ^μ_λ|` between the curvature of `metric` and of its
/// dual at `z`, relative to the curvature scale.
pub fn duality_residual(metric: &MetricField, z: &[C64]) -> Result<f64> {
    let a = chern_curvature(metric, z)?;
    let b = chern_curvature(&dual_metric(metric), z)?;
    let (n, r) = (a.n, a.r);
    let scale = a.theta.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for lambda in 0..r {
        for mu in 0..r {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((b.theta(lambda, mu, i, j) + a.theta(mu, lambda, i, j)).norm());
                }
            }
        }
    }
    Ok(worst / scale)
}

/// Largest entry of `Θ(e^{−ψ}h) − Θ(h) − (∂∂̄ψ)·Id` at `z`, relative to the
/// curvature scale.
pub fn twist_residual(metric: &MetricField, psi: &LineWeight, z: &[C64]) -> Result<f64> {
    let a = chern_curvature(metric, z)?;
    let b = chern_curvature(&conformal_twist(metric, psi), z)?;
    let hs = psi.hessian(z)?;
    let (n, r) = (a.n, a.r);
    let scale = a.theta.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    for lambda in 0..r {
        for mu in 0..r {
            for i in 0..n {
                for j in 0..n {
                    let id = if lambda == mu { hs.matrix()[(i, j)] } else { C64::new(0.0, 0.0) };
                    worst = worst.max((b.theta(lambda, mu, i, j) - a.theta(lambda, mu, i, j) - id).norm());
                }
            }
        }
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{fubini_study_weight, quotient_metric};
    use crate::sampling;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let m = MetricField::new(2, 2, |_| Ok(HermitianMatrix::identity(2)));
        let cp = chern_curvature(&m, &[c(0.1, 0.0), c(0.0, 0.3)]).unwrap();
        assert!(cp.is_flat(1e-12));
        assert_eq!(curvature_biform(&cp), BiForm::zero(2, 2));
    }

    #[test]
    fn gaussian_line_metric_has_unit_curvature() {
        let m = MetricField::new(1, 1, |z| Ok(HermitianMatrix::from_real_diagonal(&[(-z[0].norm_sqr()).exp()])));
        for z in [c(0.0, 0.0), c(0.7, -0.4), c(-1.5, 2.0)] {
            let cp = chern_curvature(&m, &[z]).unwrap();
            assert!((cp.theta(0, 0, 0, 0) - c(1.0, 0.0)).norm() < 1e-6, "{z}");
        }
    }

    #[test]
    fn scalar_weight_oracle() {
        // h = e^{−φ}: the form is e^{−φ}·(∂_i∂_j̄ φ).
        let phi = |z: &[C64]| (1.0 + z[0].norm_sqr() + 2.0 * z[1].norm_sqr()).ln() + (z[0] * z[1].conj()).re;
        let m = MetricField::new(2, 1, move |z| Ok(HermitianMatrix::from_real_diagonal(&[(-phi(z)).exp()])));
        let w = LineWeight::new(2, phi);
        let z = [c(0.3, 0.1), c(-0.2, 0.4)];
        let q = curvature_biform(&chern_curvature(&m, &z).unwrap());
        let expected = w.hessian(&z).unwrap().scale_re((-phi(&z)).exp());
        assert!(q.matrix().sub(&expected).frobenius_norm() < 1e-7);
    }

    #[test]
    fn fubini_study_at_origin_is_identity() {
        let w = fubini_study_weight(3);
        let h = w.hessian(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(h, HermitianMatrix::identity(2));
    }

    #[test]
    fn quotient_curvature_value_on_decomposable_tensor() {
        let m = quotient_metric(3);
        let cp = chern_curvature(&m, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let q = curvature_biform(&cp);
        let mut rng = sampling::rng(3);
        for _ in 0..10 {
            let a = sampling::gaussian_vec(&mut rng, 2);
            let b = sampling::gaussian_vec(&mut rng, 2);
            let dot: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
            let t = TensorPoint::decomposable(&a, &b);
            let v = q.value(&t).unwrap();
            assert!((v - dot.norm_sqr()).abs() < 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn quotient_curvature_on_two_term_tensor() {
        let m = quotient_metric(4);
        let q = curvature_biform(&chern_curvature(&m, &[c(0.0, 0.0); 3]).unwrap());
        let mut rng = sampling::rng(11);
        let a: Vec<Vec<C64>> = (0..2).map(|_| sampling::gaussian_vec(&mut rng, 3)).collect();
        let b: Vec<Vec<C64>> = (0..2).map(|_| sampling::gaussian_vec(&mut rng, 3)).collect();
        let t = ComplexMatrix::from_fn(3, 3, |i, mu| a[0][i] * b[0][mu] + a[1][i] * b[1][mu]);
        let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(p, s)| p * s.conj()).sum() };
        let mut expected = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                expected += dot(&a[i], &b[j]) * dot(&a[j], &b[i]).conj();
            }
        }
        let v = q.value(&TensorPoint::new(t).unwrap()).unwrap();
        assert!((v - expected.re).abs() < 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn closed_form_matches_finite_differences() {
        let m = quotient_metric(3);
        let z = [c(0.4, -0.3), c(-0.8, 0.5)];
        let a = curvature_biform(&chern_curvature(&m, &z).unwrap());
        let b = curvature_biform(&chern_curvature(&m.clone().finite_difference(1e-4), &z).unwrap());
        assert!(a.matrix().sub(b.matrix()).frobenius_norm() < 1e-7);
    }

    #[test]
    fn dual_of_diagonal() {
        let m = MetricField::new(1, 2, |_| Ok(HermitianMatrix::from_real_diagonal(&[2.0, 0.5])));
        let d = dual_metric(&m);
        let e = d.evaluate(&[c(0.0, 0.0)]).unwrap();
        assert!(e.sub(&HermitianMatrix::from_real_diagonal(&[0.5, 2.0])).frobenius_norm() < 1e-15);
        let id = dual_metric(&MetricField::new(1, 3, |_| Ok(HermitianMatrix::identity(3))));
        assert_eq!(id.evaluate(&[c(1.0, 0.0)]).unwrap(), HermitianMatrix::identity(3));
    }

    #[test]
    fn dual_rejects_ill_conditioned() {
        let m = MetricField::new(1, 2, |_| Ok(HermitianMatrix::from_real_diagonal(&[1.0, 1e-11])));
        assert!(matches!(dual_metric(&m).evaluate(&[c(0.0, 0.0)]), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn closed_form_dual_matches_finite_differences() {
        let m = conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(2.0));
        let z = [c(0.2, 0.1), c(-0.3, 0.6)];
        let d = dual_metric(&m);
        let a = curvature_biform(&chern_curvature(&d, &z).unwrap());
        let b = curvature_biform(&chern_curvature(&d.clone().finite_difference(1e-4), &z).unwrap());
        assert!(a.matrix().sub(b.matrix()).frobenius_norm() < 1e-7 * a.scale());
    }

    #[test]
    fn change_basis_matches_direct_evaluation() {
        let mut rng = sampling::rng(5);
        let q = BiForm::new(2, 2, sampling::hermitian(&mut rng, 4)).unwrap();
        let u = sampling::unitary(&mut rng, 2);
        let w = sampling::unitary(&mut rng, 2);
        let q2 = q.change_basis(&u, &w).unwrap();
        let t2 = sampling::tensor_of_rank(&mut rng, 2, 2, 2);
        let t = TensorPoint::new(&(&u * t2.coeffs()) * &w.transpose()).unwrap();
        assert!((q2.value(&t2).unwrap() - q.value(&t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dual_curvature_is_minus_transpose() {
        let m = conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(2.0));
        let mut rng = sampling::rng(8);
        for _ in 0..5 {
            let z = sampling::chart_point(&mut rng, 2, 0.8);
            assert!(duality_residual(&m, &z).unwrap() < 1e-9);
            assert!(duality_residual(&m.clone().finite_difference(1e-4), &z).unwrap() < 1e-5);
        }
    }

    #[test]
    fn twist_adds_weight_hessian() {
        let m = quotient_metric(4);
        let psi = LineWeight::quadratic(3, 0.7);
        let mut rng = sampling::rng(9);
        for _ in 0..5 {
            let z = sampling::chart_point(&mut rng, 3, 0.8);
            assert!(twist_residual(&m, &psi, &z).unwrap() < 1e-9);
        }
    }
}
