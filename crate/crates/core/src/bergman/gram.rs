use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::grid::DomainGrid;
use crate::bundle::{chern_curvature, curvature_biform, MetricField};
use crate::error::{input, Error, Result};
use crate::hermitian::{singular_values, ComplexMatrix, HermitianMatrix, C64, RANK_TOL};

/// Cap on the Jacobi-scaled condition number of a Gram matrix.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

pub type WeightFn = Arc<dyn Fn(C64, &[C64]) -> Result<HermitianMatrix> + Send + Sync>;

/// Family of fiber metrics `h(z, t)` of rank `r` on the unit disk, depending
/// on a parameter `t` in a chart of `ℂᵐ`.
#[derive(Clone)]
pub struct WeightFamily {
    r: usize,
    m: usize,
    eval: WeightFn,
    base_radius: f64,
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFamily")
            .field("r", &self.r)
            .field("m", &self.m)
            .field("base_radius", &self.base_radius)
            .finish()
    }
}

fn scalar_weight(r: usize, f: impl Fn(usize) -> f64) -> HermitianMatrix {
    HermitianMatrix::from_real_diagonal(&(0..r).map(f).collect::<Vec<_>>())
}

impl WeightFamily {
    pub fn new<F>(r: usize, m: usize, eval: F) -> Self
    where
        F: Fn(C64, &[C64]) -> Result<HermitianMatrix> + Send + Sync + 'static,
    {
        Self {
            r,
            m,
            eval: Arc::new(eval),
            base_radius: f64::INFINITY,
        }
    }

    /// Restricts the parameter chart to the polydisk `|t_a| < radius`.
    pub fn with_base_radius(mut self, radius: f64) -> Self {
        self.base_radius = radius;
        self
    }

    /// `h ≡ I`.
    pub fn trivial(r: usize, m: usize) -> Self {
        Self::new(r, m, move |_, _| Ok(HermitianMatrix::identity(r)))
    }

    /// `diag(e^{−c_μ|z|²})`, independent of `t`.
    pub fn diagonal_gaussian(c: &[f64], m: usize) -> Self {
        let c = c.to_vec();
        Self::new(c.len(), m, move |z, _| Ok(scalar_weight(c.len(), |mu| (-c[mu] * z.norm_sqr()).exp())))
    }

    /// `e^{−|z−t|²}` on a line bundle over a one-dimensional base.
    pub fn translated_gaussian() -> Self {
        Self::new(1, 1, |z, t| Ok(scalar_weight(1, |_| (-(z - t[0]).norm_sqr()).exp())))
    }

    /// `exp(−(|z|² + |t|²)·I − κ·Re(t z̄)·σ)` with `σ` the real off-diagonal
    /// swap on a rank-two bundle.
    pub fn coupled_gaussian(kappa: f64) -> Self {
        Self::new(2, 1, move |z, t| {
            let base = (-(z.norm_sqr() + t[0].norm_sqr())).exp();
            let a = kappa * (t[0] * z.conj()).re;
            let (c, s) = (a.cosh() * base, -a.sinh() * base);
            let m = ComplexMatrix::new(
                2,
                2,
                vec![C64::new(c, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
            )?;
            HermitianMatrix::new(m)
        })
    }

    /// `e^{−p·max(log|z|² − Re t, 0)}·h(z)` over the left half plane, with
    /// `h` the `t = 0` member of `base`.
    pub fn psi_family(base: &WeightFamily, p: f64) -> Self {
        let base = base.clone();
        let zero = vec![C64::new(0.0, 0.0); base.m];
        Self::new(base.r, 1, move |z, t| {
            let psi = (z.norm_sqr().ln() - t[0].re).max(0.0);
            Ok(base.evaluate(z, &zero)?.scale_re((-p * psi).exp()))
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    /// `h(z, t)`, checked positive definite.
    pub fn evaluate(&self, z: C64, t: &[C64]) -> Result<HermitianMatrix> {
        if t.len() != self.m {
            return input(format!("parameter has {} coordinates, expected {}", t.len(), self.m));
        }
        let h = (self.eval)(z, t)?;
        if h.dim() != self.r {
            return input(format!("weight returned rank {}, expected {}", h.dim(), self.r));
        }
        if h.cholesky().is_err() {
            return Err(Error::DegenerateMetric(format!("weight is not positive definite at z = {z}, t = {t:?}")));
        }
        Ok(h)
    }

    /// The metric `z ↦ h(z, t)` on the disk.
    pub fn fiber_metric(&self, t: &[C64]) -> MetricField {
        let w = self.clone();
        let t = t.to_vec();
        MetricField::new(1, self.r, move |z| w.evaluate(z[0], &t)).with_chart_radius(1.0)
    }

    /// The metric `(z, t) ↦ h(z, t)` on `𝔻 × B`.
    pub fn total_metric(&self) -> MetricField {
        let w = self.clone();
        MetricField::new(1 + self.m, self.r, move |x| w.evaluate(x[0], &x[1..]))
    }
}

/// Monomial basis `z^a ⊗ e_μ`, `0 ≤ a ≤ d`, indexed by `a·r + μ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisSpec {
    pub degree: usize,
    pub r: usize,
}

impl BasisSpec {
    pub fn new(degree: usize, r: usize) -> Self {
        Self { degree, r }
    }

    pub fn len(&self) -> usize {
        (self.degree + 1) * self.r
    }

    pub fn is_empty(&self) -> bool {
        self.r == 0
    }

    pub fn index(&self, a: usize, mu: usize) -> usize {
        a * self.r + mu
    }

    /// Values of the section with coefficients `c` at `z`.
    pub fn evaluate(&self, c: &[C64], z: C64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.r];
        let mut zp = C64::new(1.0, 0.0);
        for a in 0..=self.degree {
            for (mu, o) in out.iter_mut().enumerate() {
                *o += c[self.index(a, mu)] * zp;
            }
            zp *= z;
        }
        out
    }
}

/// `G[(a,μ),(b,ν)] = ∫ z^a z̄^b h(z)[μ][ν] dA`, so that the squared norm of
/// the section with coefficients `c` is `Σ c_i c̄_j G[i][j]`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    basis: BasisSpec,
    matrix: HermitianMatrix,
}

impl GramMatrix {
    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.scale_re(s),
        }
    }

    pub fn norm_sq(&self, c: &[C64]) -> f64 {
        self.matrix.conj().quadratic(c)
    }

    /// `x ↦ G⁻¹x` through a Jacobi-scaled Cholesky factorization.
    pub fn solver(&self) -> Result<ScaledSolver> {
        ScaledSolver::new(&self.matrix)
    }
}

/// Solves with a positive-definite matrix after symmetric diagonal scaling.
#[derive(Clone, Debug)]
pub struct ScaledSolver {
    d: Vec<f64>,
    chol: crate::hermitian::Cholesky,
    condition: f64,
}

impl ScaledSolver {
    pub fn new(h: &HermitianMatrix) -> Result<Self> {
        let m = h.matrix();
        let n = h.dim();
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let g = m[(i, i)].re;
            if !(g > 0.0) {
                return Err(Error::DegenerateMetric(format!("Gram diagonal entry {i} is {g:.3e}")));
            }
            d.push(g.sqrt().recip());
        }
        let s = HermitianMatrix::new(ComplexMatrix::from_fn(n, n, |i, j| m[(i, j)] * (d[i] * d[j])))?;
        let condition = s.condition_number();
        if !(condition <= MAX_GRAM_CONDITION) {
            return Err(Error::DegenerateMetric(format!(
                "scaled Gram condition number {condition:.3e} exceeds {MAX_GRAM_CONDITION:.0e}"
            )));
        }
        Ok(Self {
            chol: s.cholesky()?,
            d,
            condition,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let y: Vec<C64> = b.iter().zip(&self.d).map(|(x, d)| x * d).collect();
        self.chol.solve(&y).into_iter().zip(&self.d).map(|(x, d)| x * d).collect()
    }
}

/// Gram matrix of `basis` for the weight `h(·, t)` by quadrature on `grid`.
pub fn gram(w: &WeightFamily, t: &[C64], basis: BasisSpec, grid: &DomainGrid) -> Result<GramMatrix> {
    if basis.r != w.r() {
        return input(format!("basis rank {} does not match weight rank {}", basis.r, w.r()));
    }
    let (n, r, d) = (basis.len(), basis.r, basis.degree);
    let dt = grid.angular_weight();
    let rings: Vec<Result<Vec<C64>>> = grid
        .radial()
        .par_iter()
        .map(|&(rho, wr)| {
            let mut acc = vec![C64::new(0.0, 0.0); n * n];
            let mut pw = vec![C64::new(0.0, 0.0); d + 1];
            for &th in grid.angles() {
                let z = C64::from_polar(rho, th);
                let h = w.evaluate(z, t)?;
                let hm = h.matrix();
                let wt = wr * dt;
                pw[0] = C64::new(1.0, 0.0);
                for a in 1..=d {
                    pw[a] = pw[a - 1] * z;
                }
                for a in 0..=d {
                    for b in 0..=d {
                        let zab = pw[a] * pw[b].conj() * wt;
                        for mu in 0..r {
                            for nu in 0..r {
                                acc[basis.index(a, mu) * n + basis.index(b, nu)] += zab * hm[(mu, nu)];
                            }
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![C64::new(0.0, 0.0); n * n];
    for ring in rings {
        for (t, v) in total.iter_mut().zip(ring?) {
            *t += v;
        }
    }
    let matrix = HermitianMatrix::new(ComplexMatrix::new(n, n, total)?)?;
    Ok(GramMatrix { basis, matrix })
}

/// Rows of the evaluation map `c ↦ F(z₀)`.
pub fn evaluation_constraints(basis: BasisSpec, z0: C64) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(basis.r, basis.len());
    let mut zp = C64::new(1.0, 0.0);
    for a in 0..=basis.degree {
        for mu in 0..basis.r {
            c[(mu, basis.index(a, mu))] = zp;
        }
        zp *= z0;
    }
    c
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub coeffs: Vec<C64>,
    pub norm_sq: f64,
}

/// Minimizer of the Gram norm subject to `C·c = values`.
pub fn minimal_extension(g: &GramMatrix, constraints: &ComplexMatrix, values: &[C64]) -> Result<Extension> {
    let (k, n) = (constraints.rows(), constraints.cols());
    if n != g.basis().len() || values.len() != k {
        return input("constraint shape does not match the basis");
    }
    let s = singular_values(constraints);
    let smax = s.first().copied().unwrap_or(0.0);
    if s.len() < k || s.iter().filter(|&&x| x > RANK_TOL * smax.max(f64::MIN_POSITIVE)).count() < k {
        return input("constraint matrix is rank deficient");
    }
    // norm² = c†·conj(G)·c
    let solver = ScaledSolver::new(&g.matrix.conj())?;
    let ch = constraints.adjoint();
    let mut x = ComplexMatrix::zeros(n, k);
    for j in 0..k {
        x.set_column(j, &solver.solve(&ch.column(j)));
    }
    let m = HermitianMatrix::new(constraints * &x)?;
    let y = m.cholesky()?.solve(values);
    let coeffs = x.matvec(&y);
    let norm_sq = values.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
    Ok(Extension { coeffs, norm_sq })
}

#[derive(Clone, Debug)]
pub struct OtBound {
    /// Minimal squared norm of an extension of `f₀` from the origin.
    pub lhs: f64,
    /// `π·h(f₀, f₀)(0)/|T′(0)|²` for `T(z) = z`.
    pub rhs: f64,
    /// `π(1+δ)/δ·h(f₀, f₀)(0)`.
    pub general_rhs: f64,
    /// `1 − lhs/rhs`.
    pub slack: f64,
    pub pass: bool,
}

/// Minimal extension from `Z = {0}` compared with the flat extension constant.
pub fn ot_bound_check(
    w: &WeightFamily,
    t: &[C64],
    f0: &[C64],
    delta: f64,
    basis: BasisSpec,
    grid: &DomainGrid,
) -> Result<OtBound> {
    if !(delta > 0.0) {
        return input("δ must be positive");
    }
    if f0.len() != w.r() {
        return input("f₀ has the wrong rank");
    }
    let fiber = w.fiber_metric(t);
    for &rho in &[0.0, 0.35, 0.7, 0.9] {
        for k in 0..3 {
            let z = C64::from_polar(rho, 2.1 * k as f64);
            let c = curvature_biform(&chern_curvature(&fiber, &[z])?);
            let m = c.min_eigenvalue();
            if m < -1e-6 * c.scale() {
                return Err(Error::Configuration(format!(
                    "weight curvature is not Nakano-nonnegative at {z}: min eigenvalue {m:.3e}"
                )));
            }
        }
    }
    let g = gram(w, t, basis, grid)?;
    let lhs = minimal_extension(&g, &evaluation_constraints(basis, C64::new(0.0, 0.0)), f0)?.norm_sq;
    let h0 = w.evaluate(C64::new(0.0, 0.0), t)?.conj().quadratic(f0);
    let rhs = PI * h0;
    Ok(OtBound {
        lhs,
        rhs,
        general_rhs: PI * (1.0 + delta) / delta * h0,
        slack: 1.0 - lhs / rhs,
        pass: lhs <= rhs * (1.0 + 2e-2),
    })
}
