use rand::Rng;

use super::{rank_k_min, PositivityQuery};
use crate::bundle::{BiForm, MetricField};
use crate::error::{input, Result};
use crate::fd::{self, DEFAULT_STEP};
use crate::hermitian::{ComplexMatrix, HermitianMatrix, TensorPoint, C64};
use crate::sampling;

/// Both sides of the second-derivative identity for `k` sections with
/// vanishing covariant derivative at a point.
#[derive(Clone, Debug)]
pub struct KPropCheck {
    /// `Σ_{i,j<k} ∂_i∂_j̄ h(f_i, f_j)` at the point, by finite differences.
    pub lhs: C64,
    /// `−{T, T}` for `T = Σ_i ∂_i ⊗ f_i(x)`.
    pub rhs: f64,
    /// `|lhs − rhs| / max(1, |rhs|)`.
    pub residual: f64,
}

/// Draws `k ≤ n` quadratic polynomial sections with `∇f_i(x) = 0` and
/// compares `Σ ∂_i∂_j̄ h(f_i, f_j)` with minus the curvature form.
pub fn k_prop_identity(metric: &MetricField, form: &BiForm, x: &[C64], k: usize, seed: u64) -> Result<KPropCheck> {
    let (n, r) = (metric.n(), metric.r());
    if k == 0 || k > n {
        return input(format!("need 1 ≤ k ≤ n = {n}, got {k}"));
    }
    if form.n() != n || form.r() != r {
        return input("form does not match the metric");
    }
    let jet = metric.jet(x)?;
    let ainv = jet.h.cholesky()?.inverse();
    let mut rng = sampling::rng(seed);
    let values: Vec<Vec<C64>> = (0..k).map(|_| sampling::gaussian_vec(&mut rng, r)).collect();
    // ∂_a f(x) = −(∂_a A · A⁻¹)ᵀ f(x)
    let linear: Vec<Vec<Vec<C64>>> = values
        .iter()
        .map(|v| {
            (0..n)
                .map(|a| (&jet.d[a] * &ainv).transpose().matvec(v).into_iter().map(|z| -z).collect())
                .collect()
        })
        .collect();
    let quadratic: Vec<Vec<Vec<C64>>> = (0..k)
        .map(|_| (0..n * n).map(|_| sampling::gaussian_vec(&mut rng, r)).collect())
        .collect();

    let section = |i: usize, z: &[C64]| -> Vec<C64> {
        let dz: Vec<C64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        let mut f = values[i].clone();
        for a in 0..n {
            for (mu, fm) in f.iter_mut().enumerate() {
                *fm += dz[a] * linear[i][a][mu];
                for b in 0..n {
                    *fm += dz[a] * dz[b] * quadratic[i][a * n + b][mu];
                }
            }
        }
        f
    };
    let gram = |z: &[C64]| -> Result<ComplexMatrix> {
        let h = metric.evaluate(z)?;
        let fs: Vec<Vec<C64>> = (0..k).map(|i| section(i, z)).collect();
        Ok(ComplexMatrix::from_fn(k, k, |i, j| {
            let af = h.matrix().transpose().matvec(&fs[i]);
            af.iter().zip(&fs[j]).map(|(p, q)| p * q.conj()).sum()
        }))
    };
    let step = match metric.derivative_mode() {
        crate::bundle::DerivativeMode::FiniteDifference { step } => step,
        crate::bundle::DerivativeMode::ClosedForm => DEFAULT_STEP,
    };
    let j = fd::wirtinger_jet(&gram, x, step)?;
    let mut lhs = C64::new(0.0, 0.0);
    for i in 0..k {
        for l in 0..k {
            lhs += j.dd(i, l)[(i, l)];
        }
    }
    let t = TensorPoint::new(ComplexMatrix::from_fn(n, r, |i, mu| {
        if i < k {
            values[i][mu]
        } else {
            C64::new(0.0, 0.0)
        }
    }))?;
    let rhs = -form.value(&t)?;
    let residual = (lhs - rhs).norm() / rhs.abs().max(1.0);
    Ok(KPropCheck { lhs, rhs, residual })
}

/// Complex Hessian of `log h(s, s)` for a holomorphic section `s`.
pub fn log_norm_hessian<S>(metric: &MetricField, section: S, z: &[C64]) -> Result<HermitianMatrix>
where
    S: Fn(&[C64]) -> Vec<C64>,
{
    let f = |w: &[C64]| -> Result<C64> {
        let h = metric.evaluate(w)?;
        let s = section(w);
        let hs = h.matrix().transpose().matvec(&s);
        let v: f64 = hs.iter().zip(&s).map(|(a, b)| (a * b.conj()).re).sum();
        if v <= 0.0 {
            return input("section vanishes at a stencil point");
        }
        Ok(C64::new(v.ln(), 0.0))
    };
    let (_, _, dd) = fd::scalar_jet(&f, z, DEFAULT_STEP)?;
    Ok(HermitianMatrix::symmetrized(dd))
}

/// Harmonic sum `(A⁻¹ + B⁻¹)⁻¹` of two invertible forms.
pub fn harmonic_sum(a: &BiForm, b: &BiForm) -> Result<BiForm> {
    if a.n() != b.n() || a.r() != b.r() {
        return input("forms have different shapes");
    }
    let s = a.matrix().inverse()?.add(&b.matrix().inverse()?);
    BiForm::new(a.n(), a.r(), s.inverse()?)
}

#[derive(Clone, Debug)]
pub struct HarmonicProbe {
    pub min_a: f64,
    pub min_b: f64,
    pub min_sum: f64,
}

/// Random pairs of k-positive forms and the rank-`k` minimum of their
/// harmonic sum. Reports what it finds and draws no conclusion.
pub fn harmonic_sum_search(n: usize, r: usize, k: usize, trials: usize, seed: u64) -> Result<Vec<HarmonicProbe>> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(trials);
    let draw = |rng: &mut sampling::SeededRng| -> Result<(BiForm, f64)> {
        loop {
            let h = sampling::hermitian(rng, n * r);
            let form = BiForm::new(n, r, h)?;
            let m = rank_k_min(&PositivityQuery::new(form.clone(), k).restarts(8).seed(rng.random()))?.min_value;
            let shift = -m + 0.1 * rng.random::<f64>();
            let shifted = BiForm::new(n, r, form.matrix().add(&HermitianMatrix::identity(n * r).scale_re(shift)))?;
            if shifted.matrix().inverse().is_ok() {
                let v = rank_k_min(&PositivityQuery::new(shifted.clone(), k).restarts(8).seed(rng.random()))?.min_value;
                if v > 0.0 {
                    return Ok((shifted, v));
                }
            }
        }
    };
    for _ in 0..trials {
        let (a, min_a) = draw(&mut rng)?;
        let (b, min_b) = draw(&mut rng)?;
        let Ok(s) = harmonic_sum(&a, &b) else { continue };
        let min_sum = rank_k_min(&PositivityQuery::new(s, k).seed(rng.random()))?.min_value;
        out.push(HarmonicProbe { min_a, min_b, min_sum });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{
        chern_curvature, conformal_twist, curvature_biform, o_minus1_metric, quotient_metric, LineWeight,
    };

    #[test]
    fn identity_holds_for_twisted_quotient() {
        let m = conformal_twist(&quotient_metric(4), &LineWeight::quadratic(3, 0.7));
        let x = [C64::new(0.2, -0.1), C64::new(0.4, 0.3), C64::new(-0.3, 0.2)];
        let form = curvature_biform(&chern_curvature(&m, &x).unwrap());
        for k in 1..=3 {
            let c = k_prop_identity(&m, &form, &x, k, 17 + k as u64).unwrap();
            assert!(c.residual < 1e-4, "k={k}: {c:?}");
        }
    }

    #[test]
    fn log_norm_of_section_is_psh_for_negative_bundle() {
        let m = o_minus1_metric(3);
        let s = |z: &[C64]| vec![C64::new(1.0, 0.0) + z[0] * z[1] * 2.0 - z[1]];
        let mut rng = sampling::rng(1);
        for _ in 0..10 {
            let z = sampling::chart_point(&mut rng, 2, 0.3);
            let h = log_norm_hessian(&m, s, &z).unwrap();
            assert!(h.min_eigenvalue() > -1e-6);
        }
    }

    #[test]
    fn harmonic_sum_of_identities() {
        let f = BiForm::identity(2, 2);
        let s = harmonic_sum(&f, &f).unwrap();
        assert!(s.matrix().sub(&HermitianMatrix::identity(4).scale_re(0.5)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn search_hook_runs() {
        let probes = harmonic_sum_search(2, 2, 1, 2, 5).unwrap();
        assert!(probes.iter().all(|p| p.min_a > 0.0 && p.min_b > 0.0 && p.min_sum.is_finite()));
    }
}
