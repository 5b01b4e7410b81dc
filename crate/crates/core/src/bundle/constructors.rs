use super::{DerivativeMode, Jet, LineWeight, MetricField};
use crate::hermitian::{ComplexMatrix, HermitianMatrix, C64};

fn sq_norm(z: &[C64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Fubini–Study weight `log(1 + |z|²)` on the affine chart `ℂ^{r−1}` of `P^{r−1}`.
pub fn fubini_study_weight(r: usize) -> LineWeight {
    let n = r.saturating_sub(1);
    LineWeight::with_jet(n, move |z| {
        let s = 1.0 + sq_norm(z);
        let grad = z.iter().map(|w| w.conj() / s).collect();
        let hess = ComplexMatrix::from_fn(n, n, |a, b| {
            let d = if a == b { 1.0 / s } else { 0.0 };
            re(d) - z[a].conj() * z[b] / (s * s)
        });
        (s.ln(), grad, HermitianMatrix::symmetrized(hess))
    })
}

/// Tautological line bundle `𝒪(−1)` with `h(ε₀, ε₀) = 1 + |z|²`.
pub fn o_minus1_metric(r: usize) -> MetricField {
    let n = r.saturating_sub(1);
    MetricField::with_jet(n, 1, move |z| {
        let s = 1.0 + sq_norm(z);
        Ok(Jet {
            h: HermitianMatrix::from_real_diagonal(&[s]),
            d: z.iter().map(|w| ComplexMatrix::from_fn(1, 1, |_, _| w.conj())).collect(),
            dd: (0..n * n)
                .map(|k| ComplexMatrix::from_real_diagonal(&[if k / n == k % n { 1.0 } else { 0.0 }]))
                .collect(),
        })
    })
}

/// `A = sᵖ·I − s^{p−1}·M` with `s = 1 + |z|²` and `M[i][j] = z̄_i z_j`, with
/// closed-form derivatives.
fn power_family(n: usize, p: f64) -> MetricField {
    MetricField::with_jet(n, n, move |z| {
        let s = 1.0 + sq_norm(z);
        let q = p - 1.0;
        let sp = s.powf(p);
        let sq = s.powf(q);
        let m = ComplexMatrix::from_fn(n, n, |i, j| z[i].conj() * z[j]);
        let id = ComplexMatrix::identity(n);
        let h = &id.scale_re(sp) - &m.scale_re(sq);

        // ∂_a s^e = e s^{e−1} z̄_a, ∂_a∂_b̄ s^e = e(e−1) s^{e−2} z̄_a z_b + e s^{e−1} δ_ab.
        let d1 = |e: f64, a: usize| z[a].conj() * (e * s.powf(e - 1.0));
        let d2 = |e: f64, a: usize, b: usize| {
            let delta = if a == b { e * s.powf(e - 1.0) } else { 0.0 };
            z[a].conj() * z[b] * (e * (e - 1.0) * s.powf(e - 2.0)) + delta
        };
        let dm = |a: usize| ComplexMatrix::from_fn(n, n, |i, j| if j == a { z[i].conj() } else { C64::new(0.0, 0.0) });
        let dbm = |b: usize| ComplexMatrix::from_fn(n, n, |i, j| if i == b { z[j] } else { C64::new(0.0, 0.0) });
        let ddm = |a: usize, b: usize| {
            ComplexMatrix::from_fn(n, n, |i, j| if i == b && j == a { re(1.0) } else { C64::new(0.0, 0.0) })
        };

        let d: Vec<ComplexMatrix> = (0..n)
            .map(|a| {
                let t = &(&id.scale(d1(p, a)) - &m.scale(d1(q, a))) - &dm(a).scale_re(sq);
                t
            })
            .collect();
        let mut dd = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let d1b = d1(q, b).conj();
                let mut t = &id.scale(d2(p, a, b)) - &m.scale(d2(q, a, b));
                t = &t - &dbm(b).scale(d1(q, a));
                t = &t - &dm(a).scale(d1b);
                t = &t - &ddm(a, b).scale_re(sq);
                dd.push(t);
            }
        }
        Ok(Jet {
            h: HermitianMatrix::symmetrized(h),
            d,
            dd,
        })
    })
}

/// Universal quotient bundle `Q` on `P^{r−1}` with the quotient metric
/// `δ_{ij} − z_j z̄_i/(1+|z|²)` in the affine chart `ℂ^{r−1}`.
pub fn quotient_metric(r: usize) -> MetricField {
    assert!(r >= 2, "quotient bundle needs r ≥ 2");
    power_family(r - 1, 0.0)
}

/// `Q ⊗ 𝒪(k)`: the quotient metric times `e^{−kφ}` for the Fubini–Study weight.
pub fn twisted_quotient(r: usize, k: u32) -> MetricField {
    assert!(r >= 2, "quotient bundle needs r ≥ 2");
    power_family(r - 1, -(k as f64))
}

/// Fubini–Study metric `g_{ij̄} = ∂_i∂_j̄ log(1 + |z|²)` on `T Pⁿ`.
pub fn tangent_pn_metric(n: usize) -> MetricField {
    power_family(n, -1.0)
}

/// `L¹ ⊕ ⋯ ⊕ Lʳ` with diagonal metric `e^{−φ_i}`.
pub fn split_bundle(phis: &[LineWeight]) -> MetricField {
    assert!(!phis.is_empty(), "split bundle needs at least one summand");
    let n = phis[0].n();
    assert!(phis.iter().all(|p| p.n() == n), "weights live on different charts");
    let r = phis.len();
    let phis = phis.to_vec();
    if phis.iter().all(LineWeight::has_closed_form) {
        MetricField::with_jet(n, r, move |z| {
            let jets = phis.iter().map(|p| p.jet(z)).collect::<crate::Result<Vec<_>>>()?;
            let e: Vec<f64> = jets.iter().map(|j| (-j.0).exp()).collect();
            let diag = |f: &dyn Fn(usize) -> C64| ComplexMatrix::from_fn(r, r, |i, j| if i == j { f(i) } else { C64::new(0.0, 0.0) });
            let d = (0..n).map(|a| diag(&|i| -jets[i].1[a] * e[i])).collect();
            let mut dd = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    dd.push(diag(&|i| {
                        let (_, g, h) = &jets[i];
                        (g[a] * g[b].conj() - h.matrix()[(a, b)]) * e[i]
                    }));
                }
            }
            Ok(Jet {
                h: HermitianMatrix::from_real_diagonal(&e),
                d,
                dd,
            })
        })
    } else {
        MetricField::new(n, r, move |z| {
            let e = phis.iter().map(|p| p.value(z).map(|v| (-v).exp())).collect::<crate::Result<Vec<_>>>()?;
            Ok(HermitianMatrix::from_real_diagonal(&e))
        })
    }
}

/// `e^{−ψ}·h`.
pub fn conformal_twist(metric: &MetricField, psi: &LineWeight) -> MetricField {
    assert_eq!(metric.n(), psi.n(), "weight and metric live on different charts");
    let (n, r) = (metric.n(), metric.r());
    let radius = metric.chart_radius();
    let psi = psi.clone();
    let out = match (metric.derivative_mode(), metric.closed_jet(), psi.has_closed_form()) {
        (DerivativeMode::ClosedForm, Some(jet), true) => {
            let jet = jet.clone();
            MetricField::with_jet(n, r, move |z| {
                let j = jet(z)?;
                let (v, g, hs) = psi.jet(z)?;
                let e = (-v).exp();
                let a = j.h.matrix();
                let d: Vec<ComplexMatrix> = (0..n).map(|k| (&j.d[k] - &a.scale(g[k])).scale_re(e)).collect();
                let mut dd = Vec::with_capacity(n * n);
                for p in 0..n {
                    for q in 0..n {
                        let gq = g[q].conj();
                        let mut t = j.dd(p, q) - &j.dbar(q).scale(g[p]);
                        t = &t - &j.d[p].scale(gq);
                        t = &t + &a.scale(g[p] * gq - hs.matrix()[(p, q)]);
                        dd.push(t.scale_re(e));
                    }
                }
                Ok(Jet {
                    h: j.h.scale_re(e),
                    d,
                    dd,
                })
            })
        }
        (mode, _, _) => {
            let src = metric.clone();
            let m = MetricField::new(n, r, move |z| Ok(src.evaluate(z)?.scale_re((-psi.value(z)?).exp())));
            match mode {
                DerivativeMode::FiniteDifference { step } => m.finite_difference(step),
                DerivativeMode::ClosedForm => m,
            }
        }
    };
    out.with_chart_radius(radius)
}

/// `E ⊗ L` for a line bundle with weight `φ`; the metric is `e^{−φ}·h`.
pub fn tensor_line(metric: &MetricField, phi: &LineWeight) -> MetricField {
    conformal_twist(metric, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{chern_curvature, curvature_biform, BiForm};
    use crate::sampling;

    fn zero(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }

    #[test]
    fn quotient_at_origin_is_identity() {
        assert_eq!(quotient_metric(3).evaluate(&zero(2)).unwrap(), HermitianMatrix::identity(2));
    }

    #[test]
    fn tangent_metric_is_fubini_study_hessian() {
        let fs = fubini_study_weight(4);
        let t = tangent_pn_metric(3);
        let mut rng = sampling::rng(8);
        for _ in 0..5 {
            let z = sampling::chart_point(&mut rng, 3, 2.0);
            let a = t.evaluate(&z).unwrap();
            let b = fs.hessian(&z).unwrap();
            assert!(a.sub(&b).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn closed_form_jets_match_finite_differences() {
        let mut rng = sampling::rng(21);
        let fields = [
            quotient_metric(3),
            twisted_quotient(4, 2),
            tangent_pn_metric(2),
            o_minus1_metric(3),
            split_bundle(&[LineWeight::quadratic(2, 1.0), fubini_study_weight(3)]),
            conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(3.0)),
        ];
        for f in &fields {
            let z = sampling::chart_point(&mut rng, f.n(), 1.5);
            let a = f.jet(&z).unwrap();
            let b = f.clone().finite_difference(1e-4).jet(&z).unwrap();
            for k in 0..f.n() {
                assert!((&a.d[k] - &b.d[k]).frobenius_norm() < 1e-8);
            }
            for k in 0..f.n() * f.n() {
                assert!((&a.dd[k] - &b.dd[k]).frobenius_norm() < 1e-7, "{f:?}");
            }
        }
    }

    #[test]
    fn split_bundle_with_equal_quadratic_weights() {
        let phis = vec![LineWeight::quadratic(2, 1.0); 3];
        let m = split_bundle(&phis);
        let z = zero(2);
        let q = curvature_biform(&chern_curvature(&m, &z).unwrap());
        assert!(q.sub(&BiForm::identity(2, 3)).unwrap().matrix().frobenius_norm() < 1e-14);
    }

    #[test]
    fn twisted_quotient_is_power_of_fubini_study() {
        let a = twisted_quotient(3, 2);
        let b = conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(2.0));
        let z = [C64::new(0.3, 0.4), C64::new(-1.0, 0.2)];
        assert!(a.evaluate(&z).unwrap().sub(&b.evaluate(&z).unwrap()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn tensor_line_matches_twist() {
        let psi = LineWeight::quadratic(2, 0.5);
        let z = [C64::new(0.3, 0.4), C64::new(-1.0, 0.2)];
        let a = tensor_line(&quotient_metric(3), &psi).evaluate(&z).unwrap();
        let b = quotient_metric(3).evaluate(&z).unwrap().scale_re((-psi.value(&z).unwrap()).exp());
        assert!(a.sub(&b).frobenius_norm() < 1e-15);
    }
}
