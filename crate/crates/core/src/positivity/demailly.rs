use crate::bundle::{curvature_biform, BiForm, CurvaturePoint};
use crate::error::{input, Result};
use crate::hermitian::{ComplexMatrix, HermitianMatrix};

/// Increasing `q`-subsets of `0..n` in lexicographic order.
pub fn multi_indices(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(0, n, q, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
pub struct DemaillyCheck {
    /// Hermitian operator on `Λ^{n,q} ⊗ E`, basis `(J, λ)` with `J` from [`multi_indices`].
    pub operator: HermitianMatrix,
    pub min_eigenvalue: f64,
    pub positive: bool,
    /// Whether k-positivity of the form with this `k` already forces `positive`.
    pub implied_by_k: bool,
}

/// Curvature operator `[iΘ, Λ_g]` on `E`-valued `(n, q)`-forms.
///
/// `form` is the curvature form with respect to the fiber metric `h`; both
/// `g` and `h` are orthonormalized before the operator is assembled.
pub fn demailly_check(form: &BiForm, h: &HermitianMatrix, g: &HermitianMatrix, q: usize, k: usize) -> Result<DemaillyCheck> {
    let (n, r) = (form.n(), form.r());
    if g.dim() != n || h.dim() != r {
        return input("metric dimensions do not match the form");
    }
    if q == 0 || q > n {
        return input(format!("form degree q = {q} outside 1..={n}"));
    }
    let wg = g
        .cholesky()
        .map_err(|_| crate::Error::Input("base metric g is not positive definite".into()))?
        .whitening();
    let wh = h
        .cholesky()
        .map_err(|_| crate::Error::Input("fiber metric h is not positive definite".into()))?
        .whitening();
    let c = form.change_basis(&wg.conj(), &wh.conj())?;
    let cm = c.matrix().matrix();

    let idx = multi_indices(n, q);
    let pos = |set: &[usize]| idx.binary_search(&set.to_vec()).expect("sorted subset");
    let dim = idx.len() * r;
    let mut f = ComplexMatrix::zeros(dim, dim);
    for s in multi_indices(n, q - 1) {
        let outside: Vec<usize> = (0..n).filter(|j| !s.contains(j)).collect();
        let place = |j: usize| {
            let mut set = s.clone();
            set.push(j);
            set.sort_unstable();
            let sign = if s.iter().filter(|&&x| x < j).count() % 2 == 0 { 1.0 } else { -1.0 };
            (pos(&set), sign)
        };
        for &j in &outside {
            let (a, ea) = place(j);
            for &l in &outside {
                let (b, eb) = place(l);
                for lam in 0..r {
                    for mu in 0..r {
                        f[(a * r + lam, b * r + mu)] += cm[(j * r + lam, l * r + mu)] * (ea * eb);
                    }
                }
            }
        }
    }
    // f is stored as a sesquilinear form; its action on coefficient vectors is conj(f).
    let operator = HermitianMatrix::new(f.conj())?;
    let min_eigenvalue = operator.min_eigenvalue();
    Ok(DemaillyCheck {
        operator,
        min_eigenvalue,
        positive: min_eigenvalue > 0.0,
        implied_by_k: k >= (n - q + 1).min(r),
    })
}

/// [`demailly_check`] for the curvature at a point, with its own fiber metric.
pub fn demailly_check_at(c: &CurvaturePoint, g: &HermitianMatrix, q: usize, k: usize) -> Result<DemaillyCheck> {
    demailly_check(&curvature_biform(c), &c.h, g, q, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    #[test]
    fn lexicographic_indices() {
        assert_eq!(multi_indices(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(multi_indices(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn identity_form() {
        let f = BiForm::identity(3, 2);
        for q in 1..=3 {
            let d = demailly_check(&f, &HermitianMatrix::identity(2), &HermitianMatrix::identity(3), q, 1).unwrap();
            let expected = HermitianMatrix::identity(d.operator.dim()).scale_re(q as f64);
            assert!(d.operator.sub(&expected).frobenius_norm() < 1e-14);
            assert!(d.positive);
        }
    }

    #[test]
    fn line_bundle_eigenvalues_are_subset_sums() {
        // Ω with eigenvalues (2, −1) with respect to g.
        let mut rng = sampling::rng(2);
        let g = sampling::positive_definite(&mut rng, 2);
        let u = sampling::unitary(&mut rng, 2);
        let w = g.cholesky().unwrap().whitening();
        // Ω = W^{-†} U diag U† W^{-1}, so that W†ΩW has eigenvalues (2, −1).
        let winv = g.cholesky().unwrap().factor().clone();
        let d = HermitianMatrix::from_real_diagonal(&[2.0, -1.0]).congruence(&u.adjoint());
        let omega = d.congruence(&winv.adjoint());
        assert!(omega.congruence(&w).sub(&d).frobenius_norm() < 1e-12);
        let form = BiForm::new(2, 1, omega).unwrap();
        let h = HermitianMatrix::identity(1);

        let one = demailly_check(&form, &h, &g, 1, 1).unwrap();
        let e = one.operator.eigh().values;
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 2.0).abs() < 1e-12);
        assert!(!one.positive);

        let two = demailly_check(&form, &h, &g, 2, 1).unwrap();
        assert!((two.min_eigenvalue - 1.0).abs() < 1e-12);
        assert!(two.positive);
        assert!(form.min_eigenvalue() < 0.0);
    }

    #[test]
    fn rejects_non_pd_base_metric() {
        let f = BiForm::identity(2, 1);
        let g = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(demailly_check(&f, &HermitianMatrix::identity(1), &g, 1, 1).is_err());
    }

    #[test]
    fn nakano_positive_forms_give_positive_operator() {
        let mut rng = sampling::rng(13);
        for _ in 0..20 {
            let form = BiForm::new(2, 2, sampling::positive_definite(&mut rng, 4)).unwrap();
            let h = sampling::positive_definite(&mut rng, 2);
            let g = sampling::positive_definite(&mut rng, 2);
            let d = demailly_check(&form, &h, &g, 1, 2).unwrap();
            assert!(d.implied_by_k && d.positive);
        }
    }
}
