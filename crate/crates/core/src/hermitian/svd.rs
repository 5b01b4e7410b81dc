use super::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U·diag(s)·V†`, `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided Jacobi SVD. Works on columns directly, so small singular values
/// keep full relative accuracy.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for k in 0..rows {
                    let x = a[(k, i)];
                    let y = a[(k, j)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    -1.0 / (-tau + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_c = phase.conj();
                for k in 0..rows {
                    let x = a[(k, i)];
                    let y = a[(k, j)];
                    a[(k, i)] = x * c - y * ph_c * s;
                    a[(k, j)] = x * s + y * ph_c * c;
                }
                for k in 0..cols {
                    let x = v[(k, i)];
                    let y = v[(k, j)];
                    v[(k, i)] = x * c - y * ph_c * s;
                    v[(k, j)] = x * s + y * ph_c * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = ComplexMatrix::from_fn(rows, cols, |k, c| {
        let j = order[c];
        if norms[j] > 0.0 {
            a[(k, j)] / norms[j]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = ComplexMatrix::from_fn(cols, cols, |k, c| v[(k, order[c])]);
    Svd { u, s, v }
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{eigh, HermitianMatrix};
    use crate::testutil::random_matrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(3, 2)), vec![0.0, 0.0]);
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let w = [C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let m = ComplexMatrix::from_fn(2, 3, |i, j| u[i] * w[j].conj());
        let s = singular_values(&m);
        assert_relative_eq!(s[0], 1.0, epsilon = 1e-15);
        assert!(s[1] < 1e-15);
    }

    #[test]
    fn squares_match_gram_eigenvalues() {
        for seed in 0..10 {
            let m = random_matrix(4, 3, seed);
            let s = singular_values(&m);
            let g = HermitianMatrix::new(&m.adjoint() * &m).unwrap();
            let mut e = eigh(&g).values;
            e.reverse();
            for (a, b) in s.iter().zip(&e) {
                assert!((a * a - b).abs() < 1e-10 * g.scale());
            }
        }
    }

    #[test]
    fn reconstruction() {
        let m = random_matrix(3, 5, 4);
        let d = svd(&m);
        let rec = &(&d.u * &ComplexMatrix::from_real_diagonal(&d.s)) * &d.v.adjoint();
        assert!((&rec - &m).frobenius_norm() < 1e-12 * m.frobenius_norm());
    }

    #[test]
    fn tiny_singular_value_is_resolved() {
        let mut m = ComplexMatrix::identity(3);
        m[(2, 2)] = C64::new(1e-12, 0.0);
        m[(0, 1)] = C64::new(0.5, 0.5);
        let s = singular_values(&m);
        assert!(s[2] > 0.5e-12 && s[2] < 2e-12, "{s:?}");
    }

    proptest! {
        #[test]
        fn adjoint_has_same_singular_values(seed in 0u64..10_000, r in 1usize..5, c in 1usize..5) {
            let m = random_matrix(r, c, seed);
            let a = singular_values(&m);
            let b = singular_values(&m.adjoint());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + a[0]));
            }
        }
    }
}
