use super::{ComplexMatrix, HermitianMatrix, C64};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Cyclic complex Jacobi eigensolver.
pub fn eigh(h: &HermitianMatrix) -> Eigh {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    if n <= 1 || total == 0.0 {
        return finish(a, v);
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, total);
            }
        }
    }
    finish(a, v)
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, total: f64) {
    let n = a.rows();
    let apq = a[(p, q)];
    let b = apq.norm();
    if b <= 1e-300 || b <= 1e-18 * total {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (tau * tau + 1.0).sqrt())
    } else {
        -1.0 / (-tau + (tau * tau + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_c = phase.conj();

    // columns: A ← A·V
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_c * s;
        a[(k, q)] = akp * s + akq * ph_c * c;
    }
    // rows: A ← V†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_c * s;
        v[(k, q)] = vkp * s + vkq * ph_c * c;
    }
}

fn finish(a: ComplexMatrix, v: ComplexMatrix) -> Eigh {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigh { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hermitian, random_unitary};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn residual(h: &HermitianMatrix, e: &Eigh) -> (f64, f64) {
        let n = h.dim();
        let hv = h.matrix() * &e.vectors;
        let vl = &e.vectors * &ComplexMatrix::from_real_diagonal(&e.values);
        let rec = (&hv - &vl).frobenius_norm();
        let orth = (&(&e.vectors.adjoint() * &e.vectors) - &ComplexMatrix::identity(n)).frobenius_norm();
        (rec, orth)
    }

    #[test]
    fn identity_and_diagonal() {
        let e = eigh(&HermitianMatrix::identity(3));
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = eigh(&HermitianMatrix::from_real_diagonal(&[5.0, -2.0]));
        assert_eq!(e.values, vec![-2.0, 5.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let e = eigh(&HermitianMatrix::new(m).unwrap());
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        for seed in 0..20 {
            let h = random_hermitian(6, seed);
            let e = eigh(&h);
            let (rec, orth) = residual(&h, &e);
            assert!(rec < 1e-10 * h.scale(), "seed {seed}: {rec}");
            assert!(orth < 1e-10);
        }
    }

    #[test]
    fn large_dimension() {
        let h = random_hermitian(40, 9);
        let e = eigh(&h);
        let (rec, orth) = residual(&h, &e);
        assert!(rec < 1e-10 * h.scale());
        assert!(orth < 1e-10);
    }

    #[test]
    fn degenerate_spectrum() {
        let u = random_unitary(5, 3);
        let d = HermitianMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, -4.0, -4.0]);
        let h = d.congruence(&u.adjoint());
        let e = eigh(&h);
        for (a, b) in e.values.iter().zip([-4.0, -4.0, 1.0, 1.0, 1.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn spectrum_is_unitarily_invariant(seed in 0u64..10_000, n in 1usize..7) {
            let h = random_hermitian(n, seed);
            let u = random_unitary(n, seed.wrapping_add(77));
            let a = eigh(&h).values;
            let b = eigh(&h.congruence(&u)).values;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * h.scale());
            }
        }
    }
}
