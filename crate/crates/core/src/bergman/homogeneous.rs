use std::f64::consts::TAU;

use rustfft::FftPlanner;

use super::grid::gauss_legendre;
use crate::error::{input, Result};
use crate::hermitian::C64;

/// Values of an `ℂʳ`-valued function at `w = ρ·e^{2πik/K}`, `k = 0..K`.
#[derive(Clone, Debug)]
pub struct CircleSamples {
    pub radius: f64,
    /// Indexed `[angle][component]`.
    pub values: Vec<Vec<C64>>,
}

pub fn sample_circle<S: Fn(C64) -> Vec<C64>>(s: S, radius: f64, angles: usize) -> CircleSamples {
    let values = (0..angles)
        .map(|k| s(C64::from_polar(radius, TAU * k as f64 / angles as f64)))
        .collect();
    CircleSamples { radius, values }
}

/// Taylor coefficients `a_0, …, a_{j_max}` in the fiber variable, from
/// discrete Fourier transforms on each circle combined by least squares.
pub fn homogeneous_coefficients(samples: &[CircleSamples], j_max: usize) -> Result<Vec<Vec<C64>>> {
    let Some(first) = samples.first() else {
        return input("no circles given");
    };
    let r = first.values.first().map_or(0, Vec::len);
    if r == 0 {
        return input("samples are empty");
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut num = vec![vec![C64::new(0.0, 0.0); r]; j_max + 1];
    let mut den = vec![0.0; j_max + 1];
    for c in samples {
        let k = c.values.len();
        if k < 2 * j_max + 1 {
            return input(format!("{k} angles cannot resolve degree {j_max}"));
        }
        if !(c.radius > 0.0) || c.values.iter().any(|v| v.len() != r) {
            return input("circle samples must have positive radius and a common rank");
        }
        let fft = planner.plan_fft_forward(k);
        for mu in 0..r {
            let mut buf: Vec<C64> = c.values.iter().map(|v| v[mu] / k as f64).collect();
            fft.process(&mut buf);
            let scale = buf.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if buf[j_max + 1..].iter().any(|x| x.norm() > 1e-9 * scale.max(1e-300)) {
                return input("samples contain modes beyond the requested degree");
            }
            for (j, x) in buf.iter().take(j_max + 1).enumerate() {
                num[j][mu] += x * c.radius.powi(j as i32);
            }
        }
        for (j, d) in den.iter_mut().enumerate() {
            *d += c.radius.powi(2 * j as i32);
        }
    }
    Ok(num
        .into_iter()
        .zip(den)
        .map(|(v, d)| v.into_iter().map(|x| x / d).collect())
        .collect())
}

/// `Σ_j a_j w^j`.
pub fn evaluate_expansion(coeffs: &[Vec<C64>], w: C64) -> Vec<C64> {
    let r = coeffs.first().map_or(0, Vec::len);
    let mut out = vec![C64::new(0.0, 0.0); r];
    let mut wp = C64::new(1.0, 0.0);
    for a in coeffs {
        for (o, x) in out.iter_mut().zip(a) {
            *o += x * wp;
        }
        wp *= w;
    }
    out
}

/// Largest pointwise error of the expansion against `s` on a circle.
pub fn reconstruction_error<S: Fn(C64) -> Vec<C64>>(coeffs: &[Vec<C64>], s: S, radius: f64, angles: usize) -> f64 {
    (0..angles)
        .map(|k| {
            let w = C64::from_polar(radius, TAU * (k as f64 + 0.37) / angles as f64);
            let (a, b) = (evaluate_expansion(coeffs, w), s(w));
            a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct WeightedNorm {
    /// `∫_𝔻 |Φ|² |w|^{2δ} dA/π` by quadrature.
    pub quadrature: f64,
    /// `Σ_i ‖a_i‖²/(δ + i + 1)`.
    pub closed_form: f64,
    pub rel_error: f64,
    pub pass: bool,
}

/// Weighted norm of `Φ = Σ a_i w^i` on the unit disk, normalized so that
/// the constant term has weight `1/(δ+1)`.
pub fn weighted_norm_decomposition(coeffs: &[Vec<C64>], delta: f64) -> Result<WeightedNorm> {
    if !(delta > 0.0) || !delta.is_finite() {
        return input("δ must be positive");
    }
    let j = coeffs.len();
    let closed_form: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a.iter().map(|x| x.norm_sqr()).sum::<f64>() / (delta + i as f64 + 1.0))
        .sum();
    // u = |w|²: dA/π = du dθ/2π. Panels [2^{−k−1}, 2^{−k}] resolve u^δ at the origin.
    let mut breaks: Vec<f64> = (0..=60).map(|k| 0.5f64.powi(k)).collect();
    breaks.push(0.0);
    breaks.reverse();
    let angles = 2 * j + 2;
    let mut quadrature = 0.0;
    for w in breaks.windows(2) {
        for (u, wu) in gauss_legendre(j / 2 + 8, w[0], w[1])? {
            let mut ring = 0.0;
            for k in 0..angles {
                let z = C64::from_polar(u.sqrt(), TAU * k as f64 / angles as f64);
                ring += evaluate_expansion(coeffs, z).iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
            quadrature += wu * u.powf(delta) * ring / angles as f64;
        }
    }
    let rel_error = (quadrature - closed_form).abs() / closed_form.abs().max(f64::MIN_POSITIVE);
    Ok(WeightedNorm {
        quadrature,
        closed_form,
        rel_error,
        pass: rel_error < 1e-6 || (closed_form == 0.0 && quadrature.abs() < 1e-14),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn constant_and_monomial() {
        let s = [sample_circle(|_| vec![c(3.0)], 0.5, 9)];
        let a = homogeneous_coefficients(&s, 3).unwrap();
        assert!((a[0][0] - 3.0).norm() < 1e-14 && a[1..].iter().all(|v| v[0].norm() < 1e-14));

        let s = [sample_circle(|w| vec![w * w], 0.7, 9)];
        let a = homogeneous_coefficients(&s, 4).unwrap();
        for (j, v) in a.iter().enumerate() {
            let e = if j == 2 { 1.0 } else { 0.0 };
            assert!((v[0] - e).norm() < 1e-13);
        }
    }

    #[test]
    fn random_polynomial_with_held_out_circle() {
        let mut rng = sampling::rng(8);
        let truth: Vec<Vec<C64>> = (0..6).map(|_| sampling::gaussian_vec(&mut rng, 2)).collect();
        let s = |w: C64| evaluate_expansion(&truth, w);
        let circles = [sample_circle(s, 0.4, 16), sample_circle(s, 0.8, 16)];
        let a = homogeneous_coefficients(&circles, 5).unwrap();
        for (x, y) in a.iter().flatten().zip(truth.iter().flatten()) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!(reconstruction_error(&a, s, 0.6, 25) < 1e-8);
    }

    #[test]
    fn aliasing_is_detected() {
        let s = [sample_circle(|w| vec![w.powi(6)], 0.9, 9)];
        assert!(homogeneous_coefficients(&s, 3).is_err());
        let s = [sample_circle(|w| vec![w], 0.9, 4)];
        assert!(homogeneous_coefficients(&s, 2).is_err());
    }

    #[test]
    fn weighted_norm_examples() {
        let one = weighted_norm_decomposition(&[vec![c(1.0)]], 1.0).unwrap();
        assert_relative_eq!(one.quadrature, 0.5, max_relative = 1e-12);
        let w = weighted_norm_decomposition(&[vec![c(0.0)], vec![c(1.0)]], 1.0).unwrap();
        assert_relative_eq!(w.quadrature, 1.0 / 3.0, max_relative = 1e-12);
        let both = weighted_norm_decomposition(&[vec![c(1.0)], vec![c(1.0)]], 1.0).unwrap();
        assert_relative_eq!(both.quadrature, 0.5 + 1.0 / 3.0, max_relative = 1e-12);
        assert!(one.pass && w.pass && both.pass);
    }

    proptest! {
        #[test]
        fn orthogonality_identity(seed in 0u64..1000, delta in 0.05f64..5.0, deg in 0usize..7) {
            let mut rng = sampling::rng(seed);
            let a: Vec<Vec<C64>> = (0..=deg).map(|_| sampling::gaussian_vec(&mut rng, 2)).collect();
            let r = weighted_norm_decomposition(&a, delta).unwrap();
            prop_assert!(r.pass, "{r:?}");
        }
    }
}
