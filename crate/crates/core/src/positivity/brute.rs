use rayon::prelude::*;

use crate::bundle::BiForm;
use crate::error::{input, Result};
use crate::hermitian::{ComplexMatrix, TensorPoint, C64};
use crate::sampling;

pub const MIN_SAMPLES: usize = 100_000;
const CHUNK: usize = 4096;
const REFINED: usize = 12;
const DESCENT_ITERS: usize = 4000;

fn quad(j: &ComplexMatrix, t: &[C64]) -> (f64, Vec<C64>) {
    let jt = j.matvec(t);
    let num: f64 = t.iter().zip(&jt).map(|(a, b)| (a.conj() * b).re).sum();
    (num, jt)
}

fn rayleigh(j: &ComplexMatrix, x: &ComplexMatrix, y: &ComplexMatrix) -> (f64, Vec<C64>, f64) {
    let t = (x * &y.transpose()).into_vec();
    let nt: f64 = t.iter().map(|z| z.norm_sqr()).sum();
    let (num, jt) = quad(j, &t);
    let f = num / nt;
    let g = jt.iter().zip(&t).map(|(a, b)| (a - b * f) / nt).collect();
    (f, g, nt)
}

/// Steepest descent on the factors of `T = X·Yᵀ` with backtracking.
fn descend(j: &ComplexMatrix, mut x: ComplexMatrix, mut y: ComplexMatrix) -> (f64, ComplexMatrix) {
    let (n, r) = (x.rows(), y.rows());
    let (mut f, mut g, _) = rayleigh(j, &x, &y);
    let mut step = 1.0;
    for _ in 0..DESCENT_ITERS {
        let gm = ComplexMatrix::new(n, r, g.clone()).expect("finite gradient");
        let gx = &gm * &y.conj();
        let gy = &gm.transpose() * &x.conj();
        let gnorm2 = gx.frobenius_norm().powi(2) + gy.frobenius_norm().powi(2);
        if gnorm2 < 1e-26 {
            break;
        }
        let mut accepted = false;
        while step > 1e-12 {
            let x2 = &x - &gx.scale_re(step);
            let y2 = &y - &gy.scale_re(step);
            let (f2, g2, nt) = rayleigh(j, &x2, &y2);
            if f2 <= f - 1e-4 * step * gnorm2 {
                // keep ‖T‖ = 1 so the step size stays meaningful
                let s = nt.powf(-0.25);
                x = x2.scale_re(s);
                y = y2.scale_re(s);
                f = f2;
                g = g2.iter().map(|z| z * nt.sqrt()).collect();
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f, &x * &y.transpose())
}

/// Sampling oracle for the rank-`k` minimum: at least `1e5` seeded random
/// unit tensors of rank `≤ k`, best candidates refined by gradient descent on
/// the tensor factors. The result is an upper bound for the true minimum.
pub fn brute_force_search(form: &BiForm, k: usize, grid_density: usize, seed: u64) -> Result<(f64, TensorPoint)> {
    let (n, r) = (form.n(), form.r());
    if n * r > 12 {
        return input(format!("brute force limited to n·r ≤ 12, got {}", n * r));
    }
    if k == 0 {
        return input("rank bound k must be at least 1");
    }
    let k = k.min(n.min(r));
    let samples = grid_density.max(MIN_SAMPLES);
    let j = form.inertia().into_matrix();
    let chunks = samples.div_ceil(CHUNK);

    let mut candidates: Vec<(f64, usize, ComplexMatrix, ComplexMatrix)> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = sampling::rng(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let count = CHUNK.min(samples - c * CHUNK);
            let mut best: Vec<(f64, usize, ComplexMatrix, ComplexMatrix)> = Vec::new();
            for s in 0..count {
                let x = sampling::matrix(&mut rng, n, k);
                let y = sampling::matrix(&mut rng, r, k);
                let t = (&x * &y.transpose()).into_vec();
                let nt: f64 = t.iter().map(|z| z.norm_sqr()).sum();
                if nt == 0.0 {
                    continue;
                }
                let v = quad(&j, &t).0 / nt;
                if best.len() < REFINED || v < best[best.len() - 1].0 {
                    best.push((v, c * CHUNK + s, x, y));
                    best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    best.truncate(REFINED);
                }
            }
            best
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.truncate(REFINED);

    let refined: Vec<(f64, ComplexMatrix)> = candidates
        .into_par_iter()
        .map(|(_, _, x, y)| descend(&j, x, y))
        .collect();
    let mut best = 0;
    for (i, (v, _)) in refined.iter().enumerate() {
        if *v < refined[best].0 {
            best = i;
        }
    }
    let witness = TensorPoint::new(refined[best].1.clone())?.normalized();
    Ok((form.value(&witness)?, witness))
}

/// Minimum found by [`brute_force_search`] with seed 0.
pub fn brute_force_min(form: &BiForm, k: usize, grid_density: usize) -> Result<f64> {
    Ok(brute_force_search(form, k, grid_density, 0)?.0)
}
