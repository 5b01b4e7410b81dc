//! k-positivity of curvature forms: exact Nakano test, rank-constrained
//! minimization, a sampling oracle and the Demailly operator on `(n,q)`-forms.

mod brute;
mod demailly;
mod sections;

use rand::Rng;
use rayon::prelude::*;

pub use brute::{brute_force_min, brute_force_search};
pub use demailly::{demailly_check, demailly_check_at, multi_indices, DemaillyCheck};
pub use sections::{harmonic_sum, harmonic_sum_search, k_prop_identity, log_norm_hessian, HarmonicProbe, KPropCheck};

use crate::bundle::BiForm;
use crate::error::{input, Result};
use crate::hermitian::{ComplexMatrix, HermitianMatrix, TensorPoint, C64};
use crate::sampling::{self, SeededRng};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug)]
pub struct PositivityQuery {
    pub form: BiForm,
    pub k: usize,
    pub tol: f64,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl PositivityQuery {
    pub fn new(form: BiForm, k: usize) -> Self {
        Self {
            form,
            k,
            tol: DEFAULT_TOL,
            restarts: DEFAULT_RESTARTS,
            max_iters: DEFAULT_MAX_ITERS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Positive,
    Nonnegative,
    Indefinite,
}

impl Status {
    pub fn classify(min_value: f64, tol: f64, scale: f64) -> Self {
        if min_value > tol * scale {
            Status::Positive
        } else if min_value.abs() <= tol * scale {
            Status::Nonnegative
        } else {
            Status::Indefinite
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Positive => "positive",
            Status::Nonnegative => "nonnegative",
            Status::Indefinite => "indefinite",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub min_value: f64,
    /// Unit-Frobenius tensor of rank at most `k` attaining `min_value`.
    pub witness: TensorPoint,
    pub status: Status,
    pub converged: bool,
    pub iterations: usize,
}

/// Smallest eigenvalue of the form: its minimum over all unit tensors.
pub fn nakano_min(form: &BiForm) -> f64 {
    form.min_eigenvalue()
}

fn exact_min(form: &BiForm, tol: f64) -> Result<Verdict> {
    let e = form.inertia().eigh();
    let witness = TensorPoint::from_vec(form.n(), form.r(), e.vector(0))?;
    let min_value = form.value(&witness)?;
    Ok(Verdict {
        min_value,
        witness,
        status: Status::classify(min_value, tol, form.scale()),
        converged: true,
        iterations: 0,
    })
}

/// Replaces `m` by a matrix with orthonormal columns spanning at least its
/// column space; degenerate columns are refilled at random.
fn orthonormalize(m: &mut ComplexMatrix, rng: &mut SeededRng) {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        let mut tries = 0;
        loop {
            let mut v = m.column(j);
            let before = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for _pass in 0..2 {
                for p in 0..j {
                    let u = m.column(p);
                    let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(&u) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-10 * before.max(1e-300) && norm > 1e-300 {
                m.set_column(j, &v.iter().map(|z| z / norm).collect::<Vec<_>>());
                break;
            }
            tries += 1;
            assert!(tries < 100, "could not complete an orthonormal frame");
            m.set_column(j, &sampling::gaussian_vec(rng, rows));
        }
    }
}

/// `L† J L` for the linear map `L`.
fn reduce(j: &ComplexMatrix, l: &ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrized(&(&l.adjoint() * j) * l)
}

struct Run {
    value: f64,
    tensor: ComplexMatrix,
    converged: bool,
    iterations: usize,
}

fn alternating_run(j: &ComplexMatrix, n: usize, r: usize, k: usize, max_iters: usize, scale: f64, seed: u64) -> Run {
    let mut rng = sampling::rng(seed);
    let mut y = sampling::matrix(&mut rng, r, k);
    orthonormalize(&mut y, &mut rng);
    let mut prev = f64::INFINITY;
    let mut value = f64::INFINITY;
    let mut tensor = ComplexMatrix::zeros(n, r);
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..max_iters {
        iterations = it + 1;
        // t[(i,μ)] = Σ_α Y[μ][α]·x[(i,α)]
        let ly = ComplexMatrix::from_fn(n * r, n * k, |row, col| {
            let (i, mu) = (row / r, row % r);
            let (i2, alpha) = (col / k, col % k);
            if i == i2 {
                y[(mu, alpha)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ex = reduce(j, &ly).eigh();
        let xv = ex.vector(0);
        let mut x = ComplexMatrix::from_fn(n, k, |i, alpha| xv[i * k + alpha]);
        orthonormalize(&mut x, &mut rng);

        // t[(i,μ)] = Σ_α X[i][α]·y[(α,μ)]
        let lx = ComplexMatrix::from_fn(n * r, k * r, |row, col| {
            let (i, mu) = (row / r, row % r);
            let (alpha, mu2) = (col / r, col % r);
            if mu == mu2 {
                x[(i, alpha)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ey = reduce(j, &lx).eigh();
        let yv = ey.vector(0);
        value = ey.values[0];
        y = ComplexMatrix::from_fn(r, k, |mu, alpha| yv[alpha * r + mu]);
        tensor = &x * &y.transpose();

        if prev - value <= 1e-14 * scale {
            converged = true;
            break;
        }
        prev = value;
        orthonormalize(&mut y, &mut rng);
    }
    Run {
        value,
        tensor,
        converged,
        iterations,
    }
}

/// Minimum of the form over unit tensors of rank at most `k`.
///
/// Alternating exact eigen-solves in the two tensor factors, restarted from
/// seeded random frames; for `k ≥ min(n, r)` the smallest eigenvalue is used.
pub fn rank_k_min(q: &PositivityQuery) -> Result<Verdict> {
    let (n, r) = (q.form.n(), q.form.r());
    if q.k == 0 {
        return input("rank bound k must be at least 1");
    }
    if q.restarts == 0 {
        return input("at least one restart is required");
    }
    if !(q.tol >= 0.0) {
        return input("tolerance must be non-negative");
    }
    let full = n.min(r);
    let k = if q.k > full {
        log::warn!("rank bound {} exceeds min(n, r) = {full}; clamped", q.k);
        full
    } else {
        q.k
    };
    if k == full {
        return exact_min(&q.form, q.tol);
    }

    let scale = q.form.scale();
    let j = q.form.inertia().into_matrix();
    let mut seeder = sampling::rng(q.seed);
    let seeds: Vec<u64> = (0..q.restarts).map(|_| seeder.random()).collect();
    let runs: Vec<Run> = seeds
        .par_iter()
        .map(|&s| alternating_run(&j, n, r, k, q.max_iters.max(1), scale, s))
        .collect();

    let mut best = 0;
    for (idx, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = idx;
        }
    }
    let converged = runs.iter().any(|run| run.converged);
    let iterations = runs.iter().map(|run| run.iterations).sum();
    let run = &runs[best];
    let witness = TensorPoint::new(run.tensor.clone())?.normalized();
    let min_value = q.form.value(&witness)?;
    Ok(Verdict {
        min_value,
        witness,
        status: Status::classify(min_value, q.tol, scale),
        converged,
        iterations,
    })
}

/// k-positivity with default tolerance, restarts and seed.
pub fn is_k_positive(form: &BiForm, k: usize) -> Result<bool> {
    Ok(rank_k_min(&PositivityQuery::new(form.clone(), k))?.status == Status::Positive)
}

/// Minimum values for `k = 1..min(n, r)`, forced non-increasing: each entry
/// is the smallest minimum found at that rank or below it.
pub fn chain(form: &BiForm) -> Result<Vec<f64>> {
    let full = form.n().min(form.r());
    let mut out = Vec::with_capacity(full);
    let mut running = f64::INFINITY;
    for k in 1..=full {
        let v = rank_k_min(&PositivityQuery::new(form.clone(), k))?.min_value;
        running = running.min(v);
        out.push(running);
    }
    Ok(out)
}

/// Raw minima for `k = 1..min(n, r)`, without the running minimum.
pub fn raw_chain(form: &BiForm, seed: u64) -> Result<Vec<f64>> {
    let full = form.n().min(form.r());
    (1..=full)
        .map(|k| Ok(rank_k_min(&PositivityQuery::new(form.clone(), k).seed(seed))?.min_value))
        .collect()
}
