//! Schur complements of Hermitian forms on `(M₁ ⊕ M₂) ⊗ V` and the transfer
//! of k-positivity to the complement.

use rand::Rng;
use rayon::prelude::*;

use crate::bundle::BiForm;
use crate::error::{input, Error, Result};
use crate::hermitian::{ComplexMatrix, HermitianMatrix, TensorPoint, C64};
use crate::positivity::{rank_k_min, PositivityQuery};
use crate::sampling;

/// Condition-number cap for the `M₂ ⊗ V` block.
pub const MAX_BLOCK_CONDITION: f64 = 1e10;

/// Hermitian form on `(M₁ ⊕ M₂) ⊗ V` in orthonormal coordinates, indexed by
/// `(base direction, fiber index)` with the `M₁` directions first.
#[derive(Clone, Debug)]
pub struct BlockForm {
    m1: usize,
    m2: usize,
    r: usize,
    form: BiForm,
}

impl BlockForm {
    pub fn new(m1: usize, m2: usize, r: usize, matrix: HermitianMatrix) -> Result<Self> {
        if m1 == 0 || m2 == 0 || r == 0 {
            return input("block dimensions must be positive");
        }
        Ok(Self {
            m1,
            m2,
            r,
            form: BiForm::new(m1 + m2, r, matrix)?,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m1, self.m2, self.r)
    }

    pub fn form(&self) -> &BiForm {
        &self.form
    }

    fn split(&self) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let a = self.m1 * self.r;
        let b = self.m2 * self.r;
        let m = self.form.matrix().matrix();
        (m.block(0, 0, a, a), m.block(0, a, a, b), m.block(a, 0, b, a), m.block(a, a, b, b))
    }

    fn lower_block(&self) -> Result<HermitianMatrix> {
        let (_, _, _, d) = self.split();
        let d = HermitianMatrix::new(d)?;
        let cond = d.condition_number();
        if !(cond <= MAX_BLOCK_CONDITION) {
            return Err(Error::Precondition(format!(
                "M₂⊗V block is not positive definite or has condition number {cond:.3e} > {MAX_BLOCK_CONDITION:.0e}"
            )));
        }
        Ok(d)
    }

    /// Value of the form on `T₁ ⊕ T₂`.
    pub fn value(&self, t1: &TensorPoint, t2: &TensorPoint) -> Result<f64> {
        if t1.n() != self.m1 || t2.n() != self.m2 || t1.r() != self.r || t2.r() != self.r {
            return input("tensor shapes do not match the blocks");
        }
        let joined: Vec<C64> = t1.as_slice().iter().chain(t2.as_slice()).copied().collect();
        self.form.value(&TensorPoint::from_vec(self.m1 + self.m2, self.r, joined)?)
    }
}

/// `𝔍₁₁ − 𝔍₁₂·𝔍₂₂⁻¹·𝔍₂₁` as a form on `M₁ ⊗ V`.
pub fn schur_complement(b: &BlockForm) -> Result<BiForm> {
    let d = b.lower_block()?;
    let (a, bb, _, _) = b.split();
    let x = d.cholesky()?.solve_matrix(&bb.adjoint());
    BiForm::new(b.m1, b.r, HermitianMatrix::new(&a - &(&bb * &x))?)
}

/// Minimizing completion `T₂ = −𝔍₂₂⁻¹𝔍₂₁ T₁`.
pub fn completion(b: &BlockForm, t1: &TensorPoint) -> Result<TensorPoint> {
    if t1.n() != b.m1 || t1.r() != b.r {
        return input("tensor shape does not match the M₁ block");
    }
    let d = b.lower_block()?;
    let (_, _, c, _) = b.split();
    // In the t†Jt picture J = conj(Q).
    let rhs = c.conj().matvec(t1.as_slice());
    let sol = d.conj().cholesky()?.solve(&rhs);
    TensorPoint::from_vec(b.m2, b.r, sol.into_iter().map(|z| -z).collect())
}

#[derive(Clone, Debug)]
pub struct SchurConfig {
    pub trials: usize,
    /// Upper bounds for `(m₁, m₂, r)`; each trial draws dimensions up to these.
    pub max_dims: (usize, usize, usize),
    pub k: usize,
    pub seed: u64,
    /// Rejection attempts per trial before giving up.
    pub max_attempts: usize,
}

impl Default for SchurConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            max_dims: (2, 2, 3),
            k: 1,
            seed: 42,
            max_attempts: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SchurTrial {
    pub dims: (usize, usize, usize),
    pub k: usize,
    pub form_min: f64,
    pub complement_min: f64,
    pub scale: f64,
    pub completion_residual: f64,
    pub minimal: bool,
    pub violation: bool,
}

#[derive(Clone, Debug)]
pub struct SchurReport {
    pub trials: Vec<SchurTrial>,
    pub violations: usize,
    pub max_completion_residual: f64,
    pub all_minimal: bool,
    /// Trials for which no admissible form was found.
    pub insufficient: usize,
}

/// k-positive form with positive-definite `M₂⊗V` block, by shifting random
/// Hermitian matrices and rejecting.
pub fn sample_k_positive(
    dims: (usize, usize, usize),
    k: usize,
    rng: &mut sampling::SeededRng,
    max_attempts: usize,
) -> Result<Option<(BlockForm, f64)>> {
    let (m1, m2, r) = dims;
    let dim = (m1 + m2) * r;
    for _ in 0..max_attempts {
        let h = sampling::hermitian(rng, dim);
        let probe = BiForm::new(m1 + m2, r, h.clone())?;
        let m = rank_k_min(&PositivityQuery::new(probe, k).restarts(8).seed(rng.random()))?.min_value;
        let margin = 0.05 + 0.95 * rng.random::<f64>();
        let shifted = h.add(&HermitianMatrix::identity(dim).scale_re(margin - m));
        let b = BlockForm::new(m1, m2, r, shifted)?;
        if b.lower_block().is_err() {
            continue;
        }
        let v = rank_k_min(&PositivityQuery::new(b.form.clone(), k).seed(rng.random()))?.min_value;
        if v > 0.0 {
            return Ok(Some((b, v)));
        }
    }
    Ok(None)
}

fn run_trial(cfg: &SchurConfig, seed: u64) -> Result<Option<SchurTrial>> {
    let mut rng = sampling::rng(seed);
    let (a1, a2, ar) = cfg.max_dims;
    let dims = (rng.random_range(1..=a1), rng.random_range(1..=a2), rng.random_range(1..=ar));
    let k = cfg.k.min((dims.0 + dims.1).min(dims.2)).max(1);
    let Some((b, form_min)) = sample_k_positive(dims, k, &mut rng, cfg.max_attempts)? else {
        return Ok(None);
    };
    let s = schur_complement(&b)?;
    let ks = k.min(dims.0.min(dims.2));
    let complement_min = rank_k_min(&PositivityQuery::new(s.clone(), ks).seed(rng.random()))?.min_value;
    let scale = b.form.scale();

    let t1 = sampling::tensor_of_rank(&mut rng, dims.0, dims.2, ks);
    let t2 = completion(&b, &t1)?;
    let full = b.value(&t1, &t2)?;
    let reduced = s.value(&t1)?;
    let completion_residual = (full - reduced).abs() / scale;

    let mut minimal = true;
    for _ in 0..8 {
        let d = sampling::gaussian_vec(&mut rng, dims.1 * dims.2);
        for eps in [1e-1, 1e-3] {
            let pert: Vec<C64> = t2.as_slice().iter().zip(&d).map(|(a, x)| a + x * eps).collect();
            let v = b.value(&t1, &TensorPoint::from_vec(dims.1, dims.2, pert)?)?;
            if v < full - 1e-12 * scale {
                minimal = false;
            }
        }
    }
    Ok(Some(SchurTrial {
        dims,
        k,
        form_min,
        complement_min,
        scale,
        completion_residual,
        minimal,
        violation: complement_min < -1e-8 * s.scale(),
    }))
}

/// Randomized check that Schur complements of k-positive forms are k-positive.
pub fn verify_schur_positivity(cfg: &SchurConfig) -> Result<SchurReport> {
    if cfg.k == 0 {
        return input("k must be at least 1");
    }
    let mut seeder = sampling::rng(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.trials).map(|_| seeder.random()).collect();
    let results: Vec<Result<Option<SchurTrial>>> = seeds.par_iter().map(|&s| run_trial(cfg, s)).collect();
    let mut trials = Vec::with_capacity(cfg.trials);
    let mut insufficient = 0;
    for r in results {
        match r? {
            Some(t) => trials.push(t),
            None => insufficient += 1,
        }
    }
    Ok(SchurReport {
        violations: trials.iter().filter(|t| t.violation).count(),
        max_completion_residual: trials.iter().map(|t| t.completion_residual).fold(0.0, f64::max),
        all_minimal: trials.iter().all(|t| t.minimal),
        insufficient,
        trials,
    })
}
