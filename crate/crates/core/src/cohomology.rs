//! Line-bundle cohomology on projective space, dimension bookkeeping in long
//! exact sequences, and the extension verdict for `K ⊗ T` on `Pⁿ`.

use std::fmt;

use crate::error::{input, Error, Result};

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// `h^q(Pⁿ, 𝒪(d))` by the Bott formula.
pub fn hq_line(n: usize, d: i64, q: usize) -> Result<u64> {
    if n == 0 {
        return input("projective space needs n ≥ 1");
    }
    let ni = n as i64;
    Ok(if q == 0 && d >= 0 {
        binomial(ni + d, ni)
    } else if q == n && d <= -ni - 1 {
        binomial(-d - 1, ni)
    } else {
        0
    })
}

/// `χ(Pⁿ, 𝒪(d)) = C(n+d, n)` as a polynomial in `d`.
pub fn chi_line(n: usize, d: i64) -> i128 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 1..=n as i128 {
        num *= d as i128 + i;
        den *= i;
    }
    num / den
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesTerm {
    pub label: String,
    pub dim: Option<u64>,
    /// Filled in by [`LesLedger::solve`] rather than given.
    pub solved: bool,
}

/// Dimensions along an exact sequence `0 → X₁ → … → X_N → 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LesLedger {
    terms: Vec<LesTerm>,
}

impl LesLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: impl Into<String>, dim: Option<u64>) {
        self.terms.push(LesTerm {
            label: label.into(),
            dim,
            solved: false,
        });
    }

    pub fn terms(&self) -> &[LesTerm] {
        &self.terms
    }

    pub fn dim(&self, label: &str) -> Option<u64> {
        self.terms.iter().find(|t| t.label == label).and_then(|t| t.dim)
    }

    /// Maximal runs of terms that are not known to vanish.
    fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, t) in self.terms.iter().enumerate() {
            if t.dim == Some(0) {
                if start < i {
                    out.push(start..i);
                }
                start = i + 1;
            }
        }
        if start < self.terms.len() {
            out.push(start..self.terms.len());
        }
        out
    }

    /// Fills in every unknown that is the only unknown of a zero-bounded
    /// segment, repeating until nothing changes.
    pub fn solve(&mut self) -> Result<()> {
        loop {
            let mut progress = false;
            for seg in self.segments() {
                let unknown: Vec<usize> = seg.clone().filter(|&i| self.terms[i].dim.is_none()).collect();
                if unknown.len() != 1 {
                    continue;
                }
                let u = unknown[0];
                let mut s: i128 = 0;
                for i in seg.clone().filter(|&i| i != u) {
                    let sign = if (i - seg.start) % 2 == 0 { 1 } else { -1 };
                    s += sign * self.terms[i].dim.unwrap() as i128;
                }
                let sign_u: i128 = if (u - seg.start) % 2 == 0 { 1 } else { -1 };
                let v = -s * sign_u;
                if v < 0 {
                    return Err(Error::Input(format!(
                        "ledger is inconsistent: {} would have dimension {v}",
                        self.terms[u].label
                    )));
                }
                self.terms[u].dim = Some(v as u64);
                self.terms[u].solved = true;
                progress = true;
            }
            if !progress {
                return Ok(());
            }
        }
    }

    /// Largest `|Σ(−1)^i dim X_i|` over fully known zero-bounded segments.
    pub fn exactness_residual(&self) -> u64 {
        self.segments()
            .into_iter()
            .filter(|s| s.clone().all(|i| self.terms[i].dim.is_some()))
            .map(|s| {
                s.clone()
                    .map(|i| {
                        let d = self.terms[i].dim.unwrap() as i128;
                        if (i - s.start) % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .sum::<i128>()
                    .unsigned_abs() as u64
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_solved(&self) -> bool {
        self.terms.iter().all(|t| t.dim.is_some())
    }
}

impl fmt::Display for LesLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0")?;
        for t in &self.terms {
            match t.dim {
                Some(d) => write!(f, " → {}[{d}{}]", t.label, if t.solved { "*" } else { "" })?,
                None => write!(f, " → {}[?]", t.label)?,
            }
        }
        write!(f, " → 0")
    }
}

/// Label of `H^q(K ⊗ T(d))` in [`euler_ledger`].
pub fn kt_label(q: usize) -> String {
    format!("H^{q}(K⊗T(d))")
}

/// Long exact sequence of `0 → 𝒪(d−n−1) → 𝒪(d−n)^{n+1} → K⊗T(d) → 0` on
/// `Pⁿ`, with the line-bundle terms from the Bott formula, solved.
pub fn euler_ledger(n: usize, d: i64) -> Result<LesLedger> {
    if n < 2 {
        return input("need n ≥ 2");
    }
    let ni = n as i64;
    let mut l = LesLedger::new();
    for q in 0..=n {
        l.push(format!("H^{q}(O({}))", d - ni - 1), Some(hq_line(n, d - ni - 1, q)?));
        l.push(
            format!("H^{q}(O({})^{})", d - ni, n + 1),
            Some((n as u64 + 1) * hq_line(n, d - ni, q)?),
        );
        l.push(kt_label(q), None);
    }
    l.solve()?;
    Ok(l)
}

/// `h^q(Pⁿ, K ⊗ T ⊗ 𝒪(d))`, or [`Error::Undetermined`] when the sequence
/// does not force it.
pub fn hq_k_tensor_t(n: usize, d: i64, q: usize) -> Result<u64> {
    if q > n {
        return if n >= 2 { Ok(0) } else { input("need n ≥ 2") };
    }
    let l = euler_ledger(n, d)?;
    l.dim(&kt_label(q))
        .ok_or_else(|| Error::Undetermined(format!("h^{q}(K⊗T({d})) on P^{n} is not forced by the Euler sequence: {l}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RestrictionVerdict {
    pub surjective: bool,
    pub coker_dim: u64,
}

/// Surjectivity of `H⁰(Pⁿ, K⊗T(d)) → H⁰(S, K_S ⊗ T|_S)` for a hypersurface
/// `S` of degree `d`.
pub fn adjoint_restriction_verdict(n: usize, d: i64) -> Result<RestrictionVerdict> {
    if d < 1 {
        return Err(Error::Precondition(format!("hypersurface degree must be at least 1, got {d}")));
    }
    let twisted = hq_k_tensor_t(n, d, 1)?;
    if twisted != 0 {
        return Err(Error::Undetermined(format!(
            "h¹(K⊗T({d})) = {twisted} on P^{n}; the rank of the connecting map is not determined"
        )));
    }
    let coker_dim = hq_k_tensor_t(n, 0, 1)?;
    Ok(RestrictionVerdict {
        surjective: coker_dim == 0,
        coker_dim,
    })
}

/// `Σ(−1)^q h^q(K⊗T(d))` from the solved ledger.
pub fn chi_k_tensor_t(n: usize, d: i64) -> Result<i128> {
    let mut s = 0;
    for q in 0..=n {
        let h = hq_k_tensor_t(n, d, q)? as i128;
        s += if q % 2 == 0 { h } else { -h };
    }
    Ok(s)
}
