use std::f64::consts::PI;

use super::grid::DomainGrid;
use crate::error::{input, Result};
use crate::hermitian::C64;

#[derive(Clone, Copy, Debug)]
pub struct CoareaValue {
    /// `e^{−t}∫_{|z|² < e^t} F dA`.
    pub value: f64,
    /// `π·F(0)`.
    pub limit: f64,
    /// `|value − limit|/|limit|`, or the absolute error when the limit vanishes.
    pub error: f64,
}

/// Normalized integral of `F` over the sublevel disk `{|z|² < e^t}`, with
/// the polar resolution doubled until it settles.
pub fn coarea_limit<F: Fn(C64) -> f64>(f: F, t: f64) -> Result<CoareaValue> {
    if !(t <= -4.0) {
        return input(format!("coarea limit needs t ≤ −4, got {t}"));
    }
    let rho = (0.5 * t).exp();
    let (mut n_r, mut n_theta) = (4, 8);
    let mut prev = f64::NAN;
    let mut value = f64::NAN;
    for _ in 0..8 {
        let grid = DomainGrid::with_breaks(&[0.0, rho], n_r, n_theta)?;
        value = (-t).exp() * grid.integrate(&f);
        if (value - prev).abs() <= 1e-14 * value.abs().max(1e-300) {
            break;
        }
        prev = value;
        n_r *= 2;
        n_theta *= 2;
    }
    let limit = PI * f(C64::new(0.0, 0.0));
    let error = if limit != 0.0 {
        (value - limit).abs() / limit.abs()
    } else {
        value.abs()
    };
    Ok(CoareaValue { value, limit, error })
}

#[derive(Clone, Debug)]
pub struct LiminfCheck {
    /// `e^{−t}∫_t^0 e^{−p(s−t)} dν(s)` at every grid point.
    pub values: Vec<f64>,
    /// Minimum over the tail `t ≤ tail_end`.
    pub min_value: f64,
    pub argmin: f64,
    /// `2/(p−1)`.
    pub bound: f64,
    pub pass: bool,
}

/// Stieltjes integrals by the trapezoid rule, accumulated from `t = 0`
/// backwards, and their minimum over the tail of the grid.
pub fn liminf_bound_check(ts: &[f64], nu: &[f64], p: f64, tail_end: f64) -> Result<LiminfCheck> {
    if !(p > 1.0) {
        return input("need p > 1");
    }
    if ts.len() < 2 || ts.len() != nu.len() {
        return input("need at least two samples of ν on the grid");
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) || *ts.last().unwrap() != 0.0 {
        return input("t grid must increase strictly and end at 0");
    }
    if nu.windows(2).any(|w| w[1] < w[0]) {
        return input("ν must be non-decreasing");
    }
    let n = ts.len();
    let mut k = vec![0.0; n];
    for i in (0..n - 1).rev() {
        let decay = (-p * (ts[i + 1] - ts[i])).exp();
        k[i] = decay * k[i + 1] + 0.5 * (1.0 + decay) * (nu[i + 1] - nu[i]);
    }
    let values: Vec<f64> = k.iter().zip(ts).map(|(k, t)| (-t).exp() * k).collect();
    let (mut min_value, mut argmin) = (f64::INFINITY, f64::NAN);
    for (v, &t) in values.iter().zip(ts) {
        if t <= tail_end && *v < min_value {
            min_value = *v;
            argmin = t;
        }
    }
    if argmin.is_nan() {
        return input("no grid point in the tail");
    }
    let bound = 2.0 / (p - 1.0);
    Ok(LiminfCheck {
        values,
        min_value,
        argmin,
        bound,
        pass: min_value <= bound + 1e-9,
    })
}
