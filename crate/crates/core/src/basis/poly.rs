//! Evaluation of the univariate polynomial families via their three-term
//! recurrences, plus the tensorized Hermite basis.

use super::index::MultiIndex;
use crate::error::{Error, Result};

/// Probabilists' Hermite polynomial `He_n(x)`.
///
/// Recurrence: `He_{n+1}(x) = x He_n(x) - n He_{n-1}(x)`.
pub fn hermite_eval_1d(n: u32, x: f64) -> f64 {
    let mut prev = 0.0; // He_{-1}, unused for n = 0
    let mut cur = 1.0;
    for k in 0..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Tensorized Hermite polynomial `H^{k1 k2 k3}(v)`.
pub fn hermite_eval(idx: MultiIndex, v: [f64; 3]) -> f64 {
    hermite_eval_1d(idx.k1, v[0]) * hermite_eval_1d(idx.k2, v[1]) * hermite_eval_1d(idx.k3, v[2])
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)`, `alpha > -1`.
pub fn laguerre_eval(n: u32, alpha: f64, x: f64) -> Result<f64> {
    if alpha <= -1.0 {
        return Err(Error::Domain(format!(
            "laguerre_eval requires alpha > -1, got {alpha}"
        )));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Legendre polynomial `P_k(x)` by the Bonnet recurrence.
pub fn legendre_eval(k: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = x;
    for n in 1..k {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
