//! The scalar coefficient families entering the collision-tensor assembly:
//! the Hermite splitting coefficients `a` and the spherical reduction
//! coefficients `C`. Factorial ratios go through log-Gamma to stay inside
//! double-precision range at large degrees.

use super::index::MultiIndex;
use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::sync::OnceLock;

pub(crate) fn ln_factorial(n: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..=255u32).map(|k| ln_gamma(k as f64 + 1.0)).collect());
    match table.get(n as usize) {
        Some(&v) => v,
        None => ln_gamma(n as f64 + 1.0),
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    // Exact in f64 up to 22!; larger values only appear inside
    // log-space ratios.
    (1..=n).map(|k| k as f64).product()
}

/// ln((2n+1)!!) via (2n+1)!! = (2n+1)! / (2^n n!).
pub(crate) fn ln_double_factorial_odd(n: u32) -> f64 {
    ln_factorial(2 * n + 1) - n as f64 * std::f64::consts::LN_2 - ln_factorial(n)
}

/// Splitting coefficient `a_{i'j'}^{ij}` for rewriting a product of two
/// Hermite polynomials in `(v, w)` in terms of the mean and relative
/// variables. Requires the degree balance `i' + j' = i + j`.
pub fn a_coeff(i: u32, j: u32, ip: u32, jp: u32) -> Result<f64> {
    if ip + jp != i + j {
        return Err(Error::Contract(format!(
            "a_coeff requires i' + j' = i + j, got ({i},{j}) -> ({ip},{jp})"
        )));
    }
    let s_min = ip.saturating_sub(j);
    let s_max = ip.min(i);
    if s_min > s_max {
        return Ok(0.0);
    }
    let ln_pref = ln_factorial(i) + ln_factorial(j);
    let mut sum = 0.0;
    for s in s_min..=s_max {
        // jp - i + s >= 0 holds because s >= ip - j = i - jp.
        let ln_term = ln_pref
            - ln_factorial(s)
            - ln_factorial(i - s)
            - ln_factorial(ip - s)
            - ln_factorial(jp + s - i);
        let sign = if (jp + s - i) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_term.exp();
    }
    Ok(sum * (-0.5 * (ip + jp) as f64).exp2())
}

/// Reduction coefficient `C_{m1 m2 m3}^{k1 k2 k3}` from rewriting Hermite
/// polynomials in Laguerre/harmonic form:
/// `(-1)^m 4 pi m! / (2(k-m)+1)!! * k1! k2! k3! / (m1! m2! m3!)`.
pub fn c_coeff(k_idx: MultiIndex, m_idx: MultiIndex) -> f64 {
    let k = k_idx.degree();
    let m = m_idx.degree();
    let ln_mag = (4.0 * std::f64::consts::PI).ln() + ln_factorial(m)
        - ln_double_factorial_odd(k - m)
        + ln_factorial(k_idx.k1)
        + ln_factorial(k_idx.k2)
        + ln_factorial(k_idx.k3)
        - ln_factorial(m_idx.k1)
        - ln_factorial(m_idx.k2)
        - ln_factorial(m_idx.k3);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * ln_mag.exp()
}
