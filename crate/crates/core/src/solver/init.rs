//! The three reference initial conditions and the closed-form
//! Maxwell-molecule solution used as an exact oracle.

use super::SpectralState;
use crate::basis::{factorial, hermite_eval_1d, index_set, n_basis};
use crate::error::{Error, Result};
use crate::kernel::KernelModel;
use crate::quadrature::{adaptive_best_effort, gauss_hermite, QuadratureSpec};

use std::f64::consts::PI;

/// Parameters of the closed-form relaxing solution for Maxwell molecules:
/// `tau(t) = 1 - exp((pi/3) b2 (t + t0))` with `b2 < 0`.
#[derive(Debug, Clone, Copy)]
pub struct BkwReference {
    b2: f64,
    t0: f64,
}

impl BkwReference {
    /// Positivity bound on the exponent at t = 0.
    const MIN_EXPONENT: f64 = 0.916_290_731_874_155; // ln(5/2)

    /// Builds the reference with the conventional exponent value 0.92.
    pub fn from_kernel(model: &KernelModel) -> Result<Self> {
        Self::with_exponent(model, 0.92)
    }

    /// Builds the reference with `-(pi/3) b2 t0 = exponent`, taking the
    /// rate constant from the degree-2 angular integral of the kernel.
    pub fn with_exponent(model: &KernelModel, exponent: f64) -> Result<Self> {
        if model.eta() != 5.0 {
            return Err(Error::Domain(format!(
                "the closed-form solution exists only for eta = 5, got {}",
                model.eta()
            )));
        }
        let b2 = model.b2_factor()?;
        if !(b2 < 0.0) {
            // tau(t) must lie in (0, 1); this requires a negative rate.
            return Err(Error::InternalConsistency(format!(
                "degree-2 angular integral has unexpected sign: b2 = {b2}"
            )));
        }
        let t0 = exponent / (-(PI / 3.0) * b2);
        Self::new(b2, t0)
    }

    /// Validates the positivity constraint `-(pi/3) b2 t0 >= ln(5/2)`.
    pub fn new(b2: f64, t0: f64) -> Result<Self> {
        if -(PI / 3.0) * b2 * t0 < Self::MIN_EXPONENT {
            return Err(Error::Domain(format!(
                "BKW parameters violate positivity: -(pi/3) b2 t0 = {} < ln(5/2)",
                -(PI / 3.0) * b2 * t0
            )));
        }
        Ok(Self { b2, t0 })
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// `exp((pi/3) b2 (t + t0))`, the decaying factor of the solution.
    pub fn exp_factor(&self, t: f64) -> f64 {
        (PI / 3.0 * self.b2 * (t + self.t0)).exp()
    }

    /// Time-dependent temperature-like parameter `tau(t) in (0, 1)`.
    pub fn tau(&self, t: f64) -> f64 {
        1.0 - self.exp_factor(t)
    }
}

/// Exact expansion coefficients of the closed-form solution at time `t`:
/// nonzero only for all-even triples,
/// `f_k = [-E/2]^{d/2} (1 - d/2) / ((k1/2)! (k2/2)! (k3/2)!)`.
pub fn bkw_coeffs(t: f64, reference: &BkwReference, m: u32) -> Result<SpectralState> {
    let e = reference.exp_factor(t);
    let base = -0.5 * e;
    let mut coeffs = vec![0.0; n_basis(m)];
    for idx in index_set(m) {
        let [k1, k2, k3] = idx.components();
        if k1 % 2 != 0 || k2 % 2 != 0 || k3 % 2 != 0 {
            continue;
        }
        let half = (idx.degree() / 2) as i32;
        coeffs[idx.rank()] = base.powi(half) * (1.0 - half as f64)
            / (factorial(k1 / 2) * factorial(k2 / 2) * factorial(k3 / 2));
    }
    SpectralState::from_coeffs(m, coeffs)
}

/// Centered Hermite moment of a 1D Gaussian with mean `mu` and variance
/// 1/2: `int He_k(x) N(mu, 1/2)(x) dx = k! sum_{j+2p=k} mu^j (-1/4)^p / (j! p!)`.
fn hermite_gaussian_moment(k: u32, mu: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = 0;
    while 2 * p <= k {
        let j = k - 2 * p;
        sum += mu.powi(j as i32) * (-0.25f64).powi(p as i32) / (factorial(j) * factorial(p));
        p += 1;
    }
    factorial(k) * sum
}

/// Projects the symmetric two-Gaussian mixture onto `I_M`, cross-checking
/// the closed-form moments against Gauss-Hermite quadrature of order
/// `2M + 2`.
pub fn project_bigaussian(m: u32) -> Result<SpectralState> {
    let mu0 = (1.5f64).sqrt();
    let mut coeffs = vec![0.0; n_basis(m)];
    for idx in index_set(m) {
        let [k1, k2, k3] = idx.components();
        let axial = 0.5 * (hermite_gaussian_moment(k1, -mu0) + hermite_gaussian_moment(k1, mu0));
        coeffs[idx.rank()] =
            axial * hermite_gaussian_moment(k2, 0.0) * hermite_gaussian_moment(k3, 0.0)
                / (factorial(k1) * factorial(k2) * factorial(k3));
    }

    // independent Gauss-Hermite evaluation of the same moments
    let order = (2 * m + 2) as usize;
    let (nodes, weights) = gauss_hermite(order);
    let gh_moment = |k: u32, mu: f64| -> f64 {
        let s: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * hermite_eval_1d(k, mu + x))
            .sum();
        s / PI.sqrt()
    };
    for idx in index_set(m) {
        let [k1, k2, k3] = idx.components();
        let axial = 0.5 * (gh_moment(k1, -mu0) + gh_moment(k1, mu0));
        let gh = axial * gh_moment(k2, 0.0) * gh_moment(k3, 0.0)
            / (factorial(k1) * factorial(k2) * factorial(k3));
        let closed = coeffs[idx.rank()];
        if (gh - closed).abs() > 1e-10 * closed.abs().max(1.0) {
            return Err(Error::InternalConsistency(format!(
                "bi-Gaussian projection mismatch at {idx:?}: closed {closed:.15e} vs quadrature {gh:.15e}"
            )));
        }
    }
    SpectralState::from_coeffs(m, coeffs)
}

/// Full-line Gaussian-Hermite moment `int He_k(x) e^{-x^2/s} dx` in
/// closed form (zero for odd k).
fn full_line_moment(k: u32, s: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let half = k / 2;
    (PI * s).sqrt() * factorial(k) * (0.5 * (0.5 * s - 1.0)).powi(half as i32) / factorial(half)
}

/// Half-line recurrence for `I_k = int_0^inf He_k(x) e^{-x^2/s} dx`.
fn half_line_moment_recurrence(k: u32, s: f64) -> f64 {
    let mut values = vec![0.0; (k + 1).max(2) as usize];
    values[0] = 0.5 * (PI * s).sqrt();
    values[1] = 0.5 * s;
    for n in 2..=k as usize {
        values[n] = 0.5 * s * hermite_eval_1d(n as u32 - 1, 0.0)
            + (n as f64 - 1.0) * (0.5 * s - 1.0) * values[n - 2];
    }
    values[k as usize]
}

/// Projects the piecewise-Gaussian (discontinuous at v1 = 0) initial
/// condition onto `I_M`: closed-form moments transversally, adaptive
/// half-line quadrature axially, validated against an independent
/// recurrence.
pub fn project_discontinuous(m: u32, quad: &QuadratureSpec) -> Result<SpectralState> {
    let c_plus = (2.0f64).powf(0.25) * (2.0 - (2.0f64).sqrt()) / PI.powf(1.5);
    let c_minus = c_plus / 4.0;
    let s_plus = (2.0f64).sqrt();
    let s_minus = 2.0 * (2.0f64).sqrt();

    let half_moment = |k: u32, s: f64| -> Result<f64> {
        let by_recurrence = half_line_moment_recurrence(k, s);
        // A degree-k Hermite integrand cancels from ~|He_k|_max down to
        // the integral value, so for large k the error estimate plateaus
        // at the f64 noise floor above the requested tolerance. Take the
        // best estimate and gate on the achieved error at the value's
        // scale instead of failing outright.
        let spec = QuadratureSpec {
            abs_tol: quad.abs_tol,
            rel_tol: quad.rel_tol,
            max_subdivisions: quad.max_subdivisions.max(400),
        };
        let integrand = |x: f64| hermite_eval_1d(k, x) * (-x * x / s).exp();
        let result = adaptive_best_effort(&integrand, 0.0, 40.0, &spec)?;
        if result.error > 1e-8 * by_recurrence.abs().max(1.0) {
            return Err(Error::QuadratureNonConvergence {
                achieved: result.error,
                requested_abs: spec.abs_tol,
                requested_rel: spec.rel_tol,
                subdivisions: result.subdivisions,
            });
        }
        if (result.value - by_recurrence).abs() > 1e-7 * by_recurrence.abs().max(1.0) {
            return Err(Error::InternalConsistency(format!(
                "half-line moment mismatch at k = {k}, s = {s}: quadrature {:.15e} vs recurrence {by_recurrence:.15e}",
                result.value
            )));
        }
        Ok(result.value)
    };

    let mut axial_plus = Vec::with_capacity(m as usize + 1);
    let mut axial_minus = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        axial_plus.push(half_moment(k, s_plus)?);
        axial_minus.push(half_moment(k, s_minus)?);
    }

    let mut coeffs = vec![0.0; n_basis(m)];
    for idx in index_set(m) {
        let [k1, k2, k3] = idx.components();
        let sign = if k1 % 2 == 0 { 1.0 } else { -1.0 };
        let plus = c_plus
            * axial_plus[k1 as usize]
            * full_line_moment(k2, s_plus)
            * full_line_moment(k3, s_plus);
        let minus = c_minus
            * sign
            * axial_minus[k1 as usize]
            * full_line_moment(k2, s_minus)
            * full_line_moment(k3, s_minus);
        coeffs[idx.rank()] = (plus + minus) / (factorial(k1) * factorial(k2) * factorial(k3));
    }
    SpectralState::from_coeffs(m, coeffs)
}
