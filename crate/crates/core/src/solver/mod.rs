//! Time integration of the coefficient ODE system, moment extraction,
//! initial-condition projections and marginal distributions.

mod init;
mod marginal;

pub use init::{bkw_coeffs, project_bigaussian, project_discontinuous, BkwReference};
pub use marginal::{marginal_1d, marginal_2d};

use crate::basis::{n_basis, MultiIndex};
use crate::error::{Error, Result};

/// Hermite coefficient vector over `I_M` in graded-lexicographic rank
/// order; the discrete distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    m: u32,
    pub coeffs: Vec<f64>,
}

impl SpectralState {
    /// The equilibrium state: unit mass coefficient, everything else zero.
    pub fn maxwellian(m: u32) -> Self {
        let mut coeffs = vec![0.0; n_basis(m)];
        coeffs[0] = 1.0;
        Self { m, coeffs }
    }

    pub fn from_coeffs(m: u32, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != n_basis(m) {
            return Err(Error::Contract(format!(
                "expected {} coefficients for M = {m}, got {}",
                n_basis(m),
                coeffs.len()
            )));
        }
        Ok(Self { m, coeffs })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Coefficient for a triple; zero outside `I_M`.
    pub fn coeff(&self, idx: MultiIndex) -> f64 {
        self.coeffs.get(idx.rank()).copied().unwrap_or(0.0)
    }

    /// Checks the normalization invariants: unit mass, zero mean velocity,
    /// zero temperature deviation.
    pub fn validate_normalized(&self, tol: f64) -> Result<()> {
        let mass = (self.coeffs[0] - 1.0).abs();
        let mom = self
            .coeffs
            .get(1..4)
            .unwrap_or(&[])
            .iter()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        let trace = self.coeff(MultiIndex::new(2, 0, 0))
            + self.coeff(MultiIndex::new(0, 2, 0))
            + self.coeff(MultiIndex::new(0, 0, 2));
        if mass > tol || mom > tol || trace.abs() > tol {
            return Err(Error::InternalConsistency(format!(
                "state violates normalization: |rho-1| = {mass:.3e}, |u| = {mom:.3e}, trace = {trace:.3e}"
            )));
        }
        Ok(())
    }
}

/// Macroscopic quantities extracted from a spectral state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
    /// Stress components in the order 11, 12, 13, 22, 23, 33.
    pub sigma: [f64; 6],
    /// Heat flux; requires M >= 3.
    pub q: Option<[f64; 3]>,
}

/// Linear moment relations of the normalized expansion.
pub fn moments(state: &SpectralState) -> Moments {
    let c = |a, b, cc| state.coeff(MultiIndex::new(a, b, cc));
    let trace = c(2, 0, 0) + c(0, 2, 0) + c(0, 0, 2);
    let q = if state.m() >= 3 {
        Some([
            3.0 * c(3, 0, 0) + c(1, 2, 0) + c(1, 0, 2),
            3.0 * c(0, 3, 0) + c(2, 1, 0) + c(0, 1, 2),
            3.0 * c(0, 0, 3) + c(2, 0, 1) + c(0, 2, 1),
        ])
    } else {
        None
    };
    Moments {
        rho: c(0, 0, 0),
        u: [c(1, 0, 0), c(0, 1, 0), c(0, 0, 1)],
        theta: 1.0 + 2.0 / 3.0 * trace,
        sigma: [
            2.0 * c(2, 0, 0),
            c(1, 1, 0),
            c(1, 0, 1),
            2.0 * c(0, 2, 0),
            c(0, 1, 1),
            2.0 * c(0, 0, 2),
        ],
        q,
    }
}

/// Classical fixed-step 4th-order Runge-Kutta integration.
///
/// The observer runs after every accepted step (and once at t = 0); a
/// shortened final step lands exactly on `t_end`. Aborts with the last
/// good time when the state stops being finite.
pub fn rk4_integrate<R, O>(
    rhs: R,
    state: &mut SpectralState,
    dt: f64,
    t_end: f64,
    mut observer: O,
) -> Result<()>
where
    R: Fn(&[f64]) -> Result<Vec<f64>>,
    O: FnMut(f64, &SpectralState) -> Result<()>,
{
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !(t_end >= 0.0) {
        return Err(Error::Domain(format!(
            "end time must be nonnegative, got {t_end}"
        )));
    }
    observer(0.0, state)?;
    let mut full_steps = 0u64;
    let mut t = 0.0;
    let eps = 1e-12 * t_end.max(1.0);
    while t < t_end - eps {
        let h = dt.min(t_end - t);
        rk4_step(&rhs, &mut state.coeffs, h)?;
        if h == dt {
            full_steps += 1;
            t = full_steps as f64 * dt;
        } else {
            t = t_end;
        }
        if state.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { t_last_good: t - h });
        }
        observer(t.min(t_end), state)?;
    }
    Ok(())
}

fn rk4_step<R>(rhs: &R, y: &mut [f64], h: f64) -> Result<()>
where
    R: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = y.len();
    let k1 = rhs(y)?;
    let mut tmp = vec![0.0; n];
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = rhs(&tmp)?;
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = rhs(&tmp)?;
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    let k4 = rhs(&tmp)?;
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}
