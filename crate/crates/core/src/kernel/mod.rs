//! Everything that depends on the inverse-power-law collision kernel:
//! the deflection angle, the angular integrals `I(k, eta)`, the radial
//! Laguerre integrals, the BGK relaxation time and the cross-model time
//! scaling constant.
//!
//! The kernel is parametrized by the repulsion exponent `eta > 3`
//! (`eta = 5`: Maxwell molecules, `eta > 5`: hard potentials,
//! `3 < eta < 5`: soft potentials).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use statrs::function::gamma::gamma;

use crate::basis::legendre_eval;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, QuadratureSpec};

pub use crate::quadrature::QuadResult;

/// IPL kernel with cached angular integrals.
///
/// Cache fills are internally synchronized; a filled model can be shared
/// freely across threads.
#[derive(Debug)]
pub struct KernelModel {
    eta: f64,
    quad: QuadratureSpec,
    /// `I(k, eta)` as (value, error estimate), indexed by k; filled
    /// monotonically so that requesting k populates all k' <= k.
    i_cache: Mutex<Vec<(f64, f64)>>,
    /// Deflection angles keyed by the bit pattern of y.
    chi_cache: Mutex<HashMap<u64, f64>>,
}

impl KernelModel {
    pub fn new(eta: f64, quad: QuadratureSpec) -> Result<Self> {
        if !(eta > 3.0) {
            return Err(Error::Domain(format!(
                "IPL exponent must satisfy eta > 3, got {eta}"
            )));
        }
        quad.validate()?;
        Ok(Self {
            eta,
            quad,
            i_cache: Mutex::new(Vec::new()),
            chi_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_default_quadrature(eta: f64) -> Result<Self> {
        Self::new(eta, QuadratureSpec::default())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Cached deflection angle chi(y).
    pub fn chi(&self, y: f64) -> Result<f64> {
        if let Some(&chi) = self.chi_cache.lock().unwrap().get(&y.to_bits()) {
            return Ok(chi);
        }
        let chi = chi_of_y(self.eta, y, &self.quad)?;
        self.chi_cache.lock().unwrap().insert(y.to_bits(), chi);
        Ok(chi)
    }

    /// Angular integral `I(k, eta)`; zero for k = 0, strictly negative
    /// for k >= 1.
    pub fn i_integral(&self, k: u32) -> Result<f64> {
        Ok(self.i_integral_with_error(k)?.0)
    }

    /// `I(k, eta)` together with its quadrature error estimate.
    pub fn i_integral_with_error(&self, k: u32) -> Result<(f64, f64)> {
        let mut cache = self.i_cache.lock().unwrap();
        while cache.len() <= k as usize {
            let next = cache.len() as u32;
            let entry = if next == 0 {
                (0.0, 0.0)
            } else {
                self.compute_i(next)?
            };
            cache.push(entry);
        }
        Ok(cache[k as usize])
    }

    /// Graded-mesh evaluation of the angular integral for k >= 1.
    ///
    /// The bare weight diverges like y^{-(eta+1)/(eta-1)} at y -> 0
    /// (grazing collisions); integrability comes from the Legendre
    /// bracket vanishing there, so the mesh is geometrically refined
    /// toward zero and each panel is integrated adaptively.
    fn compute_i(&self, k: u32) -> Result<(f64, f64)> {
        let eta = self.eta;
        let panel_spec = QuadratureSpec {
            abs_tol: self.quad.abs_tol / 64.0,
            rel_tol: self.quad.rel_tol,
            max_subdivisions: self.quad.max_subdivisions,
        };
        let failure = std::cell::RefCell::new(None);
        let integrand = |y: f64| -> f64 {
            match self.chi(y) {
                Ok(chi) => legendre_minus_one(k, chi) * grazing_weight(eta, y),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let mut value = 0.0;
        let mut error = 0.0;
        let mut hi = 2.0_f64.powi(-54);
        // Tail below the smallest breakpoint, bounded by the first panel.
        let first = adaptive(&integrand, hi / 2.0, hi, &panel_spec)?;
        error += first.value.abs() + first.error;
        while hi < 1.0 {
            let lo = hi;
            hi = (hi * 2.0).min(1.0);
            let panel = adaptive(&integrand, lo, hi, &panel_spec)?;
            value += panel.value;
            error += panel.error;
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        value += first.value;
        Ok((value, error))
    }

    /// The g-independent factor of the degree-2 angular transform,
    /// `2^{-(eta-3)/(eta-1)} I(2, eta)`; sets the relaxation-rate scale.
    pub fn b2_factor(&self) -> Result<f64> {
        Ok((-(self.eta - 3.0) / (self.eta - 1.0)).exp2() * self.i_integral(2)?)
    }

    /// Radial-angular coefficient `K_{mn}^{kl}`.
    ///
    /// Callers must supply `k - 2m = l - 2n` (with `m <= k/2`, `n <= l/2`);
    /// other index combinations never contribute.
    pub fn k_coeff(&self, k: u32, l: u32, m: u32, n: u32) -> Result<f64> {
        if 2 * m > k || 2 * n > l {
            return Err(Error::Contract(format!(
                "k_coeff requires m <= k/2 and n <= l/2, got k={k}, l={l}, m={m}, n={n}"
            )));
        }
        let r = k - 2 * m;
        if r != l - 2 * n {
            return Err(Error::Contract(format!(
                "k_coeff requires k - 2m = l - 2n, got k={k}, l={l}, m={m}, n={n}"
            )));
        }
        if self.eta == 5.0 {
            // Maxwell molecules: Laguerre orthogonality makes the radial
            // integral diagonal in (m, n).
            if m != n {
                return Ok(0.0);
            }
            let i_r = self.i_integral(r)?;
            let c = r as f64 + 0.5;
            return Ok(c.exp2()
                * i_r
                * gen_binomial((k - m) as f64 + 0.5, m)
                * gamma(r as f64 + 1.5));
        }
        let i_r = self.i_integral(r)?;
        if i_r == 0.0 {
            return Ok(0.0);
        }
        let c = (self.eta - 3.0) / (self.eta - 1.0) + r as f64;
        let alpha = r as f64 + 0.5;
        Ok(c.exp2() * i_r * laguerre_pair_integral(m, n, alpha, c))
    }

    /// Mean relaxation time of the matched BGK operator.
    pub fn bgk_tau(&self) -> Result<f64> {
        let a2 = -(2.0 / 3.0) * self.b2_factor()?;
        let p = (3.0 * self.eta - 7.0) / (self.eta - 1.0);
        Ok(5.0 / (p.exp2() * PI.sqrt() * a2 * gamma(4.0 - 2.0 / (self.eta - 1.0))))
    }

    /// Time-scaling constant mapping this model onto the Maxwell (eta = 5)
    /// relaxation rate near equilibrium. Exactly 1 for eta = 5.
    pub fn scaled_time_constant(&self) -> Result<f64> {
        if self.eta == 5.0 {
            return Ok(1.0);
        }
        let maxwell = KernelModel::new(5.0, self.quad)?;
        let b2_5 = maxwell.b2_factor()?;
        let b2_eta = self.b2_factor()?;
        let pow4 = (2.0 / (self.eta - 1.0) - 0.5) * 4.0_f64.ln();
        Ok(pow4.exp() * b2_5 * gamma(3.5) / (b2_eta * gamma(4.0 - 2.0 / (self.eta - 1.0))))
    }
}

/// Deflection angle chi(y) for impact parametrization y in (0, 1]
/// (y = 1: head-on, chi = pi; y -> 0: grazing, chi -> 0).
///
/// The inner integral's inverse-square-root endpoint singularity is
/// absorbed by the substitution x = 1 - u^2, and chi is assembled from
/// pi/2 - F(y) directly so that small angles keep full relative accuracy.
pub fn chi_of_y(eta: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!(
            "chi_of_y requires 0 < y <= 1, got {y}"
        )));
    }
    if !(eta > 3.0) {
        return Err(Error::Domain(format!(
            "chi_of_y requires eta > 3, got {eta}"
        )));
    }
    let sq = (1.0 - y).sqrt();
    // chi = 2 [ (pi/2)(1 - sqrt(1-y)) + sqrt(1-y) (pi/2 - F(y)) ]
    // where F(y) = int_0^1 2 du / sqrt(W), W = (1-y) A + y q,
    // A(u) = 2 - u^2 and q(u) as below. The difference pi/2 - F carries
    // an explicit factor of y, avoiding cancellation at grazing incidence.
    let residual = |u: f64| {
        let a = 2.0 - u * u;
        let q = power_deficit(eta, u * u);
        let w = (1.0 - y) * a + y * q;
        2.0 * y * (q - a) / (a.sqrt() * w.sqrt() * (w.sqrt() + a.sqrt()))
    };
    let r = adaptive(&residual, 0.0, 1.0, spec)?;
    Ok(2.0 * (0.5 * PI * y / (1.0 + sq) + sq * r.value))
}

/// `(1 - (1 - w)^{eta-1}) / w`, the relative deficit of the power term in
/// the deflection integrand; equals eta - 1 at w = 0.
fn power_deficit(eta: f64, w: f64) -> f64 {
    if w < 1e-290 {
        return eta - 1.0;
    }
    -((eta - 1.0) * (-w).ln_1p()).exp_m1() / w
}

/// The diverging angular weight `[2(1-y) + (eta-1) y] [(eta-1) y]^{-(eta+1)/(eta-1)}`.
pub(crate) fn grazing_weight(eta: f64, y: f64) -> f64 {
    (2.0 * (1.0 - y) + (eta - 1.0) * y) * ((eta - 1.0) * y).powf(-(eta + 1.0) / (eta - 1.0))
}

/// The same weight including the `2^{-(eta-3)/(eta-1)}` impact-parameter
/// Jacobian factor; `int_0^pi B(g, chi) Phi(chi) dchi =
/// g^{(eta-5)/(eta-1)} int_0^1 Phi(chi(y)) w(y) dy` with this w.
pub(crate) fn collision_angle_weight(eta: f64, y: f64) -> f64 {
    (-(eta - 3.0) / (eta - 1.0)).exp2() * grazing_weight(eta, y)
}

/// `P_k(cos chi) - 1`, evaluated without cancellation near chi = 0 via the
/// hypergeometric form in z = sin^2(chi/2).
pub(crate) fn legendre_minus_one(k: u32, chi: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let z = {
        let s = (0.5 * chi).sin();
        s * s
    };
    let kk = k as f64 * (k as f64 + 1.0);
    if kk * z < 0.5 {
        // 2F1(-k, k+1; 1; z) - 1: terms decay geometrically here.
        let mut term = -kk * z;
        let mut sum = 0.0f64;
        let mut j = 1u32;
        while term.abs() > 1e-18 * sum.abs().max(1e-30) && j <= k {
            sum += term;
            let jf = j as f64;
            term *= z * (jf - k as f64) * (k as f64 + 1.0 + jf) / ((jf + 1.0) * (jf + 1.0));
            j += 1;
        }
        sum
    } else {
        legendre_eval(k, 1.0 - 2.0 * z) - 1.0
    }
}

/// Generalized binomial coefficient `C(x, n)` for integer `n >= 0`.
fn gen_binomial(x: f64, n: u32) -> f64 {
    let mut num = 1.0;
    for t in 0..n {
        num *= x - t as f64;
    }
    num / crate::basis::factorial(n)
}

/// Closed form of `int_0^inf L_m^{(alpha)}(s) L_n^{(alpha)}(s) s^mu e^{-s} ds`
/// in terms of generalized binomial coefficients.
fn laguerre_pair_integral(m: u32, n: u32, alpha: f64, mu: f64) -> f64 {
    let a = mu - alpha;
    let mut sum = 0.0;
    for i in 0..=m.min(n) {
        sum += gen_binomial(a, m - i) * gen_binomial(a, n - i) * gen_binomial(mu + i as f64, i);
    }
    let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
    sign * gamma(mu + 1.0) * sum
}
