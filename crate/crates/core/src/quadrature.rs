//! One-dimensional quadrature: an adaptive Gauss-Kronrod integrator and
//! fixed-order Gauss-Legendre / Gauss-Hermite node generators.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances and the subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::Domain(format!(
                "invalid quadrature spec: abs_tol {}, rel_tol {}, max_subdivisions {}",
                self.abs_tol, self.rel_tol, self.max_subdivisions
            )));
        }
        Ok(())
    }

    /// The same spec with both tolerances halved (used by reproducibility checks).
    pub fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// An integral estimate with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: u32,
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15(7) evaluation; returns (kronrod, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [0.0; 7];
    let mut hi = [0.0; 7];
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = kronrod.abs();
    for i in 0..7 {
        let dx = half * XGK[i];
        lo[i] = f(center - dx);
        hi[i] = f(center + dx);
        kronrod += WGK[i] * (lo[i] + hi[i]);
        res_abs += WGK[i] * (lo[i].abs() + hi[i].abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo[i] + hi[i]);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        res_asc += WGK[i] * ((lo[i] - mean).abs() + (hi[i] - mean).abs());
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK-style rescaled error estimate.
    let mut err = (kronrod - gauss).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (kronrod, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate meets `spec`, or fails with the achieved error once the
/// subdivision budget is exhausted.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let (result, converged) = adaptive_core(f, a, b, spec)?;
    if converged {
        Ok(result)
    } else {
        Err(Error::QuadratureNonConvergence {
            achieved: result.error,
            requested_abs: spec.abs_tol,
            requested_rel: spec.rel_tol,
            subdivisions: result.subdivisions,
        })
    }
}

/// Like [`adaptive`], but returns the best estimate with its achieved
/// error instead of failing when the tolerance is out of reach (useful
/// for integrands whose cancellation puts the requested tolerance below
/// the f64 noise floor; callers gate on `error` themselves).
pub fn adaptive_best_effort<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    Ok(adaptive_core(f, a, b, spec)?.0)
}

fn adaptive_core<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(QuadResult, bool)> {
    spec.validate()?;
    if a == b {
        return Ok((
            QuadResult {
                value: 0.0,
                error: 0.0,
                subdivisions: 0,
            },
            true,
        ));
    }
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total_value = v;
    let mut total_error = e;
    let mut subdivisions = 0u32;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total_value.abs());
        if total_error <= tol {
            return Ok((
                QuadResult {
                    value: total_value,
                    error: total_error,
                    subdivisions,
                },
                true,
            ));
        }
        if subdivisions >= spec.max_subdivisions {
            return Ok((
                QuadResult {
                    value: total_value,
                    error: total_error,
                    subdivisions,
                },
                false,
            ));
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let k = k as f64;
                let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule (weight `e^{-x^2}`).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let pi_m4 = std::f64::consts::PI.powf(-0.25);
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        // Stroud/NR initial guesses for roots ordered from the largest.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // Orthonormal Hermite recurrence.
            let mut p1 = pi_m4;
            let mut p2 = 0.0;
            for j in 0..n {
                let j = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j + 1.0)).sqrt() * p2 - (j / (j + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        let w = 2.0 / (pp * pp);
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
