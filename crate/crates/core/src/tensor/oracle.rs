//! Direct numerical evaluation of the defining five-dimensional integral
//! for the angular coefficients `gamma_j^l`, independent of the closed
//! summation formula. Used as a correctness oracle for small indices.
//!
//! Quadrature layout: spherical product grid in the relative velocity
//! (Gauss-Legendre radially and in cos(theta), trapezoid in phi, both
//! exact for the polynomial part), trapezoid on the collision circle,
//! and a geometrically graded Gauss mesh in the impact parametrization.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::basis::{hermite_eval, MultiIndex};
use crate::error::{Error, Result};
use crate::kernel::KernelModel;
use crate::quadrature::gauss_legendre;

const MAX_DEGREE: u32 = 4;
const N_RADIAL: usize = 64;
const R_MAX: f64 = 16.0;
const N_POLAR: usize = 8;
const N_AZIMUTH: usize = 16;
const N_CIRCLE: usize = 8;
const Y_RATIO: f64 = 0.25;
const Y_MIN: f64 = 1e-12;
const Y_PER_PANEL: usize = 8;

struct GNode {
    g: [f64; 3],
    r: f64,
    e1: [f64; 3],
    e2: [f64; 3],
    weight: f64,
}

struct YNode {
    cos_chi: f64,
    sin_chi: f64,
    weight: f64,
}

/// Reusable oracle grids for one kernel model; caches the circle-averaged
/// bracket per bracket-side index so whole blocks of pairs are cheap.
pub struct GammaOracle<'a> {
    #[allow(dead_code)]
    model: &'a KernelModel,
    g_nodes: Vec<GNode>,
    y_nodes: Vec<YNode>,
    circle: Vec<(f64, f64, f64)>,
    bracket_cache: Mutex<HashMap<MultiIndex, Vec<f64>>>,
}

impl<'a> GammaOracle<'a> {
    pub fn new(model: &'a KernelModel) -> Result<Self> {
        Self::with_rotation(model, None)
    }

    /// Same grids with all sphere directions rotated; the estimate must be
    /// invariant up to quadrature error (isotropy check).
    pub(crate) fn with_rotation(
        model: &'a KernelModel,
        rot: Option<&[[f64; 3]; 3]>,
    ) -> Result<Self> {
        let eta = model.eta();

        let (r_pts, r_wts) = gauss_legendre(N_RADIAL);
        let (t_pts, t_wts) = gauss_legendre(N_POLAR);
        let radial_power = (eta - 5.0) / (eta - 1.0);
        let w_phi = 2.0 * std::f64::consts::PI / N_AZIMUTH as f64;

        let mut g_nodes = Vec::with_capacity(N_RADIAL * N_POLAR * N_AZIMUTH);
        for (&xr, &wr) in r_pts.iter().zip(&r_wts) {
            let r = 0.5 * R_MAX * (xr + 1.0);
            let radial_weight =
                0.5 * R_MAX * wr * r * r * r.powf(radial_power) * (-0.25 * r * r).exp();
            for (&ct, &wt) in t_pts.iter().zip(&t_wts) {
                let st = (1.0 - ct * ct).sqrt();
                for p in 0..N_AZIMUTH {
                    let phi = w_phi * p as f64;
                    let mut dir = [st * phi.cos(), st * phi.sin(), ct];
                    if let Some(m) = rot {
                        dir = mat_vec(m, dir);
                    }
                    // orthonormal circle frame perpendicular to dir
                    let e1 = normalize(cross(pick_axis(dir), dir));
                    let e2 = cross(dir, e1);
                    g_nodes.push(GNode {
                        g: [r * dir[0], r * dir[1], r * dir[2]],
                        r,
                        e1,
                        e2,
                        weight: radial_weight * wt * w_phi,
                    });
                }
            }
        }

        let (y_pts, y_wts) = gauss_legendre(Y_PER_PANEL);
        let mut y_nodes = Vec::new();
        let mut hi = 1.0f64;
        while hi > Y_MIN {
            let lo = (hi * Y_RATIO).max(Y_MIN);
            for (&xy, &wy) in y_pts.iter().zip(&y_wts) {
                let y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xy;
                let chi = model.chi(y)?;
                y_nodes.push(YNode {
                    cos_chi: chi.cos(),
                    sin_chi: chi.sin(),
                    weight: 0.5 * (hi - lo) * wy * crate::kernel::collision_angle_weight(eta, y),
                });
            }
            hi = lo;
        }

        let w_psi = 2.0 * std::f64::consts::PI / N_CIRCLE as f64;
        let circle = (0..N_CIRCLE)
            .map(|p| {
                let psi = w_psi * p as f64;
                (psi.cos(), psi.sin(), w_psi)
            })
            .collect();

        Ok(Self {
            model,
            g_nodes,
            y_nodes,
            circle,
            bracket_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Estimate of `gamma_j^l`; refuses total degrees above 4.
    pub fn eval(&self, j: MultiIndex, l: MultiIndex) -> Result<f64> {
        if j.degree() > MAX_DEGREE || l.degree() > MAX_DEGREE {
            return Err(Error::CostGuard(format!(
                "gamma oracle limited to total degrees <= {MAX_DEGREE}, got {} and {}",
                j.degree(),
                l.degree()
            )));
        }
        let bracket = self.bracket_for(j);
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut sum = 0.0;
        for (node, &t) in self.g_nodes.iter().zip(bracket.iter()) {
            let arg = [node.g[0] / sqrt2, node.g[1] / sqrt2, node.g[2] / sqrt2];
            sum += node.weight * hermite_eval(l, arg) * t;
        }
        Ok(sum)
    }

    /// Circle-and-angle integrated Hermite bracket, per velocity grid node:
    /// `int [H^j(g'/sqrt2) - H^j(g/sqrt2)] B dchi dn` with the angle
    /// integral in the graded impact parametrization.
    fn bracket_for(&self, j: MultiIndex) -> Vec<f64> {
        if let Some(cached) = self.bracket_cache.lock().unwrap().get(&j) {
            return cached.clone();
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        let two_pi = 2.0 * std::f64::consts::PI;
        let values: Vec<f64> = self
            .g_nodes
            .iter()
            .map(|node| {
                let plain =
                    hermite_eval(j, [node.g[0] / sqrt2, node.g[1] / sqrt2, node.g[2] / sqrt2]);
                let mut total = 0.0;
                for y in &self.y_nodes {
                    let mut circle_sum = 0.0;
                    for &(cp, sp, wp) in &self.circle {
                        let n = [
                            node.e1[0] * cp + node.e2[0] * sp,
                            node.e1[1] * cp + node.e2[1] * sp,
                            node.e1[2] * cp + node.e2[2] * sp,
                        ];
                        let gp = [
                            (node.g[0] * y.cos_chi - node.r * n[0] * y.sin_chi) / sqrt2,
                            (node.g[1] * y.cos_chi - node.r * n[1] * y.sin_chi) / sqrt2,
                            (node.g[2] * y.cos_chi - node.r * n[2] * y.sin_chi) / sqrt2,
                        ];
                        circle_sum += wp * hermite_eval(j, gp);
                    }
                    total += y.weight * (circle_sum - two_pi * plain);
                }
                total
            })
            .collect();
        self.bracket_cache.lock().unwrap().insert(j, values.clone());
        values
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Any axis not parallel to `dir`.
fn pick_axis(dir: [f64; 3]) -> [f64; 3] {
    if dir[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    }
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// One-shot oracle evaluation of `gamma_j^l` by direct quadrature of the
/// defining integral. Advertised accuracy ~1e-5 relative; limited to
/// total degrees <= 4. Use [`GammaOracle`] to amortize the grids over
/// many index pairs.
pub fn gamma_direct_oracle(j: MultiIndex, l: MultiIndex, model: &KernelModel) -> Result<f64> {
    GammaOracle::new(model)?.eval(j, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::gamma_coeff;
    use approx::assert_abs_diff_eq;

    fn model(eta: f64) -> KernelModel {
        KernelModel::with_default_quadrature(eta).unwrap()
    }

    #[test]
    fn zero_bracket_index_gives_zero() {
        let m = model(5.0);
        let v = gamma_direct_oracle(MultiIndex::ZERO, MultiIndex::new(2, 0, 0), &m).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cost_guard_refuses_large_degrees() {
        let m = model(5.0);
        let big = MultiIndex::new(3, 2, 0);
        assert!(matches!(
            gamma_direct_oracle(big, MultiIndex::ZERO, &m),
            Err(Error::CostGuard(_))
        ));
    }

    #[test]
    fn oracle_matches_formula_at_low_degree() {
        let m = model(5.0);
        let oracle = GammaOracle::new(&m).unwrap();
        let cases = [
            (MultiIndex::new(1, 0, 0), MultiIndex::new(1, 0, 0)),
            (MultiIndex::new(2, 0, 0), MultiIndex::new(2, 0, 0)),
            (MultiIndex::new(2, 0, 0), MultiIndex::new(0, 2, 0)),
            (MultiIndex::new(1, 1, 0), MultiIndex::new(1, 1, 0)),
        ];
        for (j, l) in cases {
            let direct = oracle.eval(j, l).unwrap();
            let formula = gamma_coeff(j, l, &m).unwrap();
            assert_abs_diff_eq!(direct, formula, epsilon = 1e-5 * formula.abs().max(1e-3));
        }
    }

    #[test]
    fn oracle_matches_formula_at_degree_four() {
        // the cost-guard ceiling; exercises the same index range that
        // feeds the stress dynamics for non-Maxwell kernels
        let m = model(10.0);
        let oracle = GammaOracle::new(&m).unwrap();
        for (j, l) in [
            (MultiIndex::new(4, 0, 0), MultiIndex::new(4, 0, 0)),
            (MultiIndex::new(4, 0, 0), MultiIndex::new(2, 2, 0)),
            (MultiIndex::new(2, 2, 0), MultiIndex::new(2, 0, 2)),
            (MultiIndex::new(3, 1, 0), MultiIndex::new(1, 1, 2)),
            (MultiIndex::new(4, 0, 0), MultiIndex::new(2, 0, 0)),
            (MultiIndex::new(3, 0, 1), MultiIndex::new(1, 0, 1)),
        ] {
            let direct = oracle.eval(j, l).unwrap();
            let formula = gamma_coeff(j, l, &m).unwrap();
            assert_abs_diff_eq!(direct, formula, epsilon = 1e-5 * formula.abs().max(1e-2));
        }
    }

    #[test]
    fn oracle_matches_formula_for_soft_potentials() {
        // soft-potential route (eta < 5): the radial grid carries a
        // r^{(eta-5)/(eta-1)} endpoint kink, so the tolerance is looser
        // than for the hard/Maxwell cases
        let m = model(3.1);
        let oracle = GammaOracle::new(&m).unwrap();
        for (j, l) in [
            (MultiIndex::new(1, 0, 0), MultiIndex::new(1, 0, 0)),
            (MultiIndex::new(2, 0, 0), MultiIndex::new(2, 0, 0)),
            (MultiIndex::new(2, 0, 0), MultiIndex::new(0, 0, 2)),
            (MultiIndex::new(1, 1, 0), MultiIndex::new(1, 1, 0)),
        ] {
            let direct = oracle.eval(j, l).unwrap();
            let formula = gamma_coeff(j, l, &m).unwrap();
            assert_abs_diff_eq!(direct, formula, epsilon = 1e-4 * formula.abs().max(1e-2));
        }
    }

    #[test]
    fn estimate_invariant_under_frame_rotation() {
        let m = model(10.0);
        let base = GammaOracle::new(&m).unwrap();
        // R = Rz(0.7) Rx(0.9), a genuine proper rotation
        let (s, c) = 0.7f64.sin_cos();
        let (sb, cb) = 0.9f64.sin_cos();
        let rot = [[c, -s * cb, s * sb], [s, c * cb, -c * sb], [0.0, sb, cb]];
        let rotated = GammaOracle::with_rotation(&m, Some(&rot)).unwrap();
        for (j, l) in [
            (MultiIndex::new(2, 0, 0), MultiIndex::new(2, 0, 0)),
            (MultiIndex::new(1, 1, 0), MultiIndex::new(1, 1, 0)),
        ] {
            let a = base.eval(j, l).unwrap();
            let b = rotated.eval(j, l).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-8 * a.abs().max(1e-6));
        }
    }
}
