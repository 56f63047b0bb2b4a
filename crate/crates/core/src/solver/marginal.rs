//! Marginal distribution functions on velocity grids.
//!
//! Integrating the Hermite-weighted Maxwellian over a velocity component
//! annihilates every term with a nonzero index in that component, so the
//! 1D marginal needs only the `(k1, 0, 0)` coefficients and the 2D
//! marginal only `(k1, k2, 0)`.

use super::SpectralState;
use crate::basis::{hermite_eval_1d, MultiIndex};

use std::f64::consts::PI;

fn gauss_1d(v: f64) -> f64 {
    (2.0 * PI).sqrt().recip() * (-0.5 * v * v).exp()
}

/// Samples `g(v1) = sum_k1 f_{k1,0,0} He_k1(v1) M1(v1)` on a grid.
pub fn marginal_1d(state: &SpectralState, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&v| {
            let series: f64 = (0..=state.m())
                .map(|k| state.coeff(MultiIndex::new(k, 0, 0)) * hermite_eval_1d(k, v))
                .sum();
            series * gauss_1d(v)
        })
        .collect()
}

/// Samples `h(v1, v2)` on a product grid; the result is indexed
/// `[i1][i2]`.
pub fn marginal_2d(state: &SpectralState, grid1: &[f64], grid2: &[f64]) -> Vec<Vec<f64>> {
    grid1
        .iter()
        .map(|&v1| {
            grid2
                .iter()
                .map(|&v2| {
                    let mut series = 0.0;
                    for k1 in 0..=state.m() {
                        for k2 in 0..=state.m() - k1 {
                            let c = state.coeff(MultiIndex::new(k1, k2, 0));
                            if c != 0.0 {
                                series += c * hermite_eval_1d(k1, v1) * hermite_eval_1d(k2, v2);
                            }
                        }
                    }
                    series * gauss_1d(v1) * gauss_1d(v2)
                })
                .collect()
        })
        .collect()
}
