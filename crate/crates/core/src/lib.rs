//! Hermite-Galerkin spectral solver for the spatially homogeneous
//! Boltzmann equation with inverse-power-law (IPL) collision kernels.
//!
//! The crate is organized along the data flow of the method:
//!
//! * [`basis`] - multi-index bookkeeping and the polynomial ingredients
//!   (Hermite / Laguerre / Legendre evaluation, product expansions, the
//!   `a` and `C` coefficient families);
//! * [`kernel`] - the IPL kernel: deflection angles, angular integrals,
//!   radial integrals, relaxation-time constants;
//! * [`tensor`] - assembly, serialization and direct-quadrature checking
//!   of the quadratic collision tensor;
//! * [`models`] - right-hand sides: quadratic, BGK, and the hybrid
//!   operator with an exponentially decaying tail;
//! * [`solver`] - time integration, moments, initial-condition
//!   projections, the closed-form Maxwell-molecule reference solution,
//!   and marginal distributions.
//!
//! ```
//! use hboltz_core::kernel::KernelModel;
//! use hboltz_core::models::HybridModel;
//! use hboltz_core::solver::{bkw_coeffs, moments, rk4_integrate, BkwReference};
//! use hboltz_core::tensor::{assemble, AssembleOptions};
//!
//! # fn main() -> hboltz_core::Result<()> {
//! let kernel = KernelModel::with_default_quadrature(5.0)?;
//! let tensor = assemble(&kernel, 4, &AssembleOptions::default())?;
//! let model = HybridModel::with_spectral_rate(tensor, 6)?;
//!
//! let reference = BkwReference::from_kernel(&kernel)?;
//! let mut state = bkw_coeffs(0.0, &reference, 6)?;
//! rk4_integrate(|f| model.rhs(f), &mut state, 0.01, 0.5, |_, _| Ok(()))?;
//!
//! let m = moments(&state);
//! assert!((m.rho - 1.0).abs() < 1e-12 && (m.theta - 1.0).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```

// Guards written as `!(x > 0.0)` deliberately reject NaN; parity tests
// stay as `% 2 == 0` to read like the mathematics.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod basis;
pub mod error;
pub mod kernel;
pub mod models;
pub mod quadrature;
pub mod solver;
pub mod tensor;

pub use error::{CacheError, Error, Result};
