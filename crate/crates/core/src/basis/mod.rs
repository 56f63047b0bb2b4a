//! Multi-index bookkeeping and the purely combinatorial / polynomial
//! ingredients of the Hermite-Galerkin discretization.

mod coeffs;
mod index;
mod poly;
mod sk;

pub use coeffs::{a_coeff, c_coeff};
pub use index::{index_set, n_basis, unrank, MultiIndex};
pub use poly::{hermite_eval, hermite_eval_1d, laguerre_eval, legendre_eval};
pub use sk::{sk_table, SkKey, SkTable};

pub(crate) use coeffs::factorial;
