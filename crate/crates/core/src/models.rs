//! Right-hand-side providers for the coefficient ODE system: the pure
//! quadratic Galerkin operator, the BGK relaxation operator, the hybrid
//! operator with an exponentially decaying tail, and the linearized
//! operator whose spectral radius sets the tail decay rate.

use nalgebra::DMatrix;

use crate::basis::{index_set, n_basis, MultiIndex};
use crate::error::{Error, Result};
use crate::tensor::CollisionTensor;

/// Quadratic collision term `Q_k = sum A_k^{i,j} f_i f_j` over `I_{M0}`,
/// applied through the symmetrized tensor (off-diagonal entries count
/// twice).
pub fn quadratic_rhs(tensor: &CollisionTensor, f: &[f64]) -> Result<Vec<f64>> {
    let n = tensor.n_coeffs();
    if f.len() != n {
        return Err(Error::Contract(format!(
            "state has {} coefficients but tensor indexes {n}",
            f.len()
        )));
    }
    let mut out = vec![0.0; n];
    for e in tensor.entries() {
        let w = if e.i == e.j { 1.0 } else { 2.0 };
        out[e.k as usize] += w * e.value * f[e.i as usize] * f[e.j as usize];
    }
    Ok(out)
}

/// BGK relaxation term: zero for the mass slot, `-f_k / tau` otherwise.
/// Assumes the normalized frame (conserved slots stay zero on their own).
pub fn bgk_rhs(tau: f64, f: &[f64]) -> Vec<f64> {
    debug_assert!(tau > 0.0);
    let mut out: Vec<f64> = f.iter().map(|&x| -x / tau).collect();
    if let Some(first) = out.first_mut() {
        *first = 0.0;
    }
    out
}

/// Dense discrete linearization of the collision operator about the
/// Maxwellian: entry (k, j) is `A_k^{000,j} + A_k^{j,000}`.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    matrix: DMatrix<f64>,
    /// sqrt(k1! k2! k3!) per rank; the similarity transform with these
    /// weights makes the operator symmetric (self-adjointness in the
    /// Maxwellian-weighted space).
    weights: Vec<f64>,
}

impl LinearizedOperator {
    /// Wraps a raw matrix with unit weights (used for reference cases).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let weights = vec![1.0; matrix.nrows()];
        Self { matrix, weights }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.matrix * x).as_slice().to_vec()
    }
}

/// Builds the linearized operator from a symmetrized tensor. A stored
/// entry with i = 0 represents both orderings, so the matrix entry is
/// twice the stored value.
pub fn linearized_operator(tensor: &CollisionTensor) -> LinearizedOperator {
    let n = tensor.n_coeffs();
    let mut matrix = DMatrix::zeros(n, n);
    for e in tensor.entries() {
        if e.i == 0 {
            matrix[(e.k as usize, e.j as usize)] = 2.0 * e.value;
        } else if e.j == 0 {
            matrix[(e.k as usize, e.i as usize)] = 2.0 * e.value;
        }
    }
    let weights = index_set(tensor.m0())
        .map(|idx| {
            let [a, b, c] = idx.components();
            (crate::basis::factorial(a) * crate::basis::factorial(b) * crate::basis::factorial(c))
                .sqrt()
        })
        .collect();
    LinearizedOperator { matrix, weights }
}

/// Maximum eigenvalue magnitude of the linearized operator: dense
/// eigensolve for sizes up to 500, power iteration above.
pub fn spectral_radius(op: &LinearizedOperator) -> Result<f64> {
    if op.n() <= 500 {
        dense_radius(op)
    } else {
        power_radius(&op.matrix, 1e-10, 100_000)
    }
}

/// Dense path: the factorial similarity transform makes the operator
/// symmetric up to assembly rounding, so the radius comes from a
/// symmetric eigensolve. Falls back to power iteration when the
/// transformed matrix is measurably asymmetric.
fn dense_radius(op: &LinearizedOperator) -> Result<f64> {
    let n = op.n();
    let w = &op.weights;
    let mut b = DMatrix::zeros(n, n);
    for a in 0..n {
        for c in 0..n {
            b[(a, c)] = w[a] * op.matrix[(a, c)] / w[c];
        }
    }
    let mut asym = 0.0f64;
    let mut scale = 0.0f64;
    for a in 0..n {
        for c in 0..a {
            asym = asym.max((b[(a, c)] - b[(c, a)]).abs());
            scale = scale.max(b[(a, c)].abs());
        }
        scale = scale.max(b[(a, a)].abs());
    }
    if asym > 1e-6 * scale.max(1e-300) {
        return power_radius(&op.matrix, 1e-10, 100_000);
    }
    let sym = (&b + b.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    Ok(eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs())))
}

/// Power iteration with Rayleigh-quotient estimate. The operator's
/// spectrum is real (it is symmetrizable), so the dominant eigenvalue is
/// real and the iteration converges whenever it is reachable from the
/// start vector.
fn power_radius(m: &DMatrix<f64>, tol: f64, max_iter: u64) -> Result<f64> {
    let n = m.nrows();
    // deterministic start with broadband components
    let mut v = nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| 1.0 + 0.37 * ((i * 2654435761) % 1000) as f64 / 1000.0),
    );
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        lambda = v.dot(&w);
        let residual = (&w - lambda * &v).norm();
        if residual <= tol * lambda.abs().max(1.0) {
            return Ok(lambda.abs());
        }
        v = w / norm;
    }
    Err(Error::PowerIterationNonConvergence {
        residual: (m * &v - lambda * &v).norm(),
        iterations: max_iter,
    })
}

/// Hybrid collision model: quadratic Galerkin core on `I_{M0}`, uniform
/// exponential decay at rate `nu` on the tail up to degree `M`.
#[derive(Debug)]
pub struct HybridModel {
    tensor: CollisionTensor,
    m: u32,
    nu: f64,
}

impl HybridModel {
    pub fn new(tensor: CollisionTensor, m: u32, nu: f64) -> Result<Self> {
        if m < tensor.m0() {
            return Err(Error::Contract(format!(
                "hybrid model requires M >= M0, got M = {m}, M0 = {}",
                tensor.m0()
            )));
        }
        if !(nu >= 0.0) {
            return Err(Error::Contract(format!(
                "tail decay rate must be >= 0, got {nu}"
            )));
        }
        Ok(Self { tensor, m, nu })
    }

    /// Builds the model with the tail rate set to the spectral radius of
    /// the linearized operator.
    pub fn with_spectral_rate(tensor: CollisionTensor, m: u32) -> Result<Self> {
        let nu = spectral_radius(&linearized_operator(&tensor))?;
        Self::new(tensor, m, nu)
    }

    pub fn tensor(&self) -> &CollisionTensor {
        &self.tensor
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dim(&self) -> usize {
        n_basis(self.m)
    }

    /// Hybrid right-hand side over `I_M`: quadratic on the `I_{M0}`
    /// prefix (the graded order makes the restriction a prefix), pure
    /// decay on the tail.
    pub fn rhs(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if f.len() != n {
            return Err(Error::Contract(format!(
                "state has {} coefficients but model integrates {n}",
                f.len()
            )));
        }
        let n0 = self.tensor.n_coeffs();
        let mut out = quadratic_rhs(&self.tensor, &f[..n0])?;
        out.extend(f[n0..].iter().map(|&x| -self.nu * x));
        Ok(out)
    }
}

/// Ranks of the five collision-invariant directions inside `I_M`, plus
/// the degree-2 trace combination used by conservation checks.
pub fn invariant_directions(m: u32) -> Vec<Vec<(usize, f64)>> {
    let e = |a, b, c| MultiIndex::new(a, b, c).rank();
    vec![
        vec![(e(0, 0, 0), 1.0)],
        vec![(e(1, 0, 0), 1.0)],
        vec![(e(0, 1, 0), 1.0)],
        vec![(e(0, 0, 1), 1.0)],
        vec![(e(2, 0, 0), 1.0), (e(0, 2, 0), 1.0), (e(0, 0, 2), 1.0)],
    ]
    .into_iter()
    .filter(|dirs| dirs.iter().all(|&(r, _)| r < n_basis(m)))
    .collect()
}
