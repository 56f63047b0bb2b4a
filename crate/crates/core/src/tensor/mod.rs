//! Assembly of the Galerkin collision tensor.
//!
//! The pipeline follows the coefficient chain C -> S -> K -> gamma -> a -> A:
//! the angular/radial kernel data is contracted into a dense gamma table
//! over `I_{2 M0} x I_{M0}`, which is then contracted with the Hermite
//! splitting coefficients into the symmetrized sparse tensor `A_k^{i,j}`.

mod io;
mod oracle;

pub use io::{read_header, TensorHeader};
pub use oracle::{gamma_direct_oracle, GammaOracle};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::basis::{
    a_coeff, c_coeff, factorial, index_set, n_basis, sk_table, MultiIndex, SkTable,
};
use crate::error::{Error, Result};
use crate::kernel::KernelModel;

/// Dense table of the angular expansion coefficients
/// `gamma_j^l` for `j` in `I_{2 M0}`, `l` in `I_{M0}`.
#[derive(Debug)]
pub struct GammaTable {
    m0: u32,
    n_sub: usize,
    n_sup: usize,
    values: Vec<f64>,
}

impl GammaTable {
    /// Builds the full table, precomputing the scalar `K` coefficients.
    pub fn build(model: &KernelModel, m0: u32) -> Result<GammaTable> {
        let k_table = KTable::build(model, m0)?;
        let sk: Vec<_> = (0..=m0).map(sk_table).collect();
        let n_sub = n_basis(2 * m0);
        let n_sup = n_basis(m0);
        let subs: Vec<MultiIndex> = index_set(2 * m0).collect();
        let sups: Vec<MultiIndex> = index_set(m0).collect();
        let rows: Vec<Vec<f64>> = subs
            .par_iter()
            .map(|&j| {
                sups.iter()
                    .map(|&l| gamma_from_tables(j, l, &k_table, &sk))
                    .collect()
            })
            .collect();
        let mut values = Vec::with_capacity(n_sub * n_sup);
        for row in rows {
            values.extend(row);
        }
        Ok(GammaTable {
            m0,
            n_sub,
            n_sup,
            values,
        })
    }

    pub fn m0(&self) -> u32 {
        self.m0
    }

    /// `gamma_j^l`; `j` must lie in `I_{2 M0}` and `l` in `I_{M0}`.
    pub fn get(&self, j: MultiIndex, l: MultiIndex) -> f64 {
        let (rj, rl) = (j.rank(), l.rank());
        debug_assert!(rj < self.n_sub && rl < self.n_sup);
        self.values[rj * self.n_sup + rl]
    }
}

/// Scalar radial-angular coefficients keyed by (k, l, m, n).
struct KTable {
    values: HashMap<(u32, u32, u32, u32), f64>,
}

impl KTable {
    fn build(model: &KernelModel, m0: u32) -> Result<KTable> {
        // Fill the angular-integral cache up front (single pass).
        model.i_integral(2 * m0)?;
        let mut values = HashMap::new();
        for k in 0..=2 * m0 {
            for m in 0..=k / 2 {
                let r = k - 2 * m;
                if r > m0 {
                    continue;
                }
                for n in 0..=(m0 - r) / 2 {
                    let l = r + 2 * n;
                    values.insert((k, l, m, n), model.k_coeff(k, l, m, n)?);
                }
            }
        }
        Ok(KTable { values })
    }

    fn get(&self, k: u32, l: u32, m: u32, n: u32) -> f64 {
        self.values.get(&(k, l, m, n)).copied().unwrap_or(0.0)
    }
}

fn gamma_from_tables(
    j: MultiIndex,
    l: MultiIndex,
    k_table: &KTable,
    sk: &[std::sync::Arc<SkTable>],
) -> f64 {
    let k_deg = j.degree();
    let l_deg = l.degree();
    let [j1, j2, j3] = j.components();
    let [l1, l2, l3] = l.components();
    let mut sum = 0.0;
    for m1 in 0..=j1 / 2 {
        for m2 in 0..=j2 / 2 {
            for m3 in 0..=j3 / 2 {
                let m = m1 + m2 + m3;
                let r = k_deg - 2 * m;
                // Only terms with matching reduced degree survive.
                if l_deg < r || (l_deg - r) % 2 != 0 {
                    continue;
                }
                let n = (l_deg - r) / 2;
                let c_j = c_coeff(j, MultiIndex::new(m1, m2, m3));
                let degree_factor = (2 * r + 1) as f64;
                let j_red = MultiIndex::new(j1 - 2 * m1, j2 - 2 * m2, j3 - 2 * m3);
                let table = match sk.get(r as usize) {
                    Some(t) => t,
                    None => continue,
                };
                for n1 in 0..=l1 / 2 {
                    for n2 in 0..=l2 / 2 {
                        for n3 in 0..=l3 / 2 {
                            if n1 + n2 + n3 != n {
                                continue;
                            }
                            let l_red = MultiIndex::new(l1 - 2 * n1, l2 - 2 * n2, l3 - 2 * n3);
                            let s = table.coeff(j_red, l_red);
                            if s == 0.0 {
                                continue;
                            }
                            let c_l = c_coeff(l, MultiIndex::new(n1, n2, n3));
                            sum += degree_factor * c_j * c_l * s * k_table.get(k_deg, l_deg, m, n);
                        }
                    }
                }
            }
        }
    }
    sum
}

/// Angular expansion coefficient `gamma_j^l` by the closed summation
/// formula. `j` is the bracket-side triple, `l` the test-side triple.
pub fn gamma_coeff(j: MultiIndex, l: MultiIndex, model: &KernelModel) -> Result<f64> {
    let m0 = j.degree().div_ceil(2).max(l.degree());
    let k_table = KTable::build(model, m0)?;
    let sk: Vec<_> = (0..=m0).map(sk_table).collect();
    Ok(gamma_from_tables(j, l, &k_table, &sk))
}

/// One symmetrized entry of the collision tensor, with `i <= j` as ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEntry {
    pub k: u32,
    pub i: u32,
    pub j: u32,
    pub value: f64,
}

/// The symmetrized sparse Galerkin collision tensor over `I_{M0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionTensor {
    eta: f64,
    m0: u32,
    drop_floor: f64,
    entries: Vec<TensorEntry>,
}

impl CollisionTensor {
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn m0(&self) -> u32 {
        self.m0
    }

    pub fn drop_floor(&self) -> f64 {
        self.drop_floor
    }

    /// Number of coefficients of a compatible state vector, `N_{M0}`.
    pub fn n_coeffs(&self) -> usize {
        n_basis(self.m0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TensorEntry] {
        &self.entries
    }
}

/// Dense double-precision storage bound for the tensor at degree cap `m0`:
/// `8 N_{M0}^3` bytes.
pub fn memory_estimate(m0: u32) -> u64 {
    let n = n_basis(m0) as u64;
    8 * n * n * n
}

/// Assembly controls.
#[derive(Debug, Clone)]
pub struct AssembleOptions {
    /// Symmetrized entries with magnitude strictly below this are dropped
    /// (0 keeps everything, for audits).
    pub drop_floor: f64,
    /// Refuse assembly when the dense memory estimate exceeds this.
    pub memory_cap: Option<u64>,
    /// Parallelize over output triples. Values are identical either way;
    /// the flag exists for single-threaded regression runs.
    pub parallel: bool,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self {
            drop_floor: 1e-14,
            memory_cap: None,
            parallel: true,
        }
    }
}

/// Assembles the symmetrized collision tensor for `I_{M0}`.
pub fn assemble(model: &KernelModel, m0: u32, opts: &AssembleOptions) -> Result<CollisionTensor> {
    if m0 < 2 {
        return Err(Error::Contract(format!(
            "assemble requires M0 >= 2 so the conserved moments lie inside I_M0, got {m0}"
        )));
    }
    if let Some(cap) = opts.memory_cap {
        let estimate = memory_estimate(m0);
        if estimate > cap {
            return Err(Error::MemoryCap { estimate, cap });
        }
    }
    let gamma = GammaTable::build(model, m0)?;
    let a_tab = ATable::build(m0)?;
    let triples: Vec<MultiIndex> = index_set(m0).collect();
    let per_k = |k: &MultiIndex| -> Vec<TensorEntry> {
        let k_rank = k.rank() as u32;
        let mut out = Vec::new();
        for (i_rank, &i) in triples.iter().enumerate() {
            for (j_rank, &j) in triples.iter().enumerate().skip(i_rank) {
                let raw_ij = raw_entry(*k, i, j, &gamma, &a_tab);
                let raw_ji = raw_entry(*k, j, i, &gamma, &a_tab);
                let sym = 0.5 * (raw_ij + raw_ji);
                if sym.abs() >= opts.drop_floor && sym != 0.0 {
                    out.push(TensorEntry {
                        k: k_rank,
                        i: i_rank as u32,
                        j: j_rank as u32,
                        value: sym,
                    });
                }
            }
        }
        out
    };
    let rows: Vec<Vec<TensorEntry>> = if opts.parallel {
        triples.par_iter().map(per_k).collect()
    } else {
        triples.iter().map(per_k).collect()
    };
    let mut entries = Vec::new();
    for row in rows {
        entries.extend(row);
    }
    Ok(CollisionTensor {
        eta: model.eta(),
        m0,
        drop_floor: opts.drop_floor,
        entries,
    })
}

/// Hermite splitting coefficients indexed (i, j, i'), with j' = i + j - i'.
struct ATable {
    m0: usize,
    values: Vec<f64>,
}

impl ATable {
    fn build(m0: u32) -> Result<ATable> {
        let m = m0 as usize;
        let mut values = vec![0.0; (m + 1) * (m + 1) * (2 * m + 1)];
        for i in 0..=m {
            for j in 0..=m {
                for ip in 0..=i + j {
                    values[(i * (m + 1) + j) * (2 * m + 1) + ip] =
                        a_coeff(i as u32, j as u32, ip as u32, (i + j - ip) as u32)?;
                }
            }
        }
        Ok(ATable { m0: m, values })
    }

    #[inline]
    fn get(&self, i: u32, j: u32, ip: u32) -> f64 {
        self.values[(i as usize * (self.m0 + 1) + j as usize) * (2 * self.m0 + 1) + ip as usize]
    }
}

/// Unsymmetrized tensor entry `A_k^{i,j}` from the triple sum over
/// componentwise splits.
fn raw_entry(
    k: MultiIndex,
    i: MultiIndex,
    j: MultiIndex,
    gamma: &GammaTable,
    a_tab: &ATable,
) -> f64 {
    let [k1, k2, k3] = k.components();
    let [i1, i2, i3] = i.components();
    let [j1, j2, j3] = j.components();
    let mut sum = 0.0;
    for ip1 in 0..=(i1 + j1).min(k1) {
        let a1 = a_tab.get(i1, j1, ip1);
        if a1 == 0.0 {
            continue;
        }
        for ip2 in 0..=(i2 + j2).min(k2) {
            let a2 = a_tab.get(i2, j2, ip2);
            if a2 == 0.0 {
                continue;
            }
            for ip3 in 0..=(i3 + j3).min(k3) {
                let a3 = a_tab.get(i3, j3, ip3);
                if a3 == 0.0 {
                    continue;
                }
                let jp = MultiIndex::new(i1 + j1 - ip1, i2 + j2 - ip2, i3 + j3 - ip3);
                let lp = MultiIndex::new(k1 - ip1, k2 - ip2, k3 - ip3);
                let g = gamma.get(jp, lp);
                if g == 0.0 {
                    continue;
                }
                sum += a1 * a2 * a3 * g / (factorial(lp.k1) * factorial(lp.k2) * factorial(lp.k3));
            }
        }
    }
    let k_deg = k.degree() as f64;
    sum * (-0.5 * k_deg).exp2() / (8.0 * std::f64::consts::PI.powf(1.5))
}
