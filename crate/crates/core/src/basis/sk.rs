//! Expansion tables for the polynomials `S_k(v, w) = (|v||w|)^k P_k(v.w / |v||w|)`.
//!
//! `S_k` is built by the Legendre-type recursion
//! `S_{k+1} = (2k+1)/(k+1) (v.w) S_k - k/(k+1) (|v||w|)^2 S_{k-1}`
//! and stored as a sparse map from monomial exponents to coefficients.
//! Every monomial has equal total degree in `v` and in `w`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::index::MultiIndex;

/// Packed exponents of `v1^a v2^b v3^c w1^d w2^e w3^f` (10 bits each).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkKey(u64);

impl SkKey {
    pub fn new(v: MultiIndex, w: MultiIndex) -> Self {
        let parts = [v.k1, v.k2, v.k3, w.k1, w.k2, w.k3];
        let mut packed = 0u64;
        for p in parts {
            debug_assert!(p < 1 << 10);
            packed = packed << 10 | p as u64;
        }
        SkKey(packed)
    }

    pub fn unpack(self) -> (MultiIndex, MultiIndex) {
        let mut parts = [0u32; 6];
        let mut packed = self.0;
        for p in parts.iter_mut().rev() {
            *p = (packed & 0x3ff) as u32;
            packed >>= 10;
        }
        (
            MultiIndex::new(parts[0], parts[1], parts[2]),
            MultiIndex::new(parts[3], parts[4], parts[5]),
        )
    }

    fn shifted(self, dv: [u32; 3], dw: [u32; 3]) -> Self {
        let (v, w) = self.unpack();
        SkKey::new(
            MultiIndex::new(v.k1 + dv[0], v.k2 + dv[1], v.k3 + dv[2]),
            MultiIndex::new(w.k1 + dw[0], w.k2 + dw[1], w.k3 + dw[2]),
        )
    }
}

/// Monomial coefficients of one `S_k`.
#[derive(Debug, Clone)]
pub struct SkTable {
    pub degree: u32,
    /// Ordered so the recursion accumulates in a fixed order; assembled
    /// tensors must be bit-reproducible across runs.
    coeffs: BTreeMap<SkKey, f64>,
}

impl SkTable {
    /// Coefficient of `v^{v_idx} w^{w_idx}`; zero when the monomial is absent.
    pub fn coeff(&self, v_idx: MultiIndex, w_idx: MultiIndex) -> f64 {
        self.coeffs
            .get(&SkKey::new(v_idx, w_idx))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, &c)| {
            let (v, w) = k.unpack();
            (v, w, c)
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn build(k: u32, prev: Option<(&SkTable, &SkTable)>) -> SkTable {
    match k {
        0 => {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(SkKey::new(MultiIndex::ZERO, MultiIndex::ZERO), 1.0);
            SkTable { degree: 0, coeffs }
        }
        1 => {
            let mut coeffs = BTreeMap::new();
            for i in 0..3 {
                let mut v = [0u32; 3];
                v[i] = 1;
                let idx = MultiIndex::new(v[0], v[1], v[2]);
                coeffs.insert(SkKey::new(idx, idx), 1.0);
            }
            SkTable { degree: 1, coeffs }
        }
        _ => {
            let (sk, sk_prev) = prev.expect("recursion inputs");
            let kf = (k - 1) as f64; // recursion written for S_{k} -> S_{k+1} with k = kf
            let c1 = (2.0 * kf + 1.0) / (kf + 1.0);
            let c2 = kf / (kf + 1.0);
            let mut coeffs: BTreeMap<SkKey, f64> = BTreeMap::new();
            // (v.w) S_{k-1}
            for (&key, &c) in &sk.coeffs {
                for i in 0..3 {
                    let mut e = [0u32; 3];
                    e[i] = 1;
                    *coeffs.entry(key.shifted(e, e)).or_insert(0.0) += c1 * c;
                }
            }
            // (|v||w|)^2 S_{k-2}
            for (&key, &c) in &sk_prev.coeffs {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut ev = [0u32; 3];
                        let mut ew = [0u32; 3];
                        ev[i] = 2;
                        ew[j] = 2;
                        *coeffs.entry(key.shifted(ev, ew)).or_insert(0.0) -= c2 * c;
                    }
                }
            }
            coeffs.retain(|_, c| *c != 0.0);
            SkTable { degree: k, coeffs }
        }
    }
}

/// Table of monomial coefficients of `S_k`, memoized per degree.
pub fn sk_table(k: u32) -> Arc<SkTable> {
    static CACHE: OnceLock<Mutex<Vec<Arc<SkTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut tables = cache.lock().unwrap();
    while tables.len() <= k as usize {
        let next = tables.len() as u32;
        let table = if next < 2 {
            build(next, None)
        } else {
            build(
                next,
                Some((&tables[next as usize - 1], &tables[next as usize - 2])),
            )
        };
        tables.push(Arc::new(table));
    }
    Arc::clone(&tables[k as usize])
}
