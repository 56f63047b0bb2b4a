//! Multi-index bookkeeping for the Hermite basis.
//!
//! Basis functions are indexed by triples `(k1, k2, k3)` of polynomial
//! degrees. The canonical enumeration is graded lexicographic: ascending
//! total degree, and within a degree block the component `k1` decreases
//! first, then `k2` (so the degree-1 block is `(1,0,0), (0,1,0), (0,0,1)`).

use crate::error::{Error, Result};

/// A triple of per-component polynomial degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub k1: u32,
    pub k2: u32,
    pub k3: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex::new(0, 0, 0);

    pub const fn new(k1: u32, k2: u32, k3: u32) -> Self {
        Self { k1, k2, k3 }
    }

    /// Total degree `k1 + k2 + k3`.
    pub fn degree(&self) -> u32 {
        self.k1 + self.k2 + self.k3
    }

    pub fn components(&self) -> [u32; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// Position in the graded-lexicographic enumeration of all triples.
    ///
    /// This is a bijection onto `0..N_M` when restricted to `I_M`; the
    /// rank of a triple does not depend on `M`.
    pub fn rank(&self) -> usize {
        let d = self.degree() as usize;
        let base = if d == 0 { 0 } else { n_basis(d as u32 - 1) };
        let r1 = d - self.k1 as usize; // block offset from k1 running down from d
        base + r1 * (r1 + 1) / 2 + (r1 - self.k2 as usize)
    }
}

impl From<(u32, u32, u32)> for MultiIndex {
    fn from(t: (u32, u32, u32)) -> Self {
        Self::new(t.0, t.1, t.2)
    }
}

/// Number of triples with total degree at most `m`: `(M+1)(M+2)(M+3)/6`.
pub fn n_basis(m: u32) -> usize {
    let m = m as usize;
    (m + 1) * (m + 2) * (m + 3) / 6
}

/// Inverse of [`MultiIndex::rank`] restricted to `I_M`.
///
/// Fails when `rank >= N_M`.
pub fn unrank(rank: usize, m: u32) -> Result<MultiIndex> {
    let n = n_basis(m);
    if rank >= n {
        return Err(Error::RankOutOfRange { rank, m, n });
    }
    Ok(unrank_unbounded(rank))
}

/// Inverse of [`MultiIndex::rank`] on the full enumeration.
pub(crate) fn unrank_unbounded(rank: usize) -> MultiIndex {
    // Find the degree block containing `rank`.
    let mut d = 0u32;
    while n_basis(d) <= rank {
        d += 1;
    }
    let base = if d == 0 { 0 } else { n_basis(d - 1) };
    let mut t = rank - base;
    // Within the block, k1 runs down from d; for a fixed k1 there are
    // d - k1 + 1 choices of k2.
    let mut r1 = 0usize;
    while (r1 + 1) * (r1 + 2) / 2 <= t {
        r1 += 1;
    }
    t -= r1 * (r1 + 1) / 2;
    let k1 = d - r1 as u32;
    let k2 = (r1 - t) as u32;
    let k3 = d - k1 - k2;
    MultiIndex::new(k1, k2, k3)
}

/// All triples of `I_M` in rank order.
pub fn index_set(m: u32) -> impl Iterator<Item = MultiIndex> {
    (0..=m).flat_map(move |d| {
        (0..=d).rev().flat_map(move |k1| {
            (0..=d - k1)
                .rev()
                .map(move |k2| MultiIndex::new(k1, k2, d - k1 - k2))
        })
    })
}
