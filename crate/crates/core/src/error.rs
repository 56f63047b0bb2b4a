//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side index contract was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A rank is outside the index set it was resolved against.
    #[error("rank {rank} out of range for M = {m} (N_M = {n})")]
    RankOutOfRange { rank: usize, m: u32, n: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error(
        "quadrature did not converge: achieved error {achieved:.3e} \
         (requested abs {requested_abs:.1e} / rel {requested_rel:.1e}) \
         after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        achieved: f64,
        requested_abs: f64,
        requested_rel: f64,
        subdivisions: u32,
    },

    /// A deliberately expensive reference computation was refused.
    #[error("cost guard: {0}")]
    CostGuard(String),

    /// A tensor assembly would exceed the configured memory cap.
    #[error(
        "memory cap exceeded: dense estimate {est_gib:.2} GiB ({estimate} bytes) > cap {cap_gib:.2} GiB ({cap} bytes)",
        est_gib = *estimate as f64 / 1.073741824e9,
        cap_gib = *cap as f64 / 1.073741824e9
    )]
    MemoryCap { estimate: u64, cap: u64 },

    /// Power iteration failed to converge.
    #[error(
        "power iteration did not converge: residual {residual:.3e} after {iterations} iterations"
    )]
    PowerIterationNonConvergence { residual: f64, iterations: u64 },

    /// The integrated state stopped being finite.
    #[error("non-finite state detected; last good time t = {t_last_good}")]
    NonFiniteState { t_last_good: f64 },

    /// Two independent evaluation routes disagreed beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// Cache file problems (serialization, corruption, staleness).
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Errors specific to the binary tensor cache format.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic: not a collision tensor cache file")]
    BadMagic,

    #[error("unsupported cache format version {0}")]
    UnsupportedVersion(u32),

    #[error("cache file truncated")]
    Truncated,

    #[error("cache checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    ChecksumMismatch { stored: u64, computed: u64 },

    #[error(
        "stale cache: file has eta = {file_eta}, M0 = {file_m0} but run requests \
         eta = {want_eta}, M0 = {want_m0}; re-run assembly"
    )]
    Stale {
        file_eta: f64,
        file_m0: u32,
        want_eta: f64,
        want_m0: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
