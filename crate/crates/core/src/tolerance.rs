//! Process-wide zero tolerance.
//!
//! Every "is this zero" decision in the crate (ranks, semidefiniteness,
//! subspace equality) goes through [`zero_tol`]. The default is `1e-9`,
//! which is comfortable for the small, well-conditioned fixtures the
//! workbench is meant for.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

static ZERO_TOL_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

pub fn zero_tol() -> f64 {
    f64::from_bits(ZERO_TOL_BITS.load(Ordering::Relaxed))
}

/// Replaces the global zero tolerance. Non-positive or non-finite values are ignored.
pub fn set_zero_tol(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        ZERO_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

/// Rank threshold for a matrix whose largest singular value is `sigma_max`.
///
/// Relative to `sigma_max` for matrices of size at least one, absolute below.
pub fn rank_threshold(sigma_max: f64) -> f64 {
    zero_tol() * sigma_max.max(1.0)
}
