use crate::scalar::RankTolerance;

/// Float-mode tolerance policy. Exact mode ignores everything except where
/// a float post-processing step (eigenvalues, square roots) is involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute floor for the Gram eigenvalue cutoff `τ_rank`.
    pub rank: f64,
    /// Relative slack below zero accepted before a Gram matrix is declared non-PSD.
    pub psd: f64,
    /// Zero test for seminorms of null polynomials and 1-D recursions.
    pub null: f64,
    /// Commutator residual tolerance, scaled by the size of the terms.
    pub comm: f64,
    /// Adjointness and symmetry tolerance, scaled by the largest entry.
    pub adj: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            psd: 1e-9,
            null: 1e-10,
            comm: 1e-10,
            adj: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn rank_tolerance(&self) -> RankTolerance {
        RankTolerance {
            absolute: self.rank,
            psd_relative: self.psd,
        }
    }
}
