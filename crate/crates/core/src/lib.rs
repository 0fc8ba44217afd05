//! Nonparametric change-point detection with graph-induced rank scan statistics.
//!
//! The pipeline is:
//!
//! 1. [`rank_graph`]: observations → distances → nested similarity graphs
//!    (k-NN or k-MST) → symmetric rank matrix `R`.
//! 2. [`scan`]: within/outside rank sums `U₁`, `U₂`, their exact permutation
//!    moments, the standardized `Z_w`/`Z_diff` pair, and the `T`/`M`
//!    statistics scanned over candidate change-points or changed intervals.
//! 3. [`analytic`]: closed-form tail approximations and critical values,
//!    optionally skewness corrected.
//! 4. [`permutation`]: permutation p-values, empirical critical values and an
//!    exhaustive enumeration oracle for tiny `n`.
//! 5. [`simulate`]: samplers and the validation/power/convergence studies.
//!
//! [`pipeline`] strings the steps together for one sequence.
//!
//! ```
//! use ringcpd::rank_graph::{compute_distances, build_graph_sequence, graph_induced_ranks,
//!     GraphKind, Metric, ObservationSeq};
//! use ringcpd::scan::{scan_single, ChangeLocation, StatisticKind};
//!
//! let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![if i < 10 { 0.0 } else { 10.0 }]).collect();
//! let seq = ObservationSeq::from_rows(&rows)?;
//! let d = compute_distances(&seq, Metric::Euclidean)?;
//! let g = build_graph_sequence(&d, 3, GraphKind::Knn)?;
//! let r = graph_induced_ranks(&g);
//! let res = scan_single(&r, StatisticKind::M, 2, 18)?;
//! assert_eq!(res.location, ChangeLocation::Single(10));
//! # Ok::<(), ringcpd::Error>(())
//! ```

pub mod analytic;
mod error;
pub mod permutation;
pub mod pipeline;
pub mod rank_graph;
pub mod scan;
pub mod simulate;

pub use error::{Error, Result};

/// Integer closest to `x`, halves rounded away from zero.
pub fn round_nearest(x: f64) -> i64 {
    x.round() as i64
}

/// Default graph depth `k = [n^0.65]`, at least 1 and at most `n - 1`.
pub fn default_k(n: usize) -> usize {
    let k = round_nearest((n as f64).powf(0.65)).max(1) as usize;
    k.min(n.saturating_sub(1)).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_nearest(2.5), 3);
        assert_eq!(round_nearest(-2.5), -3);
        assert_eq!(round_nearest(2.49), 2);
    }

    #[test]
    fn default_k_values() {
        // 200^0.65 = 31.3, 1000^0.65 = 89.1, 20^0.65 = 7.01
        assert_eq!(default_k(200), 31);
        assert_eq!(default_k(1000), 89);
        assert_eq!(default_k(20), 7);
        assert_eq!(default_k(2), 1);
    }
}
