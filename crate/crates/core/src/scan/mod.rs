//! Rank sums, permutation-null moments, standardized statistics and scans.

mod diagnostics;
mod moments;
mod scanner;
mod stats;

pub use diagnostics::{condition_diagnostics, ConditionCheck, ConditionReport, ConditionStatus};
pub use moments::{null_moments, LengthMoments, NullMoments};
pub(crate) use scanner::single_u_path;
pub use scanner::{
    default_interval_window, default_single_window, scan, scan_interval, scan_single, Alternative,
    ChangeLocation, ScanPlan, ScanResult, ScanSpec, TraceEntry,
};
pub use stats::{m_statistic, t_statistic, u_stats, z_stats, StatisticKind, ZPair};
