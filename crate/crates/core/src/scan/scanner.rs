use rayon::prelude::*;

use super::moments::LengthMoments;
use super::stats::StatisticKind;
use crate::rank_graph::RankMatrix;
use crate::{round_nearest, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternative {
    /// One change-point `τ`: candidates `(0, t]` for `t ∈ [n0, n1]`.
    Single,
    /// One changed interval `(τ₁, τ₂]`: candidates with `1 ≤ t1 < t2 ≤ n`
    /// and `l0 ≤ t2 - t1 ≤ l1`.
    Interval,
}

impl Alternative {
    pub fn name(&self) -> &'static str {
        match self {
            Alternative::Single => "single",
            Alternative::Interval => "interval",
        }
    }
}

/// Which statistic to scan and over which window.
///
/// `lo`/`hi` are `n0`/`n1` for [`Alternative::Single`] and `l0`/`l1` for
/// [`Alternative::Interval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanSpec {
    pub kind: StatisticKind,
    pub alternative: Alternative,
    pub lo: usize,
    pub hi: usize,
}

impl ScanSpec {
    /// Spec with the default window for `n` observations.
    pub fn with_default_window(kind: StatisticKind, alternative: Alternative, n: usize) -> Self {
        let (lo, hi) = match alternative {
            Alternative::Single => default_single_window(n),
            Alternative::Interval => default_interval_window(n),
        };
        ScanSpec { kind, alternative, lo, hi }
    }
}

/// `n0 = max(2, [0.05 n])`, `n1 = n - n0`.
pub fn default_single_window(n: usize) -> (usize, usize) {
    let n0 = (round_nearest(0.05 * n as f64).max(2)) as usize;
    (n0, n.saturating_sub(n0))
}

/// `l0 = max(5, [0.05 n])`, `l1 = n - l0`.
pub fn default_interval_window(n: usize) -> (usize, usize) {
    let l0 = (round_nearest(0.05 * n as f64).max(5)) as usize;
    (l0, n.saturating_sub(l0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChangeLocation {
    /// Estimated change-point `τ̂`: the first `τ̂` observations follow `F₀`.
    Single(usize),
    /// Estimated changed interval `(τ̂₁, τ̂₂]`.
    Interval(usize, usize),
}

/// Statistic at one candidate; `None` marks a skipped (degenerate) candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub t1: usize,
    pub t2: usize,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub max_value: f64,
    pub location: ChangeLocation,
    pub trace: Vec<TraceEntry>,
}

/// Precomputed null moments for every window length of a scan, reusable
/// across permutations of the observation order (the moments only depend on
/// the window length and on permutation-invariant summaries of `R`).
#[derive(Clone, Debug)]
pub struct ScanPlan<'a> {
    r: &'a RankMatrix,
    spec: ScanSpec,
    lengths: Vec<LengthMoments>,
}

impl<'a> ScanPlan<'a> {
    pub fn new(r: &'a RankMatrix, spec: ScanSpec) -> Result<Self> {
        let n = r.n();
        if n < 4 {
            return Err(Error::TooFewObservations { n, min: 4 });
        }
        if spec.lo == 0 || spec.lo > spec.hi || spec.hi > n - 1 {
            return Err(Error::WindowEmpty { lo: spec.lo, hi: spec.hi, n });
        }
        let s = r.summaries();
        let lengths: Vec<LengthMoments> =
            (spec.lo..=spec.hi).map(|t| LengthMoments::new(n, s, t)).collect();
        let any = lengths.iter().any(|lm| match spec.kind {
            StatisticKind::T => lm.inverse.is_some(),
            StatisticKind::M => lm.z_defined,
        });
        if !any {
            return Err(Error::AllCandidatesDegenerate);
        }
        Ok(ScanPlan { r, spec, lengths })
    }

    pub fn spec(&self) -> ScanSpec {
        self.spec
    }

    pub fn rank_matrix(&self) -> &RankMatrix {
        self.r
    }

    pub fn length_moments(&self, len: usize) -> &LengthMoments {
        &self.lengths[len - self.spec.lo]
    }

    /// Visits every candidate for the observation order `order` (position →
    /// node), with `pos` its inverse. Candidates arrive in lexicographic
    /// `(t1, t2)` order.
    fn visit_single<F: FnMut(usize, usize, Option<f64>)>(&self, order: &[usize], pos: &[usize], mut f: F) {
        let lo = self.spec.lo;
        single_u_path(self.r, order, pos, self.spec.hi, |t, u1, u2| {
            if t >= lo {
                f(0, t, self.spec.kind.evaluate(self.length_moments(t), u1, u2));
            }
        });
    }

    fn visit_interval_row<F: FnMut(usize, usize, Option<f64>)>(
        &self,
        t1: usize,
        order: &[usize],
        pos: &[usize],
        mut f: F,
    ) {
        let r = self.r;
        let n = r.n();
        let rs = r.row_sums();
        let total = r.total();
        let (mut u1, mut placed) = (0.0, 0.0);
        let last = n.min(t1 + self.spec.hi);
        for t2 in (t1 + 1)..=last {
            let v = order[t2 - 1];
            let (cols, vals) = r.row(v);
            let mut inc = 0.0;
            for (&j, &w) in cols.iter().zip(vals) {
                let p = pos[j];
                if p >= t1 && p < t2 - 1 {
                    inc += w;
                }
            }
            u1 += 2.0 * inc;
            placed += rs[v];
            let len = t2 - t1;
            if len >= self.spec.lo {
                let u2 = total - 2.0 * placed + u1;
                f(t1, t2, self.spec.kind.evaluate(self.length_moments(len), u1, u2));
            }
        }
    }

    fn interval_starts(&self) -> std::ops::RangeInclusive<usize> {
        1..=(self.r.n() - self.spec.lo)
    }

    /// Full per-candidate trace for the given order.
    pub fn trace_for_order(&self, order: &[usize], pos: &[usize]) -> Vec<TraceEntry> {
        match self.spec.alternative {
            Alternative::Single => {
                let mut out = Vec::new();
                self.visit_single(order, pos, |t1, t2, value| out.push(TraceEntry { t1, t2, value }));
                out
            }
            Alternative::Interval => self
                .interval_starts()
                .into_par_iter()
                .map(|t1| {
                    let mut row = Vec::new();
                    self.visit_interval_row(t1, order, pos, |t1, t2, value| {
                        row.push(TraceEntry { t1, t2, value })
                    });
                    row
                })
                .collect::<Vec<_>>()
                .concat(),
        }
    }

    /// Maximum statistic and its first attaining candidate, without keeping
    /// the trace. `None` when every candidate is degenerate.
    pub fn max_for_order(&self, order: &[usize], pos: &[usize]) -> Option<(f64, ChangeLocation)> {
        let mut best: Option<(f64, usize, usize)> = None;
        let mut keep = |t1: usize, t2: usize, value: Option<f64>| {
            if let Some(v) = value {
                if best.map_or(true, |(b, _, _)| v > b) {
                    best = Some((v, t1, t2));
                }
            }
        };
        match self.spec.alternative {
            Alternative::Single => self.visit_single(order, pos, &mut keep),
            Alternative::Interval => {
                for t1 in self.interval_starts() {
                    self.visit_interval_row(t1, order, pos, &mut keep);
                }
            }
        }
        best.map(|(v, t1, t2)| (v, self.location(t1, t2)))
    }

    fn location(&self, t1: usize, t2: usize) -> ChangeLocation {
        match self.spec.alternative {
            Alternative::Single => ChangeLocation::Single(t2),
            Alternative::Interval => ChangeLocation::Interval(t1, t2),
        }
    }

    /// Scan of the observed order.
    pub fn run(&self) -> Result<ScanResult> {
        let identity: Vec<usize> = (0..self.r.n()).collect();
        let trace = self.trace_for_order(&identity, &identity);
        let mut best: Option<(f64, usize, usize)> = None;
        for e in &trace {
            if let Some(v) = e.value {
                if best.map_or(true, |(b, _, _)| v > b) {
                    best = Some((v, e.t1, e.t2));
                }
            }
        }
        let (max_value, t1, t2) = best.ok_or(Error::AllCandidatesDegenerate)?;
        Ok(ScanResult { spec: self.spec, max_value, location: self.location(t1, t2), trace })
    }
}

/// Calls `f(t, U₁(0, t), U₂(0, t))` for `t = 1..=hi`, with observations
/// taken in the order `order` (position → node) and `pos` its inverse.
pub(crate) fn single_u_path<F: FnMut(usize, f64, f64)>(
    r: &RankMatrix,
    order: &[usize],
    pos: &[usize],
    hi: usize,
    mut f: F,
) {
    let rs = r.row_sums();
    let total = r.total();
    let (mut u1, mut placed) = (0.0, 0.0);
    for t in 1..=hi {
        let v = order[t - 1];
        let (cols, vals) = r.row(v);
        let mut inc = 0.0;
        for (&j, &w) in cols.iter().zip(vals) {
            if pos[j] < t - 1 {
                inc += w;
            }
        }
        u1 += 2.0 * inc;
        placed += rs[v];
        f(t, u1, total - 2.0 * placed + u1);
    }
}

pub fn scan(r: &RankMatrix, spec: ScanSpec) -> Result<ScanResult> {
    ScanPlan::new(r, spec)?.run()
}

/// `max_{n0 ≤ t ≤ n1}` of the statistic at `(0, t)`.
pub fn scan_single(r: &RankMatrix, kind: StatisticKind, n0: usize, n1: usize) -> Result<ScanResult> {
    scan(r, ScanSpec { kind, alternative: Alternative::Single, lo: n0, hi: n1 })
}

/// Maximum over changed intervals with `l0 ≤ t2 - t1 ≤ l1`.
pub fn scan_interval(r: &RankMatrix, kind: StatisticKind, l0: usize, l1: usize) -> Result<ScanResult> {
    scan(r, ScanSpec { kind, alternative: Alternative::Interval, lo: l0, hi: l1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_graph::{build_graph_sequence, compute_distances, graph_induced_ranks};
    use crate::rank_graph::{GraphKind, Metric, ObservationSeq};
    use crate::scan::{m_statistic, t_statistic};

    fn ranks_1d(points: &[f64], k: usize) -> RankMatrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        let d = compute_distances(&ObservationSeq::from_rows(&rows).unwrap(), Metric::Euclidean)
            .unwrap();
        graph_induced_ranks(&build_graph_sequence(&d, k, GraphKind::Knn).unwrap())
    }

    /// Exhaustive scan through the direct (non-incremental) statistic routines.
    fn brute_force(r: &RankMatrix, spec: ScanSpec) -> Option<(f64, usize, usize)> {
        let n = r.n();
        let stat = |t1, t2| match spec.kind {
            StatisticKind::T => t_statistic(r, t1, t2).ok(),
            StatisticKind::M => m_statistic(r, t1, t2).ok(),
        };
        let mut best: Option<(f64, usize, usize)> = None;
        let mut consider = |t1, t2| {
            if let Some(v) = stat(t1, t2) {
                if best.map_or(true, |(b, _, _)| v > b) {
                    best = Some((v, t1, t2));
                }
            }
        };
        match spec.alternative {
            Alternative::Single => (spec.lo..=spec.hi).for_each(|t| consider(0, t)),
            Alternative::Interval => {
                for t1 in 1..n {
                    for t2 in (t1 + 1)..=n {
                        if (spec.lo..=spec.hi).contains(&(t2 - t1)) {
                            consider(t1, t2);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn single_shift_is_found() {
        let points: Vec<f64> = (0..20).map(|i| if i < 10 { 0.0 } else { 10.0 }).collect();
        let r = ranks_1d(&points, 3);
        let res = scan_single(&r, StatisticKind::M, 2, 18).unwrap();
        assert_eq!(res.location, ChangeLocation::Single(10));
        let (v, _, t) = brute_force(&r, res.spec).unwrap();
        assert_eq!(t, 10);
        assert!((v - res.max_value).abs() < 1e-9 * v.abs().max(1.0));
        // Symmetric construction: the T scan agrees.
        assert_eq!(scan_single(&r, StatisticKind::T, 2, 18).unwrap().location, ChangeLocation::Single(10));
    }

    #[test]
    fn interval_block_is_found() {
        let points: Vec<f64> = (1..=30).map(|i| if (8..=14).contains(&i) { 10.0 } else { 0.0 }).collect();
        let r = ranks_1d(&points, 3);
        let (l0, l1) = default_interval_window(30);
        let res = scan_interval(&r, StatisticKind::M, l0, l1).unwrap();
        assert_eq!(res.location, ChangeLocation::Interval(7, 14));
        let (v, t1, t2) = brute_force(&r, res.spec).unwrap();
        assert_eq!((t1, t2), (7, 14));
        assert!((v - res.max_value).abs() < 1e-9 * v.abs().max(1.0));
    }

    #[test]
    fn trace_matches_direct_statistics() {
        let points: Vec<f64> = (0..16).map(|i| ((i * 7) % 11) as f64 + 0.1 * i as f64).collect();
        let r = ranks_1d(&points, 4);
        for kind in [StatisticKind::T, StatisticKind::M] {
            let res = scan_interval(&r, kind, 3, 12).unwrap();
            for e in &res.trace {
                let direct = match kind {
                    StatisticKind::T => t_statistic(&r, e.t1, e.t2).ok(),
                    StatisticKind::M => m_statistic(&r, e.t1, e.t2).ok(),
                };
                match (e.value, direct) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9 * b.abs().max(1.0)),
                    (None, None) => {}
                    other => panic!("mismatch at ({}, {}): {other:?}", e.t1, e.t2),
                }
            }
        }
    }

    #[test]
    fn degenerate_and_empty_windows() {
        let dense: Vec<f64> = (0..100).map(|x| if x % 11 == 0 { 0.0 } else { 1.0 }).collect();
        let constant = RankMatrix::from_dense(10, &dense).unwrap();
        assert_eq!(scan_single(&constant, StatisticKind::M, 2, 8), Err(Error::AllCandidatesDegenerate));
        let zero = RankMatrix::from_dense(10, &[0.0; 100]).unwrap();
        assert_eq!(scan_interval(&zero, StatisticKind::M, 2, 8), Err(Error::AllCandidatesDegenerate));
        let r = ranks_1d(&[0.0, 1.0, 2.0, 4.0, 8.0, 9.0], 2);
        assert!(matches!(scan_single(&r, StatisticKind::M, 4, 3), Err(Error::WindowEmpty { .. })));
    }

    #[test]
    fn full_length_interval_does_not_crash() {
        let points: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let r = ranks_1d(&points, 3);
        let res = scan_interval(&r, StatisticKind::M, 11, 11);
        assert!(matches!(res, Err(Error::AllCandidatesDegenerate)) || res.is_ok());
    }

    #[test]
    fn default_windows() {
        assert_eq!(default_single_window(1000), (50, 950));
        assert_eq!(default_single_window(20), (2, 18));
        assert_eq!(default_interval_window(30), (5, 25));
        assert_eq!(default_interval_window(365), (18, 347));
    }
}
