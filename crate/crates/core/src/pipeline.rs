//! End-to-end detection on one observation sequence.

use crate::analytic::{analytic_p_value, skewness_table, SkewnessSource, SkewnessTable, TailConfig};
use crate::permutation::{permutation_pvalue_for, PermPlan, PermResult};
use crate::rank_graph::{
    build_graph_sequence, compute_distances, graph_induced_ranks, weighted_graph_matrix, DistanceMatrix,
    EdgeWeight, GraphKind, Metric, ObservationSeq, RankMatrix,
};
use crate::scan::{
    condition_diagnostics, Alternative, ChangeLocation, ConditionReport, ScanPlan, ScanSpec, StatisticKind,
    TraceEntry,
};
use crate::{default_k, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorConfig {
    pub metric: Metric,
    pub graph: GraphKind,
    /// Graph depth; `None` uses `[n^0.65]`.
    pub k: Option<usize>,
    /// Kernel or distance weighting instead of graph-induced ranks.
    pub weight: Option<EdgeWeight>,
    pub kind: StatisticKind,
    pub alternative: Alternative,
    /// `(lo, hi)` window; `None` uses the defaults for `n`.
    pub window: Option<(usize, usize)>,
    pub analytic: bool,
    /// Monte-Carlo draws for the skewness correction (M only); `None` disables it.
    pub skewness_draws: Option<usize>,
    /// Permutation draws; `None` disables the permutation p-value.
    pub permutations: Option<usize>,
    pub seed: u64,
    pub diagnostics: bool,
    pub keep_trace: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            metric: Metric::Euclidean,
            graph: GraphKind::Knn,
            k: None,
            weight: None,
            kind: StatisticKind::M,
            alternative: Alternative::Single,
            window: None,
            analytic: true,
            skewness_draws: None,
            permutations: None,
            seed: 0,
            diagnostics: true,
            keep_trace: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub n: usize,
    pub k: usize,
    pub spec: ScanSpec,
    pub max_value: f64,
    pub location: ChangeLocation,
    pub analytic_p: Option<f64>,
    pub skewness: Option<SkewnessTable>,
    pub permutation: Option<PermResult>,
    pub diagnostics: Option<ConditionReport>,
    pub trace: Vec<TraceEntry>,
}

impl Detection {
    /// Permutation p-value when available, else the analytic one.
    pub fn p_value(&self) -> Option<f64> {
        self.permutation.as_ref().map(|p| p.p_value).or(self.analytic_p)
    }
}

/// Rank (or weighted) matrix for `d` under `cfg`; returns the matrix and the `k` used.
pub fn build_matrix(d: &DistanceMatrix, cfg: &DetectorConfig) -> Result<(RankMatrix, usize)> {
    let n = d.n();
    let k = cfg.k.unwrap_or_else(|| default_k(n));
    let g = build_graph_sequence(d, k, cfg.graph)?;
    let r = match cfg.weight {
        None => graph_induced_ranks(&g),
        Some(w) => weighted_graph_matrix(d, &g, w)?,
    };
    Ok((r, k))
}

pub fn detect(seq: &ObservationSeq, cfg: &DetectorConfig) -> Result<Detection> {
    let d = compute_distances(seq, cfg.metric)?;
    detect_distances(&d, cfg)
}

pub fn detect_distances(d: &DistanceMatrix, cfg: &DetectorConfig) -> Result<Detection> {
    let n = d.n();
    if n < 4 {
        return Err(Error::TooFewObservations { n, min: 4 });
    }
    // Identical observations make every standardization degenerate.
    if d.all_zero() {
        return Err(Error::DegenerateVariance { t1: 0, t2: n });
    }
    let (r, k) = build_matrix(d, cfg)?;
    detect_matrix(&r, k, cfg)
}

pub fn detect_matrix(r: &RankMatrix, k: usize, cfg: &DetectorConfig) -> Result<Detection> {
    let n = r.n();
    let spec = match cfg.window {
        Some((lo, hi)) => ScanSpec { kind: cfg.kind, alternative: cfg.alternative, lo, hi },
        None => ScanSpec::with_default_window(cfg.kind, cfg.alternative, n),
    };
    let plan = ScanPlan::new(r, spec)?;
    let scan = plan.run()?;

    let skewness = match (cfg.skewness_draws, cfg.kind, cfg.analytic) {
        (Some(draws), StatisticKind::M, true) => Some(skewness_table(
            r,
            spec.lo,
            spec.hi,
            SkewnessSource::MonteCarlo { draws, seed: cfg.seed },
        )?),
        _ => None,
    };
    let analytic_p = if cfg.analytic {
        let tc = TailConfig::from_spec(n, spec)?.with_skewness(skewness.is_some());
        Some(analytic_p_value(&tc, scan.max_value, skewness.as_ref())?)
    } else {
        None
    };
    let permutation = match cfg.permutations {
        Some(draws) => Some(permutation_pvalue_for(&plan, scan.max_value, &PermPlan::sampled(draws, cfg.seed))?),
        None => None,
    };
    let diagnostics = cfg.diagnostics.then(|| condition_diagnostics(r));
    Ok(Detection {
        n,
        k,
        spec,
        max_value: scan.max_value,
        location: scan.location,
        analytic_p,
        skewness,
        permutation,
        diagnostics,
        trace: if cfg.keep_trace { scan.trace } else { Vec::new() },
    })
}
