use rayon::prelude::*;

use super::sampler::{sample_sequence, SamplerSpec};
use super::settings::{ConvergenceSetting, NullSetting};
use crate::analytic::{critical_value, skewness_table, SkewnessSource, TailConfig};
use crate::permutation::empirical_critical_value;
use crate::permutation::rng::{derive_seed, inverse, random_order};
use crate::pipeline::{build_matrix, detect, DetectorConfig};
use crate::rank_graph::{compute_distances, GraphKind, Metric};
use crate::scan::{
    default_single_window, scan_single, single_u_path, Alternative, ChangeLocation, LengthMoments,
    StatisticKind,
};
use crate::{round_nearest, Error, Result};

/// Salt separating permutation streams from data streams of the same replicate.
const PERM_SALT: u64 = 0x5eed_0f_9e37_79b9;

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalValueConfig {
    pub n: usize,
    pub setting: NullSetting,
    pub d: usize,
    pub k: usize,
    pub n0s: Vec<usize>,
    pub kind: StatisticKind,
    pub alpha: f64,
    /// Permutations for the empirical column; 0 skips it.
    pub permutations: usize,
    /// Monte-Carlo draws for the skewness-corrected column (M only).
    pub skewness_draws: Option<usize>,
    pub seed: u64,
}

impl CriticalValueConfig {
    pub fn new(setting: NullSetting, d: usize, k: usize, kind: StatisticKind) -> Self {
        CriticalValueConfig {
            n: 1000,
            setting,
            d,
            k,
            n0s: vec![100, 75, 50, 25],
            kind,
            alpha: 0.05,
            permutations: 0,
            skewness_draws: None,
            seed: 1,
        }
    }
}

/// One cell of the critical-value table.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalValueRow {
    pub setting: NullSetting,
    pub d: usize,
    pub k: usize,
    pub n0: usize,
    pub kind: StatisticKind,
    /// Uncorrected analytic value.
    pub a1: f64,
    /// Skewness-corrected analytic value (M only).
    pub a2: Option<f64>,
    pub permutation: Option<f64>,
}

/// Analytic versus permutation critical values of the single change-point
/// scan with windows `[n0, n - n0]`, all computed on one null sequence.
pub fn run_critical_value_study(cfg: &CriticalValueConfig) -> Result<Vec<CriticalValueRow>> {
    let n = cfg.n;
    if cfg.n0s.is_empty() {
        return Err(Error::InvalidParameter("no n0 values given".into()));
    }
    let windows: Vec<(usize, usize)> = cfg.n0s.iter().map(|&n0| (n0, n.saturating_sub(n0))).collect();
    let needs_data = cfg.permutations > 0 || (cfg.kind == StatisticKind::M && cfg.skewness_draws.is_some());
    let r = if needs_data {
        let spec = cfg.setting.sampler(cfg.d);
        let seq = sample_sequence(&spec, &spec, n, n, cfg.seed)?;
        let d = compute_distances(&seq, Metric::Euclidean)?;
        let det = DetectorConfig { k: Some(cfg.k), graph: GraphKind::Knn, ..Default::default() };
        Some(build_matrix(&d, &det)?.0)
    } else {
        None
    };
    let lo = windows.iter().map(|w| w.0).min().unwrap_or(1);
    let hi = windows.iter().map(|w| w.1).max().unwrap_or(1);

    let skew = match (&r, cfg.kind, cfg.skewness_draws) {
        (Some(r), StatisticKind::M, Some(draws)) => Some(skewness_table(
            r,
            lo,
            hi,
            SkewnessSource::MonteCarlo { draws, seed: derive_seed(cfg.seed, 1) },
        )?),
        _ => None,
    };

    let perm_values: Option<Vec<Vec<f64>>> = match (&r, cfg.permutations) {
        (Some(r), b) if b > 0 => {
            let s = r.summaries();
            let lms: Vec<LengthMoments> = (lo..=hi).map(|t| LengthMoments::new(n, s, t)).collect();
            let seed = derive_seed(cfg.seed, 2);
            let draws: Vec<Vec<f64>> = (0..b)
                .into_par_iter()
                .map(|i| {
                    let order = random_order(seed, i as u64, n);
                    let pos = inverse(&order);
                    let mut best = vec![f64::NEG_INFINITY; windows.len()];
                    single_u_path(r, &order, &pos, hi, |t, u1, u2| {
                        if t < lo {
                            return;
                        }
                        if let Some(v) = cfg.kind.evaluate(&lms[t - lo], u1, u2) {
                            for (w, &(a, c)) in windows.iter().enumerate() {
                                if t >= a && t <= c && v > best[w] {
                                    best[w] = v;
                                }
                            }
                        }
                    });
                    best
                })
                .collect();
            Some((0..windows.len()).map(|w| draws.iter().map(|d| d[w]).collect()).collect())
        }
        _ => None,
    };

    windows
        .iter()
        .enumerate()
        .map(|(w, &(n0, n1))| {
            let tc = TailConfig::new(n, cfg.kind, Alternative::Single, n0, n1)?;
            let a1 = critical_value(&tc, cfg.alpha, None)?;
            let a2 = match &skew {
                Some(table) => Some(critical_value(&tc.with_skewness(true), cfg.alpha, Some(table))?),
                None => None,
            };
            let permutation = match &perm_values {
                Some(v) => Some(empirical_critical_value(&v[w], cfg.alpha)?),
                None => None,
            };
            Ok(CriticalValueRow { setting: cfg.setting, d: cfg.d, k: cfg.k, n0, kind: cfg.kind, a1, a2, permutation })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerConfig {
    pub n: usize,
    /// True change-point; `tau = n` simulates the null.
    pub tau: usize,
    pub pre: SamplerSpec,
    pub post: SamplerSpec,
    pub replicates: usize,
    pub alpha: f64,
    pub detector: DetectorConfig,
    /// A detection is accurate when `|τ̂ - τ| ≤ margin`.
    pub margin: usize,
    pub seed: u64,
}

impl PowerConfig {
    /// `n = 200`, `τ = [n/3]`, margin `0.05 n`, M statistic on the default
    /// k-NN graph with 1,000 permutations.
    pub fn new(pre: SamplerSpec, post: SamplerSpec) -> Self {
        let n = 200;
        PowerConfig {
            n,
            tau: round_nearest(n as f64 / 3.0) as usize,
            pre,
            post,
            replicates: 100,
            alpha: 0.05,
            detector: DetectorConfig {
                analytic: false,
                permutations: Some(1000),
                diagnostics: false,
                keep_trace: false,
                ..Default::default()
            },
            margin: round_nearest(0.05 * n as f64) as usize,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateOutcome {
    pub seed: u64,
    pub statistic: f64,
    pub location: ChangeLocation,
    pub p_value: f64,
    pub rejected: bool,
    pub accurate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerResult {
    pub replicates: usize,
    pub rejections: usize,
    pub accurate: usize,
    pub outcomes: Vec<ReplicateOutcome>,
}

impl PowerResult {
    /// Fraction of replicates with `p ≤ α`.
    pub fn power(&self) -> f64 {
        self.rejections as f64 / self.replicates as f64
    }

    /// Fraction rejected with the estimate within the margin.
    pub fn accuracy(&self) -> f64 {
        self.accurate as f64 / self.replicates as f64
    }
}

fn within(loc: ChangeLocation, tau: usize, margin: usize) -> bool {
    match loc {
        ChangeLocation::Single(t) => t.abs_diff(tau) <= margin,
        ChangeLocation::Interval(a, b) => a.abs_diff(tau) <= margin || b.abs_diff(tau) <= margin,
    }
}

/// Replicated sampling and detection.
pub fn run_power_study(cfg: &PowerConfig) -> Result<PowerResult> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidSampleCount);
    }
    let outcomes = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, i as u64);
            let seq = sample_sequence(&cfg.pre, &cfg.post, cfg.n, cfg.tau, seed)?;
            let det = DetectorConfig { seed: derive_seed(seed ^ PERM_SALT, 0), ..cfg.detector.clone() };
            let res = detect(&seq, &det)?;
            let p_value = res.p_value().ok_or_else(|| {
                Error::InvalidParameter("detector must produce an analytic or permutation p-value".into())
            })?;
            let rejected = p_value <= cfg.alpha;
            Ok(ReplicateOutcome {
                seed,
                statistic: res.max_value,
                location: res.location,
                p_value,
                rejected,
                accurate: rejected && cfg.tau < cfg.n && within(res.location, cfg.tau, cfg.margin),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerResult {
        replicates: cfg.replicates,
        rejections: outcomes.iter().filter(|o| o.rejected).count(),
        accurate: outcomes.iter().filter(|o| o.accurate).count(),
        outcomes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub setting: ConvergenceSetting,
    pub d: usize,
    pub ns: Vec<usize>,
    pub runs: usize,
    /// Change location as a fraction of `n`.
    pub omega: f64,
    /// Fixed graph depth across the `n` ladder.
    pub k: usize,
    pub seed: u64,
}

impl ConvergenceConfig {
    pub fn new(setting: ConvergenceSetting) -> Self {
        ConvergenceConfig { setting, d: 500, ns: vec![200, 800, 1600], runs: 10, omega: 0.5, k: 5, seed: 1 }
    }
}

/// Scaled scan curves of one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCurve {
    pub n: usize,
    pub run: usize,
    /// `t / n` for `t = 2, …, n - 2`.
    pub delta: Vec<f64>,
    /// `T(t) / n`; `NaN` where undefined.
    pub t_scaled: Vec<f64>,
    /// `M(t) / √n`; `NaN` where undefined.
    pub m_scaled: Vec<f64>,
    /// Arg-max of `T` over the default window.
    pub tau_hat_t: usize,
    /// Arg-max of `M` over the default window.
    pub tau_hat_m: usize,
}

impl ConvergenceCurve {
    /// Curve values at `t = [δ n]`.
    pub fn at(&self, delta: f64) -> (f64, f64) {
        let t = round_nearest(delta * self.n as f64) as usize;
        let i = t.clamp(2, self.n - 2) - 2;
        (self.t_scaled[i], self.m_scaled[i])
    }
}

pub fn run_convergence_study(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceCurve>> {
    if !(cfg.omega > 0.0 && cfg.omega < 1.0) {
        return Err(Error::InvalidParameter(format!("omega must lie in (0, 1), got {}", cfg.omega)));
    }
    let (pre, post) = cfg.setting.pair(cfg.d);
    let jobs: Vec<(usize, usize)> = cfg.ns.iter().flat_map(|&n| (0..cfg.runs).map(move |r| (n, r))).collect();
    jobs.into_par_iter()
        .map(|(n, run)| {
            let tau = round_nearest(cfg.omega * n as f64) as usize;
            let seq = sample_sequence(&pre, &post, n, tau, derive_seed(cfg.seed ^ n as u64, run as u64))?;
            let d = compute_distances(&seq, Metric::Euclidean)?;
            let det = DetectorConfig { k: Some(cfg.k), ..Default::default() };
            let (r, _) = build_matrix(&d, &det)?;
            let curve = |kind: StatisticKind, scale: f64| -> Result<Vec<f64>> {
                Ok(scan_single(&r, kind, 2, n - 2)?
                    .trace
                    .iter()
                    .map(|e| e.value.map_or(f64::NAN, |v| v / scale))
                    .collect())
            };
            let (n0, n1) = default_single_window(n);
            let argmax = |kind: StatisticKind| -> Result<usize> {
                match scan_single(&r, kind, n0, n1)?.location {
                    ChangeLocation::Single(t) => Ok(t),
                    ChangeLocation::Interval(_, t) => Ok(t),
                }
            };
            Ok(ConvergenceCurve {
                n,
                run,
                delta: (2..=n - 2).map(|t| t as f64 / n as f64).collect(),
                t_scaled: curve(StatisticKind::T, n as f64)?,
                m_scaled: curve(StatisticKind::M, (n as f64).sqrt())?,
                tau_hat_t: argmax(StatisticKind::T)?,
                tau_hat_m: argmax(StatisticKind::M)?,
            })
        })
        .collect()
}
