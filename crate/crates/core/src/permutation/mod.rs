//! Permutation p-values, empirical critical values and exact enumeration.

pub mod rng;

use itertools::Itertools;
use rayon::prelude::*;

use crate::rank_graph::RankMatrix;
use crate::scan::{LengthMoments, ScanPlan, ScanSpec, StatisticKind};
use crate::{Error, Result};

/// Largest `n` for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_N: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermMode {
    /// `draws` uniformly random orderings.
    Sampled,
    /// All `n!` orderings, identity included.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermPlan {
    pub draws: usize,
    pub seed: u64,
    pub mode: PermMode,
    /// Levels at which empirical critical values are reported.
    pub alphas: Vec<f64>,
}

impl PermPlan {
    pub fn sampled(draws: usize, seed: u64) -> Self {
        PermPlan { draws, seed, mode: PermMode::Sampled, alphas: vec![0.01, 0.05, 0.1] }
    }

    pub fn exhaustive() -> Self {
        PermPlan { draws: 0, seed: 0, mode: PermMode::Exhaustive, alphas: vec![0.01, 0.05, 0.1] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermResult {
    pub observed: f64,
    /// Scan maxima of the permuted sequences, in draw order.
    pub null_draws: Vec<f64>,
    pub p_value: f64,
    /// `(alpha, empirical 1 - alpha quantile)` for each requested level.
    pub critical_values: Vec<(f64, f64)>,
}

/// Values within this relative distance of the observed statistic count as ties.
fn tie_tolerance(observed: f64) -> f64 {
    1e-12 * observed.abs().max(1.0)
}

fn count_at_least(draws: &[f64], observed: f64) -> usize {
    let cut = observed - tie_tolerance(observed);
    draws.iter().filter(|&&v| v >= cut).count()
}

/// Scan maximum for one ordering; `-inf` if every candidate is degenerate.
fn max_for(plan: &ScanPlan, order: &[usize]) -> f64 {
    let pos = rng::inverse(order);
    plan.max_for_order(order, &pos).map_or(f64::NEG_INFINITY, |(v, _)| v)
}

/// Permutation p-value of the observed scan maximum.
///
/// Sampled mode returns `(1 + #{draws ≥ observed}) / (B + 1)`; exhaustive mode
/// returns the exact null tail `#{orderings with value ≥ observed} / n!`.
pub fn permutation_pvalue(r: &RankMatrix, spec: ScanSpec, plan: &PermPlan) -> Result<PermResult> {
    let scan_plan = ScanPlan::new(r, spec)?;
    let identity: Vec<usize> = (0..r.n()).collect();
    let observed = scan_plan
        .max_for_order(&identity, &identity)
        .map(|(v, _)| v)
        .ok_or(Error::AllCandidatesDegenerate)?;
    permutation_pvalue_for(&scan_plan, observed, plan)
}

/// As [`permutation_pvalue`], reusing a prepared scan plan and observed maximum.
pub fn permutation_pvalue_for(scan_plan: &ScanPlan, observed: f64, plan: &PermPlan) -> Result<PermResult> {
    let n = scan_plan.rank_matrix().n();
    let (null_draws, p_value) = match plan.mode {
        PermMode::Sampled => {
            if plan.draws == 0 {
                return Err(Error::InvalidSampleCount);
            }
            let draws: Vec<f64> = (0..plan.draws)
                .into_par_iter()
                .map(|i| max_for(scan_plan, &rng::random_order(plan.seed, i as u64, n)))
                .collect();
            let p = (1 + count_at_least(&draws, observed)) as f64 / (plan.draws + 1) as f64;
            (draws, p)
        }
        PermMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::ExhaustiveTooLarge { n, max: MAX_EXHAUSTIVE_N });
            }
            let draws: Vec<f64> = (0..n).permutations(n).map(|o| max_for(scan_plan, &o)).collect();
            let p = count_at_least(&draws, observed) as f64 / draws.len() as f64;
            (draws, p)
        }
    };
    let critical_values = plan
        .alphas
        .iter()
        .map(|&a| empirical_critical_value(&null_draws, a).map(|c| (a, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PermResult { observed, null_draws, p_value, critical_values })
}

/// Empirical `1 - alpha` quantile of `draws` (type-7 interpolation).
pub fn empirical_critical_value(draws: &[f64], alpha: f64) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability(alpha));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * (1.0 - alpha);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// Quantity evaluated on every ordering by [`enumerate_null`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NullTarget {
    ScanMax(ScanSpec),
    U1 { t1: usize, t2: usize },
    U2 { t1: usize, t2: usize },
    /// Standardized weighted statistic; `NaN` when undefined.
    ZW { t1: usize, t2: usize },
    /// Standardized difference statistic; `NaN` when undefined.
    ZDiff { t1: usize, t2: usize },
    /// T or M at one window; `NaN` when undefined.
    Statistic { kind: StatisticKind, t1: usize, t2: usize },
}

/// Values of `target` over all `n!` orderings of the observations, in
/// lexicographic order of the orderings (so separate calls line up entry by
/// entry).
pub fn enumerate_null(r: &RankMatrix, target: NullTarget) -> Result<Vec<f64>> {
    let n = r.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::ExhaustiveTooLarge { n, max: MAX_EXHAUSTIVE_N });
    }
    if let NullTarget::ScanMax(spec) = target {
        let plan = ScanPlan::new(r, spec)?;
        return Ok((0..n).permutations(n).map(|o| max_for(&plan, &o)).collect());
    }
    let (t1, t2) = match target {
        NullTarget::U1 { t1, t2 }
        | NullTarget::U2 { t1, t2 }
        | NullTarget::ZW { t1, t2 }
        | NullTarget::ZDiff { t1, t2 }
        | NullTarget::Statistic { t1, t2, .. } => (t1, t2),
        NullTarget::ScanMax(_) => unreachable!(),
    };
    if t1 >= t2 || t2 > n {
        return Err(Error::IndexOutOfRange { t1, t2, n });
    }
    let needs_moments = !matches!(target, NullTarget::U1 { .. } | NullTarget::U2 { .. });
    if needs_moments && n < 4 {
        return Err(Error::TooFewObservations { n, min: 4 });
    }
    let lm = needs_moments.then(|| LengthMoments::new(n, r.summaries(), t2 - t1));
    let values = (0..n)
        .permutations(n)
        .map(|order| {
            let (mut u1, mut u2) = (0.0, 0.0);
            for p in 0..n {
                for q in 0..n {
                    let v = r.get(order[p], order[q]);
                    match ((t1..t2).contains(&p), (t1..t2).contains(&q)) {
                        (true, true) => u1 += v,
                        (false, false) => u2 += v,
                        _ => {}
                    }
                }
            }
            let lm = lm.as_ref();
            match target {
                NullTarget::U1 { .. } => u1,
                NullTarget::U2 { .. } => u2,
                NullTarget::ZW { .. } => lm.and_then(|m| m.z_pair(u1, u2)).map_or(f64::NAN, |z| z.0),
                NullTarget::ZDiff { .. } => lm.and_then(|m| m.z_pair(u1, u2)).map_or(f64::NAN, |z| z.1),
                NullTarget::Statistic { kind, .. } => {
                    lm.and_then(|m| kind.evaluate(m, u1, u2)).unwrap_or(f64::NAN)
                }
                NullTarget::ScanMax(_) => unreachable!(),
            }
        })
        .collect();
    Ok(values)
}
