use rayon::prelude::*;

use crate::rank_graph::RankMatrix;

/// Ratio above which an `o(·)` condition is reported as [`ConditionStatus::High`].
pub const SMALL_ORDER_THRESHOLD: f64 = 0.5;
/// Threshold for the boundedness condition (condition 1).
pub const BOUNDED_THRESHOLD: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionStatus {
    Ok,
    High,
    /// The ratio is `0/0` or otherwise not finite.
    Undefined,
}

impl ConditionStatus {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionStatus::Ok => "ok",
            ConditionStatus::High => "high",
            ConditionStatus::Undefined => "undefined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionCheck {
    /// Condition number, 1 to 6.
    pub index: u8,
    /// Finite-n ratio of the left side to the right side.
    pub ratio: f64,
    pub status: ConditionStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn get(&self, index: u8) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.index == index)
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status == ConditionStatus::Ok)
    }

    /// One-line summary such as `c1=0.12:ok c2=0.03:ok ...`.
    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("c{}={:.4}:{}", c.index, c.ratio, c.status.name()))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check(index: u8, num: f64, den: f64, threshold: f64) -> ConditionCheck {
    let ratio = num / den;
    let status = if !ratio.is_finite() {
        ConditionStatus::Undefined
    } else if ratio > threshold {
        ConditionStatus::High
    } else {
        ConditionStatus::Ok
    };
    ConditionCheck { index, ratio, status }
}

/// Finite-sample ratios for the six sufficient conditions of the limiting
/// theory. Purely advisory: nothing here stops a scan.
pub fn condition_diagnostics(r: &RankMatrix) -> ConditionReport {
    let n = r.n();
    let nf = n as f64;
    let s = r.summaries();
    let rd2 = s.rd_sq;
    let rd = rd2.sqrt();
    let spread = s.r1_sq - s.r0 * s.r0;
    let c: Vec<f64> = r.row_sums().iter().map(|&x| x / (nf - 1.0) - s.r0).collect();

    let sq_row: Vec<f64> = (0..n).map(|i| r.row(i).1.iter().map(|v| v * v).sum()).collect();
    let quartic: f64 = (0..n).map(|i| r.row(i).1.iter().map(|v| v.powi(4)).sum::<f64>()).sum();

    let c1 = sq_row.iter().map(|x| x * x).sum::<f64>();
    let c2 = c.iter().map(|x| x.abs().powi(3)).sum::<f64>();
    let c3 = c.iter().map(|x| x.powi(3)).sum::<f64>().abs();
    let c4: f64 = (0..n)
        .map(|i| {
            let (cols, vals) = r.row(i);
            let (mut lin, mut sq) = (0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                lin += v * c[j];
                sq += v * v * c[j] * c[j];
            }
            lin * lin - sq
        })
        .sum::<f64>()
        .abs();
    let c5 = 2.0 * (trace_fourth_power(r) - 2.0 * c1 + quartic);

    ConditionReport {
        checks: vec![
            check(1, c1, nf.powi(3) * rd2 * rd2, BOUNDED_THRESHOLD),
            check(2, c2, (nf * spread).powf(1.5), SMALL_ORDER_THRESHOLD),
            check(3, c3, nf * rd * spread, SMALL_ORDER_THRESHOLD),
            check(4, c4, nf.powi(3) * rd2 * spread, SMALL_ORDER_THRESHOLD),
            check(5, c5, nf.powi(4) * rd2 * rd2, SMALL_ORDER_THRESHOLD),
            check(6, s.r1_sq.sqrt(), rd, SMALL_ORDER_THRESHOLD),
        ],
    }
}

/// `tr(R⁴) = ‖R²‖_F²`, one row of `R²` at a time.
fn trace_fourth_power(r: &RankMatrix) -> f64 {
    let n = r.n();
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |acc, i| {
                let mut touched = Vec::new();
                let (cols, vals) = r.row(i);
                for (&j, &a) in cols.iter().zip(vals) {
                    let (cols2, vals2) = r.row(j);
                    for (&l, &b) in cols2.iter().zip(vals2) {
                        if acc[l] == 0.0 {
                            touched.push(l);
                        }
                        acc[l] += a * b;
                    }
                }
                let mut sum = 0.0;
                for &l in &touched {
                    sum += acc[l] * acc[l];
                    acc[l] = 0.0;
                }
                sum
            },
        )
        .sum()
}
