use super::moments::LengthMoments;
use crate::rank_graph::RankMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatisticKind {
    /// Mahalanobis-type statistic, equal to `Z_w² + Z_diff²`.
    T,
    /// Max-type statistic `max(Z_w, |Z_diff|)`.
    M,
}

impl StatisticKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::T => "T",
            StatisticKind::M => "M",
        }
    }

    /// Statistic value from `(U₁, U₂)`, `None` when the candidate is degenerate.
    #[inline]
    pub(crate) fn evaluate(&self, lm: &LengthMoments, u1: f64, u2: f64) -> Option<f64> {
        match self {
            StatisticKind::T => lm.quadratic_form(u1, u2),
            StatisticKind::M => lm.z_pair(u1, u2).map(|(zw, zd)| zw.max(zd.abs())),
        }
    }
}

/// Standardized weighted and difference statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZPair {
    pub z_w: f64,
    pub z_diff: f64,
}

impl ZPair {
    pub fn t(&self) -> f64 {
        self.z_w * self.z_w + self.z_diff * self.z_diff
    }

    pub fn m(&self) -> f64 {
        self.z_w.max(self.z_diff.abs())
    }
}

fn check_window(n: usize, t1: usize, t2: usize) -> Result<()> {
    if t1 >= t2 || t2 > n {
        return Err(Error::IndexOutOfRange { t1, t2, n });
    }
    Ok(())
}

/// Within-window and outside-window rank sums for the window `(t1, t2]`
/// (observations are numbered from 1). Both orientations of every pair are
/// counted; the diagonal is excluded.
pub fn u_stats(r: &RankMatrix, t1: usize, t2: usize) -> Result<(f64, f64)> {
    check_window(r.n(), t1, t2)?;
    let inside = |i: usize| i >= t1 && i < t2;
    let (mut u1, mut u2) = (0.0, 0.0);
    for i in 0..r.n() {
        let (cols, vals) = r.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            match (inside(i), inside(j)) {
                (true, true) => u1 += v,
                (false, false) => u2 += v,
                _ => {}
            }
        }
    }
    Ok((u1, u2))
}

fn length_moments(r: &RankMatrix, t1: usize, t2: usize) -> Result<LengthMoments> {
    if r.n() < 4 {
        return Err(Error::TooFewObservations { n: r.n(), min: 4 });
    }
    check_window(r.n(), t1, t2)?;
    Ok(LengthMoments::new(r.n(), r.summaries(), t2 - t1))
}

pub fn z_stats(r: &RankMatrix, t1: usize, t2: usize) -> Result<ZPair> {
    let lm = length_moments(r, t1, t2)?;
    let (u1, u2) = u_stats(r, t1, t2)?;
    lm.z_pair(u1, u2)
        .map(|(z_w, z_diff)| ZPair { z_w, z_diff })
        .ok_or(Error::DegenerateVariance { t1, t2 })
}

pub fn t_statistic(r: &RankMatrix, t1: usize, t2: usize) -> Result<f64> {
    let lm = length_moments(r, t1, t2)?;
    let (u1, u2) = u_stats(r, t1, t2)?;
    lm.quadratic_form(u1, u2).ok_or(Error::SingularCovariance { t1, t2 })
}

pub fn m_statistic(r: &RankMatrix, t1: usize, t2: usize) -> Result<f64> {
    z_stats(r, t1, t2).map(|z| z.m())
}
