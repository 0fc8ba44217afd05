use itertools::Itertools;
use rayon::prelude::*;

use crate::permutation::rng::{inverse, random_order};
use crate::rank_graph::RankMatrix;
use crate::scan::{single_u_path, LengthMoments};
use crate::{Error, Result};

/// Largest `n` accepted for exact enumeration (9! = 362,880 orderings).
pub const MAX_ENUMERATION_N: usize = 9;

/// Permutations per work unit in the Monte-Carlo loop. Fixed so that the
/// floating-point reduction order does not depend on the thread count.
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    W,
    Diff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkewnessSource {
    Enumeration,
    MonteCarlo { draws: usize, seed: u64 },
}

/// Third moments `γ_j(t) = E Z_j(0, t)³` under the permutation null for
/// window lengths `t ∈ [lo, hi]`. By exchangeability they also serve every
/// window `(t1, t1 + t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewnessTable {
    pub n: usize,
    pub lo: usize,
    pub hi: usize,
    pub gamma_w: Vec<f64>,
    pub gamma_diff: Vec<f64>,
    /// Monte-Carlo standard errors; `None` for exact tables.
    pub se_w: Option<Vec<f64>>,
    pub se_diff: Option<Vec<f64>>,
    pub source: SkewnessSource,
}

impl SkewnessTable {
    pub fn gamma(&self, comp: Component, t: usize) -> Option<f64> {
        let v = match comp {
            Component::W => &self.gamma_w,
            Component::Diff => &self.gamma_diff,
        };
        t.checked_sub(self.lo).and_then(|i| v.get(i)).copied()
    }

    /// `γ_j` at a fractional length, linearly interpolated and held constant
    /// outside `[lo, hi]`.
    pub fn gamma_at(&self, comp: Component, t: f64) -> f64 {
        let v = match comp {
            Component::W => &self.gamma_w,
            Component::Diff => &self.gamma_diff,
        };
        let pos = (t - self.lo as f64).clamp(0.0, (v.len() - 1) as f64);
        let i = pos.floor() as usize;
        if i + 1 >= v.len() {
            return v[v.len() - 1];
        }
        let f = pos - i as f64;
        v[i] * (1.0 - f) + v[i + 1] * f
    }
}

/// Running sums of `z³` and `z⁶` per length, for one batch of orderings.
#[derive(Clone)]
struct Moments {
    w3: Vec<f64>,
    w6: Vec<f64>,
    d3: Vec<f64>,
    d6: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments { w3: vec![0.0; len], w6: vec![0.0; len], d3: vec![0.0; len], d6: vec![0.0; len] }
    }

    fn add(&mut self, other: &Moments) {
        for (a, b) in [(&mut self.w3, &other.w3), (&mut self.w6, &other.w6), (&mut self.d3, &other.d3), (&mut self.d6, &other.d6)] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    fn accumulate(&mut self, r: &RankMatrix, lms: &[LengthMoments], lo: usize, hi: usize, order: &[usize]) {
        let pos = inverse(order);
        single_u_path(r, order, &pos, hi, |t, u1, u2| {
            if t < lo {
                return;
            }
            if let Some((zw, zd)) = lms[t - lo].z_pair(u1, u2) {
                let i = t - lo;
                let (w3, d3) = (zw.powi(3), zd.powi(3));
                self.w3[i] += w3;
                self.w6[i] += w3 * w3;
                self.d3[i] += d3;
                self.d6[i] += d3 * d3;
            }
        });
    }
}

/// Third moments of `Z_w(0, t)` and `Z_diff(0, t)` for `t ∈ [lo, hi]`.
/// Lengths whose standardization is undefined get `γ = 0` (no correction).
pub fn skewness_table(r: &RankMatrix, lo: usize, hi: usize, source: SkewnessSource) -> Result<SkewnessTable> {
    let n = r.n();
    if n < 4 {
        return Err(Error::TooFewObservations { n, min: 4 });
    }
    if lo == 0 || lo > hi || hi >= n {
        return Err(Error::WindowEmpty { lo, hi, n });
    }
    let s = r.summaries();
    let lms: Vec<LengthMoments> = (lo..=hi).map(|t| LengthMoments::new(n, s, t)).collect();
    let width = hi - lo + 1;
    let (sums, count) = match source {
        SkewnessSource::Enumeration => {
            if n > MAX_ENUMERATION_N {
                return Err(Error::EnumerationTooLarge { n, max: MAX_ENUMERATION_N });
            }
            let mut m = Moments::new(width);
            let mut count = 0usize;
            for order in (0..n).permutations(n) {
                m.accumulate(r, &lms, lo, hi, &order);
                count += 1;
            }
            (m, count)
        }
        SkewnessSource::MonteCarlo { draws, seed } => {
            if draws == 0 {
                return Err(Error::InvalidSampleCount);
            }
            let chunks: Vec<Moments> = (0..draws.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut m = Moments::new(width);
                    for idx in (c * CHUNK)..((c + 1) * CHUNK).min(draws) {
                        m.accumulate(r, &lms, lo, hi, &random_order(seed, idx as u64, n));
                    }
                    m
                })
                .collect();
            let mut m = Moments::new(width);
            chunks.iter().for_each(|c| m.add(c));
            (m, draws)
        }
    };
    let cnt = count as f64;
    let mean = |v: &[f64]| v.iter().map(|x| x / cnt).collect::<Vec<_>>();
    let gamma_w = mean(&sums.w3);
    let gamma_diff = mean(&sums.d3);
    let se = |m3: &[f64], m6: &[f64]| -> Vec<f64> {
        m3.iter()
            .zip(m6)
            .map(|(a, b)| {
                let var = (b / cnt - (a / cnt).powi(2)).max(0.0) * cnt / (cnt - 1.0).max(1.0);
                (var / cnt).sqrt()
            })
            .collect()
    };
    let (se_w, se_diff) = match source {
        SkewnessSource::Enumeration => (None, None),
        SkewnessSource::MonteCarlo { .. } => (Some(se(&sums.w3, &sums.w6)), Some(se(&sums.d3, &sums.d6))),
    };
    Ok(SkewnessTable { n, lo, hi, gamma_w, gamma_diff, se_w, se_diff, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded_matrix(n: usize, salt: usize) -> RankMatrix {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = ((i * 7 + j * 13 + salt) % 5) as f64;
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        RankMatrix::from_dense(n, &d).unwrap()
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        let r = seeded_matrix(6, 1);
        let exact = skewness_table(&r, 2, 4, SkewnessSource::Enumeration).unwrap();
        let mc = skewness_table(&r, 2, 4, SkewnessSource::MonteCarlo { draws: 200_000, seed: 9 }).unwrap();
        let se = mc.se_w.as_ref().unwrap()[1];
        let (a, b) = (exact.gamma(Component::W, 3).unwrap(), mc.gamma(Component::W, 3).unwrap());
        assert!((a - b).abs() <= 3.0 * se, "exact {a} mc {b} se {se}");
    }

    #[test]
    fn reversal_symmetric_matrix_has_no_diff_skew_at_midpoint() {
        let n = 6;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = ((i + j).abs_diff(n - 1) % 3 + (j - i)) as f64;
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[i * n + j], d[(n - 1 - i) * n + (n - 1 - j)]);
            }
        }
        let table = skewness_table(&RankMatrix::from_dense(n, &d).unwrap(), 2, 4, SkewnessSource::Enumeration).unwrap();
        assert!(table.gamma(Component::Diff, 3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn errors_and_interpolation() {
        let r = seeded_matrix(10, 0);
        assert_eq!(
            skewness_table(&r, 2, 8, SkewnessSource::Enumeration),
            Err(Error::EnumerationTooLarge { n: 10, max: 9 })
        );
        assert_eq!(
            skewness_table(&r, 2, 8, SkewnessSource::MonteCarlo { draws: 0, seed: 1 }),
            Err(Error::InvalidSampleCount)
        );
        let t = skewness_table(&r, 2, 8, SkewnessSource::MonteCarlo { draws: 500, seed: 1 }).unwrap();
        let mid = t.gamma_at(Component::W, 3.5);
        let (a, b) = (t.gamma_w[1], t.gamma_w[2]);
        assert!((mid - 0.5 * (a + b)).abs() < 1e-12);
        assert_eq!(t.gamma_at(Component::W, 0.0), t.gamma_w[0]);
        assert_eq!(t.gamma_at(Component::W, 100.0), t.gamma_w[6]);
        let again = skewness_table(&r, 2, 8, SkewnessSource::MonteCarlo { draws: 500, seed: 1 }).unwrap();
        assert_eq!(t, again);
    }
}
