use super::{DistanceMatrix, GraphSequence, Metric};
use crate::{Error, Result};

/// Scalar summaries of a rank matrix used by the null moments.
///
/// With `R̄_i = R_i· / (n - 1)`:
/// `r0 = mean_i R̄_i`, `r1_sq = mean_i R̄_i²`,
/// `rd_sq = Σ_ij R_ij² / (n (n - 1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankSummaries {
    pub r0: f64,
    pub r1_sq: f64,
    pub rd_sq: f64,
}

/// Symmetric nonnegative weight matrix with zero diagonal, stored sparse
/// (compressed rows, column indices sorted, zeros dropped).
#[derive(Clone, Debug, PartialEq)]
pub struct RankMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    row_sums: Vec<f64>,
    total: f64,
    summaries: RankSummaries,
    shift: f64,
}

impl RankMatrix {
    /// Builds `½(W + Wᵀ)` from directed entries `(i, j, w)`; repeated pairs
    /// accumulate and diagonal entries are discarded.
    pub fn from_directed_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut triplets = Vec::new();
        for (i, j, w) in entries {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("entry ({i},{j}) outside {n}x{n}")));
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteInput { what: "rank matrix".into() });
            }
            if w < 0.0 {
                return Err(Error::InvalidInput(format!("negative weight {w} at ({i},{j})")));
            }
            if i == j || w == 0.0 {
                continue;
            }
            triplets.push((i, j, 0.5 * w));
            triplets.push((j, i, 0.5 * w));
        }
        triplets.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut offsets = vec![0usize; n + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, w) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += w;
            } else {
                cols.push(j);
                vals.push(w);
                offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Self::finish(n, offsets, cols, vals, 0.0))
    }

    /// Symmetrized copy of a dense row-major matrix (diagonal ignored).
    pub fn from_dense(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Self::from_directed_entries(
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j, data[i * n + j]))),
        )
    }

    fn finish(n: usize, offsets: Vec<usize>, cols: Vec<usize>, vals: Vec<f64>, shift: f64) -> Self {
        let row_sums: Vec<f64> =
            (0..n).map(|i| vals[offsets[i]..offsets[i + 1]].iter().sum()).collect();
        let total: f64 = row_sums.iter().sum();
        let summaries = if n >= 2 {
            let nf = n as f64;
            let bars = row_sums.iter().map(|s| s / (nf - 1.0));
            let r0 = total / (nf * (nf - 1.0));
            let r1_sq = bars.map(|b| b * b).sum::<f64>() / nf;
            let rd_sq = vals.iter().map(|v| v * v).sum::<f64>() / (nf * (nf - 1.0));
            RankSummaries { r0, r1_sq, rd_sq }
        } else {
            RankSummaries { r0: 0.0, r1_sq: 0.0, rd_sq: 0.0 }
        };
        RankMatrix { n, offsets, cols, vals, row_sums, total, summaries, shift }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero entries of row `i` as parallel slices of columns and values.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    /// `Σ_ij R_ij`, both orientations counted.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn summaries(&self) -> RankSummaries {
        self.summaries
    }

    /// Number of stored nonzero entries (both orientations).
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Constant subtracted from negative-distance edge weights.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[i * self.n + j] = v;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> RankMatrix {
        let vals = self.vals.iter().map(|v| v * c).collect();
        Self::finish(self.n, self.offsets.clone(), self.cols.clone(), vals, self.shift * c)
    }

    /// Relabels nodes so that new node `p` is old node `order[p]`:
    /// `R'[p][q] = R[order[p]][order[q]]`.
    pub fn permuted(&self, order: &[usize]) -> RankMatrix {
        let mut pos = vec![0usize; self.n];
        for (p, &o) in order.iter().enumerate() {
            pos[o] = p;
        }
        let entries = (0..self.n).flat_map(|p| {
            let (cols, vals) = self.row(order[p]);
            let pos = &pos;
            cols.iter().zip(vals).map(move |(&j, &v)| (p, pos[j], v))
        });
        let mut out = Self::from_directed_entries(self.n, entries.collect::<Vec<_>>())
            .expect("relabeling preserves validity");
        out.shift = self.shift;
        out
    }

    /// Principal submatrix on nodes `[start, end)`.
    pub fn submatrix(&self, start: usize, end: usize) -> RankMatrix {
        let entries: Vec<_> = (start..end)
            .flat_map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter()
                    .zip(vals)
                    .filter(move |(&j, _)| j >= start && j < end)
                    .map(move |(&j, &v)| (i - start, j - start, v))
            })
            .collect();
        Self::from_directed_entries(end - start, entries).expect("submatrix of valid matrix")
    }
}

/// Cached `(r0, r1_sq, rd_sq)` and row sums of `r`.
pub fn rank_summaries(r: &RankMatrix) -> (RankSummaries, &[f64]) {
    (r.summaries(), r.row_sums())
}

/// Graph-induced ranks: an edge first present in `G_l` gets weight
/// `k - l + 1`, then the matrix is symmetrized.
pub fn graph_induced_ranks(g: &GraphSequence) -> RankMatrix {
    let k = g.k();
    let n = g.n();
    let edges = g.edges_up_to(k).map(|(i, j, l)| (i, j, (k - l + 1) as f64));
    RankMatrix::from_directed_entries(n, directed_entries(edges, g.is_directed()))
        .expect("graph ranks are valid weights")
}

/// Undirected edges contribute in both orientations so that symmetrization keeps their weight.
fn directed_entries(
    edges: impl Iterator<Item = (usize, usize, f64)>,
    directed: bool,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for (i, j, w) in edges {
        out.push((i, j, w));
        if !directed {
            out.push((j, i, w));
        }
    }
    out
}

/// Edge weighting for kernel- or distance-weighted graphs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeWeight {
    /// `exp(-d² / (2σ²))`; `None` uses the median pairwise distance.
    GaussianKernel { sigma: Option<f64> },
    /// Negative L1 distance. The distance matrix must have been computed with `Metric::L1`.
    NegL1,
    /// Negative distance under whatever metric built the matrix.
    NegDistance,
}

/// Median of the `n (n - 1) / 2` off-diagonal distances (mean of the two
/// middle values when that count is even).
pub fn median_heuristic(d: &DistanceMatrix) -> f64 {
    let mut v: Vec<f64> = d.upper_entries().map(|(_, _, w)| w).collect();
    if v.is_empty() {
        return 0.0;
    }
    v.sort_unstable_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Weights the edges of `G_k` by a kernel or a negative distance, zero elsewhere.
///
/// Negative-distance weights are shifted by their minimum over the edges so
/// that every entry is nonnegative; the shift is kept in
/// [`RankMatrix::shift`].
pub fn weighted_graph_matrix(
    d: &DistanceMatrix,
    g: &GraphSequence,
    weight: EdgeWeight,
) -> Result<RankMatrix> {
    if d.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: d.n() });
    }
    let edges: Vec<(usize, usize)> = g.edges_up_to(g.k()).map(|(i, j, _)| (i, j)).collect();
    let (raw, shift): (Vec<f64>, f64) = match weight {
        EdgeWeight::GaussianKernel { sigma } => {
            let s = sigma.unwrap_or_else(|| median_heuristic(d));
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::BandwidthNonPositive(s));
            }
            let w = edges
                .iter()
                .map(|&(i, j)| (-d.get(i, j).powi(2) / (2.0 * s * s)).exp())
                .collect();
            (w, 0.0)
        }
        EdgeWeight::NegL1 | EdgeWeight::NegDistance => {
            if weight == EdgeWeight::NegL1 && d.metric() != Metric::L1 {
                return Err(Error::MetricMismatch(format!(
                    "negative-L1 weighting needs L1 distances, got {}",
                    d.metric().name()
                )));
            }
            let w: Vec<f64> = edges.iter().map(|&(i, j)| -d.get(i, j)).collect();
            let min = w.iter().copied().fold(f64::INFINITY, f64::min);
            (w.iter().map(|v| v - min).collect(), min)
        }
    };
    let weighted = edges.iter().zip(raw).map(|(&(i, j), w)| (i, j, w));
    let mut out =
        RankMatrix::from_directed_entries(g.n(), directed_entries(weighted, g.is_directed()))?;
    out.shift = shift;
    Ok(out)
}
