use rayon::prelude::*;

use super::DistanceMatrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// k-nearest-neighbor graph; level `l` adds every node's `l`-th nearest neighbor.
    Knn,
    /// k-minimum spanning tree; level `l` is an MST on edges unused by earlier levels.
    Mst,
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Knn => "knn",
            GraphKind::Mst => "mst",
        }
    }
}

/// Nested similarity graphs `G_1 ⊆ G_2 ⊆ … ⊆ G_k`, stored as per-level increments.
///
/// For `Knn` the increment at level `l` holds `n` directed edges `(i, j)`
/// meaning `j` is the `l`-th nearest neighbor of `i`. For `Mst` it holds the
/// `n - 1` undirected edges `(i, j)`, `i < j`, of that level's spanning tree.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSequence {
    n: usize,
    k: usize,
    kind: GraphKind,
    levels: Vec<Vec<(usize, usize)>>,
}

impl GraphSequence {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn is_directed(&self) -> bool {
        self.kind == GraphKind::Knn
    }

    /// Edges added at level `level` (1-based).
    pub fn increment(&self, level: usize) -> &[(usize, usize)] {
        &self.levels[level - 1]
    }

    /// All edges of `G_level` (1-based), with the level each first appeared at.
    pub fn edges_up_to(&self, level: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.levels[..level]
            .iter()
            .enumerate()
            .flat_map(|(l, es)| es.iter().map(move |&(i, j)| (i, j, l + 1)))
    }

    /// Smallest level containing edge `(i, j)`. Undirected graphs accept either orientation.
    pub fn first_level(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = if self.is_directed() { (i, j) } else { (i.min(j), i.max(j)) };
        self.levels.iter().position(|es| es.contains(&(a, b))).map(|l| l + 1)
    }
}

/// Builds `k` nested graphs from `d`.
///
/// Distance ties are broken by the smaller node index (k-NN) or by the
/// lexicographically smaller `(i, j)` pair (k-MST), so the result is fully
/// deterministic.
pub fn build_graph_sequence(d: &DistanceMatrix, k: usize, kind: GraphKind) -> Result<GraphSequence> {
    let n = d.n();
    if n < 2 || k == 0 || k > n - 1 {
        return Err(Error::KTooLarge { k, n, max: n.saturating_sub(1) });
    }
    let levels = match kind {
        GraphKind::Knn => knn_levels(d, k),
        GraphKind::Mst => mst_levels(d, k)?,
    };
    Ok(GraphSequence { n, k, kind, levels })
}

fn knn_levels(d: &DistanceMatrix, k: usize) -> Vec<Vec<(usize, usize)>> {
    let n = d.n();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = d.row(i);
            let mut cand: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let cmp = |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]).then(a.cmp(b));
            if k < cand.len() {
                cand.select_nth_unstable_by(k - 1, cmp);
                cand.truncate(k);
            }
            cand.sort_unstable_by(cmp);
            cand
        })
        .collect();
    (0..k)
        .map(|l| (0..n).map(|i| (i, neighbors[i][l])).collect())
        .collect()
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Repeated Kruskal: each level is the MST over edges not used by earlier levels.
fn mst_levels(d: &DistanceMatrix, k: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let n = d.n();
    let mut edges: Vec<(f64, u32, u32)> =
        d.upper_entries().map(|(i, j, w)| (w, i as u32, j as u32)).collect();
    edges.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used = vec![false; edges.len()];
    let mut levels = Vec::with_capacity(k);
    for level in 1..=k {
        let mut sets = DisjointSets::new(n);
        let mut tree = Vec::with_capacity(n - 1);
        for (idx, &(_, i, j)) in edges.iter().enumerate() {
            if used[idx] {
                continue;
            }
            if sets.union(i as usize, j as usize) {
                used[idx] = true;
                tree.push((i as usize, j as usize));
                if tree.len() == n - 1 {
                    break;
                }
            }
        }
        if tree.len() < n - 1 {
            return Err(Error::GraphInfeasible { level });
        }
        levels.push(tree);
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_graph::{compute_distances, Metric, ObservationSeq};

    fn line(points: &[f64]) -> DistanceMatrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
        compute_distances(&ObservationSeq::from_rows(&rows).unwrap(), Metric::Euclidean).unwrap()
    }

    #[test]
    fn knn_on_a_line() {
        let g = build_graph_sequence(&line(&[0.0, 1.0, 3.0, 7.0]), 1, GraphKind::Knn).unwrap();
        assert_eq!(g.increment(1), &[(0, 1), (1, 0), (2, 1), (3, 2)]);
    }

    #[test]
    fn mst_on_a_line() {
        let g = build_graph_sequence(&line(&[0.0, 1.0, 3.0, 7.0]), 1, GraphKind::Mst).unwrap();
        let mut e = g.increment(1).to_vec();
        e.sort();
        assert_eq!(e, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn k_equal_to_n_is_rejected() {
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        assert!(matches!(build_graph_sequence(&d, 4, GraphKind::Knn), Err(Error::KTooLarge { .. })));
        assert!(matches!(build_graph_sequence(&d, 0, GraphKind::Knn), Err(Error::KTooLarge { .. })));
    }

    #[test]
    fn knn_ties_prefer_smaller_index() {
        let g = build_graph_sequence(&line(&[0.0, 0.0, 0.0, 0.0]), 2, GraphKind::Knn).unwrap();
        assert_eq!(g.increment(1), &[(0, 1), (1, 0), (2, 0), (3, 0)]);
        assert_eq!(g.increment(2), &[(0, 2), (1, 2), (2, 1), (3, 1)]);
    }

    #[test]
    fn mst_levels_are_disjoint_and_can_run_out() {
        // K4 has 6 edges: room for one spanning tree of 3 edges plus a second one.
        let d = line(&[0.0, 1.0, 3.0, 7.0]);
        let g = build_graph_sequence(&d, 2, GraphKind::Mst).unwrap();
        for e in g.increment(2) {
            assert!(!g.increment(1).contains(e));
        }
        assert_eq!(
            build_graph_sequence(&d, 3, GraphKind::Mst).unwrap_err(),
            Error::GraphInfeasible { level: 3 }
        );
    }

    #[test]
    fn first_level_lookup() {
        let g = build_graph_sequence(&line(&[0.0, 1.0, 3.0, 7.0]), 3, GraphKind::Knn).unwrap();
        assert_eq!(g.first_level(0, 1), Some(1));
        assert_eq!(g.first_level(0, 3), Some(3));
        assert_eq!(g.edges_up_to(2).count(), 8);
    }
}
