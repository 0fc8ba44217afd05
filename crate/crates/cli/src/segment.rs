//! Sequential segmentation: test a segment, split it at the detected change and recurse.

use ringcpd::permutation::rng::derive_seed;
use ringcpd::pipeline::{detect_distances, Detection, DetectorConfig};
use ringcpd::rank_graph::DistanceMatrix;
use ringcpd::scan::ChangeLocation;

use crate::error::CliResult;

#[derive(Clone, Debug, PartialEq)]
pub enum SegmentOutcome {
    /// Shorter than the minimum segment length; not tested.
    Short,
    Tested { detection: Box<Detection>, p_value: f64, split: bool },
    /// The detector failed on this segment (reported, not fatal below the root).
    Failed(String),
}

/// Observations `start..end` (0-based, half-open) of the full sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub start: usize,
    pub end: usize,
    pub outcome: SegmentOutcome,
    pub children: Vec<usize>,
}

impl SegmentNode {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Segments in preorder; node 0 is the whole sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentReport {
    pub nodes: Vec<SegmentNode>,
}

impl SegmentReport {
    /// Boundaries between the leaves, as counts of preceding observations.
    pub fn change_points(&self) -> Vec<usize> {
        let n = self.nodes.first().map_or(0, |r| r.end);
        let mut cps: Vec<usize> = self
            .nodes
            .iter()
            .filter(|s| s.children.is_empty())
            .map(|s| s.start)
            .filter(|&s| s > 0 && s < n)
            .collect();
        cps.sort_unstable();
        cps.dedup();
        cps
    }
}

/// Runs the segmentation over `d`.
///
/// `make_cfg(id, len)` supplies the detector for segment `id` of length `len`.
/// Errors on the root are returned; errors deeper down turn the segment into a
/// `Failed` leaf.
pub fn segment<F>(d: &DistanceMatrix, alpha: f64, min_len: usize, make_cfg: F) -> CliResult<SegmentReport>
where
    F: Fn(usize, usize) -> DetectorConfig,
{
    let mut nodes = Vec::new();
    grow(d, 0, d.n(), None, 0, alpha, min_len, &make_cfg, &mut nodes)?;
    Ok(SegmentReport { nodes })
}

#[allow(clippy::too_many_arguments)]
fn grow<F>(
    d: &DistanceMatrix,
    start: usize,
    end: usize,
    parent: Option<usize>,
    depth: usize,
    alpha: f64,
    min_len: usize,
    make_cfg: &F,
    nodes: &mut Vec<SegmentNode>,
) -> CliResult<()>
where
    F: Fn(usize, usize) -> DetectorConfig,
{
    let id = nodes.len();
    nodes.push(SegmentNode { id, parent, depth, start, end, outcome: SegmentOutcome::Short, children: Vec::new() });
    if end - start < min_len {
        return Ok(());
    }
    let sub = d.submatrix(start, end);
    let det = match detect_distances(&sub, &make_cfg(id, end - start)) {
        Ok(det) => det,
        Err(e) if id > 0 => {
            nodes[id].outcome = SegmentOutcome::Failed(e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let p_value = det.p_value().unwrap_or(1.0);
    let split = p_value <= alpha;
    let cuts = match det.location {
        ChangeLocation::Single(t) => vec![start, start + t, end],
        ChangeLocation::Interval(a, b) => vec![start, start + a, start + b, end],
    };
    nodes[id].outcome = SegmentOutcome::Tested { detection: Box::new(det), p_value, split };
    if !split {
        return Ok(());
    }
    for w in cuts.windows(2).filter(|w| w[1] > w[0]) {
        let child = nodes.len();
        nodes[id].children.push(child);
        grow(d, w[0], w[1], Some(id), depth + 1, alpha, min_len, make_cfg, nodes)?;
    }
    Ok(())
}

/// Seed for segment `id`: the root keeps the run seed so that an unsplit
/// segmentation agrees with a plain detection.
pub fn segment_seed(seed: u64, id: usize) -> u64 {
    if id == 0 {
        seed
    } else {
        derive_seed(seed, id as u64)
    }
}
