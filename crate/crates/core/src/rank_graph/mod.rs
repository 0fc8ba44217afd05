//! Observations → distance matrix → nested similarity graphs → rank matrix.

mod distance;
mod graph;
mod rank;

pub use distance::{compute_distances, DistanceMatrix, Metric, ObservationSeq};
pub use graph::{build_graph_sequence, GraphKind, GraphSequence};
pub use rank::{
    graph_induced_ranks, median_heuristic, rank_summaries, weighted_graph_matrix, EdgeWeight,
    RankMatrix, RankSummaries,
};
