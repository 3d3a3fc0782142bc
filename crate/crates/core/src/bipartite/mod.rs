//! Near-optimal weighted vertex cover on bipartite graphs.

mod eliminate;
mod extract;
mod layers;
mod pipeline;

pub use eliminate::{convert, eliminate_stage, EliminationSelection};
pub use extract::{extract_cover, LevelDecomposition};
pub use layers::{build_layers, count_paths, shortest_augmenting_length, LayeredGraph, PathCounts};
pub(crate) use pipeline::{dense_clustering, region_owner};
pub use pipeline::{
    mwvc_bipartite_pipeline, region_parameters, solve_region, BipartiteReport, CoverConfig,
    RegionSolution, CLUSTER_SEPARATION, DEFAULT_CLUSTER_ATTEMPTS,
};
