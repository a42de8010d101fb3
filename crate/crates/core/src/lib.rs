//! Graph data science engine: centrality, community detection, traversal,
//! structural link-prediction features, a random-forest link predictor and a
//! cold/warm timing harness, all over an immutable undirected weighted graph
//! built from `Source,Target,weight` edge lists.

pub mod bench;
pub mod centrality;
pub mod community;
mod error;
pub mod generate;
pub mod graph;
pub mod linkpred;
pub mod metrics;
pub mod traversal;

pub use centrality::{betweenness, pagerank, top_k, PageRankConfig, ScoreMap};
pub use community::{label_propagation, louvain, modularity, CommunityAssignment, LpConfig};
pub use error::{Error, Result};
pub use graph::{Graph, GraphView, IngestSummary, NodeId, Topology};
pub use traversal::{bfs, prim_mst, BfsResult, BfsTermination, SpanningTree, Termination};
