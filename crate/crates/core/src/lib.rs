//! Class-ordered A* planning on colored graphs.

pub mod astar;
pub mod error;
pub mod graph;
pub mod graph_file;
pub mod oracle;
pub mod order;
pub mod random_graph;
pub mod render;
pub mod search;
pub mod sim;
pub mod worlds;

pub use astar::{astar, AStarOptions};
pub use error::{Error, Result};
pub use graph::{
    ClassId, ClassSet, ClassToGo, ColoredGraph, EdgeEstimate, EdgeEval, EdgeEvaluator, EdgeId, Metric, Topology,
    TopologyBuilder, VertexId, ZeroClassToGo,
};
pub use oracle::{oracle_optimal, OracleOptions, OracleResult};
pub use order::{Accumulation, ClassVector, Comparison, OrderMode, PathSignature, QueueKey};
pub use search::{coa_star, Heuristic, PlanResult, PlanStatus, SearchOptions, SearchStats, SearchTree};
