//! Length-only A* baseline that treats some classes as obstacles.
//!
//! Runs the same lazy edge-queue engine with path classes held at zero, so
//! the queue is ordered by estimated cost alone.

use crate::error::Result;
use crate::graph::{ClassId, ClassSet, ColoredGraph, VertexId};
use crate::order::{Accumulation, Comparison};
use crate::search::{ClassOrderedSearch, Heuristic, LabelRule, PlanResult, SearchOptions, DEFAULT_MAX_POPS};

#[derive(Clone, Copy, Debug)]
pub struct AStarOptions {
    /// Edges of these true classes are never traversed. Defaults to `{3}`.
    pub blocked_classes: ClassSet,
    pub heuristic: Heuristic,
    /// Used only to report the returned path's signature.
    pub accumulation: Accumulation,
    pub max_pops: u64,
}

impl Default for AStarOptions {
    fn default() -> Self {
        AStarOptions {
            blocked_classes: [ClassId::INFEASIBLE].into_iter().collect(),
            heuristic: Heuristic::Metric,
            accumulation: Accumulation::Count,
            max_pops: DEFAULT_MAX_POPS,
        }
    }
}

pub fn astar(graph: &ColoredGraph, start: VertexId, goal: VertexId, opts: &AStarOptions) -> Result<PlanResult> {
    let search_opts = SearchOptions {
        forbidden_classes: opts.blocked_classes,
        max_pops: opts.max_pops,
        heuristic: opts.heuristic,
        ..Default::default()
    };
    ClassOrderedSearch::with_rule(
        graph,
        start,
        goal,
        &search_opts,
        Comparison::ReverseLex,
        LabelRule::Nothing,
        opts.blocked_classes,
        None,
        0,
    )?
    .finish(opts.accumulation)
}
