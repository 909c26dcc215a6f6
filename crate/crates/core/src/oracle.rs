//! Brute-force reference planner over all simple paths.
//!
//! Evaluates every edge it touches, so callers that also count planner
//! evaluations should hand it [`ColoredGraph::fresh_copy`].

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ClassSet, ColoredGraph, VertexId};
use crate::order::{ClassVector, OrderMode, PathSignature};

pub const DEFAULT_MAX_PATHS: usize = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub order_mode: OrderMode,
    pub forbidden_classes: ClassSet,
    pub max_paths: usize,
    /// Bound on depth-first expansions, independent of the path cap.
    pub max_steps: u64,
    /// Keep every path's signature, sorted.
    pub keep_ranked: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            order_mode: OrderMode::default(),
            forbidden_classes: ClassSet::empty(),
            max_paths: DEFAULT_MAX_PATHS,
            max_steps: 100 * DEFAULT_MAX_PATHS as u64,
            keep_ranked: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best: Option<(Vec<VertexId>, PathSignature)>,
    pub paths: usize,
    pub ranked: Vec<PathSignature>,
}

/// Calls `visit` with every simple `start`–`goal` path and its signature.
/// Paths through forbidden edges are skipped. Errors with
/// [`Error::EnumerationCap`] once more than `max_paths` paths are found.
pub fn enumerate_simple_paths<F>(
    graph: &ColoredGraph,
    start: VertexId,
    goal: VertexId,
    opts: &OracleOptions,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(&[VertexId], &PathSignature),
{
    graph.check_vertex(start)?;
    graph.check_vertex(goal)?;
    let accumulation = opts.order_mode.accumulation;
    let mut on_path = vec![false; graph.vertex_count()];
    let mut path = vec![start];
    let mut sigs = vec![PathSignature::empty(graph.class_count())];
    let mut cursor = vec![0usize];
    on_path[start.index()] = true;
    let mut found = 0usize;
    let mut steps = 0u64;

    if start == goal {
        visit(&path, &sigs[0]);
        return Ok(1);
    }

    while let Some(&u) = path.last() {
        let depth = path.len() - 1;
        let outs = graph.out_edges(u);
        let Some(out) = outs.get(cursor[depth]) else {
            on_path[u.index()] = false;
            path.pop();
            sigs.pop();
            cursor.pop();
            continue;
        };
        cursor[depth] += 1;
        let w = out.target;
        if on_path[w.index()] {
            continue;
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::EnumerationCap(found));
        }
        let eval = graph.evaluate_edge(out.edge)?;
        if opts.forbidden_classes.contains(eval.class) {
            continue;
        }
        let mut sig = sigs[depth].clone();
        sig.theta.add_at(eval.class, accumulation.amount(eval.weight));
        sig.length += eval.weight;
        sig.hops += 1;
        if w == goal {
            found += 1;
            if found > opts.max_paths {
                return Err(Error::EnumerationCap(opts.max_paths));
            }
            path.push(w);
            visit(&path, &sig);
            path.pop();
            continue;
        }
        on_path[w.index()] = true;
        path.push(w);
        sigs.push(sig);
        cursor.push(0);
    }
    Ok(found)
}

/// Class, then exact length, then hop count, then vertex sequence.
fn tie_break(a: (&[VertexId], &PathSignature), b: (&[VertexId], &PathSignature), mode: OrderMode) -> Ordering {
    a.1.theta
        .compare(&b.1.theta, mode.comparison)
        .then_with(|| a.1.length.total_cmp(&b.1.length))
        .then_with(|| a.1.hops.cmp(&b.1.hops))
        .then_with(|| a.0.cmp(b.0))
}

pub fn oracle_optimal(
    graph: &ColoredGraph,
    start: VertexId,
    goal: VertexId,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let mode = opts.order_mode;
    let mut best: Option<(Vec<VertexId>, PathSignature)> = None;
    let mut ranked = Vec::new();
    let paths = enumerate_simple_paths(graph, start, goal, opts, |path, sig| {
        let better = match &best {
            None => true,
            Some((bp, bs)) => tie_break((path, sig), (bp, bs), mode) == Ordering::Less,
        };
        if better {
            best = Some((path.to_vec(), sig.clone()));
        }
        if opts.keep_ranked {
            ranked.push(sig.clone());
        }
    })?;
    ranked.sort_by(|a, b| {
        a.theta
            .compare(&b.theta, mode.comparison)
            .then_with(|| a.length.total_cmp(&b.length))
    });
    Ok(OracleResult { best, paths, ranked })
}

/// `rank,theta,length,hops` rows for a ranked list.
pub fn ranked_csv(ranked: &[PathSignature]) -> String {
    let mut out = String::from("rank,theta,length,hops\n");
    for (i, s) in ranked.iter().enumerate() {
        let theta = match &s.theta {
            ClassVector::Finite(e) => e.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" "),
            ClassVector::Top => "TOP".into(),
        };
        let _ = writeln!(out, "{},{theta},{:.6},{}", i + 1, s.length, s.hops);
    }
    out
}
