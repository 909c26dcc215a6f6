//! Weighted colored graphs with lazily evaluated edges.
//!
//! Topology and vertex embeddings live in an immutable [`Topology`] that can
//! be shared between many [`ColoredGraph`]s. A colored graph adds vertex
//! classes, an optional [`EdgeEvaluator`] for the expensive true edge values,
//! and a memo cache so every undirected edge is evaluated at most once.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::ClassVector;

/// Edge or vertex class; 1 is the best class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(u8);

impl ClassId {
    pub const FEASIBLE: ClassId = ClassId(1);
    pub const UNKNOWN: ClassId = ClassId(2);
    pub const INFEASIBLE: ClassId = ClassId(3);

    pub fn new(value: usize) -> Option<ClassId> {
        (1..=ClassSet::MAX_CLASS)
            .contains(&value)
            .then_some(ClassId(value as u8))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based index into a class vector.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of classes, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSet(u64);

impl ClassSet {
    pub const MAX_CLASS: usize = 63;

    pub fn empty() -> Self {
        ClassSet(0)
    }

    pub fn insert(&mut self, class: ClassId) {
        self.0 |= 1 << class.get();
    }

    pub fn contains(self, class: ClassId) -> bool {
        self.0 & (1 << class.get()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether every class in `from..=max` is in the set.
    pub fn covers_from(self, from: ClassId, max: usize) -> bool {
        (from.get() as usize..=max).all(|c| self.0 & (1 << c) != 0)
    }

    pub fn iter(self) -> impl Iterator<Item = ClassId> {
        (1..=Self::MAX_CLASS)
            .filter(move |&c| self.0 & (1 << c) != 0)
            .map(|c| ClassId(c as u8))
    }
}

impl FromIterator<ClassId> for ClassSet {
    fn from_iter<I: IntoIterator<Item = ClassId>>(iter: I) -> Self {
        let mut s = ClassSet::empty();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

/// True (and possibly expensive) edge values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeEval {
    pub weight: f64,
    pub class: ClassId,
}

/// Cheap admissible lower bounds on an edge's weight and class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeEstimate {
    pub weight: f64,
    pub class: ClassId,
}

/// Provider of true edge evaluations.
///
/// Implementations must return a weight no smaller than the endpoint metric
/// distance and a class no better than the worse endpoint class.
pub trait EdgeEvaluator: Send + Sync {
    fn evaluate(&self, edge: EdgeId, u: VertexId, v: VertexId) -> std::result::Result<EdgeEval, String>;
}

/// Distance used for edge estimates and the cost-to-go heuristic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    /// Weighted L1 distance on a torus with the given period per coordinate.
    Torus {
        period: f64,
        scales: Vec<f64>,
    },
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Metric::Torus { period, scales } => a
                .iter()
                .zip(b)
                .zip(scales)
                .map(|((x, y), s)| {
                    let d = (x - y).abs().rem_euclid(*period);
                    s * d.min(period - d)
                })
                .sum(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutEdge {
    pub target: VertexId,
    pub edge: EdgeId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Declared {
    pub weight: Option<f64>,
    pub class: Option<ClassId>,
}

/// Immutable vertices, undirected edges and adjacency.
#[derive(Debug, Clone)]
pub struct Topology {
    dim: usize,
    positions: Vec<f64>,
    edges: Vec<[VertexId; 2]>,
    declared: Vec<Declared>,
    offsets: Vec<usize>,
    out: Vec<OutEdge>,
    metric: Metric,
}

impl Topology {
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn position(&self, v: VertexId) -> &[f64] {
        let i = v.index() * self.dim;
        &self.positions[i..i + self.dim]
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.index()]
    }

    pub fn declared(&self, e: EdgeId) -> Declared {
        self.declared[e.index()]
    }

    pub fn out_edges(&self, v: VertexId) -> &[OutEdge] {
        &self.out[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.out_edges(u).iter().find(|o| o.target == v).map(|o| o.edge)
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> f64 {
        self.metric.distance(self.position(u), self.position(v))
    }
}

/// Builder for a [`Topology`]. Edges are undirected and must be unique.
#[derive(Debug, Clone)]
pub struct TopologyBuilder {
    dim: usize,
    positions: Vec<f64>,
    edges: Vec<[VertexId; 2]>,
    declared: Vec<Declared>,
    metric: Metric,
}

impl TopologyBuilder {
    pub fn new(dim: usize, metric: Metric) -> Self {
        TopologyBuilder {
            dim,
            positions: Vec::new(),
            edges: Vec::new(),
            declared: Vec::new(),
            metric,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len() / self.dim.max(1)
    }

    pub fn add_vertex(&mut self, position: &[f64]) -> VertexId {
        assert_eq!(position.len(), self.dim, "uniform embedding dimension");
        let id = VertexId::from(self.vertex_count());
        self.positions.extend_from_slice(position);
        id
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        self.add_declared_edge(u, v, Declared::default())
    }

    pub fn add_declared_edge(&mut self, u: VertexId, v: VertexId, declared: Declared) -> Result<EdgeId> {
        let n = self.vertex_count();
        for w in [u, v] {
            if w.index() >= n {
                return Err(Error::UnknownVertex(w.index()));
            }
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push([u, v]);
        self.declared.push(declared);
        Ok(id)
    }

    pub fn build(self) -> Result<Topology> {
        let n = self.vertex_count();
        let mut degree = vec![0usize; n + 1];
        for &[u, v] in &self.edges {
            degree[u.index()] += 1;
            if u != v {
                degree[v.index()] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for d in degree.iter().take(n) {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        let mut fill = offsets.clone();
        let mut out = vec![
            OutEdge {
                target: VertexId(0),
                edge: EdgeId(0),
            };
            acc
        ];
        for (i, &[u, v]) in self.edges.iter().enumerate() {
            let edge = EdgeId(i as u32);
            out[fill[u.index()]] = OutEdge { target: v, edge };
            fill[u.index()] += 1;
            if u != v {
                out[fill[v.index()]] = OutEdge { target: u, edge };
                fill[v.index()] += 1;
            }
        }
        for v in 0..n {
            let slice = &mut out[offsets[v]..offsets[v + 1]];
            slice.sort_by_key(|o| (o.target, o.edge));
            if let Some(w) = slice.windows(2).find(|w| w[0].target == w[1].target) {
                return Err(Error::World(format!("duplicate edge between {v} and {}", w[0].target)));
            }
        }
        Ok(Topology {
            dim: self.dim,
            positions: self.positions,
            edges: self.edges,
            declared: self.declared,
            offsets,
            out,
            metric: self.metric,
        })
    }
}

/// Snapshot of one edge's estimated and (if known) true values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub endpoints: [VertexId; 2],
    pub weight_estimate: f64,
    pub class_estimate: ClassId,
    pub evaluated: bool,
    pub weight_true: Option<f64>,
    pub class_true: Option<ClassId>,
}

pub struct ColoredGraph {
    topology: Arc<Topology>,
    vertex_classes: Vec<ClassId>,
    vertex_class_count: usize,
    class_count: usize,
    evaluator: Option<Arc<dyn EdgeEvaluator>>,
    cache: Vec<OnceLock<EdgeEval>>,
    evaluations: AtomicUsize,
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColoredGraph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edge_count())
            .field("classes", &self.class_count)
            .field("evaluations", &self.evaluation_count())
            .finish()
    }
}

impl ColoredGraph {
    /// `vertex_class_count` is K and `class_count` is L, with K ≤ L.
    pub fn new(
        topology: Arc<Topology>,
        vertex_classes: Vec<ClassId>,
        vertex_class_count: usize,
        class_count: usize,
    ) -> Result<Self> {
        if vertex_class_count > class_count || class_count > ClassSet::MAX_CLASS || class_count == 0 {
            return Err(Error::World(format!(
                "invalid class counts K={vertex_class_count} L={class_count}"
            )));
        }
        if vertex_classes.len() != topology.vertex_count() {
            return Err(Error::World(format!(
                "{} vertex classes for {} vertices",
                vertex_classes.len(),
                topology.vertex_count()
            )));
        }
        if let Some(c) = vertex_classes.iter().find(|c| c.get() as usize > vertex_class_count) {
            return Err(Error::class_range(*c, vertex_class_count));
        }
        let cache = (0..topology.edge_count()).map(|_| OnceLock::new()).collect();
        Ok(ColoredGraph {
            topology,
            vertex_classes,
            vertex_class_count,
            class_count,
            evaluator: None,
            cache,
            evaluations: AtomicUsize::new(0),
        })
    }

    /// Same topology, classes and evaluator with an empty evaluation cache.
    pub fn fresh_copy(&self) -> Self {
        ColoredGraph {
            topology: Arc::clone(&self.topology),
            vertex_classes: self.vertex_classes.clone(),
            vertex_class_count: self.vertex_class_count,
            class_count: self.class_count,
            evaluator: self.evaluator.clone(),
            cache: (0..self.topology.edge_count()).map(|_| OnceLock::new()).collect(),
            evaluations: AtomicUsize::new(0),
        }
    }

    pub fn with_evaluator(mut self, evaluator: Arc<dyn EdgeEvaluator>) -> Self {
        self.evaluator = Some(evaluator);
        self
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    pub fn vertex_count(&self) -> usize {
        self.topology.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn vertex_class_count(&self) -> usize {
        self.vertex_class_count
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.vertex_count()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.index()))
        }
    }

    pub fn vertex_class(&self, v: VertexId) -> ClassId {
        self.vertex_classes[v.index()]
    }

    pub fn vertex_classes(&self) -> &[ClassId] {
        &self.vertex_classes
    }

    pub fn position(&self, v: VertexId) -> &[f64] {
        self.topology.position(v)
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.topology.endpoints(e)
    }

    pub fn out_edges(&self, v: VertexId) -> &[OutEdge] {
        self.topology.out_edges(v)
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.topology.find_edge(u, v)
    }

    /// `(ĉ, φ̂_E)`: metric endpoint distance and the worse endpoint class.
    /// Never triggers a true evaluation.
    pub fn estimate_edge(&self, e: EdgeId) -> EdgeEstimate {
        let [u, v] = self.endpoints(e);
        EdgeEstimate {
            weight: self.topology.distance(u, v),
            class: self.vertex_class(u).max(self.vertex_class(v)),
        }
    }

    /// True `(c, φ_E)` of an edge, computed at most once per edge.
    pub fn evaluate_edge(&self, e: EdgeId) -> Result<EdgeEval> {
        let cell = &self.cache[e.index()];
        if let Some(eval) = cell.get() {
            return Ok(*eval);
        }
        let eval = self.compute(e)?;
        if cell.set(eval).is_ok() {
            self.evaluations.fetch_add(1, AtomicOrdering::Relaxed);
        }
        Ok(*cell.get().expect("cell was just initialised"))
    }

    fn compute(&self, e: EdgeId) -> Result<EdgeEval> {
        let [u, v] = self.endpoints(e);
        let estimate = self.estimate_edge(e);
        let eval = if u == v {
            EdgeEval {
                weight: 0.0,
                class: self.vertex_class(u),
            }
        } else {
            match (self.topology.declared(e), &self.evaluator) {
                (
                    Declared {
                        weight: Some(weight),
                        class: Some(class),
                    },
                    _,
                ) => EdgeEval { weight, class },
                (_, Some(evaluator)) => evaluator.evaluate(e, u, v).map_err(Error::Evaluation)?,
                (_, None) => {
                    return Err(Error::Evaluation(format!(
                        "edge {u}-{v} has no declared values and the graph has no evaluator"
                    )))
                }
            }
        };
        if eval.class.get() as usize > self.class_count {
            return Err(Error::class_range(eval.class, self.class_count));
        }
        if eval.class < estimate.class || eval.weight < estimate.weight - 1e-9 || eval.weight.is_nan() {
            return Err(Error::Evaluation(format!(
                "inadmissible evaluation of edge {u}-{v}: ({}, {}) below estimate ({}, {})",
                eval.weight, eval.class, estimate.weight, estimate.class
            )));
        }
        Ok(eval)
    }

    pub fn is_evaluated(&self, e: EdgeId) -> bool {
        self.cache[e.index()].get().is_some()
    }

    /// Cached true values, if the edge has been evaluated.
    pub fn cached(&self, e: EdgeId) -> Option<EdgeEval> {
        self.cache[e.index()].get().copied()
    }

    /// Number of distinct edges evaluated so far.
    pub fn evaluation_count(&self) -> usize {
        self.evaluations.load(AtomicOrdering::Relaxed)
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        let est = self.estimate_edge(e);
        let cached = self.cached(e);
        Edge {
            endpoints: self.endpoints(e),
            weight_estimate: est.weight,
            class_estimate: est.class,
            evaluated: cached.is_some(),
            weight_true: cached.map(|c| c.weight),
            class_true: cached.map(|c| c.class),
        }
    }

    /// Admissible cost-to-go estimate `ĥ(v)`; the metric distance to `goal`.
    pub fn heuristic_cost_to_go(&self, v: VertexId, goal: VertexId) -> f64 {
        if v == goal {
            0.0
        } else {
            self.topology.distance(v, goal)
        }
    }

    /// Default class-to-go estimate `θ̂(v, goal)`: the zero vector.
    pub fn heuristic_class_to_go(&self, _v: VertexId, _goal: VertexId) -> ClassVector {
        ClassVector::zeros(self.class_count)
    }
}

/// Pluggable class-to-go estimate. Must satisfy `θ̂(v, goal) ⪯ θ(v, goal)`.
pub trait ClassToGo: Send + Sync {
    fn estimate(&self, graph: &ColoredGraph, v: VertexId, goal: VertexId) -> ClassVector;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroClassToGo;

impl ClassToGo for ZeroClassToGo {
    fn estimate(&self, graph: &ColoredGraph, v: VertexId, goal: VertexId) -> ClassVector {
        graph.heuristic_class_to_go(v, goal)
    }
}
