//! Small random colored graphs for property tests and benchmarks.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::graph::{ClassId, ColoredGraph, Declared, Metric, TopologyBuilder, VertexId};

#[derive(Clone, Copy, Debug)]
pub struct RandomGraphParams {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub classes: usize,
    pub min_weight: f64,
    pub max_weight: f64,
    /// Side of the square vertices are placed in.
    pub extent: f64,
}

impl Default for RandomGraphParams {
    fn default() -> Self {
        RandomGraphParams {
            max_vertices: 12,
            max_edges: 30,
            classes: 3,
            min_weight: 0.1,
            max_weight: 10.0,
            extent: 6.0,
        }
    }
}

#[derive(Debug)]
pub struct RandomInstance {
    pub graph: ColoredGraph,
    pub start: VertexId,
    pub goal: VertexId,
}

/// Undirected graph with 2..=max_vertices vertices in the plane.
///
/// Weights are drawn uniformly and raised to the Euclidean endpoint distance
/// where needed, so the Euclidean cost-to-go stays admissible. Edge classes
/// are drawn no better than the worse endpoint class.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, params: &RandomGraphParams) -> RandomInstance {
    let n = rng.random_range(2..=params.max_vertices.max(2));
    let pairs = n * (n - 1) / 2;
    let m = rng.random_range(0..=params.max_edges.min(pairs));
    let mut topo = TopologyBuilder::new(2, Metric::Euclidean);
    let mut positions = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for _ in 0..n {
        let p = [
            rng.random_range(0.0..=params.extent),
            rng.random_range(0.0..=params.extent),
        ];
        topo.add_vertex(&p);
        positions.push(p);
        classes.push(ClassId::new(rng.random_range(1..=params.classes)).expect("class in range"));
    }
    for idx in sample(rng, pairs, m).into_vec() {
        let (u, v) = unrank_pair(idx, n);
        let d = Metric::Euclidean.distance(&positions[u], &positions[v]);
        let weight = rng.random_range(params.min_weight..=params.max_weight).max(d);
        let floor = classes[u].max(classes[v]).get() as usize;
        let class = ClassId::new(rng.random_range(floor..=params.classes)).expect("class in range");
        topo.add_declared_edge(
            VertexId::from(u),
            VertexId::from(v),
            Declared {
                weight: Some(weight),
                class: Some(class),
            },
        )
        .expect("vertices exist");
    }
    let topology = topo.build().expect("pairs are distinct");
    let graph =
        ColoredGraph::new(Arc::new(topology), classes, params.classes, params.classes).expect("valid class counts");
    RandomInstance {
        graph,
        start: VertexId(0),
        goal: VertexId::from(n - 1),
    }
}

fn unrank_pair(mut idx: usize, n: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - 1 - u;
        if idx < row {
            return (u, u + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}
