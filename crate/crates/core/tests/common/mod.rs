#![allow(dead_code)]

use std::cmp::Ordering;
use std::sync::Arc;

use coa_core::graph::Declared;
use coa_core::random_graph::{random_instance, RandomGraphParams, RandomInstance};
use coa_core::{
    Accumulation, ClassId, ClassVector, ColoredGraph, Comparison, EdgeId, SearchTree, TopologyBuilder, VertexId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn instances(seed: u64, count: usize) -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_instance(&mut rng, &RandomGraphParams::default()))
        .collect()
}

/// Copy of `graph` with edge `e` declared as `class`.
pub fn with_edge_class(graph: &ColoredGraph, e: EdgeId, class: ClassId) -> ColoredGraph {
    let topo = graph.topology();
    let mut b = TopologyBuilder::new(topo.dim(), topo.metric().clone());
    for v in 0..topo.vertex_count() {
        b.add_vertex(topo.position(VertexId::from(v)));
    }
    for i in 0..topo.edge_count() {
        let id = EdgeId(i as u32);
        let [u, v] = topo.endpoints(id);
        let mut declared = topo.declared(id);
        if id == e {
            declared = Declared {
                class: Some(class),
                ..declared
            };
        }
        b.add_declared_edge(u, v, declared).unwrap();
    }
    ColoredGraph::new(
        Arc::new(b.build().unwrap()),
        graph.vertex_classes().to_vec(),
        graph.vertex_class_count(),
        graph.class_count(),
    )
    .unwrap()
}

/// Checks the tree invariant that holds for a lazy search: parent chains
/// are acyclic and rooted at the start, and no stored label is better than
/// the true sum along its current chain. Only meaningful for comparisons
/// that are invariant under a shared suffix.
pub fn check_tree(tree: &SearchTree, graph: &ColoredGraph, acc: Accumulation, cmp: Comparison) -> Result<(), String> {
    for i in 0..graph.vertex_count() {
        let v = VertexId::from(i);
        if !tree.contains(v) {
            continue;
        }
        let (theta, length) = chain_sum(tree, graph, acc, v)?;
        let label = tree.path_class(v);
        match theta.compare(label, cmp) {
            Ordering::Greater => return Err(format!("{v}: chain {theta} worse than label {label}")),
            Ordering::Equal if length > tree.cost_to_come(v) + 1e-9 => {
                return Err(format!(
                    "{v}: chain length {length} above label {}",
                    tree.cost_to_come(v)
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn chain_sum(
    tree: &SearchTree,
    graph: &ColoredGraph,
    acc: Accumulation,
    v: VertexId,
) -> Result<(ClassVector, f64), String> {
    let path = tree.extract_path(v).map_err(|e| e.to_string())?;
    let mut theta = ClassVector::zeros(graph.class_count());
    let mut length = 0.0;
    for pair in path.windows(2) {
        let e = graph.find_edge(pair[0], pair[1]).ok_or("tree edge not in graph")?;
        let eval = graph
            .cached(e)
            .ok_or_else(|| format!("tree edge {}-{} never evaluated", pair[0], pair[1]))?;
        theta = theta
            .try_add(&acc.edge_vector(graph.class_count(), eval.class, eval.weight))
            .unwrap();
        length += eval.weight;
    }
    Ok((theta, length))
}
