//! Class-ordered A* over an edge queue with lazy edge evaluation.
//!
//! [`ClassOrderedSearch`] is the single-pass engine: the start vertex is
//! initialised with zero cost and zero path class, outgoing edges are
//! enqueued with estimated keys, and every popped edge is evaluated for real
//! before the tree is rewired. The search terminates when the goal's trivial
//! self edge reaches the front of the queue.
//!
//! [`coa_star`] is the public entry point. Under the reverse-lexicographic
//! comparison it runs one pass. The worst-class comparison is not preserved
//! by appending a common suffix, so a single pass can keep a class-better but
//! longer prefix at an intermediate vertex. For that order `coa_star` runs the
//! engine twice: first under the reverse-lexicographic refinement, which fixes
//! the optimal worst class `k*` and its multiplicity, then with only class
//! `k*` accumulated and every class above it forbidden, which recovers the
//! shortest path among those with that worst-class signature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{ClassId, ClassSet, ClassToGo, ColoredGraph, EdgeEval, EdgeId, VertexId, ZeroClassToGo};
use crate::order::{
    cost_compare, key_compare, path_signature, Accumulation, ClassVector, Comparison, OrderMode, PathSignature,
    QueueKey,
};

pub const DEFAULT_MAX_POPS: u64 = 10_000_000;

/// Cost-to-go estimate used for the third queue key.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    Zero,
    /// The graph's metric distance to the goal.
    #[default]
    Metric,
}

#[derive(Clone)]
pub struct SearchOptions {
    pub order_mode: OrderMode,
    /// Edges whose true class is in this set are never accepted.
    pub forbidden_classes: ClassSet,
    pub max_pops: u64,
    pub heuristic: Heuristic,
    /// Defaults to the zero estimate.
    pub class_to_go: Option<Arc<dyn ClassToGo>>,
    /// Record the snapshot key of every evaluated edge.
    pub record_trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            order_mode: OrderMode::default(),
            forbidden_classes: ClassSet::empty(),
            max_pops: DEFAULT_MAX_POPS,
            heuristic: Heuristic::Metric,
            class_to_go: None,
            record_trace: false,
        }
    }
}

impl std::fmt::Debug for SearchOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SearchOptions")
            .field("order_mode", &self.order_mode)
            .field("forbidden_classes", &self.forbidden_classes)
            .field("max_pops", &self.max_pops)
            .field("heuristic", &self.heuristic)
            .field("custom_class_to_go", &self.class_to_go.is_some())
            .finish()
    }
}

impl SearchOptions {
    pub fn with_mode(order_mode: OrderMode) -> Self {
        SearchOptions {
            order_mode,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStatus {
    Found,
    NoPath,
    Aborted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub pops: u64,
    /// Distinct edges evaluated for the first time during this plan.
    pub evaluations: usize,
    pub enqueues: u64,
    pub runtime: Duration,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.pops += other.pops;
        self.enqueues += other.enqueues;
        self.evaluations += other.evaluations;
        self.runtime += other.runtime;
    }
}

/// One popped and evaluated edge, with the keys it was enqueued under.
#[derive(Clone, Debug)]
pub struct EvaluationRecord {
    pub phase: usize,
    pub parent: VertexId,
    pub child: VertexId,
    pub key: QueueKey,
}

/// What one engine pass optimised and what it settled on at the goal.
#[derive(Clone, Debug)]
pub struct PhaseSummary {
    pub comparison: Comparison,
    /// Class counted in this pass, if only one class was.
    pub counted_class: Option<ClassId>,
    pub goal_class: ClassVector,
    pub goal_cost: f64,
}

#[derive(Clone, Debug)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub path: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub signature: PathSignature,
    pub stats: SearchStats,
    pub trace: Vec<EvaluationRecord>,
    pub phases: Vec<PhaseSummary>,
    /// Parent/child pairs of the final search tree, for rendering.
    pub tree_edges: Vec<(VertexId, VertexId)>,
}

impl PlanResult {
    fn empty(status: PlanStatus, classes: usize) -> Self {
        PlanResult {
            status,
            path: Vec::new(),
            edges: Vec::new(),
            signature: PathSignature::empty(classes),
            stats: SearchStats::default(),
            trace: Vec::new(),
            phases: Vec::new(),
            tree_edges: Vec::new(),
        }
    }

    pub fn found(&self) -> bool {
        self.status == PlanStatus::Found
    }
}

/// How a true or estimated edge contributes to a tree label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum LabelRule {
    Accumulate(Accumulation),
    /// Only edges of one class contribute.
    Only(ClassId, Accumulation),
    /// Labels stay zero; the search reduces to lazy A* on length.
    Nothing,
}

impl LabelRule {
    fn contribution(self, classes: usize, class: ClassId, weight: f64) -> ClassVector {
        match self {
            LabelRule::Accumulate(acc) => acc.edge_vector(classes, class, weight),
            LabelRule::Only(k, acc) if k == class => acc.edge_vector(classes, class, weight),
            LabelRule::Only(..) | LabelRule::Nothing => ClassVector::zeros(classes),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub parent: Option<VertexId>,
    pub cost_to_come: f64,
    pub path_class: ClassVector,
}

/// Parent pointers with cost-to-come `g_T` and path class `θ_T` per vertex.
#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
    start: VertexId,
}

impl SearchTree {
    /// Every vertex unreached (`∞`, `TOP`) except `start` (`0`, zero).
    pub fn new(vertices: usize, classes: usize, start: VertexId) -> Self {
        let mut nodes = vec![
            TreeNode {
                parent: None,
                cost_to_come: f64::INFINITY,
                path_class: ClassVector::Top,
            };
            vertices
        ];
        nodes[start.index()] = TreeNode {
            parent: None,
            cost_to_come: 0.0,
            path_class: ClassVector::zeros(classes),
        };
        SearchTree { nodes, start }
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn node(&self, v: VertexId) -> &TreeNode {
        &self.nodes[v.index()]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        !self.nodes[v.index()].path_class.is_top()
    }

    pub fn cost_to_come(&self, v: VertexId) -> f64 {
        self.nodes[v.index()].cost_to_come
    }

    pub fn path_class(&self, v: VertexId) -> &ClassVector {
        &self.nodes[v.index()].path_class
    }

    fn is_ancestor(&self, ancestor: VertexId, mut v: VertexId) -> bool {
        for _ in 0..self.nodes.len() {
            if v == ancestor {
                return true;
            }
            match self.nodes[v.index()].parent {
                Some(p) => v = p,
                None => return false,
            }
        }
        true
    }

    /// Makes `u` the parent of `v` and sets `v`'s labels from `u`'s.
    pub fn rewire(&mut self, u: VertexId, v: VertexId, weight: f64, edge_class: &ClassVector) {
        assert!(
            u == v || !self.is_ancestor(v, u),
            "rewiring {v} under its descendant {u} would close a cycle"
        );
        let parent = &self.nodes[u.index()];
        let node = TreeNode {
            parent: Some(u),
            cost_to_come: parent.cost_to_come + weight,
            path_class: parent.path_class.plus(edge_class),
        };
        self.nodes[v.index()] = node;
    }

    /// Parent chain from the start to `v`.
    pub fn extract_path(&self, v: VertexId) -> Result<Vec<VertexId>> {
        if !self.contains(v) {
            return Err(Error::NotInTree(v));
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.nodes[cur.index()].parent {
            path.push(p);
            cur = p;
            if path.len() > self.nodes.len() {
                return Err(Error::NotInTree(v));
            }
        }
        if cur != self.start {
            return Err(Error::NotInTree(v));
        }
        path.reverse();
        Ok(path)
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.parent.map(|p| (p, VertexId::from(i))))
            .collect()
    }
}

pub fn extract_path(tree: &SearchTree, goal: VertexId) -> Result<Vec<VertexId>> {
    tree.extract_path(goal)
}

#[derive(Clone, Debug)]
pub struct QueueEntry {
    pub parent: VertexId,
    pub child: VertexId,
    /// `None` for the goal's trivial self edge.
    pub edge: Option<EdgeId>,
    pub key: QueueKey,
    seq: u64,
    comparison: Comparison,
}

impl QueueEntry {
    /// Key order, then `(child, parent)` ascending, then insertion order.
    pub fn compare(&self, other: &QueueEntry) -> Ordering {
        key_compare(&self.key, &other.key, self.comparison)
            .then_with(|| self.child.cmp(&other.child))
            .then_with(|| self.parent.cmp(&other.parent))
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap.
        other.compare(self)
    }
}

/// Priority queue of candidate edges keyed by snapshot keys. Duplicates are
/// allowed; stale entries fail the acceptance test when popped.
#[derive(Clone, Debug)]
pub struct EdgeQueue {
    heap: BinaryHeap<QueueEntry>,
    seq: u64,
    comparison: Comparison,
}

impl EdgeQueue {
    pub fn new(comparison: Comparison) -> Self {
        EdgeQueue {
            heap: BinaryHeap::new(),
            seq: 0,
            comparison,
        }
    }

    pub fn push(&mut self, parent: VertexId, child: VertexId, edge: Option<EdgeId>, key: QueueKey) {
        self.seq += 1;
        self.heap.push(QueueEntry {
            parent,
            child,
            edge,
            key,
            seq: self.seq,
            comparison: self.comparison,
        });
    }

    pub fn pop(&mut self) -> Option<QueueEntry> {
        self.heap.pop()
    }

    pub fn peek(&self) -> Option<&QueueEntry> {
        self.heap.peek()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &QueueEntry> {
        self.heap.iter()
    }
}

/// One pass of class-ordered A*, steppable for instrumentation.
pub struct ClassOrderedSearch<'g> {
    graph: &'g ColoredGraph,
    goal: VertexId,
    comparison: Comparison,
    rule: LabelRule,
    forbidden: ClassSet,
    heuristic: Heuristic,
    class_to_go: Arc<dyn ClassToGo>,
    tree: SearchTree,
    queue: EdgeQueue,
    pops: u64,
    enqueues: u64,
    max_pops: u64,
    trace: Option<Vec<EvaluationRecord>>,
    phase: usize,
    status: Option<PlanStatus>,
}

impl<'g> ClassOrderedSearch<'g> {
    /// A single pass under `opts.order_mode` with no phase split. Use
    /// [`coa_star`] for optimal results under the worst-class comparison.
    pub fn new(graph: &'g ColoredGraph, start: VertexId, goal: VertexId, opts: &SearchOptions) -> Result<Self> {
        Self::with_rule(
            graph,
            start,
            goal,
            opts,
            opts.order_mode.comparison,
            LabelRule::Accumulate(opts.order_mode.accumulation),
            opts.forbidden_classes,
            opts.class_to_go.clone(),
            0,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn with_rule(
        graph: &'g ColoredGraph,
        start: VertexId,
        goal: VertexId,
        opts: &SearchOptions,
        comparison: Comparison,
        rule: LabelRule,
        forbidden: ClassSet,
        class_to_go: Option<Arc<dyn ClassToGo>>,
        phase: usize,
    ) -> Result<Self> {
        graph.check_vertex(start)?;
        graph.check_vertex(goal)?;
        let mut search = ClassOrderedSearch {
            graph,
            goal,
            comparison,
            rule,
            forbidden,
            heuristic: opts.heuristic,
            class_to_go: class_to_go.unwrap_or_else(|| Arc::new(ZeroClassToGo)),
            tree: SearchTree::new(graph.vertex_count(), graph.class_count(), start),
            queue: EdgeQueue::new(comparison),
            pops: 0,
            enqueues: 0,
            max_pops: opts.max_pops,
            trace: opts.record_trace.then(Vec::new),
            phase,
            status: None,
        };
        search.enqueue_outgoing(start);
        Ok(search)
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn queue(&self) -> &EdgeQueue {
        &self.queue
    }

    pub fn goal(&self) -> VertexId {
        self.goal
    }

    pub fn pops(&self) -> u64 {
        self.pops
    }

    pub fn status(&self) -> Option<PlanStatus> {
        self.status
    }

    fn cost_to_go(&self, v: VertexId) -> f64 {
        match self.heuristic {
            Heuristic::Zero => 0.0,
            Heuristic::Metric => self.graph.heuristic_cost_to_go(v, self.goal),
        }
    }

    /// Enqueues the promising outgoing edges of `v` using estimates only.
    ///
    /// An edge `(v, w)` is skipped when its `k1` is worse than the goal's
    /// current path class. Otherwise it is enqueued if `k2` beats `θ_T(w)`,
    /// or ties it with `g_T(v) + ĉ < g_T(w)`. On a class tie the goal's cost
    /// prunes the edge only when `k1` also ties the goal's path class.
    pub fn enqueue_outgoing(&mut self, v: VertexId) {
        let classes = self.graph.class_count();
        let node = self.tree.node(v).clone();
        let incumbent_class = self.tree.path_class(self.goal).clone();
        let incumbent_cost = self.tree.cost_to_come(self.goal);

        if v == self.goal {
            let key = QueueKey {
                k1: node.path_class.clone(),
                k2: node.path_class.clone(),
                k3: node.cost_to_come,
                k4: node.cost_to_come,
            };
            self.queue.push(v, v, None, key);
            self.enqueues += 1;
        }

        for out in self.graph.out_edges(v) {
            let w = out.target;
            if w == v {
                continue;
            }
            let est = self.graph.estimate_edge(out.edge);
            if self.forbidden.covers_from(est.class, classes) {
                continue;
            }
            let k2 = node
                .path_class
                .plus(&self.rule.contribution(classes, est.class, est.weight));
            let k1 = k2.plus(&self.class_to_go.estimate(self.graph, w, self.goal));
            let versus_incumbent = k1.compare(&incumbent_class, self.comparison);
            if versus_incumbent == Ordering::Greater {
                continue;
            }
            let k4 = node.cost_to_come + est.weight;
            let k3 = k4 + self.cost_to_go(w);
            let target = self.tree.node(w);
            let promising = match k2.compare(&target.path_class, self.comparison) {
                Ordering::Less => true,
                Ordering::Equal => {
                    let within_incumbent =
                        versus_incumbent == Ordering::Less || cost_compare(k3, incumbent_cost) != Ordering::Greater;
                    within_incumbent && k4 < target.cost_to_come
                }
                Ordering::Greater => false,
            };
            if promising {
                self.queue.push(v, w, Some(out.edge), QueueKey { k1, k2, k3, k4 });
                self.enqueues += 1;
            }
        }
    }

    /// Sets `v`'s parent to `u` using the edge's true values.
    pub fn rewire(&mut self, u: VertexId, v: VertexId, eval: EdgeEval) {
        let contribution = self
            .rule
            .contribution(self.graph.class_count(), eval.class, eval.weight);
        self.tree.rewire(u, v, eval.weight, &contribution);
    }

    /// Pops and processes one queue entry. Returns the final status once the
    /// search has terminated.
    pub fn step(&mut self) -> Result<Option<PlanStatus>> {
        if self.status.is_some() {
            return Ok(self.status);
        }
        let Some(entry) = self.queue.pop() else {
            self.status = Some(PlanStatus::NoPath);
            return Ok(self.status);
        };
        self.pops += 1;
        if self.pops > self.max_pops {
            self.status = Some(PlanStatus::Aborted);
            return Ok(self.status);
        }
        let Some(edge) = entry.edge else {
            self.status = Some(PlanStatus::Found);
            return Ok(self.status);
        };
        let (u, v) = (entry.parent, entry.child);
        let eval = self.graph.evaluate_edge(edge)?;
        if let Some(trace) = &mut self.trace {
            trace.push(EvaluationRecord {
                phase: self.phase,
                parent: u,
                child: v,
                key: entry.key.clone(),
            });
        }
        if self.forbidden.contains(eval.class) {
            return Ok(None);
        }
        let classes = self.graph.class_count();
        let candidate = self
            .tree
            .path_class(u)
            .plus(&self.rule.contribution(classes, eval.class, eval.weight));
        let improves = match candidate.compare(self.tree.path_class(v), self.comparison) {
            Ordering::Less => true,
            Ordering::Equal => self.tree.cost_to_come(u) + eval.weight < self.tree.cost_to_come(v),
            Ordering::Greater => false,
        };
        if improves {
            self.rewire(u, v, eval);
            self.enqueue_outgoing(v);
        }
        Ok(None)
    }

    pub fn run(&mut self) -> Result<PlanStatus> {
        loop {
            if let Some(status) = self.step()? {
                return Ok(status);
            }
        }
    }

    fn summary(&self) -> PhaseSummary {
        PhaseSummary {
            comparison: self.comparison,
            counted_class: match self.rule {
                LabelRule::Only(k, _) => Some(k),
                _ => None,
            },
            goal_class: self.tree.path_class(self.goal).clone(),
            goal_cost: self.tree.cost_to_come(self.goal),
        }
    }

    fn stats(&self, evaluated_before: usize, began: Instant) -> SearchStats {
        SearchStats {
            pops: self.pops,
            evaluations: self.graph.evaluation_count().saturating_sub(evaluated_before),
            enqueues: self.enqueues,
            runtime: began.elapsed(),
        }
    }

    /// Runs to completion and packages the result, reporting the path's
    /// signature under `accumulation`.
    pub fn finish(mut self, accumulation: Accumulation) -> Result<PlanResult> {
        let before = self.graph.evaluation_count();
        let began = Instant::now();
        let status = self.run()?;
        let mut result = PlanResult::empty(status, self.graph.class_count());
        if status == PlanStatus::Found {
            result.path = self.tree.extract_path(self.goal)?;
            result.edges = result
                .path
                .windows(2)
                .map(|w| self.graph.find_edge(w[0], w[1]).ok_or(Error::NotAdjacent(w[0], w[1])))
                .collect::<Result<_>>()?;
            result.signature = path_signature(&result.path, self.graph, accumulation)?;
        }
        result.stats = self.stats(before, began);
        result.phases.push(self.summary());
        result.tree_edges = self.tree.edges();
        result.trace = self.trace.take().unwrap_or_default();
        Ok(result)
    }
}

/// Optimal path under `opts.order_mode`: minimal path class, then minimal
/// length, among paths that avoid `opts.forbidden_classes`.
pub fn coa_star(graph: &ColoredGraph, start: VertexId, goal: VertexId, opts: &SearchOptions) -> Result<PlanResult> {
    graph.check_vertex(start)?;
    graph.check_vertex(goal)?;
    let accumulation = opts.order_mode.accumulation;
    let began = Instant::now();

    let first = ClassOrderedSearch::with_rule(
        graph,
        start,
        goal,
        opts,
        Comparison::ReverseLex,
        LabelRule::Accumulate(accumulation),
        opts.forbidden_classes,
        opts.class_to_go.clone(),
        0,
    )?
    .finish(accumulation)?;

    if opts.order_mode.comparison == Comparison::ReverseLex || !first.found() {
        return Ok(first);
    }
    let worst = first.signature.theta.worst_class()?;
    let Some(worst) = ClassId::new(worst) else {
        return Ok(first);
    };

    let mut forbidden = opts.forbidden_classes;
    for c in worst.get() as usize + 1..=graph.class_count() {
        forbidden.insert(ClassId::new(c).expect("class in range"));
    }
    let mut second = ClassOrderedSearch::with_rule(
        graph,
        start,
        goal,
        opts,
        Comparison::ReverseLex,
        LabelRule::Only(worst, accumulation),
        forbidden,
        None,
        1,
    )?
    .finish(accumulation)?;

    let mut stats = first.stats;
    stats.absorb(&second.stats);
    stats.runtime = began.elapsed();
    second.stats = stats;
    let mut trace = first.trace;
    trace.append(&mut second.trace);
    second.trace = trace;
    let mut phases = first.phases;
    phases.append(&mut second.phases);
    second.phases = phases;
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_file::load_problem;

    pub(crate) const DIAMOND: &str = "\
classes 1 3
vertex 0 1 0 0
vertex 1 1 0.5 0.5
vertex 2 1 0.5 -0.5
vertex 3 1 1 0
edge 0 1 w=1 c=1
edge 1 3 w=10 c=1
edge 0 2 w=1 c=2
edge 2 3 w=1 c=1
start 0
goal 3
";

    fn cv(e: &[f64]) -> ClassVector {
        ClassVector::from_entries(e)
    }

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn diamond_prefers_better_class() {
        let p = load_problem(DIAMOND).unwrap();
        for mode in OrderMode::ALL {
            let r = coa_star(&p.graph, v(0), v(3), &SearchOptions::with_mode(mode)).unwrap();
            assert_eq!(r.status, PlanStatus::Found, "{mode}");
            assert_eq!(r.path, vec![v(0), v(1), v(3)], "{mode}");
            assert_eq!(r.signature.length, 11.0);
        }
        let r = coa_star(&p.graph, v(0), v(3), &SearchOptions::default()).unwrap();
        assert_eq!(r.signature.theta, cv(&[2., 0., 0.]));
    }

    #[test]
    fn diamond_class_tie_takes_shorter() {
        let text = DIAMOND.replace("edge 0 2 w=1 c=2", "edge 0 2 w=1 c=1");
        let p = load_problem(&text).unwrap();
        let r = coa_star(&p.graph, v(0), v(3), &SearchOptions::default()).unwrap();
        assert_eq!(r.path, vec![v(0), v(2), v(3)]);
        assert_eq!(r.signature.theta, cv(&[2., 0., 0.]));
        assert_eq!(r.signature.length, 2.0);
    }

    #[test]
    fn class_better_edge_not_pruned_by_shorter_incumbent() {
        // The direct class-3 edge reaches the goal first and is much shorter
        // than the optimum, which must still be found.
        let p = load_problem(
            "classes 3 3
vertex 0 1 1.562036530934256 1.7633812874970864
vertex 1 2 1.5876625298296625 1.0879289566869896
vertex 2 2 1.838011668773439 0.4556825140067591
vertex 3 1 1.2507119374431408 1.409720915603146
vertex 4 2 1.3056661317905731 1.8906529564674215
edge 0 3 w=8.13165627757953 c=2
edge 2 3 w=1.1203170293007374 c=2
edge 0 1 w=7.069648000114295 c=3
edge 1 4 w=6.446196417444175 c=3
edge 0 2 w=6.588841418249685 c=2
edge 3 4 w=0.7138098528739448 c=3
edge 1 2 w=4.290907580459222 c=3
edge 0 4 w=1.6879544556018145 c=3
edge 1 3 w=8.5791110732366 c=3
",
        )
        .unwrap();
        for comparison in [Comparison::WorstClass, Comparison::ReverseLex] {
            for heuristic in [Heuristic::Zero, Heuristic::Metric] {
                let opts = SearchOptions {
                    order_mode: OrderMode::new(comparison, Accumulation::Length),
                    heuristic,
                    ..Default::default()
                };
                let r = coa_star(&p.graph.fresh_copy(), v(0), v(4), &opts).unwrap();
                assert_eq!(r.path, vec![v(0), v(2), v(3), v(4)], "{comparison:?} {heuristic:?}");
                assert!((r.signature.length - 8.422968300424367).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn start_equals_goal() {
        let p = load_problem(DIAMOND).unwrap();
        let r = coa_star(&p.graph, v(2), v(2), &SearchOptions::default()).unwrap();
        assert_eq!(r.status, PlanStatus::Found);
        assert_eq!(r.path, vec![v(2)]);
        assert!(r.signature.theta.is_zero());
        assert_eq!(r.signature.hops, 0);
    }

    #[test]
    fn disconnected_goal() {
        let p = load_problem("vertex 0 1 0\nvertex 1 1 1\nvertex 2 1 5\nedge 0 1 w=1 c=1\n").unwrap();
        let r = coa_star(&p.graph, v(0), v(2), &SearchOptions::default()).unwrap();
        assert_eq!(r.status, PlanStatus::NoPath);
        assert!(r.stats.pops < 10);
    }

    #[test]
    fn invalid_ids_and_abort() {
        let p = load_problem(DIAMOND).unwrap();
        assert!(matches!(
            coa_star(&p.graph, v(0), v(9), &SearchOptions::default()),
            Err(Error::UnknownVertex(9))
        ));
        let opts = SearchOptions {
            max_pops: 1,
            ..Default::default()
        };
        let r = coa_star(&p.graph, v(0), v(3), &opts).unwrap();
        assert_eq!(r.status, PlanStatus::Aborted);
    }

    #[test]
    fn forbidden_class_is_avoided() {
        let p = load_problem(DIAMOND).unwrap();
        let opts = SearchOptions {
            forbidden_classes: [ClassId::new(1).unwrap()].into_iter().collect(),
            ..Default::default()
        };
        let r = coa_star(&p.graph, v(0), v(3), &opts).unwrap();
        assert_eq!(r.status, PlanStatus::NoPath);
    }

    #[test]
    fn unreached_child_is_enqueued() {
        let p = load_problem(DIAMOND).unwrap();
        let s = ClassOrderedSearch::new(&p.graph, v(0), v(3), &SearchOptions::default()).unwrap();
        let children: Vec<_> = s.queue().iter().map(|e| e.child).collect();
        assert_eq!(children.len(), 2);
        assert!(children.contains(&v(1)) && children.contains(&v(2)));
    }

    #[test]
    fn incumbent_prunes_worse_class() {
        // Goal already reached with [1,0,0]; a class-2 candidate is pruned.
        let p = load_problem(
            "classes 2 3\nvertex 0 1 0 0\nvertex 1 1 1 0\nvertex 2 2 0 1\nedge 0 1 w=1 c=1\nedge 1 2 w=2 c=2\n",
        )
        .unwrap();
        let mut s = ClassOrderedSearch::new(&p.graph, v(0), v(1), &SearchOptions::default()).unwrap();
        s.step().unwrap();
        assert_eq!(s.tree().path_class(v(1)), &cv(&[1., 0., 0.]));
        // Only the goal self edge is left; (1,2) has k1 = [1,1,0] ≻ [1,0,0].
        assert_eq!(s.queue().len(), 1);
        assert!(s.queue().peek().unwrap().edge.is_none());
    }

    #[test]
    fn equal_cost_tie_not_enqueued() {
        // Two routes reach vertex 2 with class [2,0,0] and cost 2 exactly.
        let p = load_problem(
            "classes 1 3\nvertex 0 1 0 0\nvertex 1 1 1 0\nvertex 2 1 2 0\nvertex 3 1 1 0\n\
             edge 0 1 w=1 c=1\nedge 1 2 w=1 c=1\nedge 0 3 w=1 c=1\nedge 3 2 w=1 c=1\n",
        )
        .unwrap();
        let mut s = ClassOrderedSearch::new(&p.graph, v(0), v(2), &SearchOptions::default()).unwrap();
        assert_eq!(s.run().unwrap(), PlanStatus::Found);
        assert_eq!(s.tree().cost_to_come(v(2)), 2.0);
        let other = if s.tree().node(v(2)).parent == Some(v(1)) {
            v(3)
        } else {
            v(1)
        };
        assert_eq!(s.tree().cost_to_come(other), 1.0);
        let count = |s: &ClassOrderedSearch| {
            s.queue()
                .iter()
                .filter(|e| e.parent == other && e.child == v(2))
                .count()
        };
        let before = count(&s);
        s.enqueue_outgoing(other);
        assert_eq!(count(&s), before);
    }

    #[test]
    fn rewire_sets_labels() {
        let mut t = SearchTree::new(3, 3, v(0));
        t.rewire(v(0), v(1), 3.0, &cv(&[1., 0., 0.]));
        assert_eq!(t.cost_to_come(v(1)), 3.0);
        t.rewire(v(1), v(2), 2.0, &cv(&[0., 1., 0.]));
        assert_eq!(t.cost_to_come(v(2)), 5.0);
        assert_eq!(t.path_class(v(2)), &cv(&[1., 1., 0.]));
        t.rewire(v(0), v(2), 7.0, &cv(&[1., 0., 0.]));
        assert_eq!(t.node(v(2)).parent, Some(v(0)));
        assert_eq!(t.path_class(v(2)), &cv(&[1., 0., 0.]));
        assert_eq!(t.cost_to_come(v(2)), 7.0);
        assert_eq!(t.cost_to_come(v(0)), 0.0);
        assert!(t.path_class(v(0)).is_zero());
    }

    #[test]
    #[should_panic(expected = "cycle")]
    fn rewire_cycle_panics() {
        let mut t = SearchTree::new(3, 3, v(0));
        t.rewire(v(0), v(1), 1.0, &cv(&[1., 0., 0.]));
        t.rewire(v(1), v(2), 1.0, &cv(&[1., 0., 0.]));
        t.rewire(v(2), v(1), 1.0, &cv(&[1., 0., 0.]));
    }

    #[test]
    fn extract_paths() {
        let mut t = SearchTree::new(3, 3, v(0));
        assert_eq!(t.extract_path(v(0)).unwrap(), vec![v(0)]);
        assert_eq!(t.extract_path(v(2)), Err(Error::NotInTree(v(2))));
        t.rewire(v(0), v(1), 1.0, &cv(&[1., 0., 0.]));
        t.rewire(v(1), v(2), 1.0, &cv(&[1., 0., 0.]));
        assert_eq!(extract_path(&t, v(2)).unwrap(), vec![v(0), v(1), v(2)]);
    }

    #[test]
    fn queue_tie_break_by_child() {
        let mut q = EdgeQueue::new(Comparison::WorstClass);
        let key = QueueKey {
            k1: cv(&[1.]),
            k2: cv(&[1.]),
            k3: 1.0,
            k4: 1.0,
        };
        q.push(v(0), v(5), None, key.clone());
        q.push(v(0), v(2), None, key);
        assert_eq!(q.pop().unwrap().child, v(2));
    }
}
