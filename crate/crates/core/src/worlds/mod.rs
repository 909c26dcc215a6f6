//! Ground-truth environments and the agent's belief about them.
//!
//! Two worlds are provided: an 8-connected grid for a point robot and an
//! n-joint planar arm on a wrapping joint lattice. Both keep a workspace
//! bitmap of ground-truth occupancy. The belief marks which bitmap cells have
//! been sensed and derives vertex classes from it: sensed free is 1,
//! unsensed is 2, sensed occupied is 3.

mod arm;
mod geometry;
mod grid;
mod spec;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::Arc;

pub use arm::{ArmMetric, ArmWorld};
pub use geometry::{dist, segment_distance, Circle, Point, Raster};
pub use grid::GridWorld;
pub use spec::{parse_world_spec, WorldKind, WorldSpec};

use crate::error::Result;
use crate::graph::{ClassId, ColoredGraph, EdgeEval, EdgeEvaluator, EdgeId, Topology, VertexId};

#[derive(Debug)]
pub enum World {
    Grid(GridWorld),
    Arm(ArmWorld),
}

/// What the agent knows: sensed cells, cached vertex classes and edges found
/// blocked during execution.
#[derive(Clone, Debug)]
pub struct Belief {
    sensor_radius: f64,
    known: Vec<bool>,
    classes: Vec<ClassId>,
    blocked: BTreeSet<EdgeId>,
    /// Edge classes that further sensing cannot change (1 or 3), shared by
    /// every later belief of the same episode.
    settled: Arc<Vec<AtomicU8>>,
}

impl PartialEq for Belief {
    fn eq(&self, other: &Self) -> bool {
        self.sensor_radius == other.sensor_radius
            && self.known == other.known
            && self.classes == other.classes
            && self.blocked == other.blocked
    }
}

impl Belief {
    pub fn sensor_radius(&self) -> f64 {
        self.sensor_radius
    }

    pub fn known_mask(&self) -> &[bool] {
        &self.known
    }

    pub fn known_count(&self) -> usize {
        self.known.iter().filter(|&&k| k).count()
    }

    pub fn vertex_class(&self, v: VertexId) -> ClassId {
        self.classes[v.index()]
    }

    pub fn vertex_classes(&self) -> &[ClassId] {
        &self.classes
    }

    /// A vertex counts as sensed once its class no longer depends on
    /// unsensed cells.
    pub fn is_sensed(&self, v: VertexId) -> bool {
        self.classes[v.index()] != ClassId::UNKNOWN
    }

    pub fn is_blocked(&self, e: EdgeId) -> bool {
        self.blocked.contains(&e)
    }

    pub fn blocked_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.blocked.iter().copied()
    }

    /// Returns whether the edge was newly marked.
    pub fn mark_blocked(&mut self, e: EdgeId) -> bool {
        self.blocked.insert(e)
    }
}

impl World {
    pub fn build(spec: &WorldSpec, seed: Option<u64>) -> Result<World> {
        let seed = seed.unwrap_or(spec.seed);
        match spec.kind {
            WorldKind::Grid => GridWorld::from_spec(spec, seed).map(World::Grid),
            WorldKind::Arm => ArmWorld::from_spec(spec, seed).map(World::Arm),
        }
    }

    pub fn kind(&self) -> WorldKind {
        match self {
            World::Grid(_) => WorldKind::Grid,
            World::Arm(_) => WorldKind::Arm,
        }
    }

    pub fn topology(&self) -> &Arc<Topology> {
        match self {
            World::Grid(w) => &w.topology,
            World::Arm(w) => &w.topology,
        }
    }

    pub fn start(&self) -> VertexId {
        match self {
            World::Grid(w) => w.start,
            World::Arm(w) => w.start,
        }
    }

    pub fn goal(&self) -> VertexId {
        match self {
            World::Grid(w) => w.goal,
            World::Arm(w) => w.goal,
        }
    }

    pub fn raster(&self) -> &Raster {
        match self {
            World::Grid(w) => &w.raster,
            World::Arm(w) => &w.raster,
        }
    }

    /// Ground-truth occupancy of each raster cell.
    pub fn occupancy(&self) -> &[bool] {
        match self {
            World::Grid(w) => &w.occupied,
            World::Arm(w) => &w.occupied,
        }
    }

    /// Workspace point drawn for a vertex: the cell center or the arm's
    /// end effector.
    pub fn workspace_point(&self, v: VertexId) -> Point {
        match self {
            World::Grid(w) => w.center(v),
            World::Arm(w) => *w.chain(v).last().expect("arm has links"),
        }
    }

    fn sensed_cells(&self, v: VertexId, radius: f64, visit: impl FnMut(usize)) {
        match self {
            World::Grid(w) => w.raster.disc(w.center(v), radius, visit),
            World::Arm(w) => w.sensed_cells(v, radius, visit),
        }
    }

    pub fn classify_vertex(&self, known: &[bool], v: VertexId) -> ClassId {
        match self {
            World::Grid(w) => w.classify_vertex(known, v),
            World::Arm(w) => w.classify_vertex(known, v),
        }
    }

    /// True weight and believed class of an edge.
    pub fn classify_edge(&self, belief: &Belief, e: EdgeId) -> EdgeEval {
        let [u, v] = self.topology().endpoints(e);
        let weight = self.topology().distance(u, v);
        if belief.is_blocked(e) {
            return EdgeEval {
                weight,
                class: ClassId::INFEASIBLE,
            };
        }
        let settled = &belief.settled[e.index()];
        if let Some(class) = ClassId::new(settled.load(Ordering::Relaxed) as usize) {
            return EdgeEval { weight, class };
        }
        let ends = belief.vertex_class(u).max(belief.vertex_class(v));
        let class = match self {
            World::Grid(_) => ends,
            World::Arm(_) if ends == ClassId::INFEASIBLE => ends,
            World::Arm(w) => ends.max(w.classify_interior(&belief.known, u, v)),
        };
        if class != ClassId::UNKNOWN {
            settled.store(class.get(), Ordering::Relaxed);
        }
        EdgeEval { weight, class }
    }

    /// Whether the edge is collision free at dense resolution.
    pub fn ground_truth_feasible(&self, e: EdgeId) -> bool {
        let [u, v] = self.topology().endpoints(e);
        match self {
            World::Grid(w) => w.free(u) && w.free(v),
            World::Arm(w) => w.edge_free(u, v),
        }
    }

    fn settled_cache(&self) -> Arc<Vec<AtomicU8>> {
        Arc::new((0..self.topology().edge_count()).map(|_| AtomicU8::new(0)).collect())
    }

    pub fn initial_belief(&self, sensor_radius: f64) -> Belief {
        let known = vec![false; self.raster().len()];
        let classes = (0..self.topology().vertex_count())
            .map(|i| self.classify_vertex(&known, VertexId::from(i)))
            .collect();
        Belief {
            sensor_radius,
            known,
            classes,
            blocked: BTreeSet::new(),
            settled: self.settled_cache(),
        }
    }

    /// Everything sensed.
    pub fn full_belief(&self) -> Belief {
        let known = vec![true; self.raster().len()];
        let classes = (0..self.topology().vertex_count())
            .map(|i| self.classify_vertex(&known, VertexId::from(i)))
            .collect();
        Belief {
            sensor_radius: f64::INFINITY,
            known,
            classes,
            blocked: BTreeSet::new(),
            settled: self.settled_cache(),
        }
    }

    /// Marks every cell within the sensor radius of the agent as known and
    /// reclassifies the vertices that were unknown. The grid senses from its
    /// cell center, the arm from every point on its links. Returns whether
    /// the belief changed.
    pub fn sense(&self, belief: &mut Belief, at: VertexId) -> bool {
        let mut fresh = false;
        let known = &mut belief.known;
        self.sensed_cells(at, belief.sensor_radius, |c| {
            if !known[c] {
                known[c] = true;
                fresh = true;
            }
        });
        if !fresh {
            return false;
        }
        for i in 0..belief.classes.len() {
            if belief.classes[i] == ClassId::UNKNOWN {
                belief.classes[i] = self.classify_vertex(&belief.known, VertexId::from(i));
            }
        }
        true
    }

    /// Colored graph over the belief; edges are classified on demand.
    pub fn belief_graph(self: &Arc<Self>, belief: &Belief) -> ColoredGraph {
        let evaluator = BeliefEvaluator {
            world: Arc::clone(self),
            belief: Arc::new(belief.clone()),
        };
        ColoredGraph::new(Arc::clone(self.topology()), belief.classes.clone(), 3, 3)
            .expect("world classes are within 1..=3")
            .with_evaluator(Arc::new(evaluator))
    }
}

struct BeliefEvaluator {
    world: Arc<World>,
    belief: Arc<Belief>,
}

impl EdgeEvaluator for BeliefEvaluator {
    fn evaluate(&self, edge: EdgeId, _: VertexId, _: VertexId) -> std::result::Result<EdgeEval, String> {
        Ok(self.world.classify_edge(&self.belief, edge))
    }
}
