//! Shared fixtures for the planner benchmarks.

use std::sync::Arc;

use coa_core::random_graph::{random_instance, RandomGraphParams, RandomInstance};
use coa_core::worlds::{parse_world_spec, Belief, World, WorldSpec};
use coa_core::ColoredGraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const OPEN_GRID: &str = "world grid\nsize 50 50\nstart 0 0\ngoal 49 49\nsensor 5\n";

pub const CLUTTERED_GRID: &str =
    "world grid\nsize 40 40\nseed 11\nrandom-obstacles 30 1.0 3.0\nstart 1 1\ngoal 38 38\nsensor 4\n";

pub const THREE_LINK_ARM: &str = "world arm\njoints 3 16\nlinks 1.0 0.8 0.6\nseed 21\nrandom-obstacles 8 0.25 0.5\nstart 0 0 0\ngoal 8 0 0\nsensor 1.0\n";

pub struct Scenario {
    pub world: Arc<World>,
    pub spec: WorldSpec,
    pub belief: Belief,
}

impl Scenario {
    /// The world as first sensed from its start.
    pub fn at_start(text: &str) -> Scenario {
        let spec = parse_world_spec(text).expect("bench world parses");
        let world = Arc::new(World::build(&spec, None).expect("bench world builds"));
        let mut belief = world.initial_belief(spec.sensor_radius);
        world.sense(&mut belief, world.start());
        Scenario { world, spec, belief }
    }

    pub fn fully_known(text: &str) -> Scenario {
        let mut s = Scenario::at_start(text);
        s.belief = s.world.full_belief();
        s
    }

    /// A belief graph with nothing evaluated yet.
    pub fn graph(&self) -> ColoredGraph {
        self.world.belief_graph(&self.belief)
    }
}

pub fn random_graphs(seed: u64, count: usize) -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_instance(&mut rng, &RandomGraphParams::default()))
        .collect()
}
