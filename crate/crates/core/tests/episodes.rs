use std::sync::Arc;

use coa_core::render::{render_svg, Scene};
use coa_core::sim::{run_episode, run_episode_observed, EpisodeParams, Outcome, Planner};
use coa_core::worlds::{parse_world_spec, World, WorldSpec};

fn load(text: &str, seed: u64) -> (Arc<World>, WorldSpec) {
    let spec = parse_world_spec(text).unwrap();
    (Arc::new(World::build(&spec, Some(seed)).unwrap()), spec)
}

const GRID: &str = "world grid\nsize 20 20\nrandom-obstacles 14 0.8 2.5\nstart 1 1\ngoal 18 18\nsensor 3\n";
const ARM: &str =
    "world arm\njoints 3 12\nlinks 1.0 0.8 0.6\nrandom-obstacles 6 0.25 0.5\nstart 0 0 0\ngoal 6 0 0\nsensor 0.8\n";

#[test]
fn executed_edges_are_always_free() {
    for (text, seeds) in [(GRID, 1..9), (ARM, 1..4)] {
        for seed in seeds {
            let spec = parse_world_spec(text).unwrap();
            let Ok(world) = World::build(&spec, Some(seed)) else {
                continue;
            };
            let world = Arc::new(world);
            for planner in [Planner::Coa, Planner::AStar] {
                let params = EpisodeParams {
                    planner,
                    ..Default::default()
                };
                let log = run_episode(&world, &spec, "w", seed, &params).unwrap();
                for pair in log.trajectory.windows(2) {
                    let e = world.topology().find_edge(pair[0], pair[1]).unwrap();
                    assert!(
                        world.ground_truth_feasible(e),
                        "seed {seed} {planner}: executed blocked edge"
                    );
                }
                assert!(log.records.iter().all(|r| (0.0..=1.0).contains(&r.unc_ratio)));
                if log.outcome == Outcome::ReachedGoal {
                    assert_eq!(log.trajectory.last(), Some(&world.goal()));
                }
            }
        }
    }
}

#[test]
fn a_known_free_grid_plan_stays_free() {
    for seed in 1..9 {
        let (world, spec) = load(GRID, seed);
        let log = run_episode(&world, &spec, "grid", seed, &EpisodeParams::default()).unwrap();
        let first_known = log
            .records
            .iter()
            .position(|r| r.counts[1] == 0 && r.counts[2] == 0 && r.all_sensed);
        if let Some(k) = first_known {
            for r in &log.records[k..] {
                assert_eq!(
                    (r.counts[1], r.counts[2]),
                    (0, 0),
                    "seed {seed}: replan at step {} left known space",
                    r.step
                );
            }
        }
    }
}

#[test]
fn paired_arm_episodes_have_no_dominance_violations() {
    for seed in 1..4 {
        let (world, spec) = load(ARM, seed);
        let params = EpisodeParams {
            paired: true,
            ..Default::default()
        };
        let log = run_episode(&world, &spec, "arm", seed, &params).unwrap();
        assert_eq!(log.meta.dominance_violations, 0);
        assert_eq!(log.records.len(), 2 * log.meta.plans);
    }
}

#[test]
fn episodes_repeat_exactly() {
    let (world, spec) = load(ARM, 2);
    let a = run_episode(&world, &spec, "arm", 2, &EpisodeParams::default()).unwrap();
    let (world, spec) = load(ARM, 2);
    let b = run_episode(&world, &spec, "arm", 2, &EpisodeParams::default()).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.trajectory, b.trajectory);
}

#[test]
fn snapshots_render_the_same_twice() {
    let (world, spec) = load(GRID, 3);
    let render = || {
        let mut pictures = Vec::new();
        run_episode_observed(&world, &spec, "grid", 3, &EpisodeParams::default(), |snap| {
            if snap.plan_index < 3 {
                pictures.push(render_svg(&Scene::from(snap)).unwrap());
            }
        })
        .unwrap();
        pictures
    };
    let first = render();
    assert!(!first.is_empty());
    assert_eq!(first, render());
    assert!(first[0].contains("stroke-dasharray"));
}
