mod common;

use std::cmp::Ordering;

use coa_core::oracle::{oracle_optimal, OracleOptions};
use coa_core::order::path_signature;
use coa_core::random_graph::{random_instance, RandomGraphParams};
use coa_core::worlds::{parse_world_spec, World};
use coa_core::{coa_star, Accumulation, ClassId, ClassVector, Comparison, EdgeId, OrderMode, SearchOptions, VertexId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const COMPARISONS: [Comparison; 2] = [Comparison::WorstClass, Comparison::ReverseLex];

fn vectors(n: usize, len: usize) -> impl Strategy<Value = Vec<ClassVector>> {
    prop::collection::vec(prop::collection::vec(0u8..4, len), n).prop_map(|vs| {
        vs.iter()
            .map(|v| ClassVector::from_entries(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()))
            .collect()
    })
}

fn sized_vectors(n: usize) -> impl Strategy<Value = Vec<ClassVector>> {
    (1usize..=5).prop_flat_map(move |len| vectors(n, len))
}

fn worst(v: &ClassVector) -> usize {
    v.worst_class().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn comparison_is_a_total_order(vs in sized_vectors(3)) {
        let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
        for cmp in COMPARISONS {
            prop_assert_eq!(a.compare(b, cmp), b.compare(a, cmp).reverse());
            prop_assert_eq!(a.compare(a, cmp), Ordering::Equal);
            if a.compare(b, cmp) != Ordering::Greater && b.compare(c, cmp) != Ordering::Greater {
                prop_assert_ne!(a.compare(c, cmp), Ordering::Greater);
            }
        }
    }

    #[test]
    fn top_is_above_everything(vs in sized_vectors(1)) {
        for cmp in COMPARISONS {
            prop_assert_eq!(vs[0].compare(&ClassVector::top(), cmp), Ordering::Less);
        }
    }

    #[test]
    fn reverse_lex_survives_a_shared_suffix(vs in sized_vectors(3)) {
        let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
        let cmp = Comparison::ReverseLex;
        let (ac, bc) = (a.try_add(c).unwrap(), b.try_add(c).unwrap());
        prop_assert_eq!(a.compare(b, cmp), ac.compare(&bc, cmp));
    }

    #[test]
    fn worst_class_order_survives_a_low_suffix(vs in sized_vectors(3)) {
        let (a, b, c) = (&vs[0], &vs[1], &vs[2]);
        prop_assume!(worst(c) <= worst(a).min(worst(b)));
        let cmp = Comparison::WorstClass;
        if a.compare(b, cmp) == Ordering::Less {
            prop_assert_eq!(a.try_add(c).unwrap().compare(&b.try_add(c).unwrap(), cmp), Ordering::Less);
        }
    }

    #[test]
    fn reverse_lex_refines_worst_class(vs in sized_vectors(2)) {
        let (a, b) = (&vs[0], &vs[1]);
        if a.compare(b, Comparison::WorstClass) == Ordering::Less {
            prop_assert_eq!(a.compare(b, Comparison::ReverseLex), Ordering::Less);
        }
    }

    #[test]
    fn signature_splits_additively(seed in any::<u64>(), cut in 0usize..12) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGraphParams::default());
        let g = &inst.graph;
        let Some((path, _)) = oracle_optimal(g, inst.start, inst.goal, &OracleOptions::default()).unwrap().best else {
            return Ok(());
        };
        let cut = cut % path.len();
        for acc in [Accumulation::Count, Accumulation::Length] {
            let whole = path_signature(&path, g, acc).unwrap();
            let head = path_signature(&path[..=cut], g, acc).unwrap();
            let tail = path_signature(&path[cut..], g, acc).unwrap();
            let joined = head.theta.try_add(&tail.theta).unwrap();
            for (x, y) in whole.theta.entries().unwrap().iter().zip(joined.entries().unwrap()) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
            prop_assert!((whole.length - head.length - tail.length).abs() <= 1e-9);
            prop_assert_eq!(whole.hops, head.hops + tail.hops);
        }
    }

    #[test]
    fn rerouting_through_a_vertex_is_no_better(seed in any::<u64>(), mid in 0usize..12) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGraphParams::default());
        let g = &inst.graph;
        let mid = VertexId::from(mid % g.vertex_count());
        for mode in OrderMode::ALL {
            let opts = OracleOptions { order_mode: mode, ..Default::default() };
            let best = |s, t| oracle_optimal(g, s, t, &opts).unwrap().best.map(|(_, sig)| sig);
            let (Some(direct), Some(a), Some(b)) = (best(inst.start, inst.goal), best(inst.start, mid), best(mid, inst.goal)) else {
                continue;
            };
            let through = a.theta.try_add(&b.theta).unwrap();
            let same = direct.theta.entries().unwrap().iter().zip(through.entries().unwrap()).all(|(x, y)| (x - y).abs() <= 1e-9);
            prop_assert!(same || direct.theta.compare(&through, mode.comparison) != Ordering::Greater);
        }
    }

    #[test]
    fn edge_class_is_at_least_its_endpoints(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGraphParams::default());
        let g = &inst.graph;
        for i in 0..g.edge_count() {
            let e = EdgeId(i as u32);
            let [u, v] = g.endpoints(e);
            let eval = g.evaluate_edge(e).unwrap();
            prop_assert!(eval.class >= g.vertex_class(u).max(g.vertex_class(v)));
            prop_assert!(eval.weight >= g.estimate_edge(e).weight - 1e-9);
            prop_assert_eq!(g.evaluate_edge(e).unwrap(), eval);
        }
        prop_assert_eq!(g.evaluation_count(), g.edge_count());
    }

    #[test]
    fn lowering_an_edge_class_never_hurts(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &RandomGraphParams::default());
        let g = &inst.graph;
        let improvable: Vec<EdgeId> = (0..g.edge_count())
            .map(|i| EdgeId(i as u32))
            .filter(|&e| {
                let [u, v] = g.endpoints(e);
                g.evaluate_edge(e).unwrap().class > g.vertex_class(u).max(g.vertex_class(v))
            })
            .collect();
        prop_assume!(!improvable.is_empty());
        let e = *pick.get(&improvable);
        let lower = ClassId::new(g.evaluate_edge(e).unwrap().class.get() as usize - 1).unwrap();
        let better = common::with_edge_class(g, e, lower);
        for mode in OrderMode::ALL {
            let opts = SearchOptions::with_mode(mode);
            let before = coa_star(&g.fresh_copy(), inst.start, inst.goal, &opts).unwrap();
            let after = coa_star(&better, inst.start, inst.goal, &opts).unwrap();
            if before.found() {
                prop_assert!(after.found());
                prop_assert_ne!(after.signature.theta.compare(&before.signature.theta, mode.comparison), Ordering::Greater);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sensing_only_refines_unknown(seed in 0u64..1000, walk in prop::collection::vec(0usize..400, 1..12), radius in 0.0f64..4.0) {
        let spec = parse_world_spec(&format!("world grid\nsize 20 20\nrandom-obstacles 12 0.5 2.0\nseed {seed}\nstart 0 0\ngoal 19 19\n")).unwrap();
        let Ok(world) = World::build(&spec, None) else {
            return Ok(());
        };
        let mut belief = world.initial_belief(radius);
        for at in walk {
            let before = belief.clone();
            world.sense(&mut belief, VertexId::from(at));
            for (b, a) in before.vertex_classes().iter().zip(belief.vertex_classes()) {
                prop_assert!(*b == ClassId::UNKNOWN || b == a);
            }
            for (b, a) in before.known_mask().iter().zip(belief.known_mask()) {
                prop_assert!(!b || *a);
            }
        }
    }

    #[test]
    fn arm_edge_classes_cover_their_endpoints(seed in 0u64..1000, radius in 0.2f64..2.0, at in 0usize..256) {
        let spec = parse_world_spec(&format!(
            "world arm\njoints 2 16\nlinks 1.0 0.7\nrandom-obstacles 4 0.2 0.4\nseed {seed}\nstart 0 0\ngoal 8 0\n"
        ))
        .unwrap();
        let Ok(world) = World::build(&spec, None) else {
            return Ok(());
        };
        let world = std::sync::Arc::new(world);
        let mut belief = world.initial_belief(radius);
        world.sense(&mut belief, VertexId::from(at));
        let g = world.belief_graph(&belief);
        for i in 0..g.edge_count() {
            let e = EdgeId(i as u32);
            let [u, v] = g.endpoints(e);
            prop_assert!(g.evaluate_edge(e).unwrap().class >= belief.vertex_class(u).max(belief.vertex_class(v)));
        }
        let full = world.full_belief();
        prop_assert!(full.vertex_classes().iter().all(|&c| c != ClassId::UNKNOWN));
    }
}
