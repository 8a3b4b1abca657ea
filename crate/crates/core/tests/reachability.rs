mod common;

use common::{brute_earliest_arrival, can_reach_by, instance, vertices_on_feasible_paths};
use proptest::prelude::*;
use tdaop::fixtures::{self, V0, V1, V2, V3, V4, V5, V6, VN};
use tdaop::harness::{generate, GenSpec, NetworkKind};
use tdaop::reach::DEFAULT_EPSILON as EPS;
use tdaop::{bwr, fwest_bound, fwr, intersect, PruneConfig, Query, ReachLabels, TdGraph, VertexId};

fn unpruned() -> PruneConfig {
    PruneConfig::none()
}

#[test]
fn fixture_forward_and_backward() {
    let g = fixtures::worked_example();
    let f = fwr(&g, V0, 0.0, 4.0, &unpruned(), None).unwrap();
    assert_eq!(f.ea(V1), Some(1.0));
    assert_eq!(f.ea(VN), Some(3.0));
    assert_eq!(f.ea(V5), None);
    let b = bwr(&g, VN, 0.0, 4.0, &unpruned(), None).unwrap();
    assert_eq!(b.ld(V6), Some(3.0));
    assert_eq!(b.ld(V4), Some(2.0 - EPS));
    let both = intersect(&f, &b);
    assert_eq!(both.members(), vec![V0, V1, V2, V4, V6, VN]);
    assert!(!both.contains(V3) && !both.contains(V5));
}

#[test]
fn forward_matches_enumeration_on_fifo_graphs() {
    for seed in 0..40 {
        let g = instance(seed, 15, 3, true);
        assert!(g.is_fifo());
        let (s, t0, deadline) = (VertexId((seed % 15) as u32), 3.0 + seed as f64, 45.0 + seed as f64);
        let f = fwr(&g, s, t0, deadline, &unpruned(), None).unwrap();
        let brute = brute_earliest_arrival(&g, s, t0, deadline);
        for v in g.vertices() {
            assert_eq!(f.ea(v), brute[v.index()], "seed {seed} vertex {v}");
        }
    }
}

#[test]
fn backward_labels_are_latest_departures() {
    for seed in 0..40 {
        let g = instance(100 + seed, 12, 3, true);
        let dest = VertexId((seed % 12) as u32);
        let (t0, latest) = (2.0, 40.0);
        let b = bwr(&g, dest, t0, latest, &unpruned(), None).unwrap();
        for v in g.vertices() {
            match b.ld(v) {
                Some(ld) => {
                    assert!(ld >= t0 && ld <= latest);
                    assert!(can_reach_by(&g, v, ld, dest, latest), "seed {seed}: {v} can not leave at {ld}");
                    // Nothing departing later works, in particular nothing
                    // at the next window boundaries.
                    let mut later = vec![ld + 2.0 * EPS];
                    later.extend((0..6).map(|k| k as f64 * 10.0).filter(|&t| t > ld + 2.0 * EPS && t <= latest));
                    for d in later {
                        assert!(!can_reach_by(&g, v, d, dest, latest), "seed {seed}: {v} leaves at {d} > {ld}");
                    }
                }
                None => {
                    for k in 0..=((latest - t0) as usize) {
                        let d = t0 + k as f64;
                        assert!(!can_reach_by(&g, v, d, dest, latest), "seed {seed}: unlabelled {v} leaves at {d}");
                    }
                }
            }
        }
    }
}

#[test]
fn every_feasible_path_stays_in_the_intersection() {
    for seed in 0..30 {
        let g = instance(200 + seed, 12, 3, false);
        let q = Query::new(0usize, 11usize, 1.0, 45.0);
        let f = fwr(&g, q.source, q.t0, q.deadline(), &unpruned(), None).unwrap();
        let b = bwr(&g, q.destination, q.t0, q.deadline(), &unpruned(), None).unwrap();
        let both = intersect(&f, &b);
        let on = vertices_on_feasible_paths(&g, &q);
        for v in g.vertices() {
            if on[v.index()] {
                assert!(both.contains(v), "seed {seed}: {v} is on a feasible path");
            }
        }
    }
}

fn labels(g: &TdGraph, q: &Query, cfg: &PruneConfig) -> (ReachLabels, ReachLabels, ReachLabels) {
    let f = fwr(g, q.source, q.t0, q.deadline(), cfg, Some(q.destination)).unwrap();
    let b = bwr(g, q.destination, q.t0, q.deadline(), cfg, Some(&f)).unwrap();
    let i = intersect(&f, &b);
    (f, b, i)
}

fn same_intersection(a: &ReachLabels, b: &ReachLabels) -> bool {
    a.members() == b.members() && a.members().iter().all(|&v| a.ea(v) == b.ea(v) && a.ld(v) == b.ld(v))
}

#[test]
fn pruning_keeps_the_intersection_on_fifo_graphs() {
    for seed in 0..40 {
        let g = instance(300 + seed, 15, 3, true);
        let q = Query::new(VertexId((seed % 7) as u32), 14usize, 5.0, 50.0);
        let (_, _, base) = labels(&g, &q, &unpruned());
        for (name, cfg) in PruneConfig::ablation() {
            let (_, _, pruned) = labels(&g, &q, &cfg);
            assert!(same_intersection(&base, &pruned), "seed {seed} config {name}");
        }
    }
}

#[test]
fn forward_estimation_is_sound_on_any_graph() {
    for seed in 0..40 {
        let g = instance(400 + seed, 15, 4, false);
        let q = Query::new(0usize, 14usize, 5.0, 50.0);
        let (_, _, base) = labels(&g, &q, &unpruned());
        let (_, _, pruned) = labels(&g, &q, &PruneConfig::fwest_only());
        assert!(same_intersection(&base, &pruned), "seed {seed}");
    }
}

#[test]
fn pruning_visits_fewer_vertices_on_a_road_network() {
    let g = generate(&GenSpec {
        kind: NetworkKind::Grid,
        vertex_count: 900,
        window_count_tt: 48,
        seed: 11,
        ..GenSpec::default()
    })
    .unwrap();
    let q = Query::new(0usize, 31usize, 30_000.0, 900.0);
    let (f0, b0, i0) = labels(&g, &q, &unpruned());
    let (f1, b1, i1) = labels(&g, &q, &PruneConfig::both());
    assert!(same_intersection(&i0, &i1));
    assert!(f1.visited_forward + b1.visited_backward < f0.visited_forward + b0.visited_backward);
}

#[test]
fn forward_estimate_is_a_lower_bound_on_a_grid() {
    let g = generate(&GenSpec {
        kind: NetworkKind::Grid,
        vertex_count: 400,
        window_count_tt: 24,
        seed: 5,
        ..GenSpec::default()
    })
    .unwrap();
    let t0 = 28_800.0;
    let target = VertexId(399);
    let f = fwr(&g, VertexId(0), t0, f64::INFINITY, &unpruned(), None).unwrap();
    let to_target = fwr(&g, VertexId(0), t0, f64::INFINITY, &unpruned(), None).unwrap().ea(target).unwrap();
    for v in g.vertices() {
        let ea = f.ea(v).unwrap();
        assert_eq!(fwest_bound(&g, v, v, ea).unwrap(), ea);
        // From v the target can not be reached faster than straight-line at full speed.
        let from_v = fwr(&g, v, ea, f64::INFINITY, &unpruned(), None).unwrap().ea(target).unwrap();
        assert!(fwest_bound(&g, v, target, ea).unwrap() <= from_v + 1e-9);
    }
    assert!(fwest_bound(&g, VertexId(0), target, t0).unwrap() <= to_target);
}

#[test]
fn zero_budget() {
    let g = instance(9, 10, 3, false);
    let f = fwr(&g, V2, 4.0, 4.0, &unpruned(), None).unwrap();
    assert_eq!(f.forward_vertices(), vec![V2]);
    let b = bwr(&g, V6, 4.0, 4.0, &unpruned(), None).unwrap();
    assert_eq!(b.backward_vertices(), vec![V6]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn larger_budgets_never_shrink_the_label_sets(seed in 0u64..1000, b1 in 0.0f64..40.0, extra in 0.0f64..30.0) {
        let g = instance(seed, 12, 3, false);
        let small_f = fwr(&g, V0, 2.0, 2.0 + b1, &unpruned(), None).unwrap();
        let large_f = fwr(&g, V0, 2.0, 2.0 + b1 + extra, &unpruned(), None).unwrap();
        for v in small_f.forward_vertices() {
            prop_assert!(large_f.ea(v).is_some());
        }
        let small_b = bwr(&g, VN, 2.0, 2.0 + b1, &unpruned(), None).unwrap();
        let large_b = bwr(&g, VN, 2.0, 2.0 + b1 + extra, &unpruned(), None).unwrap();
        for v in small_b.backward_vertices() {
            prop_assert!(large_b.ld(v).is_some());
        }
    }

    #[test]
    fn intersection_labels_are_ordered(seed in 0u64..1000) {
        let g = instance(seed, 12, 3, true);
        let q = Query::new(V4, V1, 3.0, 40.0);
        let (_, _, i) = labels(&g, &q, &PruneConfig::none());
        for v in i.members() {
            prop_assert!(q.t0 <= i.ea(v).unwrap());
            prop_assert!(i.ea(v).unwrap() <= i.ld(v).unwrap());
            prop_assert!(i.ld(v).unwrap() <= q.deadline());
        }
    }
}
