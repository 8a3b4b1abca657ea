//! Comparison algorithms: a static iterated local search on the averaged
//! graph, the fastest path, and re-evaluation of static paths in time.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ArcId, Query, TdGraph, TimedPath};
use crate::par::Execution;
use crate::router::td_fastest_path;
use crate::solver::{PhaseStats, Skeleton, SolverConfig};

pub const DEFAULT_ITERATIONS: usize = 200;
pub const DELETION_PROBABILITY: f64 = 0.3;
/// Iterations a deleted arc stays ineligible for reinsertion.
const TABU_TENURE: usize = 5;

/// Iterated local search on a static graph (see [`TdGraph::staticize`]).
///
/// Starts from the fastest path. Each iteration inserts best-ratio arcs
/// until none fits the budget, exactly as [`solve`](crate::solve) does, then
/// with probability [`DELETION_PROBABILITY`] deletes a random inserted arc,
/// which stays ineligible for a few iterations. Returns the best path seen,
/// by value on `g_static`, so one iteration gives the RecInsert result.
pub fn static_aop(g_static: &TdGraph, q: &Query, iterations: usize, seed: u64) -> Result<TimedPath> {
    q.validate(g_static)?;
    let cfg = SolverConfig {
        execution: Execution::Sequential,
        ..SolverConfig::default()
    };
    let started = Instant::now();
    let mut sk = Skeleton::start(g_static, q).ok_or(Error::Infeasible)?;
    let mut best_value = sk.path.value(g_static);
    let mut best = sk.path.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tabu: Vec<(ArcId, usize)> = Vec::new();
    // The skeleton is already a local optimum for the current tabu list.
    let mut settled = false;

    for it in 0..iterations {
        let before = tabu.len();
        tabu.retain(|&(_, until)| until > it);
        settled &= tabu.len() == before;
        if !settled {
            let mut excluded = vec![false; g_static.arc_count()];
            for &(a, _) in &tabu {
                excluded[a.index()] = true;
            }
            sk = sk.greedy(g_static, &cfg, &mut excluded, started, &mut PhaseStats::default())?;
            settled = true;
            let value = sk.path.value(g_static);
            if value > best_value {
                best_value = value;
                best = sk.path.clone();
            }
        }
        if !sk.arcs.is_empty() && rng.gen_bool(DELETION_PROBABILITY) {
            let i = rng.gen_range(0..sk.arcs.len());
            let arc = sk.arcs[i];
            if let Some(next) = sk.remove(g_static, i) {
                sk = next;
                tabu.push((arc, it + 1 + TABU_TENURE));
                settled = false;
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    Valid,
    /// Arrival misses the deadline by `excess` seconds.
    Invalid { excess: f64 },
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}

/// Re-evaluates `p` on the time-dependent graph departing at `q.t0`.
pub fn td_revalidate(g: &TdGraph, p: &TimedPath, q: &Query) -> Result<Validity> {
    let p = p.reevaluate(g, q.t0)?;
    let excess = p.arrival() - q.deadline();
    Ok(if excess > 0.0 {
        Validity::Invalid { excess }
    } else {
        Validity::Valid
    })
}

/// The time-dependent fastest path, if it fits the budget.
pub fn fastest(g: &TdGraph, q: &Query) -> Result<TimedPath> {
    q.validate(g)?;
    match td_fastest_path(g, q.source, q.destination, q.t0)? {
        Some(p) if p.arrival() <= q.deadline() => Ok(p),
        _ => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, V0, V1, V2, V6, VN};
    use crate::graph::GraphBuilder;
    use crate::profile::StepProfile;

    #[test]
    fn zero_iterations_is_the_static_fastest_path() {
        let g = fixtures::worked_example_with_value().staticize();
        let q = Query::new(V0, VN, 0.0, 4.0);
        let p = static_aop(&g, &q, 0, 1).unwrap();
        assert_eq!(p, td_fastest_path(&g, V0, VN, 0.0).unwrap().unwrap());
    }

    #[test]
    fn zero_values_stay_on_the_fastest_path() {
        let g = fixtures::worked_example().staticize();
        let q = Query::new(V0, VN, 0.0, 4.0);
        let p = static_aop(&g, &q, 50, 3).unwrap();
        assert_eq!(p, td_fastest_path(&g, V0, VN, 0.0).unwrap().unwrap());
    }

    #[test]
    fn static_search_finds_the_value() {
        // Averaged, V2 -> V6 carries 2.5 at any time and V4 -> VN takes 2.5.
        let g = fixtures::worked_example_with_value().staticize();
        let q = Query::new(V0, VN, 0.0, 4.0);
        let p = static_aop(&g, &q, 10, 0).unwrap();
        assert_eq!(p.vertices(&g), vec![V0, V1, V2, V6, VN]);
        assert_eq!(p.value(&g), 2.5);
        assert!(p.is_feasible(&g, &q));
        assert_eq!(static_aop(&g, &q, 10, 0).unwrap(), p);
    }

    #[test]
    fn one_iteration_is_recinsert() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let g = fixtures::random_instance(
                fixtures::RandomGraphOptions {
                    vertices: 12,
                    windows: 1,
                    arc_probability: 0.3,
                    value_probability: 0.5,
                    fifo: true,
                    step: 10.0,
                },
                &mut rng,
            );
            let q = Query::new(0usize, 7usize, 0.0, 40.0);
            let Ok(r) = crate::solve(&g, &q, &SolverConfig::default()) else { continue };
            assert_eq!(static_aop(&g, &q, 1, 9).unwrap(), r.path);
            assert!(static_aop(&g, &q, 30, 9).unwrap().value(&g) >= r.value);
        }
    }

    /// One arc whose averaged time is 22 but that takes 37 in the rush hour.
    fn rush_hour() -> TdGraph {
        let mut b = GraphBuilder::new(3);
        let c = |x| StepProfile::constant(x).unwrap();
        b.add_arc(0usize, 1usize, StepProfile::new(60.0, vec![7.0, 37.0]).unwrap(), c(0.0));
        b.add_arc(1usize, 2usize, c(0.0001), c(0.0));
        b.build().unwrap()
    }

    #[test]
    fn congestion_invalidates_the_static_path() {
        let g = rush_hour();
        let gs = g.staticize();
        assert_eq!(gs.arc(ArcId(0)).tt.at(0.0), 22.0);
        let q = Query::new(0usize, 2usize, 65.0, 30.0);
        let p = static_aop(&gs, &q, 0, 0).unwrap();
        assert!(p.is_feasible(&gs, &q));
        match td_revalidate(&g, &p, &q).unwrap() {
            Validity::Invalid { excess } => assert!((excess - 7.0001).abs() < 1e-9),
            v => panic!("expected invalid, got {v:?}"),
        }
        // Leaving before the rush hour the same path is fine.
        let early = Query::new(0usize, 2usize, 0.0, 30.0);
        assert_eq!(td_revalidate(&g, &p, &early).unwrap(), Validity::Valid);
    }

    #[test]
    fn fastest_respects_the_budget() {
        let g = fixtures::worked_example();
        assert_eq!(fastest(&g, &Query::new(V0, VN, 0.0, 4.0)).unwrap().travel_time(), 3.0);
        assert!(matches!(fastest(&g, &Query::new(V0, VN, 0.0, 2.0)), Err(Error::Infeasible)));
    }
}
