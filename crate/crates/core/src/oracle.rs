//! Exact solver for small instances: depth-first enumeration of simple paths
//! with reachability and value-bound pruning.
//!
//! Both prunes are sound on non-FIFO profiles. The reachability prune uses
//! latest-departure labels computed with a zero boundary adjustment, which
//! upper-bound every feasible departure. The value bound adds, for every arc
//! still usable, its best value over the windows in which it could still be
//! entered: no earlier than the current time plus the static minimum travel
//! time to its tail, no later than the tail's latest departure.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{ArcId, Query, TdGraph, TimedPath, VertexId};
use crate::reach::{backward, Backward, ReachLabels};

/// Above this many vertices the value bound only uses distances from the
/// source instead of all pairs.
const ALL_PAIRS_LIMIT: usize = 1_000;

/// Which paths count as candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimpleMode {
    /// No vertex is visited twice.
    #[default]
    Vertex,
    /// No arc is traversed twice; vertices may repeat.
    Arc,
}

#[derive(Debug, Clone, Default)]
pub struct OracleConfig {
    pub mode: SimpleMode,
    /// Abort after expanding this many search nodes.
    pub node_limit: Option<u64>,
    /// A feasible path to start from, e.g. a heuristic solution.
    pub incumbent: Option<TimedPath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal_value: f64,
    pub optimal_path: TimedPath,
    pub explored_nodes: u64,
    pub wall_time: Duration,
}

/// Exact optimum over vertex-simple paths.
pub fn exact_solve(g: &TdGraph, q: &Query, node_limit: Option<u64>) -> Result<OracleResult> {
    exact_solve_with(
        g,
        q,
        &OracleConfig {
            node_limit,
            ..OracleConfig::default()
        },
    )
}

pub fn exact_solve_with(g: &TdGraph, q: &Query, cfg: &OracleConfig) -> Result<OracleResult> {
    let started = Instant::now();
    q.validate(g)?;
    let deadline = q.deadline();
    let ld = backward(
        g,
        q.destination,
        deadline,
        Backward {
            t0: q.t0,
            epsilon: 0.0,
            eald: None,
            fwest: None,
            scope: None,
        },
    );

    let incumbent = match &cfg.incumbent {
        Some(p) => {
            let p = p.reevaluate(g, q.t0)?;
            if p.origin() != q.source || !p.is_feasible(g, q) {
                return Err(Error::Config("initial incumbent is not a feasible path".into()));
            }
            if cfg.mode == SimpleMode::Vertex && !p.is_vertex_simple(g) || !p.is_arc_simple() {
                return Err(Error::Config("initial incumbent is not simple in the requested mode".into()));
            }
            Some((p.value(g), p.arcs().to_vec()))
        }
        None => None,
    };

    let n = g.vertex_count();
    let valued: Vec<ArcId> = g
        .arc_ids()
        .filter(|&a| g.arc(a).val.max() > 0.0 && ld.ld(g.arc(a).tail).is_some())
        .collect();
    let min_tt = if n <= ALL_PAIRS_LIMIT {
        MinTravel::AllPairs(g.vertices().map(|v| static_distances(g, v)).collect())
    } else {
        MinTravel::FromSource(static_distances(g, q.source))
    };

    let mut dfs = Dfs {
        g,
        ld: &ld,
        deadline,
        dest: q.destination,
        mode: cfg.mode,
        node_limit: cfg.node_limit,
        valued,
        min_tt,
        t0: q.t0,
        used_vertex: vec![false; n],
        used_arc: vec![false; g.arc_count()],
        stack: Vec::new(),
        best: incumbent,
        nodes: 0,
        aborted: false,
    };
    dfs.used_vertex[q.source.index()] = true;
    dfs.visit(q.source, q.t0, 0.0);

    let nodes = dfs.nodes;
    let best = dfs.best.take();
    let to_result = |(value, arcs): (f64, Vec<ArcId>)| -> Result<OracleResult> {
        Ok(OracleResult {
            optimal_value: value,
            optimal_path: TimedPath::evaluate(g, q.source, q.t0, arcs)?,
            explored_nodes: nodes,
            wall_time: started.elapsed(),
        })
    };
    if dfs.aborted {
        return Err(Error::NodeLimitExceeded {
            limit: cfg.node_limit.unwrap_or(0),
            incumbent: best.map(to_result).transpose()?.map(Box::new),
        });
    }
    match best {
        Some(b) => to_result(b),
        None => Err(Error::Infeasible),
    }
}

enum MinTravel {
    AllPairs(Vec<Vec<f64>>),
    FromSource(Vec<f64>),
}

/// Dijkstra on each arc's smallest window travel time.
fn static_distances(g: &TdGraph, from: VertexId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[from.index()] = 0.0;
    heap.push(Reverse((Ordered(0.0), from.0)));
    while let Some(Reverse((Ordered(d), v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &a in g.out_arcs(VertexId(v)) {
            let arc = g.arc(a);
            let nd = d + arc.tt.min();
            if nd < dist[arc.head.index()] {
                dist[arc.head.index()] = nd;
                heap.push(Reverse((Ordered(nd), arc.head.0)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Dfs<'a> {
    g: &'a TdGraph,
    ld: &'a ReachLabels,
    deadline: f64,
    dest: VertexId,
    mode: SimpleMode,
    node_limit: Option<u64>,
    valued: Vec<ArcId>,
    min_tt: MinTravel,
    t0: f64,
    used_vertex: Vec<bool>,
    used_arc: Vec<bool>,
    stack: Vec<ArcId>,
    best: Option<(f64, Vec<ArcId>)>,
    nodes: u64,
    aborted: bool,
}

impl Dfs<'_> {
    fn visit(&mut self, v: VertexId, t: f64, value: f64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.node_limit.is_some_and(|limit| self.nodes > limit) {
            self.aborted = true;
            return;
        }
        if v == self.dest && self.best.as_ref().is_none_or(|(b, _)| value > *b) {
            self.best = Some((value, self.stack.clone()));
        }
        if let Some((best, _)) = &self.best {
            if self.value_bound(v, t, value) <= *best {
                return;
            }
        }
        let g = self.g;
        for &a in g.out_arcs(v) {
            let arc = g.arc(a);
            let w = arc.head;
            let blocked = match self.mode {
                SimpleMode::Vertex => self.used_vertex[w.index()],
                SimpleMode::Arc => self.used_arc[a.index()],
            };
            if blocked {
                continue;
            }
            let next = t + arc.tt.at(t);
            if next > self.deadline || self.ld.ld(w).is_none_or(|l| next > l) {
                continue;
            }
            let gain = arc.val.at(t);
            self.used_arc[a.index()] = true;
            let first_visit = !self.used_vertex[w.index()];
            self.used_vertex[w.index()] = true;
            self.stack.push(a);
            self.visit(w, next, value + gain);
            self.stack.pop();
            if first_visit {
                self.used_vertex[w.index()] = false;
            }
            self.used_arc[a.index()] = false;
            if self.aborted {
                return;
            }
        }
    }

    /// Upper bound on the value of any completion of the current path.
    fn value_bound(&self, v: VertexId, t: f64, value: f64) -> f64 {
        let g = self.g;
        let mut bound = value;
        for &a in &self.valued {
            let arc = g.arc(a);
            let usable = match self.mode {
                SimpleMode::Vertex => {
                    !self.used_vertex[arc.head.index()]
                        && (arc.tail == v || !self.used_vertex[arc.tail.index()])
                }
                SimpleMode::Arc => !self.used_arc[a.index()],
            };
            if !usable {
                continue;
            }
            let earliest = match &self.min_tt {
                MinTravel::AllPairs(d) => t + d[v.index()][arc.tail.index()],
                MinTravel::FromSource(d) => self.t0 + d[arc.tail.index()],
            };
            let Some(latest) = self.ld.ld(arc.tail) else {
                continue;
            };
            if earliest <= latest {
                bound += arc.val.max_over(earliest, latest);
            }
        }
        bound
    }
}
