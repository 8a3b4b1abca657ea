//! Exhaustive reference implementations for small graphs. None of these
//! share code with the library's searches; they walk every simple path.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdaop::fixtures::{random_instance, RandomGraphOptions};
use tdaop::{ArcId, Query, TdGraph, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with `n` vertices and `windows` windows of width 10.
pub fn instance(seed: u64, n: usize, windows: usize, fifo: bool) -> TdGraph {
    random_instance(
        RandomGraphOptions {
            vertices: n,
            windows,
            arc_probability: 0.25,
            value_probability: 0.5,
            fifo,
            step: 10.0,
        },
        &mut rng(seed),
    )
}

/// Calls `visit(vertex, arrival, arcs)` for the empty path and every
/// vertex-simple path from `source` departing at `t0` that arrives by `deadline`.
pub fn for_each_simple_path(g: &TdGraph, source: VertexId, t0: f64, deadline: f64, mut visit: impl FnMut(VertexId, f64, &[ArcId])) {
    fn go(
        g: &TdGraph,
        v: VertexId,
        t: f64,
        deadline: f64,
        on: &mut Vec<bool>,
        arcs: &mut Vec<ArcId>,
        visit: &mut dyn FnMut(VertexId, f64, &[ArcId]),
    ) {
        visit(v, t, arcs);
        for &a in g.out_arcs(v) {
            let arc = g.arc(a);
            let w = arc.head;
            if on[w.index()] {
                continue;
            }
            let next = t + arc.tt.at(t);
            if next > deadline {
                continue;
            }
            on[w.index()] = true;
            arcs.push(a);
            go(g, w, next, deadline, on, arcs, visit);
            arcs.pop();
            on[w.index()] = false;
        }
    }
    let mut on = vec![false; g.vertex_count()];
    on[source.index()] = true;
    go(g, source, t0, deadline, &mut on, &mut Vec::new(), &mut visit);
}

/// Minimum arrival at every vertex over all simple paths, if within `deadline`.
pub fn brute_earliest_arrival(g: &TdGraph, source: VertexId, t0: f64, deadline: f64) -> Vec<Option<f64>> {
    let mut best: Vec<Option<f64>> = vec![None; g.vertex_count()];
    for_each_simple_path(g, source, t0, deadline, |v, t, _| {
        let b = &mut best[v.index()];
        if b.is_none_or(|x| t < x) {
            *b = Some(t);
        }
    });
    best
}

/// Whether some simple path from `v` departing at `d` reaches `dest` by `latest`.
pub fn can_reach_by(g: &TdGraph, v: VertexId, d: f64, dest: VertexId, latest: f64) -> bool {
    d <= latest && brute_earliest_arrival(g, v, d, latest)[dest.index()].is_some()
}

/// Value of a path, summing each arc at its entry time.
pub fn manual_value(g: &TdGraph, source: VertexId, t0: f64, arcs: &[ArcId]) -> (f64, f64) {
    let mut t = t0;
    let mut v = source;
    let mut value = 0.0;
    for &a in arcs {
        let arc = g.arc(a);
        assert_eq!(arc.tail, v, "disconnected path");
        value += arc.val.at(t);
        t += arc.tt.at(t);
        v = arc.head;
    }
    (value, t)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Simple {
    Vertex,
    Arc,
}

/// Best feasible value by full enumeration, with no pruning beyond the
/// deadline itself (times only grow along a path).
pub fn brute_optimum(g: &TdGraph, q: &Query, mode: Simple) -> Option<(f64, Vec<ArcId>)> {
    struct S<'a> {
        g: &'a TdGraph,
        q: &'a Query,
        mode: Simple,
        on_vertex: Vec<bool>,
        on_arc: Vec<bool>,
        arcs: Vec<ArcId>,
        best: Option<(f64, Vec<ArcId>)>,
    }
    fn go(s: &mut S, v: VertexId, t: f64, value: f64) {
        if v == s.q.destination && s.best.as_ref().is_none_or(|(b, _)| value > *b) {
            s.best = Some((value, s.arcs.clone()));
        }
        let g = s.g;
        for &a in g.out_arcs(v) {
            let arc = g.arc(a);
            let w = arc.head;
            let blocked = match s.mode {
                Simple::Vertex => s.on_vertex[w.index()],
                Simple::Arc => s.on_arc[a.index()],
            };
            if blocked {
                continue;
            }
            let next = t + arc.tt.at(t);
            if next > s.q.deadline() {
                continue;
            }
            let was = s.on_vertex[w.index()];
            s.on_vertex[w.index()] = true;
            s.on_arc[a.index()] = true;
            s.arcs.push(a);
            go(s, w, next, value + arc.val.at(t));
            s.arcs.pop();
            s.on_arc[a.index()] = false;
            s.on_vertex[w.index()] = was;
        }
    }
    let mut s = S {
        g,
        q,
        mode,
        on_vertex: vec![false; g.vertex_count()],
        on_arc: vec![false; g.arc_count()],
        arcs: Vec::new(),
        best: None,
    };
    s.on_vertex[q.source.index()] = true;
    go(&mut s, q.source, q.t0, 0.0);
    s.best
}

/// Every vertex on some feasible simple path of `q`.
pub fn vertices_on_feasible_paths(g: &TdGraph, q: &Query) -> Vec<bool> {
    let mut on = vec![false; g.vertex_count()];
    for_each_simple_path(g, q.source, q.t0, q.deadline(), |v, _, arcs| {
        if v == q.destination {
            on[q.source.index()] = true;
            for &a in arcs {
                on[g.arc(a).head.index()] = true;
            }
        }
    });
    on
}
