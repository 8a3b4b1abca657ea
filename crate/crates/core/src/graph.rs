//! Time-dependent road network, queries, and path evaluation.
//!
//! A path enters each arc at the arrival time at its tail and both the travel
//! time and the collected value are read from the window containing that entry
//! time. There is no waiting at vertices.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::profile::StepProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub u32);

impl ArcId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ArcId {
    fn from(i: usize) -> Self {
        ArcId(i as u32)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Planar coordinate in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    /// Travel time in seconds.
    pub tt: StepProfile,
    /// Collected value.
    pub val: StepProfile,
}

/// A window boundary where departing later arrives strictly earlier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonFifoBoundary {
    pub arc: ArcId,
    /// The later of the two windows.
    pub window: usize,
}

/// Immutable time-dependent graph with forward and backward adjacency in
/// compressed form.
#[derive(Debug, Clone)]
pub struct TdGraph {
    vertex_count: usize,
    coords: Option<Vec<Point>>,
    arcs: Vec<Arc>,
    out_offsets: Vec<u32>,
    out_arcs: Vec<ArcId>,
    in_offsets: Vec<u32>,
    in_arcs: Vec<ArcId>,
    lookup: HashMap<(VertexId, VertexId), ArcId>,
    max_speed: Option<f64>,
}

impl PartialEq for TdGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.coords == other.coords
            && self.arcs == other.arcs
            && self.max_speed == other.max_speed
    }
}

impl TdGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count).map(VertexId::from)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arcs.len()).map(ArcId::from)
    }

    #[inline]
    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn has_coords(&self) -> bool {
        self.coords.is_some()
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn coord(&self, v: VertexId) -> Option<Point> {
        self.coords.as_ref().map(|c| c[v.index()])
    }

    /// Network maximum speed in m/s. Derived from the data when coordinates
    /// are present, so `distance / max_speed` never exceeds any travel time.
    pub fn max_speed(&self) -> Option<f64> {
        self.max_speed
    }

    #[inline]
    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        let i = v.index();
        &self.out_arcs[self.out_offsets[i] as usize..self.out_offsets[i + 1] as usize]
    }

    #[inline]
    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        let i = v.index();
        &self.in_arcs[self.in_offsets[i] as usize..self.in_offsets[i + 1] as usize]
    }

    pub fn find_arc(&self, tail: VertexId, head: VertexId) -> Option<ArcId> {
        self.lookup.get(&(tail, head)).copied()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.index() < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Euclidean distance, if the graph carries coordinates.
    pub fn euclidean(&self, a: VertexId, b: VertexId) -> Option<f64> {
        let c = self.coords.as_ref()?;
        Some(c[a.index()].distance(&c[b.index()]))
    }

    /// Window boundaries that violate FIFO: for a piecewise-constant travel
    /// time this happens wherever the next window is strictly cheaper.
    pub fn non_fifo_boundaries(&self) -> Vec<NonFifoBoundary> {
        let mut out = Vec::new();
        for (i, arc) in self.arcs.iter().enumerate() {
            for (k, w) in arc.tt.values().windows(2).enumerate() {
                if w[1] < w[0] {
                    out.push(NonFifoBoundary {
                        arc: ArcId::from(i),
                        window: k + 1,
                    });
                }
            }
        }
        out
    }

    pub fn is_fifo(&self) -> bool {
        self.arcs
            .iter()
            .all(|a| a.tt.values().windows(2).all(|w| w[1] >= w[0]))
    }

    /// Copy of the graph with every profile replaced by its mean.
    pub fn staticize(&self) -> TdGraph {
        let mut g = self.clone();
        for arc in &mut g.arcs {
            arc.tt = arc.tt.staticized();
            arc.val = arc.val.staticized();
        }
        g
    }

    /// Copy with new value profiles, one per arc.
    pub fn with_values(&self, values: Vec<StepProfile>) -> Result<TdGraph> {
        if values.len() != self.arcs.len() {
            return Err(Error::InvalidGraph(format!(
                "{} value profiles for {} arcs",
                values.len(),
                self.arcs.len()
            )));
        }
        let mut g = self.clone();
        for (arc, val) in g.arcs.iter_mut().zip(values) {
            arc.val = val;
        }
        Ok(g)
    }
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertex_count: usize,
    coords: Option<Vec<Point>>,
    arcs: Vec<Arc>,
    max_speed: Option<f64>,
}

impl GraphBuilder {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            ..Default::default()
        }
    }

    pub fn with_coords(coords: Vec<Point>) -> Self {
        Self {
            vertex_count: coords.len(),
            coords: Some(coords),
            ..Default::default()
        }
    }

    /// Overrides the derived maximum speed. It must still be admissible.
    pub fn max_speed(mut self, speed: f64) -> Self {
        self.max_speed = Some(speed);
        self
    }

    pub fn add_arc(
        &mut self,
        tail: impl Into<VertexId>,
        head: impl Into<VertexId>,
        tt: StepProfile,
        val: StepProfile,
    ) -> ArcId {
        let id = ArcId::from(self.arcs.len());
        self.arcs.push(Arc {
            tail: tail.into(),
            head: head.into(),
            tt,
            val,
        });
        id
    }

    pub fn build(self) -> Result<TdGraph> {
        let n = self.vertex_count;
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if n > u32::MAX as usize || self.arcs.len() > u32::MAX as usize {
            return Err(Error::InvalidGraph("graph too large".into()));
        }
        if let Some(c) = &self.coords {
            if let Some(p) = c.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
                return Err(Error::InvalidGraph(format!("non-finite coordinate {p:?}")));
            }
        }
        let mut lookup = HashMap::with_capacity(self.arcs.len());
        for (i, arc) in self.arcs.iter().enumerate() {
            for v in [arc.tail, arc.head] {
                if v.index() >= n {
                    return Err(Error::InvalidVertex(v));
                }
            }
            if arc.tail == arc.head {
                return Err(Error::SelfLoop(arc.tail));
            }
            if let Some(window) = arc.tt.values().iter().position(|v| *v <= 0.0) {
                return Err(Error::NonPositiveTravelTime {
                    tail: arc.tail,
                    head: arc.head,
                    window,
                });
            }
            if lookup.insert((arc.tail, arc.head), ArcId::from(i)).is_some() {
                return Err(Error::ParallelArc {
                    tail: arc.tail,
                    head: arc.head,
                });
            }
        }

        let max_speed = match (&self.coords, self.max_speed) {
            (None, Some(_)) => {
                return Err(Error::InvalidGraph(
                    "max speed given for a graph without coordinates".into(),
                ))
            }
            (None, None) => None,
            (Some(coords), given) => {
                let needed = self
                    .arcs
                    .iter()
                    .map(|a| coords[a.tail.index()].distance(&coords[a.head.index()]) / a.tt.min())
                    .fold(0.0, f64::max);
                match given {
                    Some(s) if !(s.is_finite() && s > 0.0) || s < needed => {
                        return Err(Error::InvalidGraph(format!(
                            "max speed {s} m/s is below the {needed} m/s implied by the arcs"
                        )))
                    }
                    Some(s) => Some(s),
                    // Guard against a zero bound when all arcs are degenerate.
                    None => Some(if needed > 0.0 { needed } else { f64::INFINITY }),
                }
            }
        };

        let (out_offsets, out_arcs) = csr(n, &self.arcs, |a| a.tail);
        let (in_offsets, in_arcs) = csr(n, &self.arcs, |a| a.head);
        Ok(TdGraph {
            vertex_count: n,
            coords: self.coords,
            arcs: self.arcs,
            out_offsets,
            out_arcs,
            in_offsets,
            in_arcs,
            lookup,
            max_speed,
        })
    }
}

fn csr(n: usize, arcs: &[Arc], key: impl Fn(&Arc) -> VertexId) -> (Vec<u32>, Vec<ArcId>) {
    let mut offsets = vec![0u32; n + 1];
    for a in arcs {
        offsets[key(a).index() + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut list = vec![ArcId(0); arcs.len()];
    for (i, a) in arcs.iter().enumerate() {
        let slot = &mut fill[key(a).index()];
        list[*slot as usize] = ArcId::from(i);
        *slot += 1;
    }
    (offsets, list)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub source: VertexId,
    pub destination: VertexId,
    /// Departure time in seconds from the day origin.
    pub t0: f64,
    /// Time budget in seconds.
    pub budget: f64,
}

impl Query {
    pub fn new(source: impl Into<VertexId>, destination: impl Into<VertexId>, t0: f64, budget: f64) -> Self {
        Self {
            source: source.into(),
            destination: destination.into(),
            t0,
            budget,
        }
    }

    pub fn deadline(&self) -> f64 {
        self.t0 + self.budget
    }

    pub fn validate(&self, g: &TdGraph) -> Result<()> {
        g.check_vertex(self.source)?;
        g.check_vertex(self.destination)?;
        if !(self.t0.is_finite() && self.t0 >= 0.0) {
            return Err(Error::InvalidQuery(format!("departure time {} < 0", self.t0)));
        }
        if !(self.budget.is_finite() && self.budget >= 0.0) {
            return Err(Error::InvalidQuery(format!("budget {} < 0", self.budget)));
        }
        Ok(())
    }
}

/// An arc sequence with its departure time and the derived arrival times.
///
/// `arrivals[i]` is the time at the `i`-th visited vertex, so
/// `arrivals[0] == t0` and there is one more arrival than there are arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPath {
    origin: VertexId,
    arcs: Vec<ArcId>,
    arrivals: Vec<f64>,
}

impl TimedPath {
    pub fn empty(origin: VertexId, t0: f64) -> Self {
        Self {
            origin,
            arcs: Vec::new(),
            arrivals: vec![t0],
        }
    }

    /// Evaluates `arcs` departing `origin` at `t0`.
    pub fn evaluate(g: &TdGraph, origin: VertexId, t0: f64, arcs: Vec<ArcId>) -> Result<Self> {
        g.check_vertex(origin)?;
        if !(t0.is_finite() && t0 >= 0.0) {
            return Err(Error::NegativeTime(t0));
        }
        let mut arrivals = Vec::with_capacity(arcs.len() + 1);
        arrivals.push(t0);
        let mut at = origin;
        let mut t = t0;
        for &id in &arcs {
            if id.index() >= g.arc_count() {
                return Err(Error::InvalidArc(id));
            }
            let arc = g.arc(id);
            if arc.tail != at {
                return Err(Error::DisconnectedPath { arc: id, expected: at });
            }
            t += arc.tt.at(t);
            arrivals.push(t);
            at = arc.head;
        }
        Ok(Self { origin, arcs, arrivals })
    }

    /// Re-evaluates the same arc sequence on `g` (same arc ids) at `t0`.
    pub fn reevaluate(&self, g: &TdGraph, t0: f64) -> Result<Self> {
        Self::evaluate(g, self.origin, t0, self.arcs.clone())
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn t0(&self) -> f64 {
        self.arrivals[0]
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arrival(&self) -> f64 {
        *self.arrivals.last().expect("arrivals never empty")
    }

    pub fn travel_time(&self) -> f64 {
        self.arrival() - self.t0()
    }

    pub fn end(&self, g: &TdGraph) -> VertexId {
        self.arcs.last().map_or(self.origin, |a| g.arc(*a).head)
    }

    /// Visited vertices, origin first.
    pub fn vertices(&self, g: &TdGraph) -> Vec<VertexId> {
        std::iter::once(self.origin)
            .chain(self.arcs.iter().map(|a| g.arc(*a).head))
            .collect()
    }

    /// Sum of each arc's value at its entry time. An arc that appears more
    /// than once collects value only on its first traversal.
    pub fn value(&self, g: &TdGraph) -> f64 {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len());
        self.arcs
            .iter()
            .zip(&self.arrivals)
            .filter(|(a, _)| seen.insert(**a))
            .map(|(a, t)| g.arc(*a).val.at(*t))
            .sum()
    }

    pub fn is_arc_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len());
        self.arcs.iter().all(|a| seen.insert(*a))
    }

    pub fn is_vertex_simple(&self, g: &TdGraph) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.arcs.len() + 1);
        self.vertices(g).into_iter().all(|v| seen.insert(v))
    }

    /// Ends at the destination and arrives within the budget.
    pub fn is_feasible(&self, g: &TdGraph, q: &Query) -> bool {
        self.origin == q.source
            && self.t0() == q.t0
            && self.end(g) == q.destination
            && self.travel_time() <= q.budget
    }

    /// Traverses one more arc from the current end.
    pub fn push(&mut self, g: &TdGraph, arc: ArcId) -> Result<()> {
        let expected = self.end(g);
        let a = g.arc(arc);
        if a.tail != expected {
            return Err(Error::DisconnectedPath { arc, expected });
        }
        let t = self.arrival();
        self.arcs.push(arc);
        self.arrivals.push(t + a.tt.at(t));
        Ok(())
    }

    /// Appends `other`, which must depart where and when this path ends.
    pub fn concat(&mut self, g: &TdGraph, other: &TimedPath) -> Result<()> {
        if other.origin != self.end(g) || other.t0() != self.arrival() {
            return Err(Error::InvalidGraph(
                "concatenated path does not continue at the current end".into(),
            ));
        }
        self.arcs.extend_from_slice(&other.arcs);
        self.arrivals.extend_from_slice(&other.arrivals[1..]);
        Ok(())
    }
}

/// Total travel time of `arcs` departing `origin` at `t0`.
pub fn path_travel_time(g: &TdGraph, origin: VertexId, t0: f64, arcs: &[ArcId]) -> Result<f64> {
    Ok(TimedPath::evaluate(g, origin, t0, arcs.to_vec())?.travel_time())
}

/// Total value of `arcs` departing `origin` at `t0`.
pub fn path_value(g: &TdGraph, origin: VertexId, t0: f64, arcs: &[ArcId]) -> Result<f64> {
    Ok(TimedPath::evaluate(g, origin, t0, arcs.to_vec())?.value(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, V0, V1, V2, V4, V5, V6, VN};

    fn arcs(g: &TdGraph, vs: &[VertexId]) -> Vec<ArcId> {
        vs.windows(2)
            .map(|w| g.find_arc(w[0], w[1]).unwrap())
            .collect()
    }

    #[test]
    fn fixture_profile_values() {
        let g = fixtures::worked_example();
        let a = g.arc(g.find_arc(V4, VN).unwrap());
        assert_eq!(a.tt.eval(1.0).unwrap(), 2.0);
        assert_eq!(a.tt.eval(3.0).unwrap(), 3.0);
    }

    #[test]
    fn fixture_path_travel_times() {
        let g = fixtures::worked_example();
        assert_eq!(path_travel_time(&g, V0, 0.0, &[]).unwrap(), 0.0);
        let via5 = arcs(&g, &[V0, V1, V2, V5]);
        assert_eq!(path_travel_time(&g, V0, 0.0, &via5).unwrap(), 5.0);
        let via6 = arcs(&g, &[V0, V1, V2, V6, VN]);
        assert_eq!(path_travel_time(&g, V0, 0.0, &via6).unwrap(), 3.5);
    }

    #[test]
    fn feasibility_on_fixture() {
        let g = fixtures::worked_example();
        let q = Query::new(V0, VN, 0.0, 4.0);
        let fast = TimedPath::evaluate(&g, V0, 0.0, arcs(&g, &[V0, V4, VN])).unwrap();
        assert!(fast.is_feasible(&g, &q));
        let via5 = TimedPath::evaluate(&g, V0, 0.0, arcs(&g, &[V0, V1, V2, V5, VN])).unwrap();
        assert!(!via5.is_feasible(&g, &q));

        let q0 = Query::new(V2, V2, 0.0, 0.0);
        assert!(TimedPath::empty(V2, 0.0).is_feasible(&g, &q0));
    }

    #[test]
    fn disconnected_path_is_rejected() {
        let g = fixtures::worked_example();
        let bad = vec![g.find_arc(V0, V1).unwrap(), g.find_arc(V4, VN).unwrap()];
        assert!(matches!(
            TimedPath::evaluate(&g, V0, 0.0, bad),
            Err(Error::DisconnectedPath { .. })
        ));
    }

    #[test]
    fn value_of_constant_arc() {
        let mut b = GraphBuilder::new(2);
        b.add_arc(0usize, 1usize, StepProfile::constant(3.0).unwrap(), StepProfile::constant(7.0).unwrap());
        let g = b.build().unwrap();
        assert_eq!(path_value(&g, VertexId(0), 10.0, &[ArcId(0)]).unwrap(), 7.0);
        assert_eq!(path_value(&g, VertexId(0), 10.0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn builder_rejects_invalid_arcs() {
        let one = || StepProfile::constant(1.0).unwrap();
        let mut b = GraphBuilder::new(2);
        b.add_arc(0usize, 0usize, one(), one());
        assert!(matches!(b.build(), Err(Error::SelfLoop(_))));

        let mut b = GraphBuilder::new(2);
        b.add_arc(0usize, 1usize, one(), one());
        b.add_arc(0usize, 1usize, one(), one());
        assert!(matches!(b.build(), Err(Error::ParallelArc { .. })));

        let mut b = GraphBuilder::new(2);
        b.add_arc(0usize, 1usize, StepProfile::new(1.0, vec![1.0, 0.0]).unwrap(), one());
        assert!(matches!(b.build(), Err(Error::NonPositiveTravelTime { window: 1, .. })));

        let mut b = GraphBuilder::new(2);
        b.add_arc(0usize, 5usize, one(), one());
        assert!(matches!(b.build(), Err(Error::InvalidVertex(_))));

        assert!(GraphBuilder::new(2).max_speed(3.0).build().is_err());
    }

    #[test]
    fn max_speed_is_derived_and_validated() {
        let coords = vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0)];
        let tt = StepProfile::new(1.0, vec![10.0, 5.0]).unwrap();
        let mut b = GraphBuilder::with_coords(coords.clone());
        b.add_arc(0usize, 1usize, tt.clone(), StepProfile::constant(0.0).unwrap());
        assert_eq!(b.build().unwrap().max_speed(), Some(20.0));

        let mut b = GraphBuilder::with_coords(coords).max_speed(15.0);
        b.add_arc(0usize, 1usize, tt, StepProfile::constant(0.0).unwrap());
        assert!(b.build().is_err());
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = fixtures::worked_example();
        for v in g.vertices() {
            for a in g.out_arcs(v) {
                assert_eq!(g.arc(*a).tail, v);
            }
            for a in g.in_arcs(v) {
                assert_eq!(g.arc(*a).head, v);
            }
        }
        let total: usize = g.vertices().map(|v| g.out_arcs(v).len()).sum();
        assert_eq!(total, g.arc_count());
    }

    #[test]
    fn staticize_fixture() {
        let g = fixtures::worked_example();
        let s = g.staticize();
        let a = s.arc(g.find_arc(V4, VN).unwrap());
        assert_eq!(a.tt.values(), &[2.5]);
        assert_eq!(a.tt.at(0.0), a.tt.at(1234.5));
    }

    #[test]
    fn reports_non_fifo_boundaries() {
        let mut b = GraphBuilder::new(2);
        b.add_arc(
            0usize,
            1usize,
            StepProfile::new(10.0, vec![2.0, 5.0, 3.0]).unwrap(),
            StepProfile::constant(0.0).unwrap(),
        );
        let g = b.build().unwrap();
        assert!(!g.is_fifo());
        assert_eq!(
            g.non_fifo_boundaries(),
            vec![NonFifoBoundary { arc: ArcId(0), window: 2 }]
        );
        assert!(fixtures::worked_example().is_fifo());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_walk(seed: u64) -> (TdGraph, VertexId, Vec<ArcId>) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = fixtures::random_graph(10, 3, 0.4, &mut rng);
            let mut v = VertexId(rng.gen_range(0..10));
            let origin = v;
            let mut used = std::collections::HashSet::new();
            let mut walk = Vec::new();
            for _ in 0..5 {
                let choices: Vec<ArcId> = g
                    .out_arcs(v)
                    .iter()
                    .copied()
                    .filter(|a| !used.contains(a))
                    .collect();
                if choices.is_empty() {
                    break;
                }
                let a = choices[rng.gen_range(0..choices.len())];
                used.insert(a);
                walk.push(a);
                v = g.arc(a).head;
            }
            (g, origin, walk)
        }

        proptest! {
            #[test]
            fn value_matches_manual_accumulation(seed in 0u64..10_000, t0 in 0.0f64..50.0) {
                let (g, origin, walk) = random_walk(seed);
                let p = TimedPath::evaluate(&g, origin, t0, walk.clone()).unwrap();
                let mut t = t0;
                let mut val = 0.0;
                for a in &walk {
                    let arc = g.arc(*a);
                    val += arc.val.values()[arc.val.window_index(t)];
                    t += arc.tt.values()[arc.tt.window_index(t)];
                }
                prop_assert_eq!(p.value(&g), val);
                prop_assert_eq!(p.arrival(), t);
            }

            #[test]
            fn travel_time_is_additive(seed in 0u64..10_000, t0 in 0.0f64..50.0, cut in 0usize..6) {
                let (g, origin, walk) = random_walk(seed);
                let cut = cut.min(walk.len());
                let whole = TimedPath::evaluate(&g, origin, t0, walk.clone()).unwrap();
                let mut first = TimedPath::evaluate(&g, origin, t0, walk[..cut].to_vec()).unwrap();
                let second = TimedPath::evaluate(&g, first.end(&g), first.arrival(), walk[cut..].to_vec()).unwrap();
                prop_assert_eq!(whole.arrival(), second.arrival());
                let split = (first.travel_time() + second.travel_time()) - whole.travel_time();
                prop_assert!(split.abs() <= 1e-9 * whole.arrival().max(1.0));
                first.concat(&g, &second).unwrap();
                prop_assert_eq!(first, whole);
            }

            #[test]
            fn staticized_profiles_are_time_independent(seed in 0u64..10_000, t in 0.0f64..1e5) {
                let (g, _, _) = random_walk(seed);
                let s = g.staticize();
                for arc in s.arcs() {
                    prop_assert_eq!(arc.tt.at(t), arc.tt.at(0.0));
                    prop_assert_eq!(arc.val.at(t), arc.val.at(0.0));
                }
            }
        }
    }
}
