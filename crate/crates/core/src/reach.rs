//! Forward (earliest-arrival) and backward (latest-departure) reachability.
//!
//! Both expansions are label-setting searches over an immutable [`TdGraph`].
//! The forward search labels every vertex reachable by the deadline with its
//! earliest arrival; the backward search labels every vertex from which the
//! target can still be reached in time with its latest departure. Vertices
//! outside the effective intersection (`ea <= ld`) can not lie on any feasible
//! path, which is what the two optional pruning rules exploit:
//!
//! * FWEST drops a vertex whose earliest arrival plus the straight-line time to
//!   the target (at network maximum speed) already misses the deadline.
//! * EALD feeds forward labels into the backward search and drops any vertex
//!   whose latest departure precedes its earliest arrival.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{ArcId, TdGraph, VertexId};

/// Boundary adjustment applied when a latest departure falls on the open end
/// of a time window.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Relative slack on pruning comparisons; pruning only fires when a bound is
/// violated by more than rounding noise.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneConfig {
    /// Forward estimation in the forward search.
    pub fwest: bool,
    /// Earliest-arrival/latest-departure pruning in the backward search.
    pub eald: bool,
    /// Also apply forward estimation in the backward search. Ignored when
    /// `eald` is on.
    pub fwest_in_bwr: bool,
    pub epsilon: f64,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self::eald_only()
    }
}

impl PruneConfig {
    pub fn none() -> Self {
        Self {
            fwest: false,
            eald: false,
            fwest_in_bwr: false,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn fwest_only() -> Self {
        Self {
            fwest: true,
            fwest_in_bwr: true,
            ..Self::none()
        }
    }

    pub fn eald_only() -> Self {
        Self {
            eald: true,
            ..Self::none()
        }
    }

    pub fn both() -> Self {
        Self {
            fwest: true,
            eald: true,
            ..Self::none()
        }
    }

    /// The four configurations of the pruning ablation, labelled.
    pub fn ablation() -> [(&'static str, PruneConfig); 4] {
        [
            ("none", Self::none()),
            ("fwest", Self::fwest_only()),
            ("eald", Self::eald_only()),
            ("both", Self::both()),
        ]
    }

    pub fn validate(&self, g: &TdGraph) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.uses_fwest() && g.max_speed().is_none() {
            return Err(Error::Config(
                "forward estimation needs vertex coordinates and a maximum speed".into(),
            ));
        }
        Ok(())
    }

    fn uses_fwest(&self) -> bool {
        self.fwest || (self.fwest_in_bwr && !self.eald)
    }

    fn fwest_backward(&self) -> bool {
        self.fwest_in_bwr && !self.eald
    }
}

/// Labels from one forward and/or backward expansion.
#[derive(Debug, Clone)]
pub struct ReachLabels {
    ea: Vec<f64>,
    ld: Vec<f64>,
    pred: Vec<Option<ArcId>>,
    origin: Option<VertexId>,
    target: Option<VertexId>,
    pub visited_forward: usize,
    pub visited_backward: usize,
}

impl ReachLabels {
    fn blank(n: usize) -> Self {
        Self {
            ea: vec![f64::INFINITY; n],
            ld: vec![f64::NEG_INFINITY; n],
            pred: Vec::new(),
            origin: None,
            target: None,
            visited_forward: 0,
            visited_backward: 0,
        }
    }

    /// Hand-built labels, for exercising scoring in isolation.
    #[cfg(test)]
    pub(crate) fn from_labels(n: usize, ea: &[(VertexId, f64)], ld: &[(VertexId, f64)]) -> Self {
        let mut out = Self::blank(n);
        for &(v, t) in ea {
            out.ea[v.index()] = t;
        }
        for &(v, t) in ld {
            out.ld[v.index()] = t;
        }
        out
    }

    #[inline]
    pub fn ea(&self, v: VertexId) -> Option<f64> {
        let t = self.ea[v.index()];
        t.is_finite().then_some(t)
    }

    #[inline]
    pub fn ld(&self, v: VertexId) -> Option<f64> {
        let t = self.ld[v.index()];
        t.is_finite().then_some(t)
    }

    /// Arc on which the forward search first reached `v` with its final label.
    pub fn pred(&self, v: VertexId) -> Option<ArcId> {
        self.pred.get(v.index()).copied().flatten()
    }

    pub fn origin(&self) -> Option<VertexId> {
        self.origin
    }

    pub fn target(&self) -> Option<VertexId> {
        self.target
    }

    /// Vertices carrying a forward label, ascending id.
    pub fn forward_vertices(&self) -> Vec<VertexId> {
        labelled(&self.ea)
    }

    /// Vertices carrying a backward label, ascending id.
    pub fn backward_vertices(&self) -> Vec<VertexId> {
        labelled(&self.ld)
    }

    /// Vertices carrying both labels, ascending id.
    pub fn members(&self) -> Vec<VertexId> {
        (0..self.ea.len())
            .filter(|&i| self.ea[i].is_finite() && self.ld[i].is_finite())
            .map(VertexId::from)
            .collect()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.ea[v.index()].is_finite() && self.ld[v.index()].is_finite()
    }

    pub fn visited(&self) -> usize {
        self.visited_forward + self.visited_backward
    }
}

fn labelled(times: &[f64]) -> Vec<VertexId> {
    times
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_finite())
        .map(|(i, _)| VertexId::from(i))
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Earliest {
    time: f64,
    v: u32,
}

impl PartialEq for Earliest {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Earliest {}
impl PartialOrd for Earliest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Earliest {
    // Max-heap: smallest time first, then smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.v.cmp(&self.v))
    }
}

#[derive(Debug, Clone, Copy)]
struct Latest {
    time: f64,
    v: u32,
}

impl PartialEq for Latest {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Latest {}
impl PartialOrd for Latest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Latest {
    // Max-heap: largest time first, then smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| other.v.cmp(&self.v))
    }
}

#[inline]
fn slack(t: f64) -> f64 {
    PRUNE_SLACK * t.abs().max(1.0)
}

/// Parameters of a forward expansion beyond source and departure time.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Forward<'a> {
    pub deadline: f64,
    /// Straight-line target and network speed for FWEST.
    pub fwest: Option<(VertexId, f64)>,
    pub scope: Option<&'a [bool]>,
    /// Stop as soon as this vertex is settled.
    pub stop_at: Option<VertexId>,
}

pub(crate) fn forward(g: &TdGraph, source: VertexId, t0: f64, opts: Forward<'_>) -> ReachLabels {
    let n = g.vertex_count();
    let mut labels = ReachLabels::blank(n);
    labels.pred = vec![None; n];
    labels.origin = Some(source);
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    labels.ea[source.index()] = t0;
    heap.push(Earliest { time: t0, v: source.0 });

    let fwest = opts.fwest.and_then(|(target, speed)| {
        g.coords().map(|c| (c, c[target.index()], speed))
    });
    let limit = opts.deadline + slack(opts.deadline);

    while let Some(Earliest { time, v }) = heap.pop() {
        let vi = v as usize;
        if settled[vi] || time > labels.ea[vi] {
            continue;
        }
        settled[vi] = true;
        labels.visited_forward += 1;
        if opts.stop_at == Some(VertexId(v)) {
            break;
        }
        for &a in g.out_arcs(VertexId(v)) {
            let arc = g.arc(a);
            let w = arc.head.index();
            if settled[w] {
                continue;
            }
            if let Some(scope) = opts.scope {
                if !scope[w] {
                    continue;
                }
            }
            let t = time + arc.tt.at(time);
            if t > opts.deadline {
                continue;
            }
            if let Some((coords, target, speed)) = fwest {
                if t + coords[w].distance(&target) / speed > limit {
                    continue;
                }
            }
            if t < labels.ea[w] {
                labels.ea[w] = t;
                labels.pred[w] = Some(a);
                heap.push(Earliest { time: t, v: w as u32 });
            }
        }
    }
    labels
}

/// Parameters of a backward expansion beyond target and latest arrival.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Backward<'a> {
    /// Vertices whose latest departure precedes this are dropped.
    pub t0: f64,
    pub epsilon: f64,
    pub eald: Option<&'a ReachLabels>,
    /// Origin and network speed for forward estimation in reverse.
    pub fwest: Option<(VertexId, f64)>,
    pub scope: Option<&'a [bool]>,
}

pub(crate) fn backward(g: &TdGraph, target: VertexId, latest_arrival: f64, opts: Backward<'_>) -> ReachLabels {
    let n = g.vertex_count();
    let mut labels = ReachLabels::blank(n);
    labels.target = Some(target);
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    labels.ld[target.index()] = latest_arrival;
    heap.push(Latest {
        time: latest_arrival,
        v: target.0,
    });

    let fwest = opts.fwest.and_then(|(origin, speed)| {
        g.coords().map(|c| (c, c[origin.index()], speed))
    });
    let floor = opts.t0 - slack(opts.t0);

    while let Some(Latest { time, v }) = heap.pop() {
        let vj = v as usize;
        if settled[vj] || time < labels.ld[vj] {
            continue;
        }
        settled[vj] = true;
        labels.visited_backward += 1;
        for &a in g.in_arcs(VertexId(v)) {
            let arc = g.arc(a);
            let i = arc.tail.index();
            if settled[i] {
                continue;
            }
            if let Some(scope) = opts.scope {
                if !scope[i] {
                    continue;
                }
            }
            let Some(t) = arc.tt.latest_departure(time, opts.epsilon) else {
                continue;
            };
            if t < opts.t0 {
                continue;
            }
            if let Some(fw) = opts.eald {
                let ea = fw.ea[i];
                if !ea.is_finite() || t < ea - slack(ea) {
                    continue;
                }
            }
            if let Some((coords, origin, speed)) = fwest {
                if t - coords[i].distance(&origin) / speed < floor {
                    continue;
                }
            }
            if t > labels.ld[i] {
                labels.ld[i] = t;
                heap.push(Latest { time: t, v: i as u32 });
            }
        }
    }
    labels
}

fn check_window(t0: f64, until: f64) -> Result<()> {
    if !(t0.is_finite() && t0 >= 0.0) {
        return Err(Error::InvalidQuery(format!("departure time {t0} < 0")));
    }
    if until.is_nan() || until < t0 {
        return Err(Error::InvalidQuery(format!(
            "deadline {until} precedes departure {t0}"
        )));
    }
    Ok(())
}

/// Forward reachability from `source` departing at `t0`.
///
/// Labels every vertex whose earliest arrival is at most `deadline`, except
/// those removed by FWEST towards `fwest_target` when `cfg.fwest` is set.
pub fn fwr(
    g: &TdGraph,
    source: VertexId,
    t0: f64,
    deadline: f64,
    cfg: &PruneConfig,
    fwest_target: Option<VertexId>,
) -> Result<ReachLabels> {
    fwr_within(g, None, source, t0, deadline, cfg, fwest_target)
}

/// [`fwr`] restricted to the vertices flagged in `scope`.
pub fn fwr_within(
    g: &TdGraph,
    scope: Option<&[bool]>,
    source: VertexId,
    t0: f64,
    deadline: f64,
    cfg: &PruneConfig,
    fwest_target: Option<VertexId>,
) -> Result<ReachLabels> {
    g.check_vertex(source)?;
    check_window(t0, deadline)?;
    cfg.validate(g)?;
    if let Some(t) = fwest_target {
        g.check_vertex(t)?;
    }
    let fwest = match (cfg.fwest, fwest_target, g.max_speed()) {
        (true, Some(t), Some(speed)) => Some((t, speed)),
        _ => None,
    };
    Ok(forward(
        g,
        source,
        t0,
        Forward {
            deadline,
            fwest,
            scope,
            stop_at: None,
        },
    ))
}

/// Backward reachability to `dest` arriving by `latest_arrival`.
///
/// Labels every vertex whose latest departure is at least `t0`. With
/// `cfg.eald` the forward labels are required and vertices with
/// `ld < ea` are never enqueued.
pub fn bwr(
    g: &TdGraph,
    dest: VertexId,
    t0: f64,
    latest_arrival: f64,
    cfg: &PruneConfig,
    fwr_labels: Option<&ReachLabels>,
) -> Result<ReachLabels> {
    bwr_within(g, None, dest, t0, latest_arrival, cfg, fwr_labels)
}

/// [`bwr`] restricted to the vertices flagged in `scope`.
pub fn bwr_within(
    g: &TdGraph,
    scope: Option<&[bool]>,
    dest: VertexId,
    t0: f64,
    latest_arrival: f64,
    cfg: &PruneConfig,
    fwr_labels: Option<&ReachLabels>,
) -> Result<ReachLabels> {
    g.check_vertex(dest)?;
    check_window(t0, latest_arrival)?;
    cfg.validate(g)?;
    if cfg.eald && fwr_labels.is_none() {
        return Err(Error::Config(
            "EALD pruning needs the forward labels of the same gap".into(),
        ));
    }
    let fwest = if cfg.fwest_backward() {
        let origin = fwr_labels.and_then(|f| f.origin).ok_or_else(|| {
            Error::Config("backward forward-estimation needs the forward labels".into())
        })?;
        g.max_speed().map(|s| (origin, s))
    } else {
        None
    };
    Ok(backward(
        g,
        dest,
        latest_arrival,
        Backward {
            t0,
            epsilon: cfg.epsilon,
            eald: if cfg.eald { fwr_labels } else { None },
            fwest,
            scope,
        },
    ))
}

/// Vertices labelled by both searches with `ea <= ld`. By construction every
/// vertex of every feasible path is among them.
pub fn intersect(f: &ReachLabels, b: &ReachLabels) -> ReachLabels {
    let n = f.ea.len().min(b.ld.len());
    let mut out = ReachLabels::blank(n);
    out.origin = f.origin;
    out.target = b.target;
    out.pred = f.pred.clone();
    out.visited_forward = f.visited_forward;
    out.visited_backward = b.visited_backward;
    for i in 0..n {
        let (ea, ld) = (f.ea[i], b.ld[i]);
        if ea.is_finite() && ld.is_finite() && ea <= ld {
            out.ea[i] = ea;
            out.ld[i] = ld;
        }
    }
    out
}

/// Lower bound on the arrival at `target` when leaving `v` at `ea_v`:
/// straight-line distance at network maximum speed.
pub fn fwest_bound(g: &TdGraph, v: VertexId, target: VertexId, ea_v: f64) -> Result<f64> {
    g.check_vertex(v)?;
    g.check_vertex(target)?;
    let (Some(d), Some(speed)) = (g.euclidean(v, target), g.max_speed()) else {
        return Err(Error::Config(
            "forward estimation needs vertex coordinates and a maximum speed".into(),
        ));
    };
    Ok(ea_v + d / speed)
}
