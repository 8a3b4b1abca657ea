//! RecInsert: recursive best-ratio arc insertion.
//!
//! The solver keeps a skeleton `gap, arc, gap, arc, ..., gap` running from the
//! query source to its destination. Each recursion runs forward and backward
//! reachability for every gap, scores every arc that can be feasibly inserted
//! into some gap, and inserts the best one, splitting its gap in two. When no
//! arc qualifies, every gap is closed with a time-dependent fastest path.
//!
//! Every accepted insertion is immediately stitched and checked against the
//! budget. A candidate whose stitched path misses the deadline (or traverses
//! an arc twice) is rolled back and excluded for the rest of the solve, so the
//! returned path is always feasible.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{ArcId, Query, TdGraph, TimedPath, VertexId};
use crate::par::{self, Execution};
use crate::reach::{bwr_within, fwr_within, intersect, PruneConfig, ReachLabels};
use crate::router::fastest_path;

/// Smallest detour (seconds) used as a ratio denominator.
pub const DEFAULT_DETOUR_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioMode {
    /// Estimated value gain per second of detour.
    #[default]
    ValuePerDetour,
    /// Estimated value gain divided by the budget left after insertion.
    ValuePerRemainingBudget,
}

/// A pair of skeleton vertices still to be connected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub start: VertexId,
    pub end: VertexId,
    /// Arrival at `start` along the current skeleton.
    pub start_time: f64,
    /// Latest admissible arrival at `end`.
    pub end_deadline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionCandidate {
    pub arc: ArcId,
    pub gap: usize,
    /// Budget left in the gap after the detour through `arc`.
    pub b_minus: f64,
    /// Value of `arc` when entered at the earliest arrival at its tail.
    pub val_plus: f64,
    pub ratio: f64,
    /// Earliest arrival at the arc's tail from the gap start.
    pub ea_tail: f64,
    /// Latest departure from the arc's head towards the gap end.
    pub ld_head: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub ratio_mode: RatioMode,
    /// Feed the union of the current gap intersections into the next
    /// recursion instead of the initial intersection.
    pub restrict_recursion_graph: bool,
    pub prune: PruneConfig,
    pub max_recursions: Option<usize>,
    /// Stop inserting after this long and return the current path.
    pub time_limit: Option<Duration>,
    pub detour_floor: f64,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            ratio_mode: RatioMode::default(),
            restrict_recursion_graph: false,
            prune: PruneConfig::default(),
            max_recursions: None,
            time_limit: None,
            detour_floor: DEFAULT_DETOUR_FLOOR,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_prune(prune: PruneConfig) -> Self {
        Self {
            prune,
            ..Self::default()
        }
    }

    pub fn validate(&self, g: &TdGraph) -> Result<()> {
        self.prune.validate(g)?;
        if self.max_recursions == Some(0) {
            return Err(Error::Config("max_recursions must be at least 1".into()));
        }
        if !(self.detour_floor.is_finite() && self.detour_floor > 0.0) {
            return Err(Error::Config("detour floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub path: TimedPath,
    pub value: f64,
    pub travel_time: f64,
    pub recursions: usize,
    /// Vertices settled by all forward and backward searches, per recursion.
    pub visited_vertex_counts: Vec<usize>,
    pub wall_time: Duration,
    /// Inserted arcs in skeleton order.
    pub inserted_arcs: Vec<ArcId>,
    pub rollbacks: usize,
    pub duplicate_arcs: bool,
    pub recursion_cap_reached: bool,
    pub terminated_early: bool,
}

impl SolveResult {
    pub fn visited_vertices(&self) -> usize {
        self.visited_vertex_counts.iter().sum()
    }
}

/// Scores inserting `arc` into `gap` given the gap's intersection labels.
///
/// Returns `None` when the arc can not be feasibly inserted, i.e. when
/// `ea_m + tt(ea_m) > ld_n` or either endpoint is unlabelled.
pub fn score_candidate(
    g: &TdGraph,
    gap_index: usize,
    gap: &Gap,
    arc: ArcId,
    labels: &ReachLabels,
    mode: RatioMode,
    detour_floor: f64,
) -> Option<InsertionCandidate> {
    let a = g.arc(arc);
    let ea_m = labels.ea(a.tail)?;
    let ld_n = labels.ld(a.head)?;
    let arrive = ea_m + a.tt.at(ea_m);
    if arrive > ld_n {
        return None;
    }
    let b_minus = ld_n - arrive;
    let val_plus = a.val.at(ea_m);
    let ratio = if val_plus <= 0.0 {
        0.0
    } else {
        match mode {
            RatioMode::ValuePerDetour => {
                let slack = gap.end_deadline - labels.ea(gap.end)?;
                val_plus / (slack - b_minus).max(detour_floor)
            }
            RatioMode::ValuePerRemainingBudget => val_plus / b_minus.max(detour_floor),
        }
    };
    Some(InsertionCandidate {
        arc,
        gap: gap_index,
        b_minus,
        val_plus,
        ratio,
        ea_tail: ea_m,
        ld_head: ld_n,
    })
}

/// Outcome of closing every gap with a fastest path.
#[derive(Debug, Clone)]
pub struct Stitched {
    pub path: TimedPath,
    /// Some arc is traversed more than once; its value counts once.
    pub duplicate_arcs: bool,
    /// Gaps whose end was reached after their deadline.
    pub late_gaps: Vec<usize>,
}

/// Closes every gap with a fastest path and splices in the inserted arcs,
/// evaluating left to right at actual traversal times.
///
/// `arcs[i]` sits between `gaps[i]` and `gaps[i + 1]`. Returns `None` when a
/// gap can not be closed at all.
pub fn stitch(g: &TdGraph, gaps: &[Gap], arcs: &[ArcId], t0: f64) -> Option<Stitched> {
    assert_eq!(gaps.len(), arcs.len() + 1, "one more gap than inserted arcs");
    let mut path = TimedPath::empty(gaps[0].start, t0);
    let mut late_gaps = Vec::new();
    for (i, gap) in gaps.iter().enumerate() {
        let seg = fastest_path(g, path.end(g), gap.end, path.arrival(), f64::INFINITY)?;
        path.concat(g, &seg).ok()?;
        if path.arrival() > gap.end_deadline {
            late_gaps.push(i);
        }
        if let Some(&a) = arcs.get(i) {
            path.push(g, a).ok()?;
        }
    }
    Some(Stitched {
        duplicate_arcs: !path.is_arc_simple(),
        path,
        late_gaps,
    })
}

/// Per-gap result of one recursion.
struct GapEval {
    members: Vec<VertexId>,
    candidates: Vec<InsertionCandidate>,
    visited: usize,
}

pub(crate) struct Recursion {
    /// Best first: ratio descending, then arc id, then gap index.
    pub candidates: Vec<InsertionCandidate>,
    pub visited: usize,
    /// Union of all gap intersections.
    pub union: Vec<bool>,
}

/// The current insertion state: gaps, inserted arcs, and the stitched path
/// with its per-gap fastest segments.
#[derive(Debug, Clone)]
pub(crate) struct Skeleton {
    pub gaps: Vec<Gap>,
    pub arcs: Vec<ArcId>,
    segments: Vec<TimedPath>,
    pub path: TimedPath,
    deadline: f64,
}

impl Skeleton {
    /// Single gap closed by the fastest path; `None` if that misses the deadline.
    pub fn start(g: &TdGraph, q: &Query) -> Option<Skeleton> {
        let gap = Gap {
            start: q.source,
            end: q.destination,
            start_time: q.t0,
            end_deadline: q.deadline(),
        };
        Self::restitch(g, vec![gap], Vec::new(), Vec::new(), q.t0, q.deadline())
    }

    /// Rebuilds the path, reusing a segment when its gap starts at the same
    /// vertex at the same time. Gap start times are reset to actual arrivals.
    fn restitch(
        g: &TdGraph,
        mut gaps: Vec<Gap>,
        arcs: Vec<ArcId>,
        reuse: Vec<Option<TimedPath>>,
        t0: f64,
        deadline: f64,
    ) -> Option<Skeleton> {
        let mut path = TimedPath::empty(gaps[0].start, t0);
        let mut segments = Vec::with_capacity(gaps.len());
        let mut reuse = reuse.into_iter();
        for (i, gap) in gaps.iter_mut().enumerate() {
            let at = path.arrival();
            gap.start_time = at;
            let cached = reuse
                .next()
                .flatten()
                .filter(|s| s.origin() == gap.start && s.t0() == at && s.end(g) == gap.end);
            let seg = match cached {
                Some(s) => s,
                None => fastest_path(g, gap.start, gap.end, at, deadline)?,
            };
            path.concat(g, &seg).ok()?;
            segments.push(seg);
            if let Some(&a) = arcs.get(i) {
                path.push(g, a).ok()?;
            }
            if path.arrival() > deadline {
                return None;
            }
        }
        if !path.is_arc_simple() {
            return None;
        }
        Some(Skeleton {
            gaps,
            arcs,
            segments,
            path,
            deadline,
        })
    }

    /// Skeleton with `cand` inserted, or `None` if the stitched path would be
    /// infeasible or repeat an arc.
    pub fn insert(&self, g: &TdGraph, cand: &InsertionCandidate, epsilon: f64) -> Option<Skeleton> {
        let k = cand.gap;
        let gap = self.gaps[k];
        let a = g.arc(cand.arc);
        let right_start = cand.ea_tail + a.tt.at(cand.ea_tail);
        let left_deadline = a
            .tt
            .latest_departure(cand.ld_head, epsilon)
            .unwrap_or(cand.ea_tail)
            .max(cand.ea_tail);
        let left = Gap {
            start: gap.start,
            end: a.tail,
            start_time: gap.start_time,
            end_deadline: left_deadline,
        };
        let right = Gap {
            start: a.head,
            end: gap.end,
            start_time: right_start,
            end_deadline: gap.end_deadline,
        };
        let mut gaps = self.gaps.clone();
        gaps[k] = left;
        gaps.insert(k + 1, right);
        let mut arcs = self.arcs.clone();
        arcs.insert(k, cand.arc);

        let mut reuse: Vec<Option<TimedPath>> = Vec::with_capacity(gaps.len());
        reuse.extend(self.segments[..k].iter().cloned().map(Some));
        reuse.push(None);
        reuse.push(None);
        reuse.extend(self.segments[k + 1..].iter().cloned().map(Some));
        Self::restitch(g, gaps, arcs, reuse, self.path.t0(), self.deadline)
    }

    /// Skeleton with the `i`-th inserted arc removed and its two gaps merged.
    pub fn remove(&self, g: &TdGraph, i: usize) -> Option<Skeleton> {
        let merged = Gap {
            start: self.gaps[i].start,
            end: self.gaps[i + 1].end,
            start_time: self.gaps[i].start_time,
            end_deadline: self.gaps[i + 1].end_deadline,
        };
        let mut gaps = self.gaps.clone();
        gaps[i] = merged;
        gaps.remove(i + 1);
        let mut arcs = self.arcs.clone();
        arcs.remove(i);
        let mut reuse: Vec<Option<TimedPath>> = Vec::with_capacity(gaps.len());
        reuse.extend(self.segments[..i].iter().cloned().map(Some));
        reuse.push(None);
        reuse.extend(self.segments[i + 2..].iter().cloned().map(Some));
        Self::restitch(g, gaps, arcs, reuse, self.path.t0(), self.deadline)
    }

    /// Runs reachability for every gap and collects scored candidates.
    /// Arcs flagged in `excluded` are skipped.
    pub fn evaluate(
        &self,
        g: &TdGraph,
        cfg: &SolverConfig,
        scope: Option<&[bool]>,
        excluded: &[bool],
    ) -> Result<Recursion> {
        let indexed: Vec<(usize, Gap)> = self.gaps.iter().copied().enumerate().collect();
        let evals = par::map(cfg.execution, &indexed, |(k, gap)| {
            evaluate_gap(g, *k, gap, cfg, scope, excluded)
        });
        let mut union = vec![false; g.vertex_count()];
        let mut candidates = Vec::new();
        let mut visited = 0;
        for eval in evals {
            let eval = eval?;
            visited += eval.visited;
            for v in eval.members {
                union[v.index()] = true;
            }
            candidates.extend(eval.candidates);
        }
        candidates.sort_by(|a, b| {
            b.ratio
                .total_cmp(&a.ratio)
                .then(a.arc.cmp(&b.arc))
                .then(a.gap.cmp(&b.gap))
        });
        Ok(Recursion {
            candidates,
            visited,
            union,
        })
    }

    /// Inserts the best candidate that stitches feasibly. Every rejected
    /// candidate is flagged in `excluded`. Returns the new skeleton and the
    /// number of rollbacks.
    pub fn insert_best(
        &self,
        g: &TdGraph,
        rec: &Recursion,
        excluded: &mut [bool],
        epsilon: f64,
    ) -> (Option<Skeleton>, usize) {
        let mut rollbacks = 0;
        for cand in &rec.candidates {
            if excluded[cand.arc.index()] {
                continue;
            }
            excluded[cand.arc.index()] = true;
            match self.insert(g, cand, epsilon) {
                Some(next) => return (Some(next), rollbacks),
                None => rollbacks += 1,
            }
        }
        (None, rollbacks)
    }
}

/// Counters collected by [`Skeleton::greedy`].
#[derive(Debug, Default)]
pub(crate) struct PhaseStats {
    pub visited_vertex_counts: Vec<usize>,
    pub rollbacks: usize,
    pub recursion_cap_reached: bool,
    pub terminated_early: bool,
}

impl Skeleton {
    /// Inserts best-ratio arcs until none fits. The first recursion searches
    /// the whole graph, later ones the union of its gap intersections.
    pub(crate) fn greedy(
        mut self,
        g: &TdGraph,
        cfg: &SolverConfig,
        excluded: &mut [bool],
        started: Instant,
        stats: &mut PhaseStats,
    ) -> Result<Skeleton> {
        let mut scope: Option<Vec<bool>> = None;
        loop {
            if cfg.max_recursions.is_some_and(|cap| stats.visited_vertex_counts.len() >= cap) {
                stats.recursion_cap_reached = true;
                return Ok(self);
            }
            if cfg.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
                stats.terminated_early = true;
                return Ok(self);
            }
            let rec = self.evaluate(g, cfg, scope.as_deref(), excluded)?;
            stats.visited_vertex_counts.push(rec.visited);
            if scope.is_none() || cfg.restrict_recursion_graph {
                scope = Some(rec.union.clone());
            }
            let (next, rb) = self.insert_best(g, &rec, excluded, cfg.prune.epsilon);
            stats.rollbacks += rb;
            match next {
                Some(next) => self = next,
                None => return Ok(self),
            }
        }
    }
}

fn evaluate_gap(
    g: &TdGraph,
    k: usize,
    gap: &Gap,
    cfg: &SolverConfig,
    scope: Option<&[bool]>,
    excluded: &[bool],
) -> Result<GapEval> {
    if gap.start_time > gap.end_deadline {
        return Ok(GapEval {
            members: Vec::new(),
            candidates: Vec::new(),
            visited: 0,
        });
    }
    let f = fwr_within(g, scope, gap.start, gap.start_time, gap.end_deadline, &cfg.prune, Some(gap.end))?;
    let b = bwr_within(g, scope, gap.end, gap.start_time, gap.end_deadline, &cfg.prune, Some(&f))?;
    let inter = intersect(&f, &b);
    let members = inter.members();
    let mut candidates = Vec::new();
    for &m in &members {
        for &a in g.out_arcs(m) {
            if excluded[a.index()] || !inter.contains(g.arc(a).head) {
                continue;
            }
            if let Some(c) = score_candidate(g, k, gap, a, &inter, cfg.ratio_mode, cfg.detour_floor) {
                if c.ratio > 0.0 {
                    candidates.push(c);
                }
            }
        }
    }
    Ok(GapEval {
        members,
        candidates,
        visited: f.visited_forward + b.visited_backward,
    })
}

/// Solves a query with RecInsert. Fails with [`Error::Infeasible`] when the
/// destination can not be reached within the budget.
pub fn solve(g: &TdGraph, q: &Query, cfg: &SolverConfig) -> Result<SolveResult> {
    let started = Instant::now();
    q.validate(g)?;
    cfg.validate(g)?;
    let sk = Skeleton::start(g, q).ok_or(Error::Infeasible)?;

    let mut excluded = vec![false; g.arc_count()];
    let mut stats = PhaseStats::default();
    let sk = sk.greedy(g, cfg, &mut excluded, started, &mut stats)?;
    let PhaseStats {
        visited_vertex_counts,
        rollbacks,
        recursion_cap_reached,
        terminated_early,
    } = stats;

    let path = sk.path;
    debug_assert!(path.is_feasible(g, q));
    Ok(SolveResult {
        value: path.value(g),
        travel_time: path.travel_time(),
        recursions: visited_vertex_counts.len(),
        visited_vertex_counts,
        wall_time: started.elapsed(),
        inserted_arcs: sk.arcs,
        rollbacks,
        duplicate_arcs: !path.is_arc_simple(),
        recursion_cap_reached,
        terminated_early,
        path,
    })
}
