//! Twofold time-dependent arc orienteering.
//!
//! Given a road network whose arcs carry time-dependent travel times and
//! time-dependent values, find a path from a source to a destination that
//! collects as much value as possible while arriving within a time budget.
//!
//! * [`reach`]: forward and backward reachability with optional pruning.
//! * [`solver`]: the RecInsert heuristic.
//! * [`oracle`] and [`mip`]: exact answers and model export for small instances.
//! * [`baselines`]: fastest path and a static local search.
//! * [`harness`]: generators, files and experiment runs.

pub mod baselines;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod harness;
pub mod mip;
pub mod oracle;
pub mod par;
pub mod profile;
pub mod reach;
pub mod router;
pub mod solver;

pub use baselines::{fastest, static_aop, td_revalidate, Validity};
pub use error::{Error, Result};
pub use graph::{path_travel_time, path_value, Arc, ArcId, GraphBuilder, Point, Query, TdGraph, TimedPath, VertexId};
pub use oracle::{exact_solve, exact_solve_with, OracleConfig, OracleResult, SimpleMode};
pub use par::Execution;
pub use profile::StepProfile;
pub use reach::{bwr, fwest_bound, fwr, intersect, PruneConfig, ReachLabels};
pub use router::td_fastest_path;
pub use solver::{score_candidate, solve, stitch, Gap, InsertionCandidate, RatioMode, SolveResult, SolverConfig};
