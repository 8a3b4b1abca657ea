//! Runs algorithms over a query set and collects one report row per
//! (query, algorithm).

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{fastest, static_aop, td_revalidate, DEFAULT_ITERATIONS};
use crate::error::{Error, Result};
use crate::graph::{TdGraph, TimedPath};
use crate::harness::io::QueryRecord;
use crate::oracle::{exact_solve_with, OracleConfig, SimpleMode};
use crate::par::{self, Execution};
use crate::reach::PruneConfig;
use crate::solver::{solve, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    RecInsert(PruneConfig),
    Fastest,
    /// Iterated local search on the averaged graph, judged in time.
    StaticAop,
    Oracle,
}

impl Algorithm {
    pub fn name(&self) -> String {
        match self {
            Algorithm::RecInsert(p) => {
                let label = PruneConfig::ablation()
                    .into_iter()
                    .find(|(_, c)| c == p)
                    .map_or("custom", |(l, _)| l);
                format!("recinsert_{label}")
            }
            Algorithm::Fastest => "fastest".into(),
            Algorithm::StaticAop => "static".into(),
            Algorithm::Oracle => "oracle".into(),
        }
    }

    /// RecInsert under every pruning configuration.
    pub fn ablation() -> Vec<Algorithm> {
        PruneConfig::ablation().into_iter().map(|(_, p)| Algorithm::RecInsert(p)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Template for RecInsert runs; the pruning configuration comes from the algorithm.
    pub solver: SolverConfig,
    pub static_iterations: usize,
    pub seed: u64,
    pub oracle_mode: SimpleMode,
    pub oracle_node_limit: Option<u64>,
    /// How queries are scheduled; each query runs its algorithms sequentially.
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig {
                execution: Execution::Sequential,
                ..SolverConfig::default()
            },
            static_iterations: DEFAULT_ITERATIONS,
            seed: 0,
            oracle_mode: SimpleMode::Arc,
            oracle_node_limit: Some(20_000_000),
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub query_id: usize,
    pub bucket_minutes: Option<u32>,
    pub budget: f64,
    pub algorithm: String,
    pub value: Option<f64>,
    pub travel_time: Option<f64>,
    /// Arrives by the deadline when evaluated in time.
    pub feasible: bool,
    pub visited_vertices: Option<u64>,
    pub wall_time_s: f64,
    /// Value over the oracle optimum, when one is known and positive.
    /// Infeasible results score 0.
    pub accuracy: Option<f64>,
    pub path_arcs: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub runs: usize,
    pub errors: usize,
    /// Fraction of successful runs that are feasible in time.
    pub feasible_rate: f64,
    pub mean_value: f64,
    pub mean_accuracy: Option<f64>,
    pub mean_visited: Option<f64>,
    pub mean_wall_time_s: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl ExperimentReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let rows = r.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(Self { rows })
    }

    pub fn rows_for<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }

    /// Per-algorithm aggregates in first-appearance order.
    pub fn summary(&self) -> Vec<AlgorithmSummary> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.algorithm.as_str()) {
                names.push(&r.algorithm);
            }
        }
        names
            .into_iter()
            .map(|name| {
                let rows: Vec<&ReportRow> = self.rows_for(name).collect();
                let ok: Vec<&&ReportRow> = rows.iter().filter(|r| r.error.is_none()).collect();
                AlgorithmSummary {
                    algorithm: name.to_string(),
                    runs: rows.len(),
                    errors: rows.len() - ok.len(),
                    feasible_rate: mean(ok.iter().map(|r| if r.feasible { 1.0 } else { 0.0 })).unwrap_or(0.0),
                    mean_value: mean(ok.iter().filter_map(|r| r.value)).unwrap_or(0.0),
                    mean_accuracy: mean(rows.iter().filter_map(|r| r.accuracy)),
                    mean_visited: mean(ok.iter().filter_map(|r| r.visited_vertices.map(|v| v as f64))),
                    mean_wall_time_s: mean(rows.iter().map(|r| r.wall_time_s)).unwrap_or(0.0),
                }
            })
            .collect()
    }
}

fn arcs_string(p: &TimedPath) -> String {
    p.arcs().iter().map(|a| a.0.to_string()).collect::<Vec<_>>().join(" ")
}

/// Runs every algorithm on every query. Per-query failures are recorded in
/// the `error` column and the run continues.
pub fn run_experiments(g: &TdGraph, queries: &[QueryRecord], algorithms: &[Algorithm], cfg: &ExperimentConfig) -> ExperimentReport {
    let g_static = algorithms.contains(&Algorithm::StaticAop).then(|| g.staticize());
    let per_query = par::map(cfg.execution, queries, |rec| run_query(g, g_static.as_ref(), rec, algorithms, cfg));
    ExperimentReport {
        rows: per_query.into_iter().flatten().collect(),
    }
}

fn run_query(g: &TdGraph, g_static: Option<&TdGraph>, rec: &QueryRecord, algorithms: &[Algorithm], cfg: &ExperimentConfig) -> Vec<ReportRow> {
    let q = rec.query();
    let blank = |algorithm: &Algorithm| ReportRow {
        query_id: rec.id,
        bucket_minutes: rec.bucket_minutes,
        budget: rec.budget,
        algorithm: algorithm.name(),
        value: None,
        travel_time: None,
        feasible: false,
        visited_vertices: None,
        wall_time_s: 0.0,
        accuracy: None,
        path_arcs: None,
        error: None,
    };
    let fill = |row: &mut ReportRow, p: &TimedPath| {
        row.value = Some(p.value(g));
        row.travel_time = Some(p.travel_time());
        row.feasible = p.is_feasible(g, &q);
        row.path_arcs = Some(arcs_string(p));
    };
    let mut rows = Vec::with_capacity(algorithms.len());
    let mut heuristic: Option<TimedPath> = None;
    let mut oracle_row = None;

    for alg in algorithms {
        let mut row = blank(alg);
        let started = Instant::now();
        let outcome: Result<()> = (|| {
            match alg {
                Algorithm::RecInsert(prune) => {
                    let r = solve(g, &q, &SolverConfig { prune: *prune, ..cfg.solver })?;
                    fill(&mut row, &r.path);
                    row.visited_vertices = Some(r.visited_vertices() as u64);
                    if heuristic.as_ref().is_none_or(|h| r.value > h.value(g)) {
                        heuristic = Some(r.path);
                    }
                }
                Algorithm::Fastest => fill(&mut row, &fastest(g, &q)?),
                Algorithm::StaticAop => {
                    let gs = g_static.expect("static graph prepared");
                    let p = static_aop(gs, &q, cfg.static_iterations, cfg.seed ^ rec.id as u64)?;
                    let p = p.reevaluate(g, q.t0)?;
                    fill(&mut row, &p);
                    row.feasible = td_revalidate(g, &p, &q)?.is_valid() && p.end(g) == q.destination;
                }
                Algorithm::Oracle => {
                    let incumbent = heuristic.clone().filter(|p| match cfg.oracle_mode {
                        SimpleMode::Vertex => p.is_vertex_simple(g),
                        SimpleMode::Arc => p.is_arc_simple(),
                    });
                    let oc = OracleConfig {
                        mode: cfg.oracle_mode,
                        node_limit: cfg.oracle_node_limit,
                        incumbent,
                    };
                    let r = exact_solve_with(g, &q, &oc)?;
                    fill(&mut row, &r.optimal_path);
                    row.visited_vertices = Some(r.explored_nodes);
                    oracle_row = Some(rows.len());
                }
            }
            Ok(())
        })();
        row.wall_time_s = started.elapsed().as_secs_f64();
        if let Err(e) = outcome {
            row.error = Some(match e {
                Error::Infeasible => "infeasible".to_string(),
                e => e.to_string(),
            });
        }
        rows.push(row);
    }

    let optimum = oracle_row.and_then(|i| rows[i].value).filter(|v| *v > 0.0);
    if let Some(opt) = optimum {
        for row in rows.iter_mut().filter(|r| r.error.is_none() && r.algorithm != "oracle") {
            let v = if row.feasible { row.value.unwrap_or(0.0) } else { 0.0 };
            row.accuracy = Some(v / opt);
        }
    }
    rows
}
