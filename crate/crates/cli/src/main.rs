//! `tdaop`: generate networks, answer queries, export MIP models and run
//! experiment batches.
//!
//! Exit status is 0 on success, 2 when the query is infeasible, 1 otherwise.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tdaop::harness::{
    bucket_queries, generate, read_network, read_queries, run_experiments, write_network, write_queries, Algorithm,
    BucketOptions, ExperimentConfig, GenSpec, NetworkKind, QueryRecord,
};
use tdaop::mip::{export_mip, DEFAULT_VARIABLE_CAP};
use tdaop::{
    exact_solve_with, solve, static_aop, td_revalidate, Error, Execution, OracleConfig, PruneConfig, Query, RatioMode,
    SimpleMode, SolverConfig, TdGraph, TimedPath, Validity, VertexId,
};

const THREADS_VAR: &str = "TDAOP_THREADS";

#[derive(Parser)]
#[command(name = "tdaop", version, about = "Time-dependent arc orienteering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network, and optionally a bucketed query file.
    Gen(GenArgs),
    /// Answer one query with RecInsert.
    Solve(SolveArgs),
    /// Solve one query exactly by branch and bound.
    Oracle(OracleArgs),
    /// Write the MIP model of one query in CPLEX LP format.
    ExportMip(ExportArgs),
    /// Run algorithms over a query file and write a report CSV.
    Bench(BenchArgs),
    /// Re-check static baseline paths under time-dependent travel times.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    RandomPlanar,
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for the four network CSV files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "random-planar")]
    kind: Kind,
    #[arg(long, default_value_t = GenSpec::default().vertex_count)]
    vertices: usize,
    #[arg(long, default_value_t = GenSpec::default().window_count_tt)]
    tt_windows: usize,
    #[arg(long, default_value_t = GenSpec::default().window_count_val)]
    val_windows: usize,
    /// Fraction of arcs that carry value.
    #[arg(long, default_value_t = GenSpec::default().value_arc_density)]
    density: f64,
    #[arg(long, default_value_t = GenSpec::default().congestion_amplitude)]
    amplitude: f64,
    #[arg(long, default_value_t = GenSpec::default().arcs_per_vertex)]
    arcs_per_vertex: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also sample queries into this CSV file.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Fastest-path durations in minutes, one bucket each.
    #[arg(long, value_delimiter = ',', default_values_t = tdaop::harness::DEFAULT_BUCKETS)]
    buckets: Vec<u32>,
    #[arg(long, default_value_t = 20)]
    per_bucket: usize,
    /// Allowed deviation from the bucket duration, seconds.
    #[arg(long, default_value_t = BucketOptions::default().tolerance_s)]
    tolerance: f64,
    /// Budget as a multiple of the bucket duration.
    #[arg(long, default_value_t = BucketOptions::default().budget_factor)]
    budget_factor: f64,
}

#[derive(Args)]
struct QueryArgs {
    /// Directory holding the network CSV files.
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    source: u32,
    #[arg(long)]
    destination: u32,
    /// Departure time, seconds.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Time budget, seconds.
    #[arg(long)]
    budget: f64,
}

impl QueryArgs {
    fn load(&self) -> anyhow::Result<(TdGraph, Query)> {
        let g = load_network(&self.network)?;
        Ok((g, Query::new(VertexId(self.source), VertexId(self.destination), self.t0, self.budget)))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Prune {
    None,
    Fwest,
    Eald,
    Both,
}

impl Prune {
    fn config(self, epsilon: f64) -> PruneConfig {
        let p = match self {
            Prune::None => PruneConfig::none(),
            Prune::Fwest => PruneConfig::fwest_only(),
            Prune::Eald => PruneConfig::eald_only(),
            Prune::Both => PruneConfig::both(),
        };
        PruneConfig { epsilon, ..p }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ratio {
    Detour,
    Remaining,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "eald")]
    prune: Prune,
    /// Boundary offset for latest departures, seconds.
    #[arg(long, default_value_t = tdaop::reach::DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "detour")]
    ratio: Ratio,
    /// Search only the current gap intersections in every recursion.
    #[arg(long)]
    restrict: bool,
    #[arg(long)]
    max_recursions: Option<usize>,
    /// Stop inserting after this many seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

impl SolverArgs {
    fn config(&self) -> anyhow::Result<SolverConfig> {
        let time_limit = self
            .time_limit
            .map(Duration::try_from_secs_f64)
            .transpose()
            .context("invalid time limit")?;
        Ok(SolverConfig {
            ratio_mode: match self.ratio {
                Ratio::Detour => RatioMode::ValuePerDetour,
                Ratio::Remaining => RatioMode::ValuePerRemainingBudget,
            },
            restrict_recursion_graph: self.restrict,
            prune: self.prune.config(self.epsilon),
            max_recursions: self.max_recursions,
            time_limit,
            execution: execution(self.sequential),
            ..SolverConfig::default()
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Simple {
    Vertex,
    Arc,
}

impl From<Simple> for SimpleMode {
    fn from(s: Simple) -> Self {
        match s {
            Simple::Vertex => SimpleMode::Vertex,
            Simple::Arc => SimpleMode::Arc,
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[arg(long, value_enum, default_value = "vertex")]
    mode: Simple,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// LP file to write; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VARIABLE_CAP)]
    variable_cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    /// Report CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Any of recinsert_none, recinsert_fwest, recinsert_eald, recinsert_both,
    /// fastest, static, oracle.
    #[arg(long, value_delimiter = ',', default_value = "recinsert_both,fastest,static")]
    algorithms: Vec<String>,
    #[arg(long, default_value_t = tdaop::baselines::DEFAULT_ITERATIONS)]
    static_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "arc")]
    oracle_mode: Simple,
    #[arg(long, default_value_t = 20_000_000)]
    oracle_node_limit: u64,
    #[arg(long, value_enum, default_value = "detour")]
    ratio: Ratio,
    #[arg(long)]
    restrict: bool,
    /// Run queries one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, default_value_t = tdaop::baselines::DEFAULT_ITERATIONS)]
    static_iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-query CSV with the re-evaluated arrival and excess.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_network(dir: &Path) -> anyhow::Result<TdGraph> {
    read_network(dir).with_context(|| format!("reading network from {}", dir.display()))
}

fn parse_algorithm(name: &str) -> anyhow::Result<Algorithm> {
    let found = Algorithm::ablation()
        .into_iter()
        .chain([Algorithm::Fastest, Algorithm::StaticAop, Algorithm::Oracle])
        .find(|a| a.name() == name);
    match found {
        Some(a) => Ok(a),
        None => bail!("unknown algorithm {name:?}"),
    }
}

fn arcs_list(p: &TimedPath) -> String {
    p.arcs().iter().map(|a| a.0.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_path(out: &mut impl Write, g: &TdGraph, p: &TimedPath) -> std::io::Result<()> {
    writeln!(out, "value\t{}", p.value(g))?;
    writeln!(out, "travel_time\t{}", p.travel_time())?;
    writeln!(out, "arrival\t{}", p.arrival())?;
    writeln!(out, "arcs\t{}", arcs_list(p))?;
    let vertices: Vec<String> = p.vertices(g).iter().map(|v| v.0.to_string()).collect();
    writeln!(out, "vertices\t{}", vertices.join(" "))
}

fn cmd_gen(a: &GenArgs) -> anyhow::Result<()> {
    let spec = GenSpec {
        kind: match a.kind {
            Kind::Grid => NetworkKind::Grid,
            Kind::RandomPlanar => NetworkKind::RandomPlanar,
        },
        vertex_count: a.vertices,
        window_count_tt: a.tt_windows,
        window_count_val: a.val_windows,
        value_arc_density: a.density,
        congestion_amplitude: a.amplitude,
        seed: a.seed,
        arcs_per_vertex: a.arcs_per_vertex,
    };
    let g = generate(&spec)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_network(&g, &a.out)?;
    println!("vertices\t{}\narcs\t{}", g.vertex_count(), g.arc_count());
    if let Some(path) = &a.queries {
        let opts = BucketOptions {
            tolerance_s: a.tolerance,
            budget_factor: a.budget_factor,
            ..BucketOptions::default()
        };
        let qs = bucket_queries(&g, &a.buckets, a.per_bucket, a.seed, &opts)?;
        write_queries(&qs, path)?;
        println!("queries\t{}", qs.len());
    }
    Ok(())
}

fn cmd_solve(a: &SolveArgs) -> anyhow::Result<()> {
    let (g, q) = a.query.load()?;
    let r = solve(&g, &q, &a.solver.config()?)?;
    let mut out = std::io::stdout().lock();
    print_path(&mut out, &g, &r.path)?;
    writeln!(out, "recursions\t{}", r.recursions)?;
    writeln!(out, "visited_vertices\t{}", r.visited_vertices())?;
    writeln!(out, "rollbacks\t{}", r.rollbacks)?;
    writeln!(out, "wall_time_s\t{}", r.wall_time.as_secs_f64())?;
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> anyhow::Result<()> {
    let (g, q) = a.query.load()?;
    let cfg = OracleConfig {
        mode: a.mode.into(),
        node_limit: a.node_limit,
        incumbent: None,
    };
    let r = exact_solve_with(&g, &q, &cfg)?;
    let mut out = std::io::stdout().lock();
    print_path(&mut out, &g, &r.optimal_path)?;
    writeln!(out, "explored_nodes\t{}", r.explored_nodes)?;
    writeln!(out, "wall_time_s\t{}", r.wall_time.as_secs_f64())?;
    Ok(())
}

fn cmd_export(a: &ExportArgs) -> anyhow::Result<()> {
    let (g, q) = a.query.load()?;
    let m = match &a.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            let m = export_mip(&g, &q, a.variable_cap, &mut w)?;
            w.flush()?;
            m
        }
        None => export_mip(&g, &q, a.variable_cap, &mut std::io::stdout().lock())?,
    };
    eprintln!("{} variables, {} rows", m.variable_count(), m.rows.len());
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<()> {
    let g = load_network(&a.network)?;
    let queries = read_queries(&a.queries)?;
    let algorithms = a.algorithms.iter().map(|s| parse_algorithm(s)).collect::<anyhow::Result<Vec<_>>>()?;
    let cfg = ExperimentConfig {
        solver: SolverConfig {
            ratio_mode: match a.ratio {
                Ratio::Detour => RatioMode::ValuePerDetour,
                Ratio::Remaining => RatioMode::ValuePerRemainingBudget,
            },
            restrict_recursion_graph: a.restrict,
            ..ExperimentConfig::default().solver
        },
        static_iterations: a.static_iterations,
        seed: a.seed,
        oracle_mode: a.oracle_mode.into(),
        oracle_node_limit: Some(a.oracle_node_limit),
        execution: execution(a.sequential),
    };
    let report = run_experiments(&g, &queries, &algorithms, &cfg);
    report.write_csv(&a.out)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "algorithm\truns\terrors\tfeasible\tmean_value\tmean_accuracy\tmean_visited\tmean_wall_s")?;
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
    for s in report.summary() {
        writeln!(
            out,
            "{}\t{}\t{}\t{:.3}\t{:.4}\t{}\t{}\t{:.4}",
            s.algorithm,
            s.runs,
            s.errors,
            s.feasible_rate,
            s.mean_value,
            opt(s.mean_accuracy),
            opt(s.mean_visited),
            s.mean_wall_time_s
        )?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct AuditRow {
    query_id: usize,
    static_value: f64,
    static_travel_time: f64,
    td_travel_time: f64,
    excess: f64,
    valid: bool,
}

fn audit_one(g: &TdGraph, gs: &TdGraph, rec: &QueryRecord, iterations: usize, seed: u64) -> tdaop::Result<AuditRow> {
    let q = rec.query();
    let p = static_aop(gs, &q, iterations, seed ^ rec.id as u64)?;
    let td = p.reevaluate(g, q.t0)?;
    let excess = match td_revalidate(g, &p, &q)? {
        Validity::Valid => 0.0,
        Validity::Invalid { excess } => excess,
    };
    Ok(AuditRow {
        query_id: rec.id,
        static_value: p.value(gs),
        static_travel_time: p.travel_time(),
        td_travel_time: td.travel_time(),
        excess,
        valid: excess == 0.0,
    })
}

fn cmd_audit(a: &AuditArgs) -> anyhow::Result<()> {
    let g = load_network(&a.network)?;
    let gs = g.staticize();
    let queries = read_queries(&a.queries)?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for rec in &queries {
        match audit_one(&g, &gs, rec, a.static_iterations, a.seed) {
            Ok(row) => rows.push(row),
            Err(Error::Infeasible) => skipped += 1,
            Err(e) => return Err(e).with_context(|| format!("query {}", rec.id)),
        }
    }
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    let invalid = rows.iter().filter(|r| !r.valid).count();
    let rate = if rows.is_empty() { 0.0 } else { invalid as f64 / rows.len() as f64 };
    println!("audited\t{}\ninfeasible\t{skipped}\ninvalid\t{invalid}\ninvalid_rate\t{rate:.4}", rows.len());
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::ExportMip(a) => cmd_export(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Audit(a) => cmd_audit(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tdaop::par::init_threads_from_env(THREADS_VAR);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<Error>(), Some(Error::Infeasible)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
