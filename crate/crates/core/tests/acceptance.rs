//! End-to-end acceptance checks. Each test prints one PASS/FAIL line with the
//! measured numbers before asserting.

mod common;

use std::io::Write;
use std::time::Instant;

use common::{brute_optimum, instance, Simple};
use tdaop::fixtures::{self, V0, V1, V4, V5, V6, VN};
use tdaop::harness::{bucket_queries, generate, run_experiments, Algorithm, BucketOptions, ExperimentConfig, GenSpec, QueryRecord};
use tdaop::mip::{build_mip, check_path, export_mip, parse_lp, DEFAULT_VARIABLE_CAP};
use tdaop::reach::DEFAULT_EPSILON;
use tdaop::{
    bwr, exact_solve, fwr, intersect, solve, static_aop, td_revalidate, Error, PruneConfig, Query, SolverConfig, TdGraph,
    TimedPath, Validity, VertexId,
};

fn report(n: u32, pass: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

fn network(vertices: usize, amplitude: f64, density: f64, seed: u64) -> TdGraph {
    generate(&GenSpec {
        vertex_count: vertices,
        congestion_amplitude: amplitude,
        value_arc_density: density,
        seed,
        ..GenSpec::default()
    })
    .unwrap()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

#[test]
fn c1_worked_example() {
    let started = Instant::now();
    let g = fixtures::worked_example();
    let q = Query::new(V0, VN, 0.0, 4.0);
    let cfg = PruneConfig::none();
    let f = fwr(&g, V0, 0.0, q.deadline(), &cfg, None).unwrap();
    let b = bwr(&g, VN, 0.0, q.deadline(), &cfg, Some(&f)).unwrap();
    let mut paths = Vec::new();
    common::for_each_simple_path(&g, V0, 0.0, q.deadline(), |v, t, arcs| {
        if v == VN {
            paths.push((t, arcs.to_vec()));
        }
    });
    let mut times: Vec<f64> = paths.iter().map(|p| p.0).collect();
    times.sort_by(f64::total_cmp);
    let checks = [
        f.ea(V1) == Some(1.0),
        f.ea(VN) == Some(3.0),
        f.ea(V5).is_none(),
        b.ld(V6) == Some(3.0),
        b.ld(V4) == Some(2.0 - DEFAULT_EPSILON),
        times == [3.0, 3.5],
    ];
    let elapsed = started.elapsed().as_secs_f64();
    let pass = checks.iter().all(|c| *c) && elapsed < 1.0;
    report(1, pass, &format!("checks {checks:?} path times {times:?} in {elapsed:.3}s"));
    assert!(pass);
}

#[test]
fn c2_oracle_matches_enumeration() {
    let started = Instant::now();
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for seed in 0..120u64 {
        let n = 8 + (seed % 8) as usize;
        let g = instance(10_000 + seed, n, 1 + (seed % 4) as usize, false);
        let s = VertexId((seed % n as u64) as u32);
        let d = VertexId(((seed * 7 + 1) % n as u64) as u32);
        if s == d {
            continue;
        }
        let q = Query::new(s, d, (seed % 20) as f64, 20.0 + (seed % 5) as f64 * 5.0);
        let got = match exact_solve(&g, &q, None) {
            Ok(r) => Some(r.optimal_value),
            Err(Error::Infeasible) => None,
            Err(e) => panic!("{e}"),
        };
        let want = brute_optimum(&g, &q, Simple::Vertex).map(|b| b.0);
        compared += 1;
        if got != want {
            mismatches.push(seed);
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = compared >= 100 && mismatches.is_empty() && elapsed < 60.0;
    report(2, pass, &format!("{compared} instances, mismatches {mismatches:?}, {elapsed:.2}s"));
    assert!(pass);
}

fn generated_queries(seeds: std::ops::Range<u64>, amplitude: f64, per_bucket: usize) -> Vec<(TdGraph, Vec<QueryRecord>)> {
    seeds
        .map(|seed| {
            let g = network(900, amplitude, 0.02, seed);
            let qs = bucket_queries(&g, &[4, 6, 8, 10], per_bucket, seed, &BucketOptions::default()).unwrap();
            (g, qs)
        })
        .collect()
}

#[test]
fn c3_recinsert_is_always_valid() {
    let mut total = 0;
    let mut invalid = 0;
    for (g, qs) in generated_queries(0..5, 0.5, 25) {
        for rec in &qs {
            let q = rec.query();
            let r = solve(&g, &q, &SolverConfig::default()).unwrap();
            total += 1;
            let ok = td_revalidate(&g, &r.path, &q).unwrap() == Validity::Valid && r.path.is_feasible(&g, &q);
            invalid += usize::from(!ok);
        }
    }
    let pass = total >= 500 && invalid == 0;
    report(3, pass, &format!("{invalid} invalid of {total} queries"));
    assert!(pass);
}

#[test]
fn c4_pruning_is_sound_and_effective() {
    let configs = PruneConfig::ablation();
    let mut queries = 0;
    let mut differing = Vec::new();
    let mut fewer = 0;
    let mut reduction_both = Vec::new();
    let mut reduction_fwest = Vec::new();
    for (g, qs) in generated_queries(20..24, 0.5, 8) {
        for rec in &qs {
            let q = rec.query();
            let mut members = Vec::new();
            let mut paths = Vec::new();
            let mut visited = Vec::new();
            for (_, p) in &configs {
                let f = fwr(&g, q.source, q.t0, q.deadline(), p, Some(q.destination)).unwrap();
                let b = bwr(&g, q.destination, q.t0, q.deadline(), p, Some(&f)).unwrap();
                members.push(intersect(&f, &b).members());
                let r = solve(&g, &q, &SolverConfig::with_prune(*p)).unwrap();
                paths.push(r.path.arcs().to_vec());
                visited.push(r.visited_vertices() as f64);
            }
            queries += 1;
            if members.iter().any(|m| *m != members[0]) || paths.iter().any(|p| *p != paths[0]) {
                differing.push(rec.id);
            }
            let (none, fwest, both) = (visited[0], visited[1], visited[3]);
            fewer += usize::from(both < none);
            reduction_both.push(1.0 - both / none);
            reduction_fwest.push(1.0 - fwest / none);
        }
    }
    let share = fewer as f64 / queries as f64;
    let (rb, rf) = (mean(&reduction_both), mean(&reduction_fwest));
    let pass = differing.is_empty() && share >= 0.95 && rb >= 0.20 && rf >= 0.10;
    report(
        4,
        pass,
        &format!(
            "{queries} queries, differing {differing:?}, fewer visits on {:.1}%, mean reduction both {:.1}% fwest {:.1}%",
            100.0 * share,
            100.0 * rb,
            100.0 * rf
        ),
    );
    assert!(pass);
}

#[test]
fn c5_accuracy_band() {
    let mut rec_acc = Vec::new();
    let mut static_acc = Vec::new();
    let mut skipped = 0;
    for seed in 40..46 {
        let g = network(225, 0.5, 0.02, seed);
        let qs = bucket_queries(&g, &[3, 4, 5], 6, seed, &BucketOptions::default()).unwrap();
        let algs = [Algorithm::RecInsert(PruneConfig::both()), Algorithm::StaticAop, Algorithm::Oracle];
        let cfg = ExperimentConfig {
            oracle_node_limit: Some(5_000_000),
            ..ExperimentConfig::default()
        };
        let report = run_experiments(&g, &qs, &algs, &cfg);
        for rec in &qs {
            let rows: Vec<_> = report.rows.iter().filter(|r| r.query_id == rec.id).collect();
            if rows[2].error.is_some() {
                skipped += 1;
                continue;
            }
            if let (Some(a), Some(b)) = (rows[0].accuracy, rows[1].accuracy) {
                rec_acc.push(a);
                static_acc.push(b);
            }
        }
    }
    let (r, s) = (mean(&rec_acc), mean(&static_acc));
    let pass = !rec_acc.is_empty() && r >= 0.4 && s < r;
    report(
        5,
        pass,
        &format!("{} solved queries ({skipped} over the node limit), accuracy recinsert {r:.3} static {s:.3}", rec_acc.len()),
    );
    assert!(pass);
}

#[test]
fn c6_static_paths_break_under_congestion() {
    let mut rows = Vec::new();
    for (g, qs) in generated_queries(60..63, 0.9, 8) {
        let algs = [Algorithm::RecInsert(PruneConfig::both()), Algorithm::StaticAop];
        rows.extend(run_experiments(&g, &qs, &algs, &ExperimentConfig::default()).rows);
    }
    let rate = |name: &str| {
        let ok: Vec<_> = rows.iter().filter(|r| r.algorithm == name && r.error.is_none()).collect();
        ok.iter().filter(|r| !r.feasible).count() as f64 / ok.len().max(1) as f64
    };
    let failures = rows.iter().filter(|r| r.algorithm == "recinsert_both" && r.error.is_some()).count();
    let (s, r) = (rate("static"), rate("recinsert_both"));
    let pass = s > 0.0 && r == 0.0 && failures == 0;
    report(6, pass, &format!("invalid static {:.1}% recinsert {:.1}% ({failures} recinsert errors)", 100.0 * s, 100.0 * r));
    assert!(pass);
}

#[test]
fn c7_mip_consistency() {
    let mut checked = 0;
    let mut problems = Vec::new();
    for seed in 0..60u64 {
        let g = instance(20_000 + seed, 6, 1 + (seed % 3) as usize, false);
        let q = Query::new(0usize, 5usize, (seed % 7) as f64, 30.0);
        let mut buf = Vec::new();
        let m = export_mip(&g, &q, DEFAULT_VARIABLE_CAP, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        if parse_lp(&text).unwrap().canonical() != m.canonical() {
            problems.push(format!("seed {seed}: round trip"));
        }
        let Ok(r) = exact_solve(&g, &q, None) else { continue };
        assert_eq!(build_mip(&g, &q, DEFAULT_VARIABLE_CAP).unwrap().canonical(), m.canonical());
        match check_path(&m, &g, &q, &r.optimal_path, 1e-9).unwrap() {
            Ok(obj) if (obj - r.optimal_value).abs() <= 1e-9 * r.optimal_value.abs().max(1.0) => checked += 1,
            Ok(obj) => problems.push(format!("seed {seed}: objective {obj} vs {}", r.optimal_value)),
            Err(rows) => problems.push(format!("seed {seed}: violated {rows:?}")),
        }
    }
    let pass = checked >= 20 && problems.is_empty();
    report(7, pass, &format!("{checked} optimal paths checked, problems {problems:?}"));
    assert!(pass);
}

#[test]
fn c8_large_query_is_fast() {
    let g = generate(&GenSpec {
        vertex_count: 10_000,
        window_count_tt: 144,
        arcs_per_vertex: 3.0,
        value_arc_density: 0.02,
        seed: 8,
        ..GenSpec::default()
    })
    .unwrap();
    let rec = bucket_queries(&g, &[20], 1, 8, &BucketOptions::default()).unwrap()[0];
    let q = rec.query();
    let started = Instant::now();
    let r = solve(&g, &q, &SolverConfig::with_prune(PruneConfig::both())).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let pass = elapsed < 5.0 && r.path.is_feasible(&g, &q) && g.arc_count() >= 29_000;
    report(
        8,
        pass,
        &format!(
            "{} vertices {} arcs, {} recursions, value {}, {elapsed:.3}s",
            g.vertex_count(),
            g.arc_count(),
            r.recursions,
            r.value
        ),
    );
    assert!(pass);
}

#[test]
fn c9_static_instances_agree() {
    let mut total = 0;
    let mut equal = 0;
    let mut equal_first_phase = 0;
    let mut above_oracle = Vec::new();
    for seed in 80..84 {
        let g = network(225, 0.0, 0.05, seed).staticize();
        let qs = bucket_queries(&g, &[3, 4, 5], 5, seed, &BucketOptions::default()).unwrap();
        for rec in &qs {
            let q = rec.query();
            let r = solve(&g, &q, &SolverConfig::default()).unwrap();
            let s: TimedPath = static_aop(&g, &q, tdaop::baselines::DEFAULT_ITERATIONS, rec.id as u64).unwrap();
            let sv = s.value(&g);
            total += 1;
            let same = |v: f64| (r.value - v).abs() <= 1e-9 * r.value.max(1.0);
            equal += usize::from(same(sv));
            equal_first_phase += usize::from(same(static_aop(&g, &q, 1, 0).unwrap().value(&g)));
            let cfg = tdaop::OracleConfig {
                mode: tdaop::SimpleMode::Arc,
                node_limit: Some(5_000_000),
                incumbent: Some(r.path.clone()),
            };
            if let Ok(o) = tdaop::exact_solve_with(&g, &q, &cfg) {
                if r.value > o.optimal_value || sv > o.optimal_value {
                    above_oracle.push(rec.id);
                }
            }
        }
    }
    let share = equal as f64 / total as f64;
    let pass = share >= 0.95 && above_oracle.is_empty();
    report(
        9,
        pass,
        &format!(
            "equal values on {equal}/{total} ({:.1}%), after one local search phase {equal_first_phase}/{total}, above oracle {above_oracle:?}",
            100.0 * share
        ),
    );
    assert!(pass);
}
