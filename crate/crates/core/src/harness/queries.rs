//! Queries grouped by the duration of their fastest path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{TdGraph, VertexId};
use crate::harness::io::QueryRecord;
use crate::reach::{forward, Forward};

pub const DEFAULT_BUCKETS: [u32; 6] = [5, 10, 15, 20, 25, 30];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketOptions {
    /// A pair belongs to bucket `k` if its fastest path takes `k` minutes
    /// plus or minus this many seconds.
    pub tolerance_s: f64,
    /// Departures are drawn uniformly from `[day_start_s, day_end_s)`.
    pub day_start_s: f64,
    pub day_end_s: f64,
    /// Budget as a multiple of the bucket duration.
    pub budget_factor: f64,
    /// Source samples per requested query before giving up on a bucket.
    pub attempts_per_query: usize,
}

impl Default for BucketOptions {
    fn default() -> Self {
        Self {
            tolerance_s: 30.0,
            day_start_s: 8.0 * 3600.0,
            day_end_s: 20.0 * 3600.0,
            budget_factor: 2.0,
            attempts_per_query: 50,
        }
    }
}

/// Draws `per_bucket` queries for each bucket. Each draw picks a source and
/// a departure time, runs one forward search, and picks a destination whose
/// earliest arrival falls inside the bucket.
pub fn bucket_queries(
    g: &TdGraph,
    bucket_minutes: &[u32],
    per_bucket: usize,
    seed: u64,
    opts: &BucketOptions,
) -> Result<Vec<QueryRecord>> {
    if !(opts.day_end_s > opts.day_start_s && opts.day_start_s >= 0.0) {
        return Err(Error::Config("empty departure window".into()));
    }
    if !(opts.tolerance_s >= 0.0 && opts.budget_factor >= 0.0) {
        return Err(Error::Config("tolerance and budget factor must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let n = g.vertex_count();
    for &minutes in bucket_minutes {
        let target = minutes as f64 * 60.0;
        let attempts = per_bucket * opts.attempts_per_query;
        let mut filled = 0;
        let mut tried = 0;
        while filled < per_bucket {
            if tried == attempts {
                return Err(Error::BucketUnfillable { minutes, attempts });
            }
            tried += 1;
            let source = VertexId::from(rng.gen_range(0..n));
            let t0 = rng.gen_range(opts.day_start_s..opts.day_end_s);
            let labels = forward(
                g,
                source,
                t0,
                Forward {
                    deadline: t0 + target + opts.tolerance_s,
                    fwest: None,
                    scope: None,
                    stop_at: None,
                },
            );
            let hits: Vec<VertexId> = labels
                .forward_vertices()
                .into_iter()
                .filter(|&v| labels.ea(v).is_some_and(|ea| (ea - t0 - target).abs() <= opts.tolerance_s))
                .collect();
            if hits.is_empty() {
                continue;
            }
            let destination = hits[rng.gen_range(0..hits.len())];
            out.push(QueryRecord {
                id: out.len(),
                source: source.0,
                destination: destination.0,
                t0,
                budget: opts.budget_factor * target,
                bucket_minutes: Some(minutes),
            });
            filled += 1;
        }
    }
    Ok(out)
}
