//! Seeded synthetic road networks.
//!
//! Vertices sit on a square lattice about 200 m apart; every road is a pair
//! of opposite arcs. Free-flow speeds are 5 to 20 m/s. Congestion scales the
//! free-flow time by `1 + amplitude * sensitivity * (rush(t) + noise)`, where
//! `rush` peaks in the morning and evening. A `value_arc_density` fraction of
//! arcs carries a value peak in one daytime window, with half the value in
//! the neighbouring windows.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, Point, TdGraph};
use crate::profile::StepProfile;

pub const DAY: f64 = 86_400.0;
const SPACING: f64 = 200.0;
const MIN_SPEED: f64 = 5.0;
const MAX_SPEED: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    /// Full lattice, every neighbour pair connected.
    Grid,
    /// Jittered lattice with a random spanning tree plus random extra roads.
    RandomPlanar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: NetworkKind,
    pub vertex_count: usize,
    pub window_count_tt: usize,
    pub window_count_val: usize,
    pub value_arc_density: f64,
    pub congestion_amplitude: f64,
    pub seed: u64,
    /// Target arcs per vertex for `RandomPlanar`.
    pub arcs_per_vertex: f64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            kind: NetworkKind::RandomPlanar,
            vertex_count: 1_000,
            window_count_tt: 288,
            window_count_val: 24,
            value_arc_density: 0.02,
            congestion_amplitude: 0.5,
            seed: 0,
            arcs_per_vertex: 3.0,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.vertex_count < 2 {
            return bad("need at least two vertices");
        }
        if self.window_count_tt == 0 || self.window_count_val == 0 {
            return bad("window counts must be positive");
        }
        if !(0.0..=1.0).contains(&self.value_arc_density) {
            return bad("value arc density must lie in [0, 1]");
        }
        if !(self.congestion_amplitude.is_finite() && self.congestion_amplitude >= 0.0) {
            return bad("congestion amplitude must be non-negative");
        }
        if self.kind == NetworkKind::RandomPlanar && !(self.arcs_per_vertex.is_finite() && self.arcs_per_vertex > 0.0) {
            return bad("arcs per vertex must be positive");
        }
        Ok(())
    }

    pub fn tt_step(&self) -> f64 {
        DAY / self.window_count_tt as f64
    }

    pub fn val_step(&self) -> f64 {
        DAY / self.window_count_val as f64
    }
}

/// Relative congestion at hour `h`: morning and evening peaks, quiet night.
fn rush(h: f64) -> f64 {
    let bump = |centre: f64, width: f64| (-((h - centre) / width).powi(2)).exp();
    0.2 * bump(13.0, 4.0) + bump(8.5, 1.5) + bump(17.5, 2.0)
}

/// Generates the network described by `spec`; identical specs give
/// identical graphs.
pub fn generate(spec: &GenSpec) -> Result<TdGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.vertex_count;
    let side = (n as f64).sqrt().ceil() as usize;
    let jitter = match spec.kind {
        NetworkKind::Grid => 0.0,
        NetworkKind::RandomPlanar => 0.3 * SPACING,
    };
    let coords: Vec<Point> = (0..n)
        .map(|i| {
            let (r, c) = (i / side, i % side);
            let mut dx = 0.0;
            let mut dy = 0.0;
            if jitter > 0.0 {
                dx = rng.gen_range(-jitter..jitter);
                dy = rng.gen_range(-jitter..jitter);
            }
            Point::new(c as f64 * SPACING + dx, r as f64 * SPACING + dy)
        })
        .collect();

    let mut lattice = Vec::new();
    for i in 0..n {
        let (r, c) = (i / side, i % side);
        if c + 1 < side && i + 1 < n {
            lattice.push((i, i + 1));
        }
        if (r + 1) * side + c < n {
            lattice.push((i, i + side));
        }
    }
    let roads = match spec.kind {
        NetworkKind::Grid => lattice,
        NetworkKind::RandomPlanar => planar_roads(lattice, n, spec.arcs_per_vertex, &mut rng),
    };

    let tt_step = spec.tt_step();
    let shape: Vec<f64> = (0..spec.window_count_tt)
        .map(|k| rush((k as f64 + 0.5) * tt_step / 3600.0))
        .collect();
    let mut b = GraphBuilder::with_coords(coords.clone());
    let mut arcs = Vec::with_capacity(2 * roads.len());
    for &(u, v) in &roads {
        arcs.push((u, v));
        arcs.push((v, u));
    }
    for &(u, v) in &arcs {
        let d = coords[u].distance(&coords[v]).max(1.0);
        let base = d / rng.gen_range(MIN_SPEED..MAX_SPEED);
        let sensitivity = rng.gen_range(0.5..1.0);
        let values = shape
            .iter()
            .map(|s| {
                let noise = rng.gen_range(0.0..0.2);
                base * (1.0 + spec.congestion_amplitude * sensitivity * (s + noise))
            })
            .collect();
        let tt = StepProfile::new(tt_step, values)?.compacted();
        b.add_arc(u, v, tt, StepProfile::constant(0.0)?);
    }
    let g = b.build()?;

    let m = g.arc_count();
    let valued = (spec.value_arc_density * m as f64).round() as usize;
    let mut ids: Vec<usize> = (0..m).collect();
    ids.shuffle(&mut rng);
    let mut vals: Vec<StepProfile> = g.arcs().iter().map(|a| a.val.clone()).collect();
    let daytime: Vec<usize> = (0..spec.window_count_val)
        .filter(|&k| {
            let h = (k as f64 + 0.5) * spec.val_step() / 3600.0;
            (7.0..21.0).contains(&h)
        })
        .collect();
    for &a in &ids[..valued] {
        let v = rng.gen_range(1..=10) as f64;
        vals[a] = if spec.window_count_val == 1 || daytime.is_empty() {
            StepProfile::constant(v)?
        } else {
            let peak = daytime[rng.gen_range(0..daytime.len())];
            let mut w = vec![0.0; spec.window_count_val];
            w[peak] = v;
            if peak > 0 {
                w[peak - 1] = v / 2.0;
            }
            if peak + 1 < w.len() {
                w[peak + 1] = v / 2.0;
            }
            StepProfile::new(spec.val_step(), w)?
        };
    }
    g.with_values(vals)
}

/// Random spanning tree over the lattice plus random extra lattice roads,
/// until the directed arc count reaches `arcs_per_vertex * n`.
fn planar_roads(mut lattice: Vec<(usize, usize)>, n: usize, arcs_per_vertex: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    lattice.shuffle(rng);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut roads = Vec::new();
    let mut rest = Vec::new();
    for (u, v) in lattice {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            roads.push((u, v));
        } else {
            rest.push((u, v));
        }
    }
    let target = ((arcs_per_vertex * n as f64 / 2.0).round() as usize).max(roads.len());
    let extra = target - roads.len();
    roads.extend(rest.into_iter().take(extra));
    let mut seen = HashSet::new();
    roads.retain(|e| seen.insert(*e));
    roads.sort_unstable();
    roads
}
