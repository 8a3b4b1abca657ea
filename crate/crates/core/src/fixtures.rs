//! Small reference networks and random instance builders shared by tests,
//! benches and the acceptance suite.

use rand::Rng;

use crate::graph::{GraphBuilder, Point, TdGraph, VertexId};
use crate::profile::StepProfile;

pub const V0: VertexId = VertexId(0);
pub const V1: VertexId = VertexId(1);
pub const V2: VertexId = VertexId(2);
pub const V3: VertexId = VertexId(3);
pub const V4: VertexId = VertexId(4);
pub const V5: VertexId = VertexId(5);
pub const V6: VertexId = VertexId(6);
pub const VN: VertexId = VertexId(7);

fn constant(v: f64) -> StepProfile {
    StepProfile::constant(v).expect("valid constant")
}

/// Eight-vertex example network with unit-width travel-time windows.
///
/// Departing `V0` at time 0 with budget 4, exactly two paths reach `VN` in
/// time: `V0 V4 VN` (3) and `V0 V1 V2 V6 VN` (3.5). `V5` and `V3` are too far
/// from the source, and `V3` has no way out. The arc `V4 -> VN` takes 2 when
/// entered before time 2 and 3 afterwards.
pub fn worked_example() -> TdGraph {
    build_example(constant(0.0))
}

/// [`worked_example`] with value 10 on `V2 -> V6` during window `[2, 3)`.
pub fn worked_example_with_value() -> TdGraph {
    build_example(StepProfile::new(1.0, vec![0.0, 0.0, 10.0, 0.0]).expect("valid profile"))
}

fn build_example(v2_v6_value: StepProfile) -> TdGraph {
    let zero = || constant(0.0);
    let mut b = GraphBuilder::new(8);
    b.add_arc(V0, V1, constant(1.0), zero());
    b.add_arc(V1, V2, constant(1.0), zero());
    b.add_arc(V2, V5, constant(3.0), zero());
    b.add_arc(V2, V6, constant(0.5), v2_v6_value);
    b.add_arc(V6, VN, constant(1.0), zero());
    b.add_arc(V0, V4, constant(1.0), zero());
    b.add_arc(
        V4,
        VN,
        StepProfile::new(1.0, vec![2.0, 2.0, 3.0, 3.0]).expect("valid profile"),
        zero(),
    );
    b.add_arc(V2, V3, constant(3.0), zero());
    b.add_arc(V5, VN, constant(1.0), zero());
    b.build().expect("example graph is valid")
}

/// Options for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphOptions {
    pub vertices: usize,
    pub windows: usize,
    /// Probability of each ordered pair being an arc.
    pub arc_probability: f64,
    /// Probability that an arc carries a non-zero value profile.
    pub value_probability: f64,
    /// Non-decreasing travel-time windows (FIFO arcs).
    pub fifo: bool,
    pub step: f64,
}

impl Default for RandomGraphOptions {
    fn default() -> Self {
        Self {
            vertices: 10,
            windows: 3,
            arc_probability: 0.3,
            value_probability: 0.5,
            fifo: false,
            step: 10.0,
        }
    }
}

/// Random graph on points in a 100 m square. Travel times are at least the
/// Euclidean length at 10 m/s, so the derived maximum speed is modest.
/// Values are small integers so sums are exact.
pub fn random_instance(opts: RandomGraphOptions, rng: &mut impl Rng) -> TdGraph {
    let n = opts.vertices;
    let coords: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
        .collect();
    let mut b = GraphBuilder::with_coords(coords.clone());
    for i in 0..n {
        for j in 0..n {
            if i == j || !rng.gen_bool(opts.arc_probability) {
                continue;
            }
            let base = (coords[i].distance(&coords[j]) / 10.0).max(0.5);
            let mut tt: Vec<f64> = (0..opts.windows)
                .map(|_| (base * rng.gen_range(1.0..2.5) * 4.0).round() / 4.0)
                .map(|t| t.max(base))
                .collect();
            if opts.fifo {
                for k in 1..tt.len() {
                    tt[k] = tt[k].max(tt[k - 1]);
                }
            }
            let val: Vec<f64> = if rng.gen_bool(opts.value_probability) {
                (0..opts.windows).map(|_| rng.gen_range(0..6) as f64).collect()
            } else {
                vec![0.0]
            };
            b.add_arc(
                i,
                j,
                StepProfile::new(opts.step, tt).expect("valid tt").compacted(),
                StepProfile::new(opts.step, val).expect("valid val").compacted(),
            );
        }
    }
    b.build().expect("random graph is valid")
}

/// Shorthand for a random graph with `n` vertices, `windows` windows and the
/// given arc probability.
pub fn random_graph(n: usize, windows: usize, arc_probability: f64, rng: &mut impl Rng) -> TdGraph {
    random_instance(
        RandomGraphOptions {
            vertices: n,
            windows,
            arc_probability,
            ..Default::default()
        },
        rng,
    )
}
