//! Time-dependent fastest paths by label-setting search with parent links.

use crate::error::Result;
use crate::graph::{TdGraph, TimedPath, VertexId};
use crate::reach::{forward, Forward};

/// Fastest path from `source` to `dest` departing at `t0`, or `None` when
/// `dest` is unreachable. Ties are broken towards smaller vertex ids.
pub fn td_fastest_path(g: &TdGraph, source: VertexId, dest: VertexId, t0: f64) -> Result<Option<TimedPath>> {
    g.check_vertex(source)?;
    g.check_vertex(dest)?;
    Ok(fastest_path(g, source, dest, t0, f64::INFINITY))
}

/// Fastest path that arrives no later than `deadline`.
pub(crate) fn fastest_path(g: &TdGraph, source: VertexId, dest: VertexId, t0: f64, deadline: f64) -> Option<TimedPath> {
    if source == dest {
        return Some(TimedPath::empty(source, t0));
    }
    let labels = forward(
        g,
        source,
        t0,
        Forward {
            deadline,
            fwest: None,
            scope: None,
            stop_at: Some(dest),
        },
    );
    labels.ea(dest)?;
    let mut arcs = Vec::new();
    let mut at = dest;
    while at != source {
        let a = labels.pred(at).expect("labelled vertex has a parent");
        arcs.push(a);
        at = g.arc(a).tail;
    }
    arcs.reverse();
    let path = TimedPath::evaluate(g, source, t0, arcs).expect("parent chain is connected");
    debug_assert_eq!(Some(path.arrival()), labels.ea(dest));
    Some(path)
}
