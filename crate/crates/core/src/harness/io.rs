//! Network and query files.
//!
//! A network directory holds four CSV files with a header row:
//! * `vertices.csv`: `id,x,y` (coordinates empty when absent)
//! * `arcs.csv`: `tail,head`
//! * `tt_profiles.csv`, `val_profiles.csv`: `arc,step_width_s,values`
//!   followed by one value column per window.
//!
//! Numbers are written in their shortest exact form, so a write-read round
//! trip reproduces every profile bit for bit.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, Point, Query, TdGraph, VertexId};
use crate::profile::StepProfile;

pub const VERTICES: &str = "vertices.csv";
pub const ARCS: &str = "arcs.csv";
pub const TT_PROFILES: &str = "tt_profiles.csv";
pub const VAL_PROFILES: &str = "val_profiles.csv";

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::WriterBuilder::new().flexible(true).from_path(path)?)
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| format_err(path, e.to_string()))?;
    Ok(csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file))
}

fn expect_header(path: &Path, r: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let h = r.headers()?;
    let got: Vec<&str> = h.iter().take(expected.len()).collect();
    if got != expected {
        return Err(format_err(path, format!("expected header {}, found {}", expected.join(","), got.join(","))));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let line = rec.position().map_or(0, |p| p.line());
    let raw = rec.get(i).ok_or_else(|| format_err(path, format!("line {line}: missing {what}")))?;
    raw.parse()
        .map_err(|_| format_err(path, format!("line {line}: bad {what} `{raw}`")))
}

/// Writes `g` into `dir`, creating it if needed.
pub fn write_network(g: &TdGraph, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = writer(&dir.join(VERTICES))?;
    w.write_record(["id", "x", "y"])?;
    for v in g.vertices() {
        match g.coord(v) {
            Some(p) => w.write_record([v.0.to_string(), p.x.to_string(), p.y.to_string()])?,
            None => w.write_record([v.0.to_string(), String::new(), String::new()])?,
        }
    }
    w.flush()?;

    let mut w = writer(&dir.join(ARCS))?;
    w.write_record(["tail", "head"])?;
    for a in g.arcs() {
        w.write_record([a.tail.0.to_string(), a.head.0.to_string()])?;
    }
    w.flush()?;

    for (name, tt) in [(TT_PROFILES, true), (VAL_PROFILES, false)] {
        let mut w = writer(&dir.join(name))?;
        w.write_record(["arc", "step_width_s", "values"])?;
        for (i, a) in g.arcs().iter().enumerate() {
            let p = if tt { &a.tt } else { &a.val };
            let mut rec = vec![i.to_string(), p.step().to_string()];
            rec.extend(p.values().iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn read_profiles(path: &Path, arcs: usize) -> Result<Vec<StepProfile>> {
    let mut r = reader(path)?;
    expect_header(path, &mut r, &["arc", "step_width_s"])?;
    let mut out = Vec::with_capacity(arcs);
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let idx: usize = field(path, &rec, 0, "arc index")?;
        if idx != out.len() {
            return Err(format_err(path, format!("line {line}: arc index {idx} out of order")));
        }
        let step: f64 = field(path, &rec, 1, "step width")?;
        let values = (2..rec.len())
            .map(|i| field(path, &rec, i, "profile value"))
            .collect::<Result<Vec<f64>>>()?;
        let p = StepProfile::new(step, values).map_err(|e| format_err(path, format!("line {line}: {e}")))?;
        out.push(p);
    }
    if out.len() != arcs {
        return Err(format_err(path, format!("{} profiles for {arcs} arcs", out.len())));
    }
    Ok(out)
}

/// Reads a network directory written by [`write_network`].
pub fn read_network(dir: &Path) -> Result<TdGraph> {
    let path = dir.join(VERTICES);
    let mut r = reader(&path)?;
    expect_header(&path, &mut r, &["id", "x", "y"])?;
    let mut coords = Vec::new();
    let mut any_coords = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let id: usize = field(&path, &rec, 0, "vertex id")?;
        if id != i {
            return Err(format_err(&path, format!("vertex ids must be dense, found {id} at row {i}")));
        }
        let has = rec.get(1).is_some_and(|s| !s.is_empty());
        if *any_coords.get_or_insert(has) != has {
            return Err(format_err(&path, "coordinates must be given for all vertices or none"));
        }
        coords.push(if has {
            Point::new(field(&path, &rec, 1, "x")?, field(&path, &rec, 2, "y")?)
        } else {
            Point::new(0.0, 0.0)
        });
    }
    let n = coords.len();
    let has_coords = any_coords.unwrap_or(false);

    let path = dir.join(ARCS);
    let mut r = reader(&path)?;
    expect_header(&path, &mut r, &["tail", "head"])?;
    let mut ends = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let tail: usize = field(&path, &rec, 0, "tail")?;
        let head: usize = field(&path, &rec, 1, "head")?;
        if tail >= n || head >= n {
            return Err(format_err(&path, format!("arc {tail} -> {head} references a missing vertex")));
        }
        ends.push((tail, head));
    }
    let tts = read_profiles(&dir.join(TT_PROFILES), ends.len())?;
    let vals = read_profiles(&dir.join(VAL_PROFILES), ends.len())?;

    let mut b = if has_coords {
        GraphBuilder::with_coords(coords)
    } else {
        GraphBuilder::new(n)
    };
    for (((t, h), tt), val) in ends.into_iter().zip(tts).zip(vals) {
        b.add_arc(t, h, tt, val);
    }
    b.build()
}

/// A query with an id, as stored in query files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: usize,
    pub source: u32,
    pub destination: u32,
    pub t0: f64,
    pub budget: f64,
    /// Time bucket (minutes) the query was drawn for, if any.
    pub bucket_minutes: Option<u32>,
}

impl QueryRecord {
    pub fn query(&self) -> Query {
        Query::new(VertexId(self.source), VertexId(self.destination), self.t0, self.budget)
    }
}

pub fn write_queries(queries: &[QueryRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for q in queries {
        w.serialize(q)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_queries(path: &Path) -> Result<Vec<QueryRecord>> {
    let file = File::open(path).map_err(|e| format_err(path, e.to_string()))?;
    let mut r = csv::Reader::from_reader(file);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Paths of the four network files in `dir`.
pub fn network_files(dir: &Path) -> [PathBuf; 4] {
    [VERTICES, ARCS, TT_PROFILES, VAL_PROFILES].map(|f| dir.join(f))
}
