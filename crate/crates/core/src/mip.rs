//! Mixed-integer model of a query, written in CPLEX LP format.
//!
//! All profiles are refined to a common grid at the smallest step. For every
//! arc `(i, j)` and grid window `k` that can still be entered before the
//! deadline there is a binary `p_i_j_k` (arc entered in window `k`) and a
//! continuous `t_i_j_k` (entry time, zero when not entered).
//!
//! Rows:
//! * `budget`: total window travel time of chosen arcs at most the budget.
//! * `flow_l`, `once_l`: every inner vertex is left as often as entered, at most once.
//! * `src_out`, `src_in`, `dst_in`, `dst_out`: the path leaves the source once,
//!   enters the destination once, and never enters or leaves them otherwise.
//! * `time_l`: entry time of the outgoing arc at `l` equals entry time plus
//!   travel time of the incoming one. The travel time is only added for the
//!   window actually used (`tt * p`), otherwise every unused window would
//!   shift the balance.
//! * `lo_*`, `hi_*`: an entry time lies inside its window, big-M bounded on
//!   the last one.
//! * `depart`: the path departs the source at `t0`.
//!
//! Together the time rows also rule out detached cycles, because travel
//! times are positive.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{ArcId, Query, TdGraph, TimedPath};

pub const DEFAULT_VARIABLE_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub var: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MipModel {
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<Row>,
    pub bounds: Vec<Bound>,
    pub binaries: Vec<String>,
}

/// Bit-level view of a model for exact comparison, independent of term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonical {
    pub objective: BTreeMap<String, u64>,
    pub rows: BTreeMap<String, (String, u64, BTreeMap<String, u64>)>,
    pub bounds: BTreeMap<String, (u64, u64)>,
    pub binaries: BTreeSet<String>,
}

impl MipModel {
    pub fn variable_count(&self) -> usize {
        let mut vars: BTreeSet<&str> = self.binaries.iter().map(String::as_str).collect();
        vars.extend(self.bounds.iter().map(|b| b.var.as_str()));
        vars.extend(self.objective.iter().map(|(v, _)| v.as_str()));
        vars.len()
    }

    pub fn row(&self, name: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn canonical(&self) -> Canonical {
        let terms = |ts: &[(String, f64)]| ts.iter().map(|(v, c)| (v.clone(), c.to_bits())).collect();
        Canonical {
            objective: terms(&self.objective),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    (
                        r.name.clone(),
                        (r.sense.symbol().to_string(), r.rhs.to_bits(), terms(&r.terms)),
                    )
                })
                .collect(),
            bounds: self
                .bounds
                .iter()
                .map(|b| (b.var.clone(), (b.lower.to_bits(), b.upper.to_bits())))
                .collect(),
            binaries: self.binaries.iter().cloned().collect(),
        }
    }

    /// Objective value of an assignment; missing variables are zero.
    pub fn objective_value(&self, x: &HashMap<String, f64>) -> f64 {
        dot(&self.objective, x)
    }

    /// Names of rows and bounds the assignment violates beyond `tol`
    /// (relative to `max(1, |rhs|)`).
    pub fn violations(&self, x: &HashMap<String, f64>, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            let lhs = dot(&r.terms, x);
            if !r.sense.holds(lhs, r.rhs, tol * r.rhs.abs().max(1.0)) {
                out.push(format!("{}: {} {} {}", r.name, lhs, r.sense.symbol(), r.rhs));
            }
        }
        for b in &self.bounds {
            let v = x.get(&b.var).copied().unwrap_or(0.0);
            let slack = tol * b.upper.abs().max(1.0);
            if v < b.lower - slack || v > b.upper + slack {
                out.push(format!("bound {}: {}", b.var, v));
            }
        }
        for name in &self.binaries {
            let v = x.get(name).copied().unwrap_or(0.0);
            if v != 0.0 && v != 1.0 {
                out.push(format!("binary {name}: {v}"));
            }
        }
        out
    }
}

fn dot(terms: &[(String, f64)], x: &HashMap<String, f64>) -> f64 {
    terms
        .iter()
        .map(|(v, c)| c * x.get(v).copied().unwrap_or(0.0))
        .sum()
}

/// The common time grid all profiles are refined to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub step: f64,
    /// Windows in the refinement of the longest profile.
    pub windows: usize,
    /// Windows that start no later than the deadline.
    pub modelled: usize,
    pub big_m: f64,
}

impl Grid {
    pub fn for_query(g: &TdGraph, q: &Query) -> Result<Grid> {
        let profiles = || g.arcs().iter().flat_map(|a| [&a.tt, &a.val]).filter(|p| p.window_count() > 1);
        let step = profiles().map(|p| p.step()).fold(f64::INFINITY, f64::min);
        let max_tt = g.arcs().iter().map(|a| a.tt.max()).fold(0.0, f64::max);
        let big_m = q.deadline() + max_tt;
        if !step.is_finite() {
            return Ok(Grid {
                step: big_m + 1.0,
                windows: 1,
                modelled: 1,
                big_m,
            });
        }
        let mut windows = 1;
        for p in profiles() {
            let ratio = p.step() / step;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return Err(Error::Config(format!(
                    "profile step {} is not a multiple of the grid step {step}",
                    p.step()
                )));
            }
            windows = windows.max(p.window_count() * ratio.round() as usize);
        }
        let modelled = ((q.deadline() / step).floor() as usize + 1).min(windows);
        Ok(Grid {
            step,
            windows,
            modelled,
            big_m,
        })
    }

    pub fn start(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    /// Upper end of window `k` in the model; the last one is big-M bounded.
    pub fn end(&self, k: usize) -> f64 {
        if k + 1 < self.windows {
            self.start(k + 1)
        } else {
            self.big_m
        }
    }

    pub fn window(&self, t: f64) -> usize {
        ((t / self.step).floor() as usize).min(self.windows - 1)
    }
}

fn p_var(g: &TdGraph, a: ArcId, k: usize) -> String {
    let arc = g.arc(a);
    format!("p_{}_{}_{}", arc.tail.0, arc.head.0, k)
}

fn t_var(g: &TdGraph, a: ArcId, k: usize) -> String {
    let arc = g.arc(a);
    format!("t_{}_{}_{}", arc.tail.0, arc.head.0, k)
}

/// Builds the model for `q`, failing when it would need more than
/// `variable_cap` variables.
pub fn build_mip(g: &TdGraph, q: &Query, variable_cap: usize) -> Result<MipModel> {
    q.validate(g)?;
    if q.source == q.destination {
        return Err(Error::InvalidQuery("source equals destination".into()));
    }
    if g.arc_count() == 0 {
        return Err(Error::InvalidGraph("graph has no arcs".into()));
    }
    let grid = Grid::for_query(g, q)?;
    let variables = 2 * g.arc_count() * grid.modelled;
    if variables > variable_cap {
        return Err(Error::ModelTooLarge {
            variables,
            cap: variable_cap,
        });
    }
    let ks = 0..grid.modelled;
    let mut m = MipModel::default();

    for a in g.arc_ids() {
        let arc = g.arc(a);
        for k in ks.clone() {
            let tau = grid.start(k);
            let (p, t) = (p_var(g, a, k), t_var(g, a, k));
            m.objective.push((p.clone(), arc.val.at(tau)));
            m.binaries.push(p.clone());
            m.bounds.push(Bound {
                var: t.clone(),
                lower: 0.0,
                upper: grid.big_m,
            });
            m.rows.push(Row {
                name: format!("lo_{}_{}_{}", arc.tail.0, arc.head.0, k),
                terms: vec![(t.clone(), 1.0), (p.clone(), -tau)],
                sense: Sense::Ge,
                rhs: 0.0,
            });
            m.rows.push(Row {
                name: format!("hi_{}_{}_{}", arc.tail.0, arc.head.0, k),
                terms: vec![(t, 1.0), (p, -grid.end(k))],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }

    let budget = g
        .arc_ids()
        .flat_map(|a| ks.clone().map(move |k| (a, k)))
        .map(|(a, k)| (p_var(g, a, k), g.arc(a).tt.at(grid.start(k))))
        .collect();
    m.rows.push(Row {
        name: "budget".into(),
        terms: budget,
        sense: Sense::Le,
        rhs: q.budget,
    });

    let ps = |arcs: &[ArcId], sign: f64| -> Vec<(String, f64)> {
        arcs.iter()
            .flat_map(|&a| ks.clone().map(move |k| (p_var(g, a, k), sign)))
            .collect()
    };
    let ts = |arcs: &[ArcId], sign: f64| -> Vec<(String, f64)> {
        arcs.iter()
            .flat_map(|&a| ks.clone().map(move |k| (t_var(g, a, k), sign)))
            .collect()
    };
    let mut push = |name: String, terms: Vec<(String, f64)>, sense: Sense, rhs: f64| {
        if terms.is_empty() {
            if sense.holds(0.0, rhs, 0.0) {
                return;
            }
            // Keep the contradiction visible to any solver.
            let any = m.binaries[0].clone();
            m.rows.push(Row { name, terms: vec![(any, 0.0)], sense, rhs });
        } else {
            m.rows.push(Row { name, terms, sense, rhs });
        }
    };

    for l in g.vertices() {
        let (ins, outs) = (g.in_arcs(l), g.out_arcs(l));
        if l == q.source {
            push("src_out".into(), ps(outs, 1.0), Sense::Eq, 1.0);
            push("src_in".into(), ps(ins, 1.0), Sense::Eq, 0.0);
            push("depart".into(), ts(outs, 1.0), Sense::Eq, q.t0);
        } else if l == q.destination {
            push("dst_in".into(), ps(ins, 1.0), Sense::Eq, 1.0);
            push("dst_out".into(), ps(outs, 1.0), Sense::Eq, 0.0);
        } else {
            let mut flow = ps(ins, 1.0);
            flow.extend(ps(outs, -1.0));
            push(format!("flow_{}", l.0), flow, Sense::Eq, 0.0);
            push(format!("once_{}", l.0), ps(ins, 1.0), Sense::Le, 1.0);
            let mut time = Vec::new();
            for &a in ins {
                for k in ks.clone() {
                    time.push((t_var(g, a, k), 1.0));
                    time.push((p_var(g, a, k), g.arc(a).tt.at(grid.start(k))));
                }
            }
            time.extend(ts(outs, -1.0));
            push(format!("time_{}", l.0), time, Sense::Eq, 0.0);
        }
    }
    Ok(m)
}

/// Builds the model and writes it as LP text.
pub fn export_mip<W: Write>(g: &TdGraph, q: &Query, variable_cap: usize, out: W) -> Result<MipModel> {
    let m = build_mip(g, q, variable_cap)?;
    write_lp(&m, out)?;
    Ok(m)
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(s: &mut String, terms: &[(String, f64)]) {
    for (i, (v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            s.push_str("\n   ");
        }
        let sign = if c.is_sign_negative() { "-" } else { "+" };
        if i == 0 && sign == "+" {
            let _ = write!(s, " {} {}", c, v);
        } else {
            let _ = write!(s, " {} {} {}", sign, c.abs(), v);
        }
    }
}

/// Writes CPLEX LP text. Numbers use the shortest representation that
/// parses back to the same `f64`.
pub fn write_lp<W: Write>(m: &MipModel, mut out: W) -> Result<()> {
    let mut s = String::new();
    s.push_str("\\ time-dependent arc orienteering\nMaximize\n obj:");
    write_terms(&mut s, &m.objective);
    s.push_str("\nSubject To\n");
    for r in &m.rows {
        let _ = write!(s, " {}:", r.name);
        write_terms(&mut s, &r.terms);
        let _ = writeln!(s, " {} {}", r.sense.symbol(), r.rhs);
    }
    s.push_str("Bounds\n");
    for b in &m.bounds {
        let _ = writeln!(s, " {} <= {} <= {}", b.lower, b.var, b.upper);
    }
    s.push_str("Binaries\n");
    for chunk in m.binaries.chunks(TERMS_PER_LINE) {
        let _ = writeln!(s, " {}", chunk.join(" "));
    }
    s.push_str("End\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

struct Pending {
    name: String,
    line: usize,
    tokens: Vec<String>,
}

/// Reads LP text in the dialect [`write_lp`] produces.
pub fn parse_lp(text: &str) -> Result<MipModel> {
    let mut m = MipModel::default();
    let mut section = Section::Preamble;
    let mut pending: Option<Pending> = None;

    let flush = |m: &mut MipModel, section: Section, p: Option<Pending>| -> Result<()> {
        let Some(p) = p else { return Ok(()) };
        match section {
            Section::Objective => m.objective = parse_terms(&p.tokens, p.line)?,
            Section::Constraints => m.rows.push(parse_row(p)?),
            _ => {}
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('\\').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let next = match content.to_ascii_lowercase().as_str() {
            "maximize" | "maximise" | "max" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            flush(&mut m, section, pending.take())?;
            section = next;
            continue;
        }
        match section {
            Section::Objective | Section::Constraints => {
                for tok in content.split_whitespace() {
                    if let Some(name) = tok.strip_suffix(':') {
                        flush(&mut m, section, pending.take())?;
                        pending = Some(Pending {
                            name: name.to_string(),
                            line,
                            tokens: Vec::new(),
                        });
                    } else {
                        match pending.as_mut() {
                            Some(p) => p.tokens.push(tok.to_string()),
                            None => return Err(lp_err(line, "term outside a named row")),
                        }
                    }
                }
            }
            Section::Bounds => {
                let t: Vec<&str> = content.split_whitespace().collect();
                if t.len() != 5 || t[1] != "<=" || t[3] != "<=" {
                    return Err(lp_err(line, "expected `lower <= var <= upper`"));
                }
                m.bounds.push(Bound {
                    var: t[2].to_string(),
                    lower: number(t[0], line)?,
                    upper: number(t[4], line)?,
                });
            }
            Section::Binaries => m.binaries.extend(content.split_whitespace().map(str::to_string)),
            Section::Preamble | Section::End => return Err(lp_err(line, "content outside a section")),
        }
    }
    if section != Section::End {
        flush(&mut m, section, pending.take())?;
        return Err(lp_err(text.lines().count(), "missing End"));
    }
    Ok(m)
}

fn lp_err(line: usize, message: &str) -> Error {
    Error::LpParse {
        line,
        message: message.to_string(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| lp_err(line, &format!("bad number `{tok}`")))
}

fn parse_terms(tokens: &[String], line: usize) -> Result<Vec<(String, f64)>> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let (sign, rest) = match tokens[i].as_str() {
            "+" => (1.0, i + 1),
            "-" => (-1.0, i + 1),
            _ => (1.0, i),
        };
        let c = number(tokens.get(rest).ok_or_else(|| lp_err(line, "dangling sign"))?, line)?;
        let var = tokens
            .get(rest + 1)
            .ok_or_else(|| lp_err(line, "coefficient without variable"))?;
        terms.push((var.clone(), if sign < 0.0 { -c } else { c }));
        i = rest + 2;
    }
    Ok(terms)
}

fn parse_row(p: Pending) -> Result<Row> {
    let n = p.tokens.len();
    if n < 2 {
        return Err(lp_err(p.line, "row without sense"));
    }
    let sense = match p.tokens[n - 2].as_str() {
        "<=" => Sense::Le,
        ">=" => Sense::Ge,
        "=" => Sense::Eq,
        other => return Err(lp_err(p.line, &format!("bad sense `{other}`"))),
    };
    Ok(Row {
        name: p.name,
        terms: parse_terms(&p.tokens[..n - 2], p.line)?,
        sense,
        rhs: number(&p.tokens[n - 1], p.line)?,
    })
}

/// Variable values encoding `path` in the model of `q`.
pub fn path_assignment(g: &TdGraph, q: &Query, path: &TimedPath) -> Result<HashMap<String, f64>> {
    let grid = Grid::for_query(g, q)?;
    let mut x = HashMap::new();
    for (i, &a) in path.arcs().iter().enumerate() {
        let t = path.arrivals()[i];
        let k = grid.window(t);
        x.insert(p_var(g, a, k), 1.0);
        x.insert(t_var(g, a, k), t);
    }
    Ok(x)
}

/// Substitutes `path` into the model. Returns the objective value, or the
/// violated rows.
pub fn check_path(m: &MipModel, g: &TdGraph, q: &Query, path: &TimedPath, tol: f64) -> Result<std::result::Result<f64, Vec<String>>> {
    let x = path_assignment(g, q, path)?;
    let known: BTreeSet<&str> = m.binaries.iter().map(String::as_str).collect();
    let mut violations: Vec<String> = x
        .keys()
        .filter(|v| v.starts_with("p_") && !known.contains(v.as_str()))
        .map(|v| format!("{v} is not modelled"))
        .collect();
    violations.extend(m.violations(&x, tol));
    Ok(if violations.is_empty() {
        Ok(m.objective_value(&x))
    } else {
        Err(violations)
    })
}
