//! Text formats for graphs and side observations.
//!
//! Graph files start with a header `n k p q size_mode seed`, list one edge
//! `u v` per line, and end with `community: id id ...`. Blank lines and lines
//! starting with `#` are ignored.
//!
//! Side observations are CSV: a header `y0,y1,...` followed by one row of
//! symbol indices per node. `-1` is reserved and rejected.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::channel::SideChannel;
use crate::model::graph::{Adjacency, GraphInstance, SizeMode};
use crate::model::side::SideObservations;

pub fn write_graph(graph: &GraphInstance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {} {} {} {}",
        graph.n,
        graph.k,
        graph.p,
        graph.q,
        graph.size_mode.as_str(),
        graph.seed
    )
    .unwrap();
    for (u, v) in graph.adjacency.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out.push_str("community:");
    for c in &graph.community {
        write!(out, " {c}").unwrap();
    }
    out.push('\n');
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what}: {tok:?}")))
}

pub fn read_graph(text: &str) -> Result<GraphInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hl, "n")?;
    let k: usize = field(toks.next(), hl, "k")?;
    let p: f64 = field(toks.next(), hl, "p")?;
    let q: f64 = field(toks.next(), hl, "q")?;
    let size_mode: SizeMode = field(toks.next(), hl, "size_mode")?;
    let seed: u64 = field(toks.next(), hl, "seed")?;
    if toks.next().is_some() {
        return Err(parse_err(hl, "trailing fields in header"));
    }

    let mut edges = Vec::new();
    let mut community = None;
    for (ln, line) in lines {
        if community.is_some() {
            return Err(parse_err(ln, "content after community line"));
        }
        if let Some(rest) = line.strip_prefix("community:") {
            let ids = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(ln, format!("bad community id {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            community = Some(ids);
            continue;
        }
        let mut toks = line.split_whitespace();
        let u: usize = field(toks.next(), ln, "edge endpoint")?;
        let v: usize = field(toks.next(), ln, "edge endpoint")?;
        if toks.next().is_some() {
            return Err(parse_err(ln, "edge line must have two ids"));
        }
        edges.push((u, v));
    }
    let community =
        community.ok_or_else(|| parse_err(text.lines().count(), "missing community line"))?;
    let adjacency = Adjacency::from_edges(n, &edges)?;
    GraphInstance::from_parts(n, k, p, q, size_mode, seed, community, adjacency)
}

pub fn write_side(obs: &SideObservations) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..obs.cols()).map(|m| format!("y{m}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..obs.rows() {
        let row: Vec<String> = obs.row(i).iter().map(u16::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_side(text: &str, channel: &SideChannel) -> Result<SideObservations> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let cols = if header.trim().is_empty() {
        0
    } else {
        header.split(',').count()
    };
    if cols != channel.m() {
        return Err(parse_err(
            1,
            format!(
                "{cols} columns but the channel has {} features",
                channel.m()
            ),
        ));
    }
    let mut symbols = Vec::new();
    let mut rows = 0;
    for (ln, line) in lines {
        let fields: Vec<&str> = if line.trim().is_empty() {
            Vec::new()
        } else {
            line.split(',').collect()
        };
        if fields.len() != cols {
            return Err(parse_err(
                ln,
                format!("expected {cols} fields, got {}", fields.len()),
            ));
        }
        for f in fields {
            let v: i64 = f
                .trim()
                .parse()
                .map_err(|_| parse_err(ln, format!("bad symbol {f:?}")))?;
            if v < 0 || v > u16::MAX as i64 {
                return Err(parse_err(ln, format!("symbol {v} is not a valid index")));
            }
            symbols.push(v as u16);
        }
        rows += 1;
    }
    SideObservations::new(rows, channel, symbols)
}
