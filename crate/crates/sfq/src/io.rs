//! Text formats: graph files, alpha tables and stage reports.
//!
//! A graph line is a list of `key=value` tokens:
//!
//! ```text
//! nb=2 nw=1 color=o edges=b1>b2,b1>w1,b2>w1 coeff=-1/2
//! ```
//!
//! `color` defaults to `c` when `nw=0` and to `o` otherwise, `coeff`
//! defaults to `1`, and `edges=` may be empty. Edges are given in any order;
//! the line contributes `coeff` times the canonical form of its edge list,
//! sign included. A graph file is a sum of such lines sharing one bi-arity
//! and colour; blank lines and `#` comments are ignored. The zero vector is
//! written as a single line with `coeff=0/1` so that its bi-arity survives.
//!
//! An alpha table is
//!
//! ```text
//! sfq-alpha v1
//! cutoff nmax=2 kmax=3
//! o:1,0
//! nb=1 nw=0 color=o edges= coeff=1/1
//! o:1,1
//! ...
//! ```
//!
//! with each `o:n,k` header followed by the terms of that entry (none for a
//! zero entry). Coefficients are always written as reduced `p/q`.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::graph::{fmt_q, parse_q, Color, Edge, Graph, GraphVector, Q, Vertex};
use crate::induction::StageRecord;
use crate::oc::{AlphaTable, Corolla, Cutoff};

pub const TABLE_MAGIC: &str = "sfq-alpha v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// One parsed graph line, before canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphLine {
    pub nb: u8,
    pub nw: u8,
    pub color: Color,
    pub edges: Vec<Edge>,
    pub coeff: Q,
}

impl GraphLine {
    /// `coeff` times the canonical form of the edge list.
    pub fn to_vector(&self) -> Result<GraphVector, crate::graph::GraphError> {
        Ok(Graph::canonicalize(self.nb, self.nw, &self.edges)?.with_color(self.color).scaled(&self.coeff))
    }
}

pub fn parse_vertex(tok: &str) -> Option<Vertex> {
    let (c, i) = tok.split_at_checked(1)?;
    let i: u8 = i.parse().ok()?;
    match c {
        "b" => Some(Vertex::Black(i)),
        "w" => Some(Vertex::White(i)),
        _ => None,
    }
}

fn parse_color(tok: &str) -> Option<Color> {
    match tok {
        "c" => Some(Color::Closed),
        "o" => Some(Color::Open),
        _ => None,
    }
}

pub fn color_tag(c: Color) -> &'static str {
    match c {
        Color::Closed => "c",
        Color::Open => "o",
    }
}

/// Parses one graph line; `line` is only used for error messages.
pub fn parse_graph_line(text: &str, line: usize) -> Result<GraphLine, ParseError> {
    let (mut nb, mut nw, mut color, mut edges, mut coeff) = (None, None, None, None, None);
    for tok in text.split_whitespace() {
        let Some((key, val)) = tok.split_once('=') else {
            return err(line, format!("expected key=value, found `{tok}`"));
        };
        match key {
            "nb" => nb = Some(val.parse::<u8>().or_else(|_| err(line, format!("bad black count `{val}`")))?),
            "nw" => nw = Some(val.parse::<u8>().or_else(|_| err(line, format!("bad white count `{val}`")))?),
            "color" => {
                color = Some(parse_color(val).map_or_else(|| err(line, format!("unknown colour tag `{val}`")), Ok)?)
            }
            "coeff" => coeff = Some(parse_q(val).map_or_else(|| err(line, format!("bad coefficient `{val}`")), Ok)?),
            "edges" => {
                let mut es = Vec::new();
                for e in val.split(',').filter(|e| !e.is_empty()) {
                    let Some((t, h)) = e.split_once('>') else {
                        return err(line, format!("edge `{e}` is not of the form tail>head"));
                    };
                    let v = |s: &str| parse_vertex(s).map_or_else(|| err(line, format!("bad vertex tag `{s}`")), Ok);
                    es.push((v(t)?, v(h)?));
                }
                edges = Some(es);
            }
            _ => return err(line, format!("unknown key `{key}`")),
        }
    }
    let (Some(nb), Some(nw), Some(edges)) = (nb, nw, edges) else {
        return err(line, "a graph line needs nb=, nw= and edges=");
    };
    let color = color.unwrap_or(if nw == 0 { Color::Closed } else { Color::Open });
    if color == Color::Closed && nw > 0 {
        return err(line, "closed-coloured graphs have no white vertices");
    }
    Ok(GraphLine { nb, nw, color, edges, coeff: coeff.unwrap_or_else(|| Q::from_integer(1.into())) })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Adds a parsed line into `acc`, creating `acc` on the first line.
fn accumulate(acc: &mut Option<GraphVector>, gl: &GraphLine, line: usize) -> Result<(), ParseError> {
    let v = gl.to_vector().or_else(|e| err(line, e.to_string()))?;
    match acc {
        None => *acc = Some(v),
        Some(a) => {
            if (a.n_black(), a.n_white(), a.color()) != (v.n_black(), v.n_white(), v.color()) {
                return err(line, "bi-arity or colour differs from the first line");
            }
            *a += &v;
        }
    }
    Ok(())
}

/// Parses the raw lines of a graph file without summing them.
pub fn parse_graph_lines(text: &str) -> Result<Vec<(usize, GraphLine)>, ParseError> {
    content_lines(text).map(|(n, l)| parse_graph_line(l, n).map(|g| (n, g))).collect()
}

/// Parses a graph file into a vector.
pub fn parse_graph_file(text: &str) -> Result<GraphVector, ParseError> {
    let mut acc = None;
    for (n, gl) in parse_graph_lines(text)? {
        accumulate(&mut acc, &gl, n)?;
    }
    acc.map_or_else(|| err(0, "no graph lines"), Ok)
}

fn write_term(out: &mut String, nb: u8, nw: u8, color: Color, edges: &[Edge], c: &Q) {
    let es: Vec<String> = edges.iter().map(|(t, h)| format!("{t}>{h}")).collect();
    let _ = writeln!(out, "nb={nb} nw={nw} color={} edges={} coeff={}", color_tag(color), es.join(","), fmt_q(c));
}

/// Serializes a vector, one line per canonical graph in canonical order.
pub fn format_graph_vector(v: &GraphVector) -> String {
    let mut out = String::new();
    if v.is_zero() {
        write_term(&mut out, v.n_black(), v.n_white(), v.color(), &[], &Q::zero());
    }
    for (g, c) in v.iter() {
        write_term(&mut out, g.n_black(), g.n_white(), v.color(), g.edges(), c);
    }
    out
}

/// Serializes a table in key order; the output is deterministic.
pub fn format_table(t: &AlphaTable) -> String {
    let c = t.cutoff();
    let mut out = format!("{TABLE_MAGIC}\ncutoff nmax={} kmax={}\n", c.nmax, c.kmax);
    for ((n, k), v) in t.iter() {
        let _ = writeln!(out, "{}", Corolla::Mixed(n, k));
        for (g, c) in v.iter() {
            write_term(&mut out, n, k, Color::Open, g.edges(), c);
        }
    }
    out
}

fn parse_cutoff(l: &str, line: usize) -> Result<Cutoff, ParseError> {
    let mut toks = l.split_whitespace();
    if toks.next() != Some("cutoff") {
        return err(line, "expected `cutoff nmax=N kmax=K`");
    }
    let (mut nmax, mut kmax) = (None, None);
    for tok in toks {
        match tok.split_once('=') {
            Some(("nmax", v)) => nmax = v.parse::<u8>().ok(),
            Some(("kmax", v)) => kmax = v.parse::<u8>().ok(),
            _ => return err(line, format!("unexpected token `{tok}` in cutoff line")),
        }
    }
    match (nmax, kmax) {
        (Some(n), Some(k)) if n >= 1 => Ok(Cutoff::new(n, k)),
        _ => err(line, "cutoff needs nmax >= 1 and kmax >= 0"),
    }
}

/// Parses a table, validating every entry against its corolla.
pub fn parse_table(text: &str) -> Result<AlphaTable, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, l)) if l == TABLE_MAGIC => {}
        Some((n, l)) => return err(n, format!("expected `{TABLE_MAGIC}`, found `{l}`")),
        None => return err(0, "empty table file"),
    }
    let cutoff = match lines.next() {
        Some((n, l)) => parse_cutoff(l, n)?,
        None => return err(0, "missing cutoff line"),
    };
    let mut table = AlphaTable::boundary(cutoff);
    for (n, k) in table.keys().collect::<Vec<_>>() {
        table.remove(n, k);
    }
    let mut current: Option<(usize, u8, u8, GraphVector)> = None;
    let finish = |table: &mut AlphaTable, cur: Option<(usize, u8, u8, GraphVector)>| -> Result<(), ParseError> {
        if let Some((line, n, k, v)) = cur {
            if table.contains(n, k) {
                return err(line, format!("duplicate entry {}", Corolla::Mixed(n, k)));
            }
            table.set(n, k, v).or_else(|e| err(line, e.to_string()))?;
        }
        Ok(())
    };
    for (line, l) in lines {
        if l.starts_with("o:") || l.starts_with("c:") {
            finish(&mut table, current.take())?;
            let c: Corolla = l.parse().or_else(|e: String| err(line, e))?;
            let Corolla::Mixed(n, k) = c else {
                return err(line, format!("table entries are o:n,k corollas, found `{l}`"));
            };
            current = Some((line, n, k, GraphVector::zero(n, k, Color::Open)));
            continue;
        }
        let Some((_, n, k, v)) = current.as_mut() else {
            return err(line, "graph line before any entry header");
        };
        let gl = parse_graph_line(l, line)?;
        if (gl.nb, gl.nw, gl.color) != (*n, *k, Color::Open) {
            return err(line, format!("term does not belong to {}", Corolla::Mixed(*n, *k)));
        }
        *v += &gl.to_vector().or_else(|e| err(line, e.to_string()))?;
    }
    finish(&mut table, current)?;
    Ok(table)
}

/// Serializes stage records, one per line.
pub fn format_report(log: &[StageRecord]) -> String {
    log.iter().map(|r| format!("{r}\n")).collect()
}

/// Parses a stage report written by [`format_report`].
pub fn parse_report(text: &str) -> Result<Vec<StageRecord>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let (tag, detail) = l.split_once(' ').unwrap_or((l, ""));
            if tag.is_empty() {
                return err(i + 1, "record without a stage tag");
            }
            Ok(StageRecord { tag: tag.into(), detail: detail.into() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::q;
    use crate::kgra::gamma_edge;
    use crate::oc::boundary_value;

    #[test]
    fn graph_line_round_trip() {
        let text = "nb=2 nw=1 edges=b1>w1,b1>b2,b2>w1 coeff=3/4\n";
        let v = parse_graph_file(text).unwrap();
        assert_eq!(v.len(), 1);
        // the edge list is one transposition away from canonical order
        assert_eq!(v.iter().next().unwrap().1, &q(-3, 4));
        let s = format_graph_vector(&v);
        assert_eq!(s, "nb=2 nw=1 color=o edges=b1>b2,b1>w1,b2>w1 coeff=-3/4\n");
        assert_eq!(parse_graph_file(&s).unwrap(), v);
    }

    #[test]
    fn defaults_and_zero() {
        let e = parse_graph_file("nb=2 nw=0 edges=b1>b2").unwrap();
        assert_eq!(e.color(), Color::Closed);
        assert_eq!(&e + &e.act_black(&[2, 1]), gamma_edge());
        let z = parse_graph_file("nb=1 nw=2 edges=b1>w1,b1>w1").unwrap();
        assert!(z.is_zero());
        assert_eq!(parse_graph_file(&format_graph_vector(&z)).unwrap(), z);
    }

    #[test]
    fn parse_errors_carry_line_and_token() {
        let e = parse_graph_file("# header\n\nnb=1 nw=1 edges=b1>x1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("`x1`"), "{e}");
        let e = parse_graph_file("nb=1 nw=1 color=q edges=b1>w1").unwrap_err();
        assert!(e.message.contains("`q`"), "{e}");
        let e = parse_graph_file("nb=1 nw=1 edges=b1>w1\nnb=1 nw=2 edges=b1>w1,b1>w2").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_graph_file("nb=1 nw=1 edges=w1>b1").is_err());
    }

    #[test]
    fn table_round_trip() {
        let mut t = AlphaTable::boundary(Cutoff::new(2, 1));
        let v = parse_graph_file("nb=2 nw=1 edges=b1>b2,b1>w1,b2>w1 coeff=1/3").unwrap();
        t.set(2, 1, v).unwrap();
        let s = format_table(&t);
        assert!(s.starts_with("sfq-alpha v1\ncutoff nmax=2 kmax=1\no:1,0\n"));
        let back = parse_table(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(format_table(&back), s);
        assert_eq!(back.get(1, 2), boundary_value(Corolla::Mixed(1, 2)).as_ref());
    }

    #[test]
    fn table_errors() {
        assert_eq!(parse_table("sfq-alpha v2\n").unwrap_err().line, 1);
        let e = parse_table("sfq-alpha v1\ncutoff nmax=2 kmax=0\no:2,0\nnb=2 nw=0 color=o edges=b1>b2 coeff=1\n");
        assert!(e.unwrap_err().message.contains("edges"));
        let e = parse_table("sfq-alpha v1\ncutoff nmax=2 kmax=0\no:9,0\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn report_round_trip() {
        let log = vec![
            StageRecord { tag: "level-2-k@k=1".into(), detail: "rows=3 cols=2".into() },
            StageRecord { tag: "verify@m=2".into(), detail: String::new() },
        ];
        let s = format_report(&log);
        assert_eq!(parse_report(&s).unwrap(), log);
    }
}
