//! Text formats.
//!
//! Graph: a header line `n d`, then one `u v` line per edge (loops as `u u`),
//! 0-indexed. Colouring: a single line of `n` space-separated colours.

use std::fmt::Write as _;

use super::MultiGraph;
use crate::colorings::Coloring;
use crate::error::{Error, Result};

pub fn write_graph(g: &MultiGraph) -> String {
    let mut s = String::with_capacity(8 * g.edges().len() + 16);
    let _ = writeln!(s, "{} {}", g.n(), g.d());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line `n d`".into()))?;
    let (n, d) = parse_pair(header, 1)?;
    let mut edges = Vec::new();
    for (no, line) in lines {
        edges.push(parse_pair(line, no)?);
    }
    if edges.len() * 2 != n * d {
        return Err(Error::Parse(format!(
            "expected {} edges for n={n}, d={d}, found {}",
            n * d / 2,
            edges.len()
        )));
    }
    MultiGraph::new(n, d, edges)
}

fn parse_pair(line: &str, no: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("line {no}: expected two integers")))?
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("line {no}: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("line {no}: trailing tokens")));
    }
    Ok((a, b))
}

pub fn write_coloring(sigma: &Coloring) -> String {
    let mut s = sigma
        .colors()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    s.push('\n');
    s
}

/// Parses a colouring; `k` defaults to one more than the largest colour.
pub fn parse_coloring(text: &str, k: Option<usize>) -> Result<Coloring> {
    let colors = text
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::Parse(format!("colour `{t}`: {e}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let k = k.unwrap_or_else(|| colors.iter().max().map_or(1, |&m| m + 1));
    Coloring::new(colors, k)
}
