//! Text formats: edge-list graphs, index lists, CSV tables and JSON states.
//!
//! A graph file holds the vertex count on its first line and one `u v`
//! edge per following line, 0-indexed. Blank lines and lines starting with
//! `#` are ignored.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_states::Graph;
use crate::quantum_core::StateVector;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let n: usize = first.parse().map_err(|_| Error::Parse(format!("line 1: expected vertex count, got {first:?}")))?;
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = parts[..] else {
            return Err(Error::Parse(format!("line {lineno}: expected \"u v\", got {line:?}")));
        };
        let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("line {lineno}: bad vertex {s:?}")));
        edges.push((parse(u)?, parse(v)?));
    }
    Graph::from_edges(n, &edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read_text(path)?)
}

/// Parses "1,3,5" (or whitespace separated) into indices, subtracting
/// `base` from each entry. An empty string yields an empty list.
pub fn parse_index_list(text: &str, base: usize) -> Result<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let k: usize = s.parse().map_err(|_| Error::Parse(format!("bad index {s:?}")))?;
            k.checked_sub(base).ok_or_else(|| Error::Parse(format!("index {k} is below the base {base}")))
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(s)
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    StateVector::from_json(&read_text(path)?)
}

pub fn write_state(path: &Path, psi: &StateVector) -> Result<()> {
    fs::write(path, psi.to_json()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Serializes rows as CSV with a header taken from the field names.
/// `None` fields become empty cells.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}
