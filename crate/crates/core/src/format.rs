//! Reader and writer for the line-oriented XP graph-database format.
//!
//! ```text
//! XP # 1
//! v 1 "News"
//! v 2 "in-line"
//! e 1 2 "has"
//! ```
//!
//! Blank lines and lines starting with `%` are ignored. `e` and `d` both
//! declare a directed edge; `u` (undirected) is rejected. Within one example
//! the order of `v` and `e` lines is free.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{ParseError, ParseErrorKind};
use crate::graph::{is_reserved_label, Edge, Graph, GraphDatabase, Label, Vertex, VertexId};

struct PendingExample {
    index: u32,
    vertices: Vec<(usize, Vertex)>,
    edges: Vec<(usize, Edge)>,
}

impl PendingExample {
    fn finish(mut self) -> Result<Graph, ParseError> {
        self.vertices.sort_by_key(|(_, v)| v.id);
        let count = self.vertices.len() as VertexId;
        if let Some((line, v)) = self.vertices.iter().find(|(_, v)| v.id == 0 || v.id > count) {
            return Err(ParseError::new(
                *line,
                ParseErrorKind::NonContiguousIds { id: v.id, count },
            ));
        }
        for (line, e) in &self.edges {
            for endpoint in [e.src, e.dst] {
                if endpoint == 0 || endpoint > count {
                    return Err(ParseError::new(
                        *line,
                        ParseErrorKind::DanglingEdge { vertex: endpoint },
                    ));
                }
            }
        }
        Ok(Graph {
            example_index: self.index,
            vertices: self.vertices.into_iter().map(|(_, v)| v).collect(),
            edges: self.edges.into_iter().map(|(_, e)| e).collect(),
        })
    }
}

/// Parses an XP file into a database, one example per `XP # n` header.
pub fn parse_graph_file(text: &str) -> Result<GraphDatabase, ParseError> {
    let mut examples = Vec::new();
    let mut seen_indices = HashSet::new();
    let mut current: Option<PendingExample> = None;
    let mut vertex_ids: HashSet<VertexId> = HashSet::new();

    for (offset, raw) in text.lines().enumerate() {
        let line_no = offset + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let malformed = |detail: &str| {
            ParseError::new(line_no, ParseErrorKind::MalformedLine(detail.to_owned()))
        };

        let (head, label) = split_label(line).map_err(malformed)?;
        let fields: Vec<&str> = head.split_whitespace().collect();
        match fields.first().copied() {
            Some("XP") => {
                if label.is_some() || fields.len() != 3 || fields[1] != "#" {
                    return Err(malformed("expected `XP # <int>`"));
                }
                let index: u32 = fields[2]
                    .parse()
                    .map_err(|_| malformed("example number is not an integer"))?;
                if !seen_indices.insert(index) {
                    return Err(ParseError::new(
                        line_no,
                        ParseErrorKind::DuplicateExample { index },
                    ));
                }
                if let Some(done) = current.take() {
                    examples.push(done.finish()?);
                }
                vertex_ids.clear();
                current = Some(PendingExample {
                    index,
                    vertices: Vec::new(),
                    edges: Vec::new(),
                });
            }
            Some("v") => {
                let label = label.ok_or_else(|| malformed("vertex line without a quoted label"))?;
                if fields.len() != 2 {
                    return Err(malformed("expected `v <int> \"<label>\"`"));
                }
                let id: VertexId = fields[1]
                    .parse()
                    .map_err(|_| malformed("vertex id is not an integer"))?;
                let example = current
                    .as_mut()
                    .ok_or_else(|| malformed("vertex line before any `XP #` header"))?;
                check_label(line_no, label)?;
                if !vertex_ids.insert(id) {
                    return Err(ParseError::new(
                        line_no,
                        ParseErrorKind::DuplicateVertexId { id },
                    ));
                }
                example.vertices.push((
                    line_no,
                    Vertex {
                        id,
                        label: Label::new(label),
                    },
                ));
            }
            Some(kind @ ("e" | "d" | "u")) => {
                if kind == "u" {
                    return Err(ParseError::new(line_no, ParseErrorKind::UndirectedEdge));
                }
                let label = label.ok_or_else(|| malformed("edge line without a quoted label"))?;
                if fields.len() != 3 {
                    return Err(malformed("expected `e <int> <int> \"<label>\"`"));
                }
                let src: VertexId = fields[1]
                    .parse()
                    .map_err(|_| malformed("edge source is not an integer"))?;
                let dst: VertexId = fields[2]
                    .parse()
                    .map_err(|_| malformed("edge target is not an integer"))?;
                let example = current
                    .as_mut()
                    .ok_or_else(|| malformed("edge line before any `XP #` header"))?;
                check_label(line_no, label)?;
                example.edges.push((
                    line_no,
                    Edge {
                        src,
                        dst,
                        label: Label::new(label),
                    },
                ));
            }
            _ => return Err(malformed("unrecognized line")),
        }
    }
    if let Some(done) = current.take() {
        examples.push(done.finish()?);
    }
    Ok(GraphDatabase { examples })
}

/// Splits `head "label"` into the unquoted head and the label text.
fn split_label(line: &str) -> Result<(&str, Option<&str>), &'static str> {
    let Some(open) = line.find('"') else {
        return Ok((line, None));
    };
    let rest = &line[open + 1..];
    let Some(body) = rest.strip_suffix('"') else {
        return Err("label is not terminated by a closing quote at end of line");
    };
    if body.contains('"') {
        return Err("label contains an embedded quote");
    }
    Ok((&line[..open], Some(body)))
}

fn check_label(line: usize, label: &str) -> Result<(), ParseError> {
    if label.is_empty() {
        return Err(ParseError::new(
            line,
            ParseErrorKind::MalformedLine("empty label".into()),
        ));
    }
    if is_reserved_label(label) {
        return Err(ParseError::new(
            line,
            ParseErrorKind::ReservedLabel(label.to_owned()),
        ));
    }
    Ok(())
}

/// Writes a database in XP format: header, vertices by id, edges in order.
pub fn write_graph_file(db: &GraphDatabase) -> String {
    let mut out = String::new();
    for g in &db.examples {
        write_example(&mut out, g);
    }
    out
}

pub(crate) fn write_example(out: &mut String, g: &Graph) {
    let _ = writeln!(out, "XP # {}", g.example_index);
    let mut vertices: Vec<&Vertex> = g.vertices.iter().collect();
    vertices.sort_by_key(|v| v.id);
    for v in vertices {
        let _ = writeln!(out, "v {} \"{}\"", v.id, v.label);
    }
    for e in &g.edges {
        let _ = writeln!(out, "e {} {} \"{}\"", e.src, e.dst, e.label);
    }
}
