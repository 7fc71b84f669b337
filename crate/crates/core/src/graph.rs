//! Labeled directed multigraphs and graph databases.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Vertex identifier, 1-based within its example.
pub type VertexId = u32;

/// An opaque vertex or edge label. Equality is byte equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Self {
        Label(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Labels of the form `SUB_<digits>` stand for compressed substructures.
    pub fn is_reserved(&self) -> bool {
        is_reserved_label(&self.0)
    }
}

pub(crate) fn is_reserved_label(text: &str) -> bool {
    text.strip_prefix("SUB_")
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub label: Label,
}

/// A directed, labeled edge `src -> dst`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub label: Label,
}

/// One example of a graph database: vertices ordered by id, edges in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub example_index: u32,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(example_index: u32) -> Self {
        Graph {
            example_index,
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Appends a vertex with the next contiguous id and returns that id.
    pub fn add_vertex(&mut self, label: impl Into<Label>) -> VertexId {
        let id = self.vertices.len() as VertexId + 1;
        self.vertices.push(Vertex {
            id,
            label: label.into(),
        });
        id
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, label: impl Into<Label>) {
        self.edges.push(Edge {
            src,
            dst,
            label: label.into(),
        });
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    /// Label of vertex `id`. Assumes contiguous ids.
    pub fn label_of(&self, id: VertexId) -> Option<&Label> {
        let idx = (id as usize).checked_sub(1)?;
        self.vertices.get(idx).map(|v| &v.label)
    }

    /// Connectivity ignoring edge direction. The empty graph is not connected.
    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            let (s, d) = (e.src as usize - 1, e.dst as usize - 1);
            adj[s].push(d);
            adj[d].push(s);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }
}

/// An ordered collection of example graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDatabase {
    pub examples: Vec<Graph>,
}

impl GraphDatabase {
    pub fn new(examples: Vec<Graph>) -> Self {
        GraphDatabase { examples }
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn example(&self, example_index: u32) -> Option<&Graph> {
        self.examples
            .iter()
            .find(|g| g.example_index == example_index)
    }

    pub fn vertex_count(&self) -> usize {
        self.examples.iter().map(Graph::vertex_count).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.examples.iter().map(Graph::edge_count).sum()
    }
}

/// A broken graph invariant, naming the offending element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonContiguousIds { expected: VertexId, found: VertexId },
    DuplicateVertexId { id: VertexId },
    DanglingEndpoint { edge: usize, vertex: VertexId },
    EmptyLabel { element: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonContiguousIds { expected, found } => {
                write!(f, "non-contiguous ids: expected vertex {expected}, found {found}")
            }
            Violation::DuplicateVertexId { id } => write!(f, "duplicate vertex id {id}"),
            Violation::DanglingEndpoint { edge, vertex } => {
                write!(f, "edge #{edge} has dangling endpoint {vertex}")
            }
            Violation::EmptyLabel { element } => write!(f, "{element} has an empty label"),
        }
    }
}

/// Checks every [`Graph`] invariant. An empty result means the graph is valid.
pub fn validate_graph(g: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (pos, v) in g.vertices.iter().enumerate() {
        if !ids.insert(v.id) {
            out.push(Violation::DuplicateVertexId { id: v.id });
            continue;
        }
        let expected = pos as VertexId + 1;
        if v.id != expected {
            out.push(Violation::NonContiguousIds {
                expected,
                found: v.id,
            });
        }
        if v.label.as_str().is_empty() {
            out.push(Violation::EmptyLabel {
                element: format!("vertex {}", v.id),
            });
        }
    }
    for (idx, e) in g.edges.iter().enumerate() {
        for endpoint in [e.src, e.dst] {
            if !ids.contains(&endpoint) {
                out.push(Violation::DanglingEndpoint {
                    edge: idx + 1,
                    vertex: endpoint,
                });
            }
        }
        if e.label.as_str().is_empty() {
            out.push(Violation::EmptyLabel {
                element: format!("edge {} {}", e.src, e.dst),
            });
        }
    }
    out
}
