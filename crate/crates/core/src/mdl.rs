//! Description lengths and instance compression.
//!
//! A graph with `V` vertices and `E` edges, drawn from a universe of `Lv`
//! vertex labels and `Le` edge labels, costs
//!
//! ```text
//! lg(V+1) + V·lg(Lv) + E·(2·lg(V+1) + lg(Le))
//! ```
//!
//! bits: a vertex count, one label per vertex, and for each edge two
//! endpoints and a label. A database is measured as one graph over the totals.
//! A substructure `S` scores `DL(G|S) + DL(S)`, where `G|S` is the database
//! with every selected instance collapsed into a single placeholder vertex.

use std::collections::HashSet;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::discovery::Substructure;
use crate::error::CompressError;
use crate::graph::{Graph, GraphDatabase, Label, VertexId};

/// A non-negative, finite number of bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    /// Panics on negative or non-finite input.
    pub fn new(value: f64) -> Self {
        assert!(value.is_finite() && value >= 0.0, "invalid bit count {value}");
        Bits(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn total_cmp(&self, other: &Bits) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Bits {
    type Output = Bits;
    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdlScore {
    pub dl_g_given_s: Bits,
    pub dl_s: Bits,
    pub total: Bits,
}

impl MdlScore {
    pub fn new(dl_g_given_s: Bits, dl_s: Bits) -> Self {
        MdlScore {
            dl_g_given_s,
            dl_s,
            total: dl_g_given_s + dl_s,
        }
    }
}

/// Number of distinct vertex and edge labels the encoding chooses from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelUniverse {
    pub vertex_labels: usize,
    pub edge_labels: usize,
}

impl LabelUniverse {
    pub fn of_database(db: &GraphDatabase) -> Self {
        Self::of_graphs(db.examples.iter())
    }

    pub fn of_graph(g: &Graph) -> Self {
        Self::of_graphs(std::iter::once(g))
    }

    fn of_graphs<'a>(graphs: impl Iterator<Item = &'a Graph>) -> Self {
        let mut vl: HashSet<&Label> = HashSet::new();
        let mut el: HashSet<&Label> = HashSet::new();
        for g in graphs {
            vl.extend(g.vertices.iter().map(|v| &v.label));
            el.extend(g.edges.iter().map(|e| &e.label));
        }
        LabelUniverse {
            vertex_labels: vl.len(),
            edge_labels: el.len(),
        }
    }
}

/// An encoding scheme for graph description lengths.
pub trait Encoding {
    fn bits(&self, vertices: usize, edges: usize, universe: LabelUniverse) -> Bits;
}

/// Vertex-count prefix, per-vertex label, per-edge endpoints and label.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimpleEncoding;

/// `lg(n)` with `lg(0) = lg(1) = 0`.
fn lg(n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        (n as f64).log2()
    }
}

impl Encoding for SimpleEncoding {
    fn bits(&self, vertices: usize, edges: usize, universe: LabelUniverse) -> Bits {
        if vertices == 0 && edges == 0 {
            return Bits::ZERO;
        }
        let id_bits = lg(vertices + 1);
        let vertex_bits = vertices as f64 * lg(universe.vertex_labels);
        let edge_bits = edges as f64 * (2.0 * id_bits + lg(universe.edge_labels));
        Bits::new(id_bits + vertex_bits + edge_bits)
    }
}

/// Anything whose size the encoding can measure.
pub trait Measurable {
    fn size(&self) -> (usize, usize);
    fn universe(&self) -> LabelUniverse;
}

impl Measurable for Graph {
    fn size(&self) -> (usize, usize) {
        (self.vertex_count(), self.edge_count())
    }
    fn universe(&self) -> LabelUniverse {
        LabelUniverse::of_graph(self)
    }
}

impl Measurable for GraphDatabase {
    fn size(&self) -> (usize, usize) {
        (self.vertex_count(), self.edge_count())
    }
    fn universe(&self) -> LabelUniverse {
        LabelUniverse::of_database(self)
    }
}

/// Description length using the input's own label universe.
pub fn description_length<M: Measurable + ?Sized>(g: &M) -> Bits {
    description_length_in(g, g.universe())
}

/// Description length against a fixed label universe.
pub fn description_length_in<M: Measurable + ?Sized>(g: &M, universe: LabelUniverse) -> Bits {
    let (v, e) = g.size();
    SimpleEncoding.bits(v, e, universe)
}

/// Score from sizes alone: `k` disjoint instances of an `n`-vertex, `m`-edge
/// pattern remove `k·(n-1)` vertices and `k·m` edges.
pub(crate) fn score_from_counts(
    db_vertices: usize,
    db_edges: usize,
    pattern_vertices: usize,
    pattern_edges: usize,
    instances: usize,
    universe: LabelUniverse,
) -> MdlScore {
    let v = db_vertices - instances * pattern_vertices.saturating_sub(1);
    let e = db_edges - instances * pattern_edges;
    let dl_g = SimpleEncoding.bits(v, e, universe);
    let dl_s = SimpleEncoding.bits(pattern_vertices, pattern_edges, universe);
    MdlScore::new(dl_g, dl_s)
}

/// Label of the placeholder vertex for the substructure of the given rank.
pub fn sub_label(rank: usize) -> Label {
    Label::new(format!("SUB_{rank}"))
}

/// Collapses each instance of `s` into one vertex labeled `SUB_<rank>`.
///
/// Edges realizing pattern edges are removed. Any other edge touching an
/// instance is re-attached to its placeholder, so an unmatched edge between
/// two vertices of the same instance becomes a self-loop. Surviving vertices
/// keep their relative order and placeholders are appended in instance order.
pub fn compress(
    db: &GraphDatabase,
    s: &Substructure,
    rank: usize,
) -> Result<GraphDatabase, CompressError> {
    let pattern = &s.pattern;
    let label = sub_label(rank);
    for inst in &s.instances {
        if db.example(inst.example_index).is_none() {
            return Err(CompressError::UnknownExample(inst.example_index));
        }
        if inst.cost != 0 || inst.vertex_map.iter().any(Option::is_none) {
            return Err(CompressError::InexactInstance {
                example: inst.example_index,
            });
        }
    }

    let mut examples = Vec::with_capacity(db.examples.len());
    for g in &db.examples {
        let instances: Vec<Vec<VertexId>> = s
            .instances
            .iter()
            .filter(|i| i.example_index == g.example_index)
            .map(|i| i.vertex_map.iter().map(|m| m.unwrap()).collect())
            .collect();
        if instances.is_empty() {
            examples.push(g.clone());
            continue;
        }

        // owner[v] = instance containing vertex v
        let n = g.vertex_count();
        let mut owner: Vec<Option<usize>> = vec![None; n + 1];
        for (k, map) in instances.iter().enumerate() {
            for &v in map {
                if v == 0 || v as usize > n {
                    return Err(CompressError::InexactInstance {
                        example: g.example_index,
                    });
                }
                if owner[v as usize].replace(k).is_some() {
                    return Err(CompressError::OverlappingInstances {
                        example: g.example_index,
                        vertex: v,
                    });
                }
            }
        }

        let mut removed = vec![false; g.edges.len()];
        for map in &instances {
            for pe in &pattern.edges {
                let (s, d) = (map[pe.src as usize - 1], map[pe.dst as usize - 1]);
                let hit = g.edges.iter().enumerate().position(|(i, e)| {
                    !removed[i] && e.src == s && e.dst == d && e.label == pe.label
                });
                match hit {
                    Some(i) => removed[i] = true,
                    None => {
                        return Err(CompressError::InexactInstance {
                            example: g.example_index,
                        })
                    }
                }
            }
        }

        let mut out = Graph::new(g.example_index);
        let mut new_id = vec![0; n + 1];
        for v in &g.vertices {
            if owner[v.id as usize].is_none() {
                new_id[v.id as usize] = out.add_vertex(v.label.clone());
            }
        }
        let placeholders: Vec<VertexId> = instances
            .iter()
            .map(|_| out.add_vertex(label.clone()))
            .collect();
        let remap = |v: VertexId| match owner[v as usize] {
            Some(k) => placeholders[k],
            None => new_id[v as usize],
        };
        for (i, e) in g.edges.iter().enumerate() {
            if !removed[i] {
                out.add_edge(remap(e.src), remap(e.dst), e.label.clone());
            }
        }
        examples.push(out);
    }
    Ok(GraphDatabase { examples })
}

/// `DL(G|S) + DL(S)` with both terms measured against the database's labels.
pub fn mdl_score(
    db: &GraphDatabase,
    s: &Substructure,
) -> Result<MdlScore, CompressError> {
    let universe = LabelUniverse::of_database(db);
    let compressed = compress(db, s, 1)?;
    Ok(MdlScore::new(
        description_length_in(&compressed, universe),
        description_length_in(&s.pattern, universe),
    ))
}
