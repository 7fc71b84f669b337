//! Synthetic news-graph databases with injected structural anomalies.
//!
//! Every example is the rooted news topology: `News -> in-line`, five
//! category vertices under `in-line`, one leaf under each category and two
//! under `Noun`. Leaf labels are drawn once per run from per-category pools,
//! so all unperturbed examples are identical.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphDatabase, VertexId};

pub const EDGE_LABEL: &str = "has";
const CATEGORIES: [&str; 5] = ["Person", "Organization", "Location", "Verb", "Noun"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    Modification,
    Insertion,
    Deletion,
}

impl AnomalyKind {
    pub const ALL: [AnomalyKind; 3] = [
        AnomalyKind::Modification,
        AnomalyKind::Insertion,
        AnomalyKind::Deletion,
    ];
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnomalyKind::Modification => "modification",
            AnomalyKind::Insertion => "insertion",
            AnomalyKind::Deletion => "deletion",
        })
    }
}

impl FromStr for AnomalyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "modification" => Ok(AnomalyKind::Modification),
            "insertion" => Ok(AnomalyKind::Insertion),
            "deletion" => Ok(AnomalyKind::Deletion),
            other => Err(format!("unknown anomaly kind {other:?}")),
        }
    }
}

/// Candidate leaf labels per category, plus labels used for inserted vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPools {
    pub person: Vec<String>,
    pub organization: Vec<String>,
    pub location: Vec<String>,
    pub verb: Vec<String>,
    pub noun: Vec<String>,
    pub insertion: Vec<String>,
}

impl Default for LabelPools {
    fn default() -> Self {
        let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        LabelPools {
            person: owned(&["andres", "trump", "biden", "merkel", "modi"]),
            organization: owned(&["congress", "senate", "who", "cdc", "nato"]),
            location: owned(&["mexico", "china", "texas", "india", "paris"]),
            verb: owned(&["infected", "rejected", "approved", "denied", "killed"]),
            noun: owned(&["corona", "president", "vaccine", "mask", "election", "virus"]),
            insertion: owned(&["not", "never", "hoax", "secret"]),
        }
    }
}

impl LabelPools {
    fn category(&self, i: usize) -> &[String] {
        match i {
            0 => &self.person,
            1 => &self.organization,
            2 => &self.location,
            3 => &self.verb,
            _ => &self.noun,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_instances: usize,
    pub label_pools: LabelPools,
    pub anomalies: Vec<(AnomalyKind, usize)>,
}

impl SyntheticSpec {
    pub fn new(num_instances: usize, anomalies: Vec<(AnomalyKind, usize)>) -> Self {
        SyntheticSpec {
            num_instances,
            label_pools: LabelPools::default(),
            anomalies,
        }
    }

    pub fn anomaly_count(&self) -> usize {
        self.anomalies.iter().map(|(_, n)| n).sum()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.anomaly_count() >= self.num_instances {
            return Err(format!(
                "{} anomalies need more than {} instances",
                self.anomaly_count(),
                self.num_instances
            ));
        }
        let p = &self.label_pools;
        for (i, name) in CATEGORIES.iter().enumerate() {
            let need = if i == 4 { 3 } else { 2 };
            let mut pool = p.category(i).to_vec();
            pool.sort();
            pool.dedup();
            if pool.len() < need {
                return Err(format!("{name} pool needs at least {need} distinct labels"));
            }
        }
        if p.insertion.is_empty() {
            return Err("insertion pool is empty".into());
        }
        let all = CATEGORIES
            .iter()
            .map(|s| s.to_string())
            .chain((0..5).flat_map(|i| p.category(i).to_vec()))
            .chain(p.insertion.iter().cloned());
        for label in all {
            if label.is_empty() || label.contains('"') || crate::graph::is_reserved_label(&label) {
                return Err(format!("unusable label {label:?}"));
            }
        }
        Ok(())
    }
}

/// One injected anomaly. `detail` describes the change in example vertex ids
/// of the unperturbed topology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub example: u32,
    pub kind: AnomalyKind,
    pub detail: String,
}

impl fmt::Display for ManifestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "example={} kind={} detail={}", self.example, self.kind, self.detail)
    }
}

impl FromStr for ManifestEntry {
    type Err = String;
    fn from_str(line: &str) -> Result<Self, String> {
        let bad = || format!("malformed manifest line {line:?}");
        let rest = line.strip_prefix("example=").ok_or_else(bad)?;
        let (example, rest) = rest.split_once(" kind=").ok_or_else(bad)?;
        let (kind, detail) = rest.split_once(" detail=").ok_or_else(bad)?;
        Ok(ManifestEntry {
            example: example.parse().map_err(|_| bad())?,
            kind: kind.parse()?,
            detail: detail.to_string(),
        })
    }
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    entries.iter().map(|e| format!("{e}\n")).collect()
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim_end().parse())
        .collect()
}

/// Leaf labels in id order (ids 8..=13), picked once per run.
fn normative_leaves(pools: &LabelPools, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut leaves = Vec::with_capacity(6);
    for i in 0..4 {
        leaves.push(pools.category(i).choose(rng).unwrap().clone());
    }
    let mut nouns = pools.noun.clone();
    nouns.sort();
    nouns.dedup();
    nouns.shuffle(rng);
    leaves.push(nouns[0].clone());
    leaves.push(nouns[1].clone());
    leaves
}

fn topology(example_index: u32, leaves: &[String]) -> Graph {
    let mut g = Graph::new(example_index);
    g.add_vertex("News");
    g.add_vertex("in-line");
    for c in CATEGORIES {
        g.add_vertex(c);
    }
    for leaf in leaves {
        g.add_vertex(leaf.as_str());
    }
    g.add_edge(1, 2, EDGE_LABEL);
    for c in 3..=7 {
        g.add_edge(2, c, EDGE_LABEL);
    }
    for (i, parent) in [3, 4, 5, 6, 7, 7].into_iter().enumerate() {
        g.add_edge(parent, 8 + i as VertexId, EDGE_LABEL);
    }
    g
}

/// Category index (into the pools) of leaf `id`.
fn leaf_category(id: VertexId) -> usize {
    (id as usize - 8).min(4)
}

fn modify(g: &mut Graph, pools: &LabelPools, leaves: &[String], rng: &mut ChaCha8Rng) -> String {
    let id: VertexId = rng.gen_range(8..=13);
    let options: Vec<&String> = pools
        .category(leaf_category(id))
        .iter()
        .filter(|l| !leaves.contains(l))
        .collect();
    let new = (*options.choose(rng).expect("pool has a non-normative label")).clone();
    let v = &mut g.vertices[id as usize - 1];
    let detail = format!("relabel:v{id}:{}->{new}", v.label);
    v.label = new.into();
    detail
}

fn insert(g: &mut Graph, pools: &LabelPools, rng: &mut ChaCha8Rng) -> String {
    let parent: VertexId = rng.gen_range(1..=g.vertex_count() as VertexId);
    let label = pools.insertion.choose(rng).unwrap().clone();
    let id = g.add_vertex(label.as_str());
    g.add_edge(parent, id, EDGE_LABEL);
    format!("insert:v{id}:{label}:e{parent}-{id}:{EDGE_LABEL}")
}

fn delete(g: &mut Graph, rng: &mut ChaCha8Rng) -> String {
    let id: VertexId = rng.gen_range(8..=13);
    let label = g.vertices[id as usize - 1].label.clone();
    let parent = g.edges.iter().find(|e| e.dst == id).map(|e| e.src).unwrap();
    g.vertices.remove(id as usize - 1);
    for v in &mut g.vertices[id as usize - 1..] {
        v.id -= 1;
    }
    g.edges.retain(|e| e.dst != id);
    for e in &mut g.edges {
        if e.dst > id {
            e.dst -= 1;
        }
    }
    format!("delete:v{id}:{label}:e{parent}-{id}:{EDGE_LABEL}")
}

/// Builds `spec.num_instances` examples indexed from 1 and perturbs a
/// distinct example for each requested anomaly. Deterministic in `seed`.
///
/// # Panics
/// If `spec.validate()` fails.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> (GraphDatabase, Vec<ManifestEntry>) {
    if let Err(e) = spec.validate() {
        panic!("invalid synthetic spec: {e}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = normative_leaves(&spec.label_pools, &mut rng);
    let mut examples: Vec<Graph> = (1..=spec.num_instances as u32)
        .map(|i| topology(i, &leaves))
        .collect();

    let mut targets: Vec<usize> = (0..spec.num_instances).collect();
    targets.shuffle(&mut rng);
    let mut targets = targets.into_iter();
    let mut manifest = Vec::with_capacity(spec.anomaly_count());
    for &(kind, count) in &spec.anomalies {
        for _ in 0..count {
            let t = targets.next().expect("validated count");
            let g = &mut examples[t];
            let detail = match kind {
                AnomalyKind::Modification => modify(g, &spec.label_pools, &leaves, &mut rng),
                AnomalyKind::Insertion => insert(g, &spec.label_pools, &mut rng),
                AnomalyKind::Deletion => delete(g, &mut rng),
            };
            manifest.push(ManifestEntry {
                example: g.example_index,
                kind,
                detail,
            });
        }
    }
    manifest.sort_by_key(|e| e.example);
    (GraphDatabase::new(examples), manifest)
}
