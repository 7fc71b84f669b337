//! MDL-guided beam search for the best substructure.
//!
//! Seeds are the single-vertex patterns, one per vertex label. Every generation
//! grows each beam pattern by one edge in all ways realized by some embedding,
//! merges isomorphic children through their canonical form, scores them with
//! their vertex-disjoint exact instances, and keeps the `beam_width` best.
//! The search ends when a generation yields no unseen pattern.
//!
//! Children inherit embeddings from their parent: every embedding of
//! `parent + edge` restricts to an embedding of `parent`, so extending all
//! parent embeddings enumerates all child embeddings without re-matching.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::canonicalize;
use crate::error::DiscoveryError;
use crate::graph::{Graph, GraphDatabase};
use crate::index::{IndexedDb, LabelId, Pattern};
use crate::matching::{select_disjoint, to_instance, Instance, RawMap};
use crate::mdl::{compress, score_from_counts, MdlScore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryParams {
    pub beam_width: usize,
    pub max_pattern_vertices: usize,
    pub num_best: usize,
    pub iterations: usize,
}

impl Default for DiscoveryParams {
    fn default() -> Self {
        DiscoveryParams {
            beam_width: 4,
            max_pattern_vertices: 16,
            num_best: 3,
            iterations: 1,
        }
    }
}

impl DiscoveryParams {
    pub fn validate(&self) -> Result<(), DiscoveryError> {
        if self.beam_width == 0 {
            return Err(DiscoveryError::InvalidParams("beam_width must be at least 1"));
        }
        if self.max_pattern_vertices == 0 {
            return Err(DiscoveryError::InvalidParams(
                "max_pattern_vertices must be at least 1",
            ));
        }
        if self.num_best == 0 {
            return Err(DiscoveryError::InvalidParams("num_best must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(DiscoveryError::InvalidParams("iterations must be at least 1"));
        }
        Ok(())
    }
}

/// A connected pattern with its vertex-disjoint exact instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Substructure {
    pub pattern: Graph,
    pub instances: Vec<Instance>,
    pub score: MdlScore,
}

#[derive(Clone, Debug)]
pub(crate) struct Embedding {
    pub example: u32,
    pub map: Vec<u32>,
}

/// A scored pattern in canonical vertex order.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub pattern: Pattern,
    pub embeddings: Vec<Embedding>,
    /// Selected instances as `(example position, map)`.
    pub instances: Vec<(u32, Vec<u32>)>,
    pub score: MdlScore,
}

impl Candidate {
    fn new(pattern: Pattern, embeddings: Vec<Embedding>, index: &IndexedDb, totals: (usize, usize)) -> Self {
        let instances = select_instances(&embeddings, index);
        let score = score_from_counts(
            totals.0,
            totals.1,
            pattern.len(),
            pattern.edges.len(),
            instances.len(),
            index.universe,
        );
        Candidate {
            pattern,
            embeddings,
            instances,
            score,
        }
    }

    pub fn to_substructure(&self, index: &IndexedDb) -> Substructure {
        Substructure {
            pattern: self.pattern.to_graph(&index.table, 0),
            instances: self
                .instances
                .iter()
                .map(|(pos, map)| {
                    let raw: RawMap = map.iter().map(|&x| Some(x)).collect();
                    to_instance(index.examples[*pos as usize].example_index, &raw, 0)
                })
                .collect(),
            score: self.score,
        }
    }
}

fn select_instances(embeddings: &[Embedding], index: &IndexedDb) -> Vec<(u32, Vec<u32>)> {
    let mut by_example: Vec<(u32, Vec<(RawMap, u32)>)> = Vec::new();
    let mut sorted: Vec<&Embedding> = embeddings.iter().collect();
    sorted.sort_by_key(|e| e.example);
    for e in sorted {
        let raw: RawMap = e.map.iter().map(|&x| Some(x)).collect();
        match by_example.last_mut() {
            Some((ex, list)) if *ex == e.example => list.push((raw, 0)),
            _ => by_example.push((e.example, vec![(raw, 0)])),
        }
    }
    let mut out = Vec::new();
    for (ex, list) in by_example {
        let n = index.examples[ex as usize].len();
        for (map, _) in select_disjoint(list, n) {
            out.push((ex, map.into_iter().map(Option::unwrap).collect()));
        }
    }
    out
}

/// Total ranking order: lower MDL total, more instances, fewer vertices,
/// smaller label sequence, smaller canonical edge list.
pub(crate) fn rank_cmp(a: &Candidate, b: &Candidate) -> Ordering {
    a.score
        .total
        .total_cmp(&b.score.total)
        .then_with(|| b.instances.len().cmp(&a.instances.len()))
        .then_with(|| a.pattern.len().cmp(&b.pattern.len()))
        .then_with(|| a.pattern.labels.cmp(&b.pattern.labels))
        .then_with(|| a.pattern.edges.cmp(&b.pattern.edges))
}

/// One-edge growth of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Growth {
    /// Edge `u -> v` between existing pattern vertices.
    Internal { u: u32, v: u32, label: LabelId },
    /// Edge `u -> new` to a new vertex labeled `vertex_label`.
    Out { u: u32, label: LabelId, vertex_label: LabelId },
    /// Edge `new -> u` from a new vertex labeled `vertex_label`.
    In { u: u32, label: LabelId, vertex_label: LabelId },
}

impl Growth {
    pub fn apply(&self, p: &Pattern) -> Pattern {
        let mut q = p.clone();
        let new = p.len() as u32;
        match *self {
            Growth::Internal { u, v, label } => q.edges.push((u, v, label)),
            Growth::Out { u, label, vertex_label } => {
                q.labels.push(vertex_label);
                q.edges.push((u, new, label));
            }
            Growth::In { u, label, vertex_label } => {
                q.labels.push(vertex_label);
                q.edges.push((new, u, label));
            }
        }
        q
    }

    pub fn adds_vertex(&self) -> bool {
        !matches!(self, Growth::Internal { .. })
    }
}

/// Every growth realized at one embedding, paired with the new example vertex
/// for growths that add one.
pub(crate) fn growths_at(
    pattern: &Pattern,
    ex: &crate::index::IndexedExample,
    map: &[u32],
    inverse: &mut [u32],
) -> Vec<(Growth, Option<u32>)> {
    for (u, &x) in map.iter().enumerate() {
        inverse[x as usize] = u as u32;
    }
    let mut found: Vec<(Growth, Option<u32>)> = Vec::new();
    for (u, &x) in map.iter().enumerate() {
        let u = u as u32;
        for &(y, label) in &ex.out[x as usize] {
            let v = inverse[y as usize];
            if v != u32::MAX {
                if ex.multiplicity(x, y, label) > pattern.multiplicity(u, v, label) {
                    found.push((Growth::Internal { u, v, label }, None));
                }
            } else {
                let vertex_label = ex.labels[y as usize];
                found.push((Growth::Out { u, label, vertex_label }, Some(y)));
            }
        }
        for &(y, label) in &ex.inc[x as usize] {
            if inverse[y as usize] == u32::MAX {
                let vertex_label = ex.labels[y as usize];
                found.push((Growth::In { u, label, vertex_label }, Some(y)));
            }
        }
    }
    for &x in map {
        inverse[x as usize] = u32::MAX;
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Children of `parent` in canonical form, with their derived embeddings.
fn expand(parent: &Candidate, index: &IndexedDb, max_vertices: usize) -> Vec<(Pattern, Vec<Embedding>)> {
    let can_add_vertex = parent.pattern.len() < max_vertices;
    let mut slots: HashMap<Growth, usize> = HashMap::new();
    let mut groups: Vec<(Growth, Vec<Embedding>)> = Vec::new();
    let mut inverse: Vec<u32> = Vec::new();
    for emb in &parent.embeddings {
        let ex = &index.examples[emb.example as usize];
        if inverse.len() < ex.len() {
            inverse.resize(ex.len(), u32::MAX);
        }
        for (growth, new_vertex) in growths_at(&parent.pattern, ex, &emb.map, &mut inverse) {
            if growth.adds_vertex() && !can_add_vertex {
                continue;
            }
            let slot = *slots.entry(growth).or_insert_with(|| {
                groups.push((growth, Vec::new()));
                groups.len() - 1
            });
            let mut map = emb.map.clone();
            map.extend(new_vertex);
            groups[slot].1.push(Embedding {
                example: emb.example,
                map,
            });
        }
    }

    let mut seen: HashSet<Pattern> = HashSet::new();
    let mut children = Vec::new();
    for (growth, embeddings) in groups {
        let raw = growth.apply(&parent.pattern);
        let canon = canonicalize(&raw);
        if !seen.insert(canon.pattern.clone()) {
            continue;
        }
        let embeddings = embeddings
            .into_iter()
            .map(|e| {
                let mut map = vec![0; e.map.len()];
                for (old, &x) in e.map.iter().enumerate() {
                    map[canon.perm[old] as usize] = x;
                }
                Embedding {
                    example: e.example,
                    map,
                }
            })
            .collect();
        children.push((canon.pattern, embeddings));
    }
    children
}

fn seeds(index: &IndexedDb) -> Vec<(Pattern, Vec<Embedding>)> {
    let mut by_label: HashMap<LabelId, Vec<Embedding>> = HashMap::new();
    for (pos, ex) in index.examples.iter().enumerate() {
        for (x, &l) in ex.labels.iter().enumerate() {
            by_label.entry(l).or_default().push(Embedding {
                example: pos as u32,
                map: vec![x as u32],
            });
        }
    }
    let mut out: Vec<(Pattern, Vec<Embedding>)> = by_label
        .into_iter()
        .map(|(l, e)| (Pattern::single(l), e))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Beam search over one database; returns the `num_best` best candidates.
pub(crate) fn search(index: &IndexedDb, params: &DiscoveryParams) -> Vec<Candidate> {
    let totals = (
        index.examples.iter().map(|e| e.len()).sum::<usize>(),
        index
            .examples
            .iter()
            .map(|e| e.out.iter().map(Vec::len).sum::<usize>())
            .sum::<usize>(),
    );
    let mut seen: HashSet<Pattern> = HashSet::new();
    let mut best: Vec<Candidate> = Vec::new();

    let mut generation: Vec<Candidate> = seeds(index)
        .into_par_iter()
        .map(|(p, e)| Candidate::new(p, e, index, totals))
        .collect();
    loop {
        for c in &generation {
            seen.insert(c.pattern.clone());
        }
        generation.sort_by(rank_cmp);
        keep_best(&mut best, &generation, params.num_best);
        generation.truncate(params.beam_width);

        let children: Vec<Vec<(Pattern, Vec<Embedding>)>> = generation
            .par_iter()
            .map(|parent| expand(parent, index, params.max_pattern_vertices))
            .collect();
        let mut fresh = Vec::new();
        let mut fresh_keys: HashSet<Pattern> = HashSet::new();
        for (pattern, embeddings) in children.into_iter().flatten() {
            if seen.contains(&pattern) || !fresh_keys.insert(pattern.clone()) {
                continue;
            }
            fresh.push((pattern, embeddings));
        }
        if fresh.is_empty() {
            break;
        }
        generation = fresh
            .into_par_iter()
            .map(|(p, e)| Candidate::new(p, e, index, totals))
            .collect();
    }
    best
}

fn keep_best(best: &mut Vec<Candidate>, sorted_generation: &[Candidate], limit: usize) {
    best.extend(sorted_generation.iter().take(limit).cloned());
    best.sort_by(rank_cmp);
    best.truncate(limit);
}

/// Every pattern made by adding one edge to `pattern` (between existing
/// vertices or to one new vertex) that some exact embedding realizes.
/// Isomorphic results are merged; output is in canonical order.
pub fn extend(pattern: &Graph, db: &GraphDatabase) -> Vec<Graph> {
    let mut index = IndexedDb::new(db);
    let pat = Pattern::from_graph(pattern, &mut index.table);
    let matcher = crate::matching::Matcher::new(&pat);
    let mut children: HashSet<Pattern> = HashSet::new();
    let mut inverse: Vec<u32> = Vec::new();
    for ex in &index.examples {
        if inverse.len() < ex.len() {
            inverse.resize(ex.len(), u32::MAX);
        }
        for map in matcher.exact(ex, None) {
            for (growth, _) in growths_at(&pat, ex, &map, &mut inverse) {
                children.insert(canonicalize(&growth.apply(&pat)).pattern);
            }
        }
    }
    let mut sorted: Vec<Pattern> = children.into_iter().collect();
    sorted.sort();
    sorted
        .iter()
        .map(|p| p.to_graph(&index.table, 0))
        .collect()
}

/// Ranked best substructures of the database (first iteration only).
pub fn discover(db: &GraphDatabase, params: &DiscoveryParams) -> Result<Vec<Substructure>, DiscoveryError> {
    params.validate()?;
    if db.is_empty() || db.vertex_count() == 0 {
        return Err(DiscoveryError::EmptyDatabase);
    }
    let index = IndexedDb::new(db);
    Ok(search(&index, params)
        .iter()
        .map(|c| c.to_substructure(&index))
        .collect())
}

/// Runs `params.iterations` rounds, compressing the database with each
/// round's best substructure (labeled `SUB_<round>`) before the next.
pub fn discover_hierarchical(
    db: &GraphDatabase,
    params: &DiscoveryParams,
) -> Result<Vec<Vec<Substructure>>, DiscoveryError> {
    params.validate()?;
    let mut rounds = Vec::with_capacity(params.iterations);
    let mut current = db.clone();
    for round in 1..=params.iterations {
        if current.vertex_count() == 0 {
            break;
        }
        let ranked = discover(&current, params)?;
        let Some(top) = ranked.first() else { break };
        let next = compress(&current, top, round)
            .expect("discovered instances are exact and disjoint");
        rounds.push(ranked);
        current = next;
    }
    if rounds.is_empty() {
        return Err(DiscoveryError::EmptyDatabase);
    }
    Ok(rounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::{description_length, mdl_score};

    fn copies(template: &Graph, n: u32) -> GraphDatabase {
        GraphDatabase::new(
            (1..=n)
                .map(|i| {
                    let mut g = template.clone();
                    g.example_index = i;
                    g
                })
                .collect(),
        )
    }

    fn triangle() -> Graph {
        let mut g = Graph::new(1);
        g.add_vertex("A");
        g.add_vertex("B");
        g.add_vertex("C");
        g.add_edge(1, 2, "x");
        g.add_edge(2, 3, "y");
        g.add_edge(3, 1, "z");
        g
    }

    #[test]
    fn three_triangles_best_is_triangle() {
        let db = copies(&triangle(), 3);
        let best = &discover(&db, &DiscoveryParams::default()).unwrap()[0];
        assert_eq!(best.pattern.vertex_count(), 3);
        assert_eq!(best.pattern.edge_count(), 3);
        assert_eq!(best.instances.len(), 3);
        assert!(best.score.total < description_length(&db));
        assert_eq!(mdl_score(&db, best).unwrap(), best.score);
    }

    #[test]
    fn single_vertex_database() {
        let mut g = Graph::new(1);
        g.add_vertex("only");
        let db = GraphDatabase::new(vec![g]);
        let best = &discover(&db, &DiscoveryParams::default()).unwrap()[0];
        assert_eq!(best.pattern.vertex_count(), 1);
        assert_eq!(best.pattern.vertices[0].label.as_str(), "only");
    }

    #[test]
    fn empty_database_and_bad_params() {
        assert_eq!(
            discover(&GraphDatabase::default(), &DiscoveryParams::default()),
            Err(DiscoveryError::EmptyDatabase)
        );
        let bad = DiscoveryParams {
            beam_width: 0,
            ..DiscoveryParams::default()
        };
        assert!(matches!(
            discover(&copies(&triangle(), 1), &bad),
            Err(DiscoveryError::InvalidParams(_))
        ));
    }

    #[test]
    fn ranking_is_ascending_and_bounded() {
        let db = copies(&triangle(), 4);
        let params = DiscoveryParams {
            num_best: 5,
            ..DiscoveryParams::default()
        };
        let ranked = discover(&db, &params).unwrap();
        assert_eq!(ranked.len(), 5);
        for w in ranked.windows(2) {
            assert!(w[0].score.total <= w[1].score.total);
        }
    }

    #[test]
    fn hierarchical_rounds_use_placeholders() {
        let db = copies(&triangle(), 3);
        let params = DiscoveryParams {
            iterations: 2,
            ..DiscoveryParams::default()
        };
        let rounds = discover_hierarchical(&db, &params).unwrap();
        assert_eq!(rounds.len(), 2);
        assert_eq!(rounds[1][0].pattern.vertices[0].label.as_str(), "SUB_1");
    }
}
