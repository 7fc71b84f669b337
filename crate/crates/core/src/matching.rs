//! Exact and inexact (unit-cost) matching of a pattern against examples.
//!
//! A candidate instance maps each pattern vertex to a distinct example vertex
//! or leaves it unmapped. Its transformation cost counts unit operations:
//!
//! | operation                               | cost |
//! |-----------------------------------------|------|
//! | mapped vertex whose label differs       | 1    |
//! | unmapped (missing) pattern vertex       | 1    |
//! | pattern edge realized with other label  | 1    |
//! | pattern edge with no counterpart        | 1    |
//!
//! Example edges beyond those the pattern requires are free, so a cost-0
//! instance is exactly a label-preserving subgraph embedding.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphDatabase, Label, VertexId};
use crate::index::{sorted_difference_len, IndexedDb, IndexedExample, LabelId, LabelTable, Pattern};

/// An embedding of a pattern into one example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub example_index: u32,
    /// Entry `i` is the example vertex for pattern vertex `i + 1`.
    pub vertex_map: Vec<Option<VertexId>>,
    pub cost: u32,
}

impl Instance {
    /// Mapped example vertices, ascending.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.vertex_map.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs
    }

    pub fn is_exact(&self) -> bool {
        self.cost == 0
    }
}

/// The pattern element a deviation applies to, in pattern vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    Vertex { id: VertexId },
    Edge { src: VertexId, dst: VertexId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationKind {
    Relabel,
    Missing,
    Insertion,
}

/// One unit-cost difference between an instance and its pattern.
///
/// For insertions the edge may lead to a vertex outside the pattern; that
/// vertex gets the next free pattern id and its label is `endpoint_label`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeviationOp {
    pub element: Element,
    pub operation: OperationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old_label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_label: Option<Label>,
}

impl fmt::Display for DeviationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element {
            Element::Vertex { id } => write!(f, "v{id}")?,
            Element::Edge { src, dst } => write!(f, "e{src}-{dst}")?,
        }
        let opt = |l: &Option<Label>| l.as_ref().map(Label::as_str).unwrap_or("").to_owned();
        match self.operation {
            OperationKind::Relabel => {
                write!(f, ":relabel:{}->{}", opt(&self.old_label), opt(&self.new_label))
            }
            OperationKind::Missing => write!(f, ":missing:{}", opt(&self.old_label)),
            OperationKind::Insertion => {
                write!(f, ":insert:{}", opt(&self.new_label))?;
                if let Some(end) = &self.endpoint_label {
                    write!(f, ":{end}")?;
                }
                Ok(())
            }
        }
    }
}

/// A candidate map before id translation: pattern vertex -> example index.
pub(crate) type RawMap = Vec<Option<u32>>;

/// Keeps one map per distinct vertex set (cheapest, then smallest map) and
/// greedily takes a vertex-disjoint subset, cheapest first and ties by the
/// sorted vertex ids.
pub(crate) fn select_disjoint(candidates: Vec<(RawMap, u32)>, n_vertices: usize) -> Vec<(RawMap, u32)> {
    let mut by_set: HashMap<Vec<u32>, (RawMap, u32)> = HashMap::new();
    for (map, cost) in candidates {
        let mut set: Vec<u32> = map.iter().flatten().copied().collect();
        if set.is_empty() {
            continue;
        }
        set.sort_unstable();
        match by_set.get_mut(&set) {
            Some(existing) => {
                if (cost, &map) < (existing.1, &existing.0) {
                    *existing = (map, cost);
                }
            }
            None => {
                by_set.insert(set, (map, cost));
            }
        }
    }
    let mut ordered: Vec<(Vec<u32>, RawMap, u32)> =
        by_set.into_iter().map(|(s, (m, c))| (s, m, c)).collect();
    ordered.sort_by(|a, b| (a.2, &a.0).cmp(&(b.2, &b.0)));
    let mut used = vec![false; n_vertices];
    let mut chosen = Vec::new();
    for (set, map, cost) in ordered {
        if set.iter().any(|&v| used[v as usize]) {
            continue;
        }
        for &v in &set {
            used[v as usize] = true;
        }
        chosen.push((map, cost));
    }
    chosen
}

/// Edge requirements between a pattern vertex and the vertices placed before it.
struct Requirement {
    other: u32,
    /// Sorted labels of pattern edges `u -> other`.
    forward: Vec<LabelId>,
    /// Sorted labels of pattern edges `other -> u`; empty for self-loops.
    backward: Vec<LabelId>,
}

pub(crate) struct Matcher<'p> {
    pattern: &'p Pattern,
    order: Vec<u32>,
    /// For each position in `order`, the anchoring edge `(earlier vertex, u is target?, label)`.
    anchors: Vec<Option<(u32, bool, LabelId)>>,
    requirements: Vec<Vec<Requirement>>,
    label_multiset: Vec<LabelId>,
}

impl<'p> Matcher<'p> {
    pub fn new(pattern: &'p Pattern) -> Self {
        let order = pattern.connected_order();
        let n = pattern.len();
        let mut position = vec![0usize; n];
        for (i, &u) in order.iter().enumerate() {
            position[u as usize] = i;
        }
        let mut anchors = Vec::with_capacity(n);
        let mut requirements = Vec::with_capacity(n);
        for (i, &u) in order.iter().enumerate() {
            let anchor = pattern.edges.iter().find_map(|&(s, d, l)| {
                if d == u && s != u && position[s as usize] < i {
                    Some((s, true, l))
                } else if s == u && d != u && position[d as usize] < i {
                    Some((d, false, l))
                } else {
                    None
                }
            });
            anchors.push(anchor);
            let mut reqs = Vec::new();
            for &v in order[..=i].iter() {
                let forward = pattern.labels_between(u, v);
                let backward = if v == u {
                    Vec::new()
                } else {
                    pattern.labels_between(v, u)
                };
                if !forward.is_empty() || !backward.is_empty() {
                    reqs.push(Requirement {
                        other: v,
                        forward,
                        backward,
                    });
                }
            }
            requirements.push(reqs);
        }
        let mut label_multiset = pattern.labels.clone();
        label_multiset.sort_unstable();
        Matcher {
            pattern,
            order,
            anchors,
            requirements,
            label_multiset,
        }
    }

    /// Every label-preserving injective embedding, restricted to `allowed` vertices.
    pub fn exact(&self, ex: &IndexedExample, allowed: Option<&[bool]>) -> Vec<Vec<u32>> {
        let n = self.pattern.len();
        let mut results = Vec::new();
        if n == 0 || n > ex.len() {
            return results;
        }
        let mut map = vec![u32::MAX; n];
        let mut used = vec![false; ex.len()];
        self.exact_step(ex, allowed, 0, &mut map, &mut used, &mut results);
        results
    }

    fn exact_step(
        &self,
        ex: &IndexedExample,
        allowed: Option<&[bool]>,
        depth: usize,
        map: &mut Vec<u32>,
        used: &mut Vec<bool>,
        results: &mut Vec<Vec<u32>>,
    ) {
        if depth == self.order.len() {
            results.push(map.clone());
            return;
        }
        let u = self.order[depth];
        let want = self.pattern.labels[u as usize];
        let mut candidates: Vec<u32> = match self.anchors[depth] {
            Some((w, true, l)) => ex.out[map[w as usize] as usize]
                .iter()
                .filter(|&&(_, el)| el == l)
                .map(|&(d, _)| d)
                .collect(),
            Some((w, false, l)) => ex.inc[map[w as usize] as usize]
                .iter()
                .filter(|&&(_, el)| el == l)
                .map(|&(s, _)| s)
                .collect(),
            None => (0..ex.len() as u32).collect(),
        };
        candidates.sort_unstable();
        candidates.dedup();
        for x in candidates {
            if used[x as usize]
                || ex.labels[x as usize] != want
                || allowed.is_some_and(|a| !a[x as usize])
            {
                continue;
            }
            map[u as usize] = x;
            let fits = self.requirements[depth].iter().all(|r| {
                let y = map[r.other as usize];
                fits_all(&r.forward, ex, x, y) && fits_all(&r.backward, ex, y, x)
            });
            if fits {
                used[x as usize] = true;
                self.exact_step(ex, allowed, depth + 1, map, used, results);
                used[x as usize] = false;
            }
        }
        map[u as usize] = u32::MAX;
    }

    /// Every partial injective map into `allowed` vertices with
    /// `min_cost <= cost <= max_cost` and at least one mapped vertex.
    pub fn inexact(
        &self,
        ex: &IndexedExample,
        allowed: &[bool],
        max_cost: u32,
    ) -> Vec<(RawMap, u32)> {
        let mut results = Vec::new();
        if self.pattern.len() == 0 {
            return results;
        }
        let mut available: Vec<LabelId> = (0..ex.len())
            .filter(|&x| allowed[x])
            .map(|x| ex.labels[x])
            .collect();
        if available.is_empty() {
            return results;
        }
        available.sort_unstable();
        if sorted_difference_len(&self.label_multiset, &available) as u32 > max_cost {
            return results;
        }
        let mut map: RawMap = vec![None; self.pattern.len()];
        let mut used = vec![false; ex.len()];
        self.inexact_step(ex, allowed, max_cost, 0, 0, &mut map, &mut used, &mut results);
        results
    }

    #[allow(clippy::too_many_arguments)]
    fn inexact_step(
        &self,
        ex: &IndexedExample,
        allowed: &[bool],
        max_cost: u32,
        depth: usize,
        cost: u32,
        map: &mut RawMap,
        used: &mut Vec<bool>,
        results: &mut Vec<(RawMap, u32)>,
    ) {
        if depth == self.order.len() {
            if map.iter().any(Option::is_some) {
                results.push((map.clone(), cost));
            }
            return;
        }
        let u = self.order[depth];
        let want = self.pattern.labels[u as usize];
        let options: Vec<Option<u32>> = std::iter::once(None)
            .chain(
                (0..ex.len() as u32)
                    .filter(|&x| allowed[x as usize] && !used[x as usize])
                    .map(Some),
            )
            .collect();
        for choice in options {
            map[u as usize] = choice;
            let mut step = match choice {
                None => 1,
                Some(x) => u32::from(ex.labels[x as usize] != want),
            };
            for r in &self.requirements[depth] {
                let other = map[r.other as usize];
                step += edge_cost(&r.forward, ex, choice, other);
                step += edge_cost(&r.backward, ex, other, choice);
            }
            if cost + step > max_cost {
                continue;
            }
            if let Some(x) = choice {
                used[x as usize] = true;
            }
            self.inexact_step(ex, allowed, max_cost, depth + 1, cost + step, map, used, results);
            if let Some(x) = choice {
                used[x as usize] = false;
            }
        }
        map[u as usize] = None;
    }
}

fn fits_all(labels: &[LabelId], ex: &IndexedExample, x: u32, y: u32) -> bool {
    let mut i = 0;
    while i < labels.len() {
        let l = labels[i];
        let need = labels[i..].iter().take_while(|&&m| m == l).count();
        if ex.multiplicity(x, y, l) < need {
            return false;
        }
        i += need;
    }
    true
}

/// Pattern edges `x -> y` (given as sorted labels) without an exact counterpart.
fn edge_cost(labels: &[LabelId], ex: &IndexedExample, x: Option<u32>, y: Option<u32>) -> u32 {
    if labels.is_empty() {
        return 0;
    }
    match (x, y) {
        (Some(x), Some(y)) => sorted_difference_len(labels, &ex.labels_between(x, y)) as u32,
        _ => labels.len() as u32,
    }
}

/// Unit operations turning the pattern into what `map` finds in the example.
pub(crate) fn deviation_ops(
    pattern: &Pattern,
    ex: &IndexedExample,
    map: &RawMap,
    table: &LabelTable,
) -> Vec<DeviationOp> {
    let name = |l: LabelId| Some(table.name(l).clone());
    let mut ops = Vec::new();
    for (u, &want) in pattern.labels.iter().enumerate() {
        let id = u as VertexId + 1;
        match map[u] {
            None => ops.push(DeviationOp {
                element: Element::Vertex { id },
                operation: OperationKind::Missing,
                old_label: name(want),
                new_label: None,
                endpoint_label: None,
            }),
            Some(x) if ex.labels[x as usize] != want => ops.push(DeviationOp {
                element: Element::Vertex { id },
                operation: OperationKind::Relabel,
                old_label: name(want),
                new_label: name(ex.labels[x as usize]),
                endpoint_label: None,
            }),
            Some(_) => {}
        }
    }
    let mut pairs: Vec<(u32, u32)> = pattern.edges.iter().map(|&(s, d, _)| (s, d)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    for (s, d) in pairs {
        let wanted = pattern.labels_between(s, d);
        let found = match (map[s as usize], map[d as usize]) {
            (Some(x), Some(y)) => ex.labels_between(x, y),
            _ => Vec::new(),
        };
        let (missing, spare) = multiset_split(&wanted, &found);
        let element = Element::Edge { src: s + 1, dst: d + 1 };
        for (i, &old) in missing.iter().enumerate() {
            let (operation, new_label) = match spare.get(i) {
                Some(&new) => (OperationKind::Relabel, name(new)),
                None => (OperationKind::Missing, None),
            };
            ops.push(DeviationOp {
                element: element.clone(),
                operation,
                old_label: name(old),
                new_label,
                endpoint_label: None,
            });
        }
    }
    ops
}

/// Returns `(a \ b, b \ a)` as sorted multisets.
fn multiset_split(a: &[LabelId], b: &[LabelId]) -> (Vec<LabelId>, Vec<LabelId>) {
    let (mut i, mut j) = (0, 0);
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                only_a.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                only_b.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                only_a.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                only_b.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (only_a, only_b)
}

pub(crate) fn to_instance(example_index: u32, map: &RawMap, cost: u32) -> Instance {
    Instance {
        example_index,
        vertex_map: map.iter().map(|m| m.map(|x| x + 1)).collect(),
        cost,
    }
}

/// Exact instances first, then inexact ones restricted to the vertices the
/// exact instances left free. This equals one global greedy pass because
/// cost-0 candidates always sort first.
pub(crate) fn instances_in_example(
    matcher: &Matcher<'_>,
    ex: &IndexedExample,
    max_cost: u32,
) -> Vec<(RawMap, u32)> {
    let exact: Vec<(RawMap, u32)> = matcher
        .exact(ex, None)
        .into_iter()
        .map(|m| (m.into_iter().map(Some).collect(), 0))
        .collect();
    let mut chosen = select_disjoint(exact, ex.len());
    if max_cost > 0 {
        let mut free = vec![true; ex.len()];
        for (map, _) in &chosen {
            for &x in map.iter().flatten() {
                free[x as usize] = false;
            }
        }
        chosen.extend(inexact_on_free(matcher, ex, &free, max_cost));
    }
    chosen
}

pub(crate) fn inexact_on_free(
    matcher: &Matcher<'_>,
    ex: &IndexedExample,
    free: &[bool],
    max_cost: u32,
) -> Vec<(RawMap, u32)> {
    if !free.iter().any(|&f| f) {
        return Vec::new();
    }
    let candidates = matcher
        .inexact(ex, free, max_cost)
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .collect();
    select_disjoint(candidates, ex.len())
}

/// All instances of `pattern` with cost at most `max_cost`, vertex-disjoint
/// within each example, in database order.
pub fn find_instances(db: &GraphDatabase, pattern: &Graph, max_cost: u32) -> Vec<Instance> {
    let mut index = IndexedDb::new(db);
    let pat = Pattern::from_graph(pattern, &mut index.table);
    let matcher = Matcher::new(&pat);
    index
        .examples
        .par_iter()
        .map(|ex| {
            instances_in_example(&matcher, ex, max_cost)
                .into_iter()
                .map(|(m, c)| to_instance(ex.example_index, &m, c))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn single_example_index(pattern: &Graph, example: &Graph) -> (Pattern, IndexedExample, LabelTable) {
    let db = GraphDatabase::new(vec![example.clone()]);
    let mut index = IndexedDb::new(&db);
    let pat = Pattern::from_graph(pattern, &mut index.table);
    let ex = index.examples.pop().expect("one example");
    (pat, ex, index.table)
}

fn raw_map(vertex_map: &[Option<VertexId>]) -> RawMap {
    vertex_map.iter().map(|m| m.map(|x| x - 1)).collect()
}

/// Unit-cost deviation of `vertex_map` (pattern id `i+1` at entry `i`) from `pattern`.
pub fn deviation(pattern: &Graph, example: &Graph, vertex_map: &[Option<VertexId>]) -> Vec<DeviationOp> {
    let (pat, ex, table) = single_example_index(pattern, example);
    deviation_ops(&pat, &ex, &raw_map(vertex_map), &table)
}

/// Number of unit operations separating the mapped example from `pattern`.
pub fn transformation_cost(pattern: &Graph, example: &Graph, vertex_map: &[Option<VertexId>]) -> u32 {
    deviation(pattern, example, vertex_map).len() as u32
}
