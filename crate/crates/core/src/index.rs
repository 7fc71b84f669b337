//! Interned, adjacency-indexed view of a database used by the search code.

use std::collections::{BTreeSet, HashMap};

use crate::graph::{Graph, GraphDatabase, Label};

pub(crate) type LabelId = u32;

/// Label interning. Ids of labels present in the database follow byte order of
/// the label text, so comparing ids compares labels. Labels seen only later
/// (pattern labels absent from the data) get ids past the sorted range.
#[derive(Clone, Debug, Default)]
pub(crate) struct LabelTable {
    names: Vec<Label>,
    ids: HashMap<Label, LabelId>,
}

impl LabelTable {
    pub fn from_db(db: &GraphDatabase) -> Self {
        let mut all = BTreeSet::new();
        for g in &db.examples {
            all.extend(g.vertices.iter().map(|v| &v.label));
            all.extend(g.edges.iter().map(|e| &e.label));
        }
        let names: Vec<Label> = all.into_iter().cloned().collect();
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as LabelId))
            .collect();
        LabelTable { names, ids }
    }

    pub fn intern(&mut self, label: &Label) -> LabelId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.names.len() as LabelId;
        self.names.push(label.clone());
        self.ids.insert(label.clone(), id);
        id
    }

    pub fn name(&self, id: LabelId) -> &Label {
        &self.names[id as usize]
    }
}

/// One example with 0-based vertex indices and per-vertex adjacency lists.
#[derive(Clone, Debug)]
pub(crate) struct IndexedExample {
    pub example_index: u32,
    pub labels: Vec<LabelId>,
    pub out: Vec<Vec<(u32, LabelId)>>,
    pub inc: Vec<Vec<(u32, LabelId)>>,
}

impl IndexedExample {
    fn from_graph(g: &Graph, table: &mut LabelTable) -> Self {
        let n = g.vertices.len();
        let labels = g.vertices.iter().map(|v| table.intern(&v.label)).collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for e in &g.edges {
            let l = table.intern(&e.label);
            let (s, d) = (e.src - 1, e.dst - 1);
            out[s as usize].push((d, l));
            inc[d as usize].push((s, l));
        }
        IndexedExample {
            example_index: g.example_index,
            labels,
            out,
            inc,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Number of parallel edges `x -> y` carrying `label`.
    pub fn multiplicity(&self, x: u32, y: u32, label: LabelId) -> usize {
        self.out[x as usize]
            .iter()
            .filter(|&&(d, l)| d == y && l == label)
            .count()
    }

    /// Edge labels `x -> y`, sorted.
    pub fn labels_between(&self, x: u32, y: u32) -> Vec<LabelId> {
        let mut ls: Vec<LabelId> = self.out[x as usize]
            .iter()
            .filter(|&&(d, _)| d == y)
            .map(|&(_, l)| l)
            .collect();
        ls.sort_unstable();
        ls
    }
}

#[derive(Clone, Debug)]
pub(crate) struct IndexedDb {
    pub table: LabelTable,
    pub examples: Vec<IndexedExample>,
    pub universe: crate::mdl::LabelUniverse,
}

impl IndexedDb {
    pub fn new(db: &GraphDatabase) -> Self {
        let mut table = LabelTable::from_db(db);
        let examples = db
            .examples
            .iter()
            .map(|g| IndexedExample::from_graph(g, &mut table))
            .collect();
        IndexedDb {
            table,
            examples,
            universe: crate::mdl::LabelUniverse::of_database(db),
        }
    }
}

/// A small pattern graph over interned labels with 0-based vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Pattern {
    pub labels: Vec<LabelId>,
    pub edges: Vec<(u32, u32, LabelId)>,
}

impl Pattern {
    pub fn single(label: LabelId) -> Self {
        Pattern {
            labels: vec![label],
            edges: Vec::new(),
        }
    }

    pub fn from_graph(g: &Graph, table: &mut LabelTable) -> Self {
        Pattern {
            labels: g.vertices.iter().map(|v| table.intern(&v.label)).collect(),
            edges: g
                .edges
                .iter()
                .map(|e| (e.src - 1, e.dst - 1, table.intern(&e.label)))
                .collect(),
        }
    }

    pub fn to_graph(&self, table: &LabelTable, example_index: u32) -> Graph {
        let mut g = Graph::new(example_index);
        for &l in &self.labels {
            g.add_vertex(table.name(l).clone());
        }
        for &(s, d, l) in &self.edges {
            g.add_edge(s + 1, d + 1, table.name(l).clone());
        }
        g
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn multiplicity(&self, u: u32, v: u32, label: LabelId) -> usize {
        self.edges
            .iter()
            .filter(|&&(s, d, l)| s == u && d == v && l == label)
            .count()
    }

    /// Sorted edge labels `u -> v`.
    pub fn labels_between(&self, u: u32, v: u32) -> Vec<LabelId> {
        let mut ls: Vec<LabelId> = self
            .edges
            .iter()
            .filter(|&&(s, d, _)| s == u && d == v)
            .map(|&(_, _, l)| l)
            .collect();
        ls.sort_unstable();
        ls
    }

    /// Vertex order in which every vertex after the first of its component
    /// is adjacent (ignoring direction) to an earlier one.
    pub fn connected_order(&self) -> Vec<u32> {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for &(s, d, _) in &self.edges {
            adj[s as usize].push(d);
            adj[d as usize].push(s);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root as u32]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        order
    }
}

/// Size of the multiset difference `a \ b` for sorted slices.
pub(crate) fn sorted_difference_len(a: &[LabelId], b: &[LabelId]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() - common
}
