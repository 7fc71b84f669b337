//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the library's matching, canonical form, or scoring
//! code; the oracles work directly on `Graph` values.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use gbad_core::{Graph, GraphDatabase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLE_ARTICLE: &str = r#"XP # 1
v 1 "News"
v 2 "in-line"
v 3 "Person"
v 4 "Organization"
v 5 "Location"
v 6 "Verb"
v 7 "Noun"
v 8 "Andres"
v 9 "congress"
v 10 "Mexico"
v 11 "infected"
v 12 "corona"
v 13 "president"
e 1 2 "has"
e 2 3 "has"
e 2 4 "has"
e 2 5 "has"
e 2 6 "has"
e 2 7 "has"
e 3 8 "has"
e 4 9 "has"
e 5 10 "has"
e 6 11 "has"
e 7 12 "has"
e 7 13 "has"
"#;

pub fn graph(index: u32, labels: &[&str], edges: &[(u32, u32, &str)]) -> Graph {
    let mut g = Graph::new(index);
    for l in labels {
        g.add_vertex(*l);
    }
    for &(s, d, l) in edges {
        g.add_edge(s, d, l);
    }
    g
}

/// Random multigraph database over a small label alphabet.
pub fn random_db(seed: u64, max_examples: usize, max_vertices: usize, max_edges: usize) -> GraphDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let examples = rng.gen_range(1..=max_examples);
    let mut out = Vec::new();
    for i in 1..=examples as u32 {
        let n = rng.gen_range(1..=max_vertices);
        let mut g = Graph::new(i);
        for _ in 0..n {
            g.add_vertex(["A", "B", "C"][rng.gen_range(0..3)]);
        }
        for _ in 0..rng.gen_range(0..=max_edges) {
            let s = rng.gen_range(1..=n as u32);
            let d = rng.gen_range(1..=n as u32);
            g.add_edge(s, d, ["x", "y"][rng.gen_range(0..2)]);
        }
        out.push(g);
    }
    GraphDatabase::new(out)
}

/// Edge multiset keyed by (src, dst, label), 1-based ids.
fn edge_counts(g: &Graph) -> HashMap<(u32, u32, String), usize> {
    let mut m = HashMap::new();
    for e in &g.edges {
        *m.entry((e.src, e.dst, e.label.to_string())).or_insert(0) += 1;
    }
    m
}

/// All injective maps (0-based pattern vertex -> 1-based example id) that
/// preserve labels and pattern edges with multiplicity. Plain backtracking.
pub fn brute_exact(pattern: &Graph, example: &Graph) -> Vec<Vec<u32>> {
    let pe = edge_counts(pattern);
    let ee = edge_counts(example);
    let n = pattern.vertex_count();
    let mut out = Vec::new();
    let mut map: Vec<u32> = Vec::new();
    fn go(
        pattern: &Graph,
        example: &Graph,
        pe: &HashMap<(u32, u32, String), usize>,
        ee: &HashMap<(u32, u32, String), usize>,
        n: usize,
        map: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if map.len() == n {
            let ok = pe.iter().all(|((s, d, l), c)| {
                let key = (map[*s as usize - 1], map[*d as usize - 1], l.clone());
                ee.get(&key).copied().unwrap_or(0) >= *c
            });
            if ok {
                out.push(map.clone());
            }
            return;
        }
        let want = &pattern.vertices[map.len()].label;
        for v in &example.vertices {
            if &v.label == want && !map.contains(&v.id) {
                map.push(v.id);
                go(pattern, example, pe, ee, n, map, out);
                map.pop();
            }
        }
    }
    go(pattern, example, &pe, &ee, n, &mut map, &mut out);
    out
}

/// Unit edit cost of a partial map: one per missing or relabeled vertex and
/// one per pattern edge left without an identical example edge to consume.
pub fn brute_cost(pattern: &Graph, example: &Graph, map: &[Option<u32>]) -> u32 {
    let mut cost = 0;
    for (i, v) in pattern.vertices.iter().enumerate() {
        match map[i] {
            None => cost += 1,
            Some(x) if example.label_of(x) != Some(&v.label) => cost += 1,
            Some(_) => {}
        }
    }
    let mut used = vec![false; example.edges.len()];
    for e in &pattern.edges {
        let (s, d) = (map[e.src as usize - 1], map[e.dst as usize - 1]);
        let hit = match (s, d) {
            (Some(s), Some(d)) => example
                .edges
                .iter()
                .enumerate()
                .position(|(j, f)| !used[j] && f.src == s && f.dst == d && f.label == e.label),
            _ => None,
        };
        match hit {
            Some(j) => used[j] = true,
            None => cost += 1,
        }
    }
    cost
}

/// All partial injective maps with `1 ≤ cost ≤ max_cost` and at least one
/// mapped vertex, plus the exact ones at cost 0.
pub fn brute_inexact(pattern: &Graph, example: &Graph, max_cost: u32) -> Vec<(Vec<Option<u32>>, u32)> {
    let n = pattern.vertex_count();
    let mut out = Vec::new();
    let mut map: Vec<Option<u32>> = Vec::new();
    fn go(
        pattern: &Graph,
        example: &Graph,
        n: usize,
        max_cost: u32,
        map: &mut Vec<Option<u32>>,
        out: &mut Vec<(Vec<Option<u32>>, u32)>,
    ) {
        if map.len() == n {
            if map.iter().any(Option::is_some) {
                let c = brute_cost(pattern, example, map);
                if c <= max_cost {
                    out.push((map.clone(), c));
                }
            }
            return;
        }
        let options: Vec<Option<u32>> = std::iter::once(None)
            .chain(example.vertices.iter().map(|v| Some(v.id)))
            .collect();
        for o in options {
            if o.is_some() && map.contains(&o) {
                continue;
            }
            map.push(o);
            go(pattern, example, n, max_cost, map, out);
            map.pop();
        }
    }
    go(pattern, example, n, max_cost, &mut map, &mut out);
    out
}

/// One map per vertex set (cheapest, then smallest), then greedy disjoint
/// selection in order of (cost, sorted vertex ids).
pub fn greedy_disjoint(cands: Vec<(Vec<Option<u32>>, u32)>) -> Vec<(Vec<Option<u32>>, u32)> {
    let mut per_set: BTreeMap<Vec<u32>, (Vec<Option<u32>>, u32)> = BTreeMap::new();
    for (m, c) in cands {
        let mut key: Vec<u32> = m.iter().flatten().copied().collect();
        key.sort_unstable();
        match per_set.get(&key) {
            Some((bm, bc)) if (*bc, bm) <= (c, &m) => {}
            _ => {
                per_set.insert(key, (m, c));
            }
        }
    }
    let mut list: Vec<_> = per_set.into_iter().collect();
    list.sort_by(|a, b| (a.1 .1, &a.0).cmp(&(b.1 .1, &b.0)));
    let mut taken: Vec<u32> = Vec::new();
    let mut out = Vec::new();
    for (set, mc) in list {
        if set.iter().any(|x| taken.contains(x)) {
            continue;
        }
        taken.extend(&set);
        out.push(mc);
    }
    out.sort_by(|a, b| {
        let ka: Vec<u32> = a.0.iter().flatten().copied().collect();
        let kb: Vec<u32> = b.0.iter().flatten().copied().collect();
        (a.1, ka).cmp(&(b.1, kb))
    });
    out
}

fn lg(n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        (n as f64).log2()
    }
}

/// Description length written out from its definition.
pub fn dl(v: usize, e: usize, lv: usize, le: usize) -> f64 {
    if v == 0 && e == 0 {
        return 0.0;
    }
    lg(v + 1) + v as f64 * lg(lv) + e as f64 * (2.0 * lg(v + 1) + lg(le))
}

pub fn label_counts(db: &GraphDatabase) -> (usize, usize) {
    let mut vl: Vec<&str> = db.examples.iter().flat_map(|g| g.vertices.iter().map(|v| v.label.as_str())).collect();
    let mut el: Vec<&str> = db.examples.iter().flat_map(|g| g.edges.iter().map(|e| e.label.as_str())).collect();
    vl.sort_unstable();
    vl.dedup();
    el.sort_unstable();
    el.dedup();
    (vl.len(), el.len())
}

/// Number of disjoint exact instances of `pattern` across `db`.
pub fn brute_instance_count(pattern: &Graph, db: &GraphDatabase) -> usize {
    db.examples
        .iter()
        .map(|ex| {
            let cands = brute_exact(pattern, ex)
                .into_iter()
                .map(|m| (m.into_iter().map(Some).collect(), 0))
                .collect();
            greedy_disjoint(cands).len()
        })
        .sum()
}

/// Every connected subgraph of every example: single vertices and the
/// vertex sets spanned by connected edge subsets.
pub fn connected_subgraphs(db: &GraphDatabase, max_vertices: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    for ex in &db.examples {
        for v in &ex.vertices {
            out.push(graph(0, &[v.label.as_str()], &[]));
        }
        let m = ex.edges.len();
        assert!(m <= 16, "edge subset enumeration is exponential");
        for mask in 1u32..(1 << m) {
            let chosen: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &ex.edges[i]).collect();
            let mut ids: Vec<u32> = chosen.iter().flat_map(|e| [e.src, e.dst]).collect();
            ids.sort_unstable();
            ids.dedup();
            if ids.len() > max_vertices {
                continue;
            }
            let pos = |x: u32| ids.iter().position(|&y| y == x).unwrap() as u32 + 1;
            let mut g = Graph::new(0);
            for &x in &ids {
                g.add_vertex(ex.label_of(x).unwrap().clone());
            }
            for e in &chosen {
                g.add_edge(pos(e.src), pos(e.dst), e.label.clone());
            }
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    out
}

/// Minimum total description length over all connected patterns.
pub fn brute_best_total(db: &GraphDatabase, max_vertices: usize) -> f64 {
    let (lv, le) = label_counts(db);
    let (v, e) = (db.vertex_count(), db.edge_count());
    let mut memo: HashMap<String, usize> = HashMap::new();
    let mut best = f64::INFINITY;
    for p in connected_subgraphs(db, max_vertices) {
        let key = format!("{:?}", p);
        let k = *memo.entry(key).or_insert_with(|| brute_instance_count(&p, db));
        let (n, m) = (p.vertex_count(), p.edge_count());
        let total = dl(v - k * (n - 1), e - k * m, lv, le) + dl(n, m, lv, le);
        if total < best {
            best = total;
        }
    }
    best
}

/// News topology with the given leaves as `(category, label)`.
pub fn news(index: u32, leaves: &[(&str, &str)]) -> Graph {
    let mut g = Graph::new(index);
    g.add_vertex("News");
    g.add_vertex("in-line");
    g.add_edge(1, 2, "has");
    let mut categories: Vec<(&str, u32)> = Vec::new();
    for &(cat, _) in leaves {
        if !categories.iter().any(|(c, _)| *c == cat) {
            let id = g.add_vertex(cat);
            g.add_edge(2, id, "has");
            categories.push((cat, id));
        }
    }
    for &(cat, label) in leaves {
        let parent = categories.iter().find(|(c, _)| *c == cat).unwrap().1;
        let id = g.add_vertex(label);
        g.add_edge(parent, id, "has");
    }
    g
}

/// 30 normative copies followed by one deviant at example 31.
pub fn mini_corpus(normative: &[(&str, &str)], deviant: Graph) -> GraphDatabase {
    let mut examples: Vec<Graph> = (1..=30).map(|i| news(i, normative)).collect();
    let mut deviant = deviant;
    deviant.example_index = 31;
    examples.push(deviant);
    GraphDatabase::new(examples)
}

pub const VACCINE: &[(&str, &str)] = &[("Noun", "covid"), ("Noun", "vaccine"), ("Verb", "rejected")];
pub const PRESIDENT: &[(&str, &str)] = &[("Noun", "corona"), ("Noun", "president"), ("Verb", "infected")];
pub const LAWMAKERS: &[(&str, &str)] = &[
    ("Organization", "lawmakers"),
    ("Organization", "sinovac"),
    ("Verb", "criticized"),
    ("Noun", "vaccine"),
];

/// Vaccine approved instead of rejected.
pub fn vaccine_corpus() -> GraphDatabase {
    mini_corpus(VACCINE, news(0, &[("Noun", "covid"), ("Noun", "vaccine"), ("Verb", "approved")]))
}

/// President not infected: a negation hangs off the verb.
pub fn president_corpus() -> GraphDatabase {
    let mut deviant = news(0, PRESIDENT);
    let verb = deviant.vertices.iter().find(|v| v.label.as_str() == "infected").unwrap().id;
    let not = deviant.add_vertex("not");
    deviant.add_edge(verb, not, "has");
    mini_corpus(PRESIDENT, deviant)
}

/// Government instead of lawmakers.
pub fn lawmakers_corpus() -> GraphDatabase {
    mini_corpus(
        LAWMAKERS,
        news(
            0,
            &[
                ("Organization", "government"),
                ("Organization", "sinovac"),
                ("Verb", "criticized"),
                ("Noun", "vaccine"),
            ],
        ),
    )
}

/// Checks a sequence of `digraph` blocks against a small DOT grammar:
/// graph = "digraph" ID "{" stmt* "}"; stmt = node_stmt | edge_stmt | attr_stmt.
/// Returns the number of graphs.
pub fn validate_dot(text: &str) -> Result<usize, String> {
    let tokens = dot_tokens(text)?;
    let mut i = 0;
    let mut graphs = 0;
    let expect = |i: &mut usize, want: &str| -> Result<(), String> {
        match tokens.get(*i) {
            Some(t) if t == want => {
                *i += 1;
                Ok(())
            }
            other => Err(format!("expected {want:?}, found {other:?}")),
        }
    };
    let is_id = |t: &str| {
        t.starts_with('"') || t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    };
    while i < tokens.len() {
        expect(&mut i, "digraph")?;
        match tokens.get(i) {
            Some(t) if is_id(t) && t != "{" => i += 1,
            _ => {}
        }
        expect(&mut i, "{")?;
        loop {
            let Some(t) = tokens.get(i) else {
                return Err("unterminated graph".into());
            };
            if t == "}" {
                i += 1;
                break;
            }
            if !is_id(t) {
                return Err(format!("bad statement start {t:?}"));
            }
            i += 1;
            if tokens.get(i).map(String::as_str) == Some("->") {
                i += 1;
                match tokens.get(i) {
                    Some(t) if is_id(t) => i += 1,
                    other => return Err(format!("bad edge target {other:?}")),
                }
            }
            if tokens.get(i).map(String::as_str) == Some("[") {
                i += 1;
                loop {
                    match tokens.get(i).map(String::as_str) {
                        Some("]") => {
                            i += 1;
                            break;
                        }
                        Some(",") => i += 1,
                        Some(k) if is_id(k) => {
                            i += 1;
                            expect(&mut i, "=")?;
                            match tokens.get(i) {
                                Some(v) if is_id(v) => i += 1,
                                other => return Err(format!("bad attribute value {other:?}")),
                            }
                        }
                        other => return Err(format!("bad attribute list at {other:?}")),
                    }
                }
            }
            expect(&mut i, ";")?;
        }
        graphs += 1;
    }
    Ok(graphs)
}

fn dot_tokens(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::from('"');
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('\\') => {
                        s.push('\\');
                        s.push(*chars.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some('"') => {
                        s.push('"');
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(s);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push("->".into());
            i += 2;
        } else if "{}[];,=".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}
