//! Canonical forms for small labeled patterns.
//!
//! Vertices are first ordered by label, then split by iterated neighbourhood
//! refinement; remaining ties are resolved by individualizing each candidate
//! and keeping the lexicographically smallest relabeled edge list. Two
//! patterns are isomorphic iff their canonical forms are equal.

use crate::index::{LabelId, Pattern};

#[derive(Clone, Debug)]
pub(crate) struct Canonical {
    pub pattern: Pattern,
    /// `perm[old] = new` vertex position.
    pub perm: Vec<u32>,
}

pub(crate) fn canonicalize(p: &Pattern) -> Canonical {
    let n = p.len();
    if n == 0 {
        return Canonical {
            pattern: p.clone(),
            perm: Vec::new(),
        };
    }
    let mut adj: Vec<Vec<Arc>> = vec![Vec::new(); n];
    for &(s, d, l) in &p.edges {
        if s == d {
            adj[s as usize].push((2, l, s));
        } else {
            adj[s as usize].push((0, l, d));
            adj[d as usize].push((1, l, s));
        }
    }
    let initial: Vec<u64> = p.labels.iter().map(|&l| l as u64).collect();
    let colors = refine(&adj, &compact(&initial));
    let mut best: Option<(Pattern, Vec<u32>)> = None;
    search(p, &adj, colors, &mut best);
    let (pattern, perm) = best.expect("search visits at least one leaf");
    Canonical { pattern, perm }
}

/// Replaces arbitrary ordered colour values by dense ranks.
fn compact(values: &[u64]) -> Vec<u32> {
    let mut sorted: Vec<u64> = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    values
        .iter()
        .map(|v| sorted.binary_search(v).unwrap() as u32)
        .collect()
}

/// `(direction, edge label, neighbour)`; direction 0 out, 1 in, 2 self-loop.
type Arc = (u8, LabelId, u32);

fn refine(adj: &[Vec<Arc>], colors: &[u32]) -> Vec<u32> {
    let mut colors = colors.to_vec();
    let mut distinct = count_distinct(&colors);
    loop {
        let sigs: Vec<(u32, Vec<Arc>)> = adj
            .iter()
            .enumerate()
            .map(|(v, nbrs)| {
                let mut sig: Vec<Arc> = nbrs
                    .iter()
                    .map(|&(dir, l, w)| (dir, l, colors[w as usize]))
                    .collect();
                sig.sort_unstable();
                (colors[v], sig)
            })
            .collect();
        let mut sorted: Vec<&(u32, Vec<Arc>)> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        let next: Vec<u32> = sigs
            .iter()
            .map(|s| sorted.binary_search(&s).unwrap() as u32)
            .collect();
        let next_distinct = count_distinct(&next);
        colors = next;
        if next_distinct == distinct {
            return colors;
        }
        distinct = next_distinct;
    }
}

fn count_distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(
    p: &Pattern,
    adj: &[Vec<Arc>],
    colors: Vec<u32>,
    best: &mut Option<(Pattern, Vec<u32>)>,
) {
    let n = colors.len();
    let mut cell_sizes = vec![0usize; n];
    for &c in &colors {
        cell_sizes[c as usize] += 1;
    }
    let Some(target) = (0..n).find(|&c| cell_sizes[c] > 1) else {
        let candidate = relabel(p, &colors);
        if best.as_ref().is_none_or(|(b, _)| candidate < *b) {
            *best = Some((candidate, colors));
        }
        return;
    };
    let members: Vec<usize> = (0..n).filter(|&v| colors[v] as usize == target).collect();
    for &v in &members {
        let split: Vec<u64> = colors
            .iter()
            .enumerate()
            .map(|(w, &c)| 2 * c as u64 + u64::from(c as usize == target && w != v))
            .collect();
        let refined = refine(adj, &compact(&split));
        search(p, adj, refined, best);
    }
}

fn relabel(p: &Pattern, perm: &[u32]) -> Pattern {
    let mut labels = vec![0; p.labels.len()];
    for (old, &l) in p.labels.iter().enumerate() {
        labels[perm[old] as usize] = l;
    }
    let mut edges: Vec<(u32, u32, LabelId)> = p
        .edges
        .iter()
        .map(|&(s, d, l)| (perm[s as usize], perm[d as usize], l))
        .collect();
    edges.sort_unstable();
    Pattern { labels, edges }
}
