//! Isomorphism testing and enumeration of small graphs up to isomorphism.

use std::collections::BTreeSet;

use super::Graph;

/// Backtracking isomorphism test with degree pruning. Fine for the small
/// certification instances used here; exponential in the worst case.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// A bijection `map` with `{u,v} ∈ E(a) ⇔ {map[u],map[v]} ∈ E(b)`, if one exists.
pub fn find_isomorphism(a: &Graph, b: &Graph) -> Option<Vec<usize>> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return None;
    }
    let mut da: Vec<usize> = (0..n).map(|v| a.degree(v)).collect();
    let mut db: Vec<usize> = (0..n).map(|v| b.degree(v)).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return None;
    }
    // visit a's vertices in BFS order so that most candidates are constrained
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        order.push(s);
        let mut i = order.len() - 1;
        while i < order.len() {
            let v = order[i];
            for &w in a.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(a, b, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    a: &Graph,
    b: &Graph,
    order: &[usize],
    depth: usize,
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    for cand in 0..b.vertex_count() {
        if used[cand] || a.degree(v) != b.degree(cand) {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&u| a.has_edge(u, v) == b.has_edge(map[u], cand));
        if !consistent {
            continue;
        }
        map[v] = cand;
        used[cand] = true;
        if extend(a, b, order, depth + 1, map, used) {
            return true;
        }
        used[cand] = false;
        map[v] = usize::MAX;
    }
    false
}

/// Canonical code of a graph with at most 11 vertices: the lexicographically
/// largest upper-triangle adjacency bit string over all vertex orderings.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.vertex_count();
    assert!(n <= 11, "canonical_code is exhaustive over permutations");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = 0u64;
    loop {
        let mut code = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                code = code << 1 | g.has_edge(perm[i], perm[j]) as u64;
            }
        }
        best = best.max(code);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One representative per isomorphism class of graphs on exactly `n`
/// vertices (`n ≤ 7`), ordered by edge count then canonical code.
///
/// Built by extending each class on `n-1` vertices with a new vertex and
/// every possible neighbourhood.
pub fn graphs_up_to_iso(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "enumeration is only intended for tiny graphs");
    if n == 0 {
        return vec![Graph::new(0)];
    }
    let mut found: BTreeSet<(usize, u64)> = BTreeSet::new();
    let mut reps = Vec::new();
    for base in graphs_up_to_iso(n - 1) {
        for mask in 0u32..1 << (n - 1) {
            let mut g = Graph::new(n);
            for (u, v) in base.edges() {
                g.add_edge(u, v).unwrap();
            }
            for u in 0..n - 1 {
                if mask & (1 << u) != 0 {
                    g.add_edge(u, n - 1).unwrap();
                }
            }
            let key = (g.edge_count(), canonical_code(&g));
            if found.insert(key) {
                reps.push((key, g));
            }
        }
    }
    reps.sort_by_key(|(k, _)| *k);
    reps.into_iter().map(|(_, g)| g).collect()
}
