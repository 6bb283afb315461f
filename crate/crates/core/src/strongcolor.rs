//! Strong edge colourings: edges at distance at most one (sharing a vertex
//! or joined by a third edge) get different colours.
//!
//! The greedy colourer uses at most `2Δ(Δ-1)+1` colours, so at most 25 on
//! graphs of maximum degree 4.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::graphs::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColouringError {
    #[error("edge {{{0},{1}}} has no colour")]
    Uncoloured(usize, usize),
    #[error("{{{0},{1}}} is coloured but is not an edge")]
    NotAnEdge(usize, usize),
    #[error("colour 0 on edge {{{0},{1}}}: colours start at 1")]
    ZeroColour(usize, usize),
}

/// Colours `1..=k` on edges, keyed by `(u, v)` with `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeColouring {
    colours: BTreeMap<(usize, usize), usize>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl EdgeColouring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(map: BTreeMap<(usize, usize), usize>) -> Self {
        let colours = map.into_iter().map(|((u, v), c)| (key(u, v), c)).collect();
        EdgeColouring { colours }
    }

    pub fn set(&mut self, u: usize, v: usize, colour: usize) {
        self.colours.insert(key(u, v), colour);
    }

    pub fn colour(&self, u: usize, v: usize) -> Option<usize> {
        self.colours.get(&key(u, v)).copied()
    }

    /// Number of distinct colours used.
    pub fn palette_size(&self) -> usize {
        self.colours.values().collect::<BTreeSet<_>>().len()
    }

    pub fn max_colour(&self) -> usize {
        self.colours.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.colours.iter().map(|(&e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// `c u v colour` lines, to be appended to a graph file.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for ((u, v), c) in self.iter() {
            let _ = writeln!(out, "c {u} {v} {c}");
        }
        out
    }
}

/// Edges with an endpoint in `N[u] ∪ N[v]`, i.e. at distance at most one
/// from `{u,v}` (including `{u,v}` itself).
fn near_edges(g: &Graph, u: usize, v: usize) -> Vec<(usize, usize)> {
    let mut ends: Vec<usize> = vec![u, v];
    ends.extend_from_slice(g.neighbors(u));
    ends.extend_from_slice(g.neighbors(v));
    ends.sort_unstable();
    ends.dedup();
    let mut out = Vec::new();
    for &a in &ends {
        for &b in g.neighbors(a) {
            out.push(key(a, b));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Greedy strong colouring: edges in lexicographic order, each taking the
/// least colour not used within distance one.
pub fn strong_edge_colour(g: &Graph) -> EdgeColouring {
    let mut c = EdgeColouring::new();
    for (u, v) in g.edges() {
        let used: BTreeSet<usize> = near_edges(g, u, v)
            .into_iter()
            .filter_map(|(a, b)| c.colour(a, b))
            .collect();
        let colour = (1..).find(|k| !used.contains(k)).unwrap();
        c.set(u, v, colour);
    }
    c
}

/// Whether no two distinct edges at distance at most one share a colour.
/// This implies that no path with three edges repeats a colour.
pub fn validate_strong(g: &Graph, c: &EdgeColouring) -> Result<bool, ColouringError> {
    for ((u, v), colour) in c.iter() {
        if !g.has_edge(u, v) {
            return Err(ColouringError::NotAnEdge(u, v));
        }
        if colour == 0 {
            return Err(ColouringError::ZeroColour(u, v));
        }
    }
    for (u, v) in g.edges() {
        if c.colour(u, v).is_none() {
            return Err(ColouringError::Uncoloured(u, v));
        }
    }
    for (u, v) in g.edges() {
        let mine = c.colour(u, v);
        for (a, b) in near_edges(g, u, v) {
            if (a, b) != (u, v) && c.colour(a, b) == mine {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Colours of the edges in `white` incident to `v`.
pub fn white_colours(
    g: &Graph,
    c: &EdgeColouring,
    white: &BTreeSet<(usize, usize)>,
    v: usize,
) -> BTreeSet<usize> {
    g.neighbors(v)
        .iter()
        .filter(|&&w| white.contains(&key(v, w)))
        .filter_map(|&w| c.colour(v, w))
        .collect()
}

/// Checks that an edge `xy` is in `white` exactly when `x` and `y` have a
/// common white colour. This is what lets labels recover path membership.
pub fn key_observation_check(
    g: &Graph,
    c: &EdgeColouring,
    white: &BTreeSet<(usize, usize)>,
) -> bool {
    let w: Vec<BTreeSet<usize>> = (0..g.vertex_count())
        .map(|v| white_colours(g, c, white, v))
        .collect();
    g.edges().all(|(x, y)| {
        let in_white = white.contains(&(x, y));
        let common = !w[x].is_disjoint(&w[y]);
        in_white == common
    })
}
