//! Graph data model: simple graphs, labeled graphs, digraphs, path
//! collections and grid-like graphs.
//!
//! Vertices are always the dense range `0..n`. Text formats that use other
//! names are mapped on ingest by [`format`].

pub mod format;
pub mod iso;
mod minor;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;

pub use minor::{has_clique_minor, MINOR_VERTEX_CEILING};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("loop at vertex {0}: graphs are simple")]
    Loop(usize),
    #[error("invalid grid dimension {rows}x{cols}: both must be at least 2")]
    InvalidDimension { rows: usize, cols: usize },
    #[error("{{{0},{1}}} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),
    #[error("duplicate label `{0}` in alphabet")]
    DuplicateLabel(String),
    #[error("{vertices} vertices exceed the clique-minor search ceiling of {ceiling}")]
    Capacity { vertices: usize, ceiling: usize },
}

/// Reasons a path collection fails to make a grid-like graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridLikeError {
    #[error("path {path} is invalid: {reason}")]
    InvalidPath { path: usize, reason: String },
    #[error("path {0} has fewer than two vertices")]
    PathTooShort(usize),
    #[error("vertex {0} lies on no path")]
    UncoveredVertex(usize),
    #[error("edge {{{0},{1}}} lies on no path")]
    UncoveredEdge(usize, usize),
    #[error("intersection graph of the paths is not bipartite (odd cycle through path {0})")]
    NotBipartite(usize),
    #[error("paths {0} and {1} share a class but intersect")]
    ClassNotDisjoint(usize, usize),
    #[error("vertex {vertex} has degree {degree} > 4")]
    DegreeTooLarge { vertex: usize, degree: usize },
    #[error("{paths} paths but {classes} class assignments")]
    ClassCount { paths: usize, classes: usize },
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Repeated edges collapse.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u,v}`; returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        let n = self.adj.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(true)
            }
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// `K_{a,b}` with the `a` side on `0..a`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        Graph::from_edges(a + b, (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j)))).unwrap()
    }

    /// Subgraph induced on `keep`, renumbered in the order given.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    /// Connected components as a component id per vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// A graph whose vertices carry subsets of a declared label alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    graph: Graph,
    alphabet: Vec<String>,
    labels: Vec<BitSet>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, alphabet: Vec<String>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for a in &alphabet {
            if !seen.insert(a.as_str()) {
                return Err(GraphError::DuplicateLabel(a.clone()));
            }
        }
        let labels = vec![BitSet::new(alphabet.len()); graph.vertex_count()];
        Ok(LabeledGraph {
            graph,
            alphabet,
            labels,
        })
    }

    /// An unlabeled graph viewed as a labeled graph over the empty alphabet.
    pub fn unlabeled(graph: Graph) -> Self {
        LabeledGraph::new(graph, Vec::new()).unwrap()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    pub fn add_label(&mut self, v: usize, name: &str) -> Result<(), GraphError> {
        let idx = self
            .label_index(name)
            .ok_or_else(|| GraphError::UnknownLabel(name.to_string()))?;
        self.add_label_index(v, idx)
    }

    pub fn add_label_index(&mut self, v: usize, idx: usize) -> Result<(), GraphError> {
        let n = self.vertex_count();
        if v >= n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n });
        }
        self.labels[v].insert(idx);
        Ok(())
    }

    pub fn remove_label(&mut self, v: usize, name: &str) -> Result<(), GraphError> {
        let idx = self
            .label_index(name)
            .ok_or_else(|| GraphError::UnknownLabel(name.to_string()))?;
        self.labels[v].remove(idx);
        Ok(())
    }

    #[inline]
    pub fn has_label(&self, v: usize, idx: usize) -> bool {
        self.labels[v].contains(idx)
    }

    pub fn has_label_named(&self, v: usize, name: &str) -> bool {
        self.label_index(name).is_some_and(|i| self.has_label(v, i))
    }

    /// Label names of `v` in alphabet order.
    pub fn labels_of(&self, v: usize) -> Vec<&str> {
        self.labels[v]
            .iter()
            .map(|i| self.alphabet[i].as_str())
            .collect()
    }

    pub fn label_count(&self, v: usize) -> usize {
        self.labels[v].len()
    }
}

/// Directed graph without loops; antiparallel arcs are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Digraph {
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            out: vec![Vec::new(); n],
        }
    }

    pub fn from_arcs(
        n: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut d = Digraph::new(n);
        for (u, v) in arcs {
            d.add_arc(u, v)?;
        }
        Ok(d)
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        let n = self.out.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        match self.out[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.out[u].insert(pos, v);
                Ok(true)
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.out.len() && self.out[u].binary_search(&v).is_ok()
    }
}

/// Underlying undirected graph: `{u,v}` is an edge iff `(u,v)` or `(v,u)` is an arc.
pub fn underlying(d: &Digraph) -> Graph {
    Graph::from_edges(d.vertex_count(), d.arcs()).expect("digraph arcs are loop-free")
}

/// All orientations of `g`, in binary-counter order over its edge list.
pub fn orientations(g: &Graph) -> impl Iterator<Item = Digraph> + '_ {
    let edges: Vec<_> = g.edges().collect();
    let m = edges.len();
    assert!(m < 32, "too many edges to enumerate orientations");
    (0u32..1 << m).map(move |mask| {
        Digraph::from_arcs(
            g.vertex_count(),
            edges.iter().enumerate().map(|(i, &(u, v))| {
                if mask & (1 << i) == 0 {
                    (u, v)
                } else {
                    (v, u)
                }
            }),
        )
        .unwrap()
    })
}

/// Every vertex has degree exactly one or exactly three.
pub fn is_13_regular(g: &Graph) -> bool {
    (0..g.vertex_count()).all(|v| matches!(g.degree(v), 1 | 3))
}

/// Replaces each planned edge `{u,v}` with count `t` by a path `u - w1 - ... - wt - v`.
///
/// Fresh vertices are appended in edge order, so the original vertices keep
/// their ids. Plan keys may be given in either orientation.
pub fn subdivide(g: &Graph, plan: &BTreeMap<(usize, usize), usize>) -> Result<Graph, GraphError> {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&(u, v), &t) in plan {
        if !g.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        counts.insert((u.min(v), u.max(v)), t);
    }
    let mut out = Graph::new(g.vertex_count());
    for (u, v) in g.edges() {
        let t = counts.get(&(u, v)).copied().unwrap_or(0);
        let mut prev = u;
        for _ in 0..t {
            let w = out.add_vertex();
            out.add_edge(prev, w)?;
            prev = w;
        }
        out.add_edge(prev, v)?;
    }
    Ok(out)
}

/// Ordered vertex sequences over a host graph.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PathCollection {
    pub paths: Vec<Vec<usize>>,
}

impl PathCollection {
    pub fn new(paths: Vec<Vec<usize>>) -> Self {
        PathCollection { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks each sequence is a path of `host` with at least two vertices.
    pub fn validate(&self, host: &Graph) -> Result<(), GridLikeError> {
        let n = host.vertex_count();
        for (i, p) in self.paths.iter().enumerate() {
            if p.len() < 2 {
                return Err(GridLikeError::PathTooShort(i));
            }
            let mut seen = BTreeSet::new();
            for &v in p {
                if v >= n {
                    return Err(GridLikeError::InvalidPath {
                        path: i,
                        reason: format!("vertex {v} not in host"),
                    });
                }
                if !seen.insert(v) {
                    return Err(GridLikeError::InvalidPath {
                        path: i,
                        reason: format!("vertex {v} repeated"),
                    });
                }
            }
            if let Some(w) = p.windows(2).find(|w| !host.has_edge(w[0], w[1])) {
                return Err(GridLikeError::InvalidPath {
                    path: i,
                    reason: format!("{} and {} are not adjacent", w[0], w[1]),
                });
            }
        }
        Ok(())
    }

    /// Vertex set of each path as a bitset over `0..n`.
    pub fn vertex_sets(&self, n: usize) -> Vec<BitSet> {
        self.paths
            .iter()
            .map(|p| BitSet::from_indices(n, p.iter().copied()))
            .collect()
    }
}

/// One vertex per path, adjacent iff the vertex sets intersect.
pub fn intersection_graph(paths: &PathCollection) -> Graph {
    let n = paths
        .paths
        .iter()
        .flatten()
        .copied()
        .max()
        .map_or(0, |m| m + 1);
    let sets = paths.vertex_sets(n);
    let mut g = Graph::new(paths.len());
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersects(&sets[j]) {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathClass {
    White,
    Black,
}

impl PathClass {
    pub fn name(self) -> &'static str {
        match self {
            PathClass::White => "white",
            PathClass::Black => "black",
        }
    }

    pub fn other(self) -> Self {
        match self {
            PathClass::White => PathClass::Black,
            PathClass::Black => PathClass::White,
        }
    }
}

/// A graph together with a path collection witnessing that it is grid-like,
/// and the bipartition of the paths into white and black classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridLikeGraph {
    graph: Graph,
    paths: PathCollection,
    classes: Vec<PathClass>,
}

impl GridLikeGraph {
    /// Validates `classes` as a bipartition of `paths` and all grid-like conditions.
    pub fn new(
        graph: Graph,
        paths: PathCollection,
        classes: Vec<PathClass>,
    ) -> Result<Self, GridLikeError> {
        if classes.len() != paths.len() {
            return Err(GridLikeError::ClassCount {
                paths: paths.len(),
                classes: classes.len(),
            });
        }
        check_union(&graph, &paths)?;
        check_classes(&graph, &paths, &classes)?;
        Ok(GridLikeGraph {
            graph,
            paths,
            classes,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn paths(&self) -> &PathCollection {
        &self.paths
    }

    pub fn classes(&self) -> &[PathClass] {
        &self.classes
    }

    pub fn class_of(&self, path: usize) -> PathClass {
        self.classes[path]
    }

    pub fn path(&self, i: usize) -> &[usize] {
        &self.paths.paths[i]
    }
}

/// The `rows x cols` square grid. Vertex `(i,j)` is `i*cols + j`; white path
/// `i` is row `i` and black path `rows + j` is column `j`.
pub fn make_grid(rows: usize, cols: usize) -> Result<GridLikeGraph, GraphError> {
    if rows < 2 || cols < 2 {
        return Err(GraphError::InvalidDimension { rows, cols });
    }
    let id = |i: usize, j: usize| i * cols + j;
    let mut g = Graph::new(rows * cols);
    let mut paths = Vec::with_capacity(rows + cols);
    for i in 0..rows {
        for j in 1..cols {
            g.add_edge(id(i, j - 1), id(i, j))?;
        }
        paths.push((0..cols).map(|j| id(i, j)).collect());
    }
    for j in 0..cols {
        for i in 1..rows {
            g.add_edge(id(i - 1, j), id(i, j))?;
        }
        paths.push((0..rows).map(|i| id(i, j)).collect());
    }
    let mut classes = vec![PathClass::White; rows];
    classes.extend(std::iter::repeat_n(PathClass::Black, cols));
    Ok(GridLikeGraph {
        graph: g,
        paths: PathCollection::new(paths),
        classes,
    })
}

/// Checks the grid-like conditions and returns a bipartition of the paths.
///
/// Within each component of the intersection graph the lowest-numbered path
/// is white.
pub fn validate_grid_like(
    g: &Graph,
    p: &PathCollection,
) -> Result<Vec<PathClass>, GridLikeError> {
    check_union(g, p)?;
    let ig = intersection_graph(p);
    let mut classes: Vec<Option<PathClass>> = vec![None; p.len()];
    for s in 0..p.len() {
        if classes[s].is_some() {
            continue;
        }
        classes[s] = Some(PathClass::White);
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            let ca = classes[a].unwrap();
            for &b in ig.neighbors(a) {
                match classes[b] {
                    None => {
                        classes[b] = Some(ca.other());
                        queue.push_back(b);
                    }
                    Some(cb) if cb == ca => return Err(GridLikeError::NotBipartite(a)),
                    Some(_) => {}
                }
            }
        }
    }
    let classes: Vec<PathClass> = classes.into_iter().map(Option::unwrap).collect();
    check_classes(g, p, &classes)?;
    Ok(classes)
}

fn check_union(g: &Graph, p: &PathCollection) -> Result<(), GridLikeError> {
    p.validate(g)?;
    let n = g.vertex_count();
    let mut covered_v = BitSet::new(n);
    let mut covered_e = BTreeSet::new();
    for path in &p.paths {
        for &v in path {
            covered_v.insert(v);
        }
        for w in path.windows(2) {
            covered_e.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    if let Some(v) = (0..n).find(|&v| !covered_v.contains(v)) {
        return Err(GridLikeError::UncoveredVertex(v));
    }
    if let Some((u, v)) = g.edges().find(|e| !covered_e.contains(e)) {
        return Err(GridLikeError::UncoveredEdge(u, v));
    }
    Ok(())
}

fn check_classes(
    g: &Graph,
    p: &PathCollection,
    classes: &[PathClass],
) -> Result<(), GridLikeError> {
    let sets = p.vertex_sets(g.vertex_count());
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if classes[i] == classes[j] && sets[i].intersects(&sets[j]) {
                return Err(GridLikeError::ClassNotDisjoint(i, j));
            }
        }
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) > 4) {
        return Err(GridLikeError::DegreeTooLarge {
            vertex: v,
            degree: g.degree(v),
        });
    }
    Ok(())
}

/// A subgraph of an intersection graph: vertex `i` stands for path `paths[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSubgraph {
    pub paths: Vec<usize>,
    pub graph: Graph,
}

impl PathSubgraph {
    pub fn new(paths: Vec<usize>, graph: Graph) -> Self {
        assert_eq!(paths.len(), graph.vertex_count());
        PathSubgraph { paths, graph }
    }
}
