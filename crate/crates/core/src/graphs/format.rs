//! Line-oriented text format shared by graphs, digraphs, labeled graphs,
//! grid-like bundles, colourings, encodings and alternating-colouring
//! instances.
//!
//! ```text
//! graph 4            # or: digraph 4
//! alphabet A,B       # optional; otherwise labels in order of appearance
//! e 0 1              # edge (digraphs use `a u v` for arcs)
//! l 2 A,B            # labels of vertex 2
//! p white 0 1 2      # path of a grid-like bundle
//! c 0 1 3            # colour of edge {0,1}
//! rep 0 2            # representative vertex of path 0
//! part 1 0 3         # block V_1 of a partition
//! f0 2 1             # precolour of vertex 2
//! ```
//!
//! Vertex tokens are integers `0..n`; any other token is a vertex name and
//! is mapped, in order of first appearance, to the smallest id not used
//! numerically anywhere in the file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use super::{Digraph, Graph, GraphError, GridLikeGraph, LabeledGraph, PathClass, PathCollection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }

    fn graph(e: GraphError) -> Self {
        FormatError::new(0, e.to_string())
    }
}

/// Everything a graph-format file can carry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDocument {
    pub directed: bool,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub alphabet: Option<Vec<String>>,
    pub labels: Vec<(usize, Vec<String>)>,
    pub paths: Vec<(PathClass, Vec<usize>)>,
    pub colours: Vec<(usize, usize, usize)>,
    pub reps: Vec<(usize, usize)>,
    pub parts: Vec<(usize, Vec<usize>)>,
    pub precolours: Vec<(usize, u8)>,
    /// Named vertices and the ids they were mapped to.
    pub names: Vec<(String, usize)>,
}

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    args: Vec<&'a str>,
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut it = content.split_whitespace();
            let keyword = it.next().unwrap();
            lines.push(Line {
                number: i + 1,
                keyword,
                args: it.collect(),
            });
        }
        let Some(header) = lines.first() else {
            return Err(FormatError::new(1, "empty graph file"));
        };
        let directed = match header.keyword {
            "graph" => false,
            "digraph" => true,
            other => {
                return Err(FormatError::new(
                    header.number,
                    format!("expected `graph <n>` or `digraph <n>`, found `{other}`"),
                ))
            }
        };
        let n = match header.args.as_slice() {
            [n] => n
                .parse::<usize>()
                .map_err(|_| FormatError::new(header.number, "vertex count must be an integer"))?,
            _ => return Err(FormatError::new(header.number, "header takes one vertex count")),
        };

        // Reserve every numeric token used as a vertex so names can be placed around them.
        let mut numeric = BTreeSet::new();
        for line in &lines[1..] {
            for tok in vertex_tokens(line) {
                if let Ok(v) = tok.parse::<usize>() {
                    numeric.insert(v);
                }
            }
        }
        let mut doc = GraphDocument {
            directed,
            n,
            ..Default::default()
        };
        let mut name_ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut next_free = 0usize;
        let mut vertex = |tok: &str, line: usize, doc: &mut GraphDocument| -> Result<usize, FormatError> {
            let v = match tok.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    if let Some(&v) = name_ids.get(tok) {
                        v
                    } else {
                        while numeric.contains(&next_free) {
                            next_free += 1;
                        }
                        let v = next_free;
                        next_free += 1;
                        name_ids.insert(tok.to_string(), v);
                        doc.names.push((tok.to_string(), v));
                        v
                    }
                }
            };
            if v >= n {
                return Err(FormatError::new(
                    line,
                    format!("vertex `{tok}` out of range for {n} vertices"),
                ));
            }
            Ok(v)
        };

        for line in &lines[1..] {
            let ln = line.number;
            let args = &line.args;
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| FormatError::new(ln, format!("expected an integer, found `{s}`")))
            };
            let arity = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(FormatError::new(
                        ln,
                        format!("`{}` takes {k} arguments", line.keyword),
                    ))
                }
            };
            match line.keyword {
                "e" | "a" => {
                    if (line.keyword == "a") != directed {
                        return Err(FormatError::new(
                            ln,
                            format!("`{}` lines do not belong in this file kind", line.keyword),
                        ));
                    }
                    arity(2)?;
                    let u = vertex(args[0], ln, &mut doc)?;
                    let v = vertex(args[1], ln, &mut doc)?;
                    doc.edges.push((u, v));
                }
                "alphabet" => {
                    let names = args.join("");
                    doc.alphabet = Some(split_names(&names));
                }
                "l" => {
                    if args.is_empty() || args.len() > 2 {
                        return Err(FormatError::new(ln, "`l` takes a vertex and a label list"));
                    }
                    let v = vertex(args[0], ln, &mut doc)?;
                    let names = args.get(1).map(|s| split_names(s)).unwrap_or_default();
                    doc.labels.push((v, names));
                }
                "p" => {
                    if args.is_empty() {
                        return Err(FormatError::new(ln, "`p` needs a class"));
                    }
                    let class = match args[0] {
                        "white" => PathClass::White,
                        "black" => PathClass::Black,
                        other => {
                            return Err(FormatError::new(ln, format!("unknown path class `{other}`")))
                        }
                    };
                    let vs = args[1..]
                        .iter()
                        .map(|t| vertex(t, ln, &mut doc))
                        .collect::<Result<Vec<_>, _>>()?;
                    doc.paths.push((class, vs));
                }
                "c" => {
                    arity(3)?;
                    let u = vertex(args[0], ln, &mut doc)?;
                    let v = vertex(args[1], ln, &mut doc)?;
                    doc.colours.push((u, v, int(args[2])?));
                }
                "rep" => {
                    arity(2)?;
                    let path = int(args[0])?;
                    let v = vertex(args[1], ln, &mut doc)?;
                    doc.reps.push((path, v));
                }
                "part" => {
                    if args.is_empty() {
                        return Err(FormatError::new(ln, "`part` needs a block index"));
                    }
                    let i = int(args[0])?;
                    let vs = args[1..]
                        .iter()
                        .map(|t| vertex(t, ln, &mut doc))
                        .collect::<Result<Vec<_>, _>>()?;
                    doc.parts.push((i, vs));
                }
                "f0" => {
                    arity(2)?;
                    let v = vertex(args[0], ln, &mut doc)?;
                    let c = int(args[1])?;
                    if !(1..=3).contains(&c) {
                        return Err(FormatError::new(ln, "precolours are 1, 2 or 3"));
                    }
                    doc.precolours.push((v, c as u8));
                }
                "graph" | "digraph" => {
                    return Err(FormatError::new(ln, "repeated header"));
                }
                other => return Err(FormatError::new(ln, format!("unknown line kind `{other}`"))),
            }
        }
        Ok(doc)
    }

    pub fn to_graph(&self) -> Result<Graph, FormatError> {
        if self.directed {
            return Err(FormatError::new(1, "expected an undirected graph"));
        }
        Graph::from_edges(self.n, self.edges.iter().copied()).map_err(FormatError::graph)
    }

    pub fn to_digraph(&self) -> Result<Digraph, FormatError> {
        if !self.directed {
            return Err(FormatError::new(1, "expected a digraph"));
        }
        Digraph::from_arcs(self.n, self.edges.iter().copied()).map_err(FormatError::graph)
    }

    pub fn to_labeled_graph(&self) -> Result<LabeledGraph, FormatError> {
        let graph = self.to_graph()?;
        let alphabet = match &self.alphabet {
            Some(a) => a.clone(),
            None => {
                let mut seen = Vec::<String>::new();
                for (_, names) in &self.labels {
                    for name in names {
                        if !seen.contains(name) {
                            seen.push(name.clone());
                        }
                    }
                }
                seen
            }
        };
        let mut lg = LabeledGraph::new(graph, alphabet).map_err(FormatError::graph)?;
        for (v, names) in &self.labels {
            for name in names {
                lg.add_label(*v, name).map_err(FormatError::graph)?;
            }
        }
        Ok(lg)
    }

    pub fn to_grid_like(&self) -> Result<GridLikeGraph, FormatError> {
        let graph = self.to_graph()?;
        let paths = PathCollection::new(self.paths.iter().map(|(_, p)| p.clone()).collect());
        let classes = self.paths.iter().map(|(c, _)| *c).collect();
        GridLikeGraph::new(graph, paths, classes).map_err(|e| FormatError::new(0, e.to_string()))
    }

    /// Colour per edge, keyed `(min, max)`.
    pub fn colour_map(&self) -> BTreeMap<(usize, usize), usize> {
        self.colours
            .iter()
            .map(|&(u, v, c)| ((u.min(v), u.max(v)), c))
            .collect()
    }
}

fn vertex_tokens<'a>(line: &'a Line<'a>) -> Vec<&'a str> {
    match line.keyword {
        "e" | "a" => line.args.clone(),
        "l" => line.args.iter().take(1).copied().collect(),
        "p" | "part" => line.args.iter().skip(1).copied().collect(),
        "c" => line.args.iter().take(2).copied().collect(),
        "rep" => line.args.iter().skip(1).take(1).copied().collect(),
        "f0" => line.args.iter().take(1).copied().collect(),
        _ => Vec::new(),
    }
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("graph {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

pub fn write_digraph(d: &Digraph) -> String {
    let mut out = format!("digraph {}\n", d.vertex_count());
    for (u, v) in d.arcs() {
        writeln!(out, "a {u} {v}").unwrap();
    }
    out
}

pub fn write_labeled_graph(lg: &LabeledGraph) -> String {
    let mut out = write_graph(lg.graph());
    if !lg.alphabet().is_empty() {
        writeln!(out, "alphabet {}", lg.alphabet().join(",")).unwrap();
    }
    for v in 0..lg.vertex_count() {
        let names = lg.labels_of(v);
        if !names.is_empty() {
            writeln!(out, "l {v} {}", names.join(",")).unwrap();
        }
    }
    out
}

pub fn write_grid_like(g: &GridLikeGraph) -> String {
    let mut out = write_graph(g.graph());
    for (i, p) in g.paths().paths.iter().enumerate() {
        let vs: Vec<String> = p.iter().map(ToString::to_string).collect();
        writeln!(out, "p {} {}", g.class_of(i).name(), vs.join(" ")).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    GraphDocument::parse(text)?.to_graph()
}

pub fn parse_labeled_graph(text: &str) -> Result<LabeledGraph, FormatError> {
    GraphDocument::parse(text)?.to_labeled_graph()
}

pub fn parse_digraph(text: &str) -> Result<Digraph, FormatError> {
    GraphDocument::parse(text)?.to_digraph()
}

pub fn parse_grid_like(text: &str) -> Result<GridLikeGraph, FormatError> {
    GraphDocument::parse(text)?.to_grid_like()
}
