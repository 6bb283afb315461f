//! Encoding a subgraph `H` of the intersection graph of a grid-like graph
//! as a vertex labeling, and the interpretation `I₂` that recovers `H`.
//!
//! Labels over `c` colours:
//!
//! * `light_i` / `dark_i`: colour `i` occurs on a white / black edge at the
//!   vertex, where white (black) edges are the edges of white (black) paths
//!   that are vertices of `H`;
//! * `w` / `b`: the vertex represents a white / black path of `H`;
//! * `m`: the vertex lies on two paths forming an edge of `H`.
//!
//! With a strong colouring, two adjacent vertices share a `light` colour iff
//! their edge is white, so white components (the white paths of `H`) are
//! MSO-definable from the labels alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphs::format::{write_labeled_graph, FormatError, GraphDocument};
use crate::graphs::{make_grid, Graph, GridLikeGraph, LabeledGraph, PathClass, PathSubgraph};
use crate::interp::{induced_structure, InterpError, Interpretation};
use crate::mso::build::{all, and, any, eq, exists, forall, implies, is_in, lab, not, or};
use crate::mso::hooks::{CorpusFn, Hook, HookError, HookSet, HookTemplate, NativeFn};
use crate::mso::{CertifiedHooks, EvalOptions, Formula, Structure};
use crate::strongcolor::{strong_edge_colour, validate_strong, ColouringError, EdgeColouring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("edge {{{0},{1}}} of the target joins two paths of the same class")]
    Bipartition(usize, usize),
    #[error("path index {0} is out of range")]
    UnknownPath(usize),
    #[error("path {0} appears twice among the target's vertices")]
    DuplicatePath(usize),
    #[error("the colouring is not strong")]
    NotStrong,
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error("colouring uses colour {max} but only {c} colours were requested")]
    TooFewColours { max: usize, c: usize },
    #[error("no system of distinct representatives: the grid-like input is corrupted")]
    NoRepresentatives,
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Hook(#[from] HookError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

pub fn light(i: usize) -> String {
    format!("light_{i}")
}

pub fn dark(i: usize) -> String {
    format!("dark_{i}")
}

pub const WHITE_MARK: &str = "w";
pub const BLACK_MARK: &str = "b";
pub const MEET_MARK: &str = "m";

/// `light_1..light_c, dark_1..dark_c, w, b, m`: `2c+3` labels.
pub fn alphabet(c: usize) -> Vec<String> {
    (1..=c)
        .map(light)
        .chain((1..=c).map(dark))
        .chain([WHITE_MARK, BLACK_MARK, MEET_MARK].map(String::from))
        .collect()
}

/// A labeled host together with the representatives of the target's paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingLabeling {
    pub host: LabeledGraph,
    /// Path index to representative host vertex.
    pub representatives: BTreeMap<usize, usize>,
    pub colour_count: usize,
}

impl EncodingLabeling {
    /// Labeled-graph format followed by `rep path vertex` lines.
    pub fn to_text(&self) -> String {
        let mut out = write_labeled_graph(&self.host);
        for (p, v) in &self.representatives {
            let _ = writeln!(out, "rep {p} {v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, EncodingError> {
        let doc = GraphDocument::parse(text)?;
        let host = doc.to_labeled_graph()?;
        let colour_count = host
            .alphabet()
            .iter()
            .filter(|l| l.starts_with("light_"))
            .count();
        Ok(EncodingLabeling {
            host,
            representatives: doc.reps.iter().copied().collect(),
            colour_count,
        })
    }
}

/// One distinct vertex per path in `paths`, each on its own path.
///
/// Augmenting-path matching; paths are matched in the given order and each
/// tries its vertices from the lowest number up, so the result is
/// deterministic.
pub fn select_representatives(
    glg: &GridLikeGraph,
    paths: &[usize],
) -> Result<BTreeMap<usize, usize>, EncodingError> {
    let np = glg.paths().len();
    let mut candidates = Vec::with_capacity(paths.len());
    for &p in paths {
        if p >= np {
            return Err(EncodingError::UnknownPath(p));
        }
        let mut vs = glg.path(p).to_vec();
        vs.sort_unstable();
        candidates.push(vs);
    }
    let n = glg.graph().vertex_count();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut chosen: Vec<Option<usize>> = vec![None; paths.len()];

    fn augment(
        i: usize,
        candidates: &[Vec<usize>],
        owner: &mut [Option<usize>],
        chosen: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &v in &candidates[i] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            let free = match owner[v] {
                None => true,
                Some(j) => augment(j, candidates, owner, chosen, seen),
            };
            if free {
                owner[v] = Some(i);
                chosen[i] = Some(v);
                return true;
            }
        }
        false
    }

    // greedy start: lowest free vertex
    for i in 0..paths.len() {
        if let Some(&v) = candidates[i].iter().find(|&&v| owner[v].is_none()) {
            owner[v] = Some(i);
            chosen[i] = Some(v);
        }
    }
    for i in 0..paths.len() {
        if chosen[i].is_none() {
            let mut seen = vec![false; n];
            if !augment(i, &candidates, &mut owner, &mut chosen, &mut seen) {
                return Err(EncodingError::NoRepresentatives);
            }
        }
    }
    Ok(paths
        .iter()
        .zip(chosen)
        .map(|(&p, v)| (p, v.expect("all matched")))
        .collect())
}

/// Builds `λ_H` with the colouring's own palette size as `c`.
pub fn build_labeling(
    glg: &GridLikeGraph,
    h: &PathSubgraph,
    colouring: &EdgeColouring,
) -> Result<EncodingLabeling, EncodingError> {
    build_labeling_with_palette(glg, h, colouring, colouring.max_colour())
}

/// Builds `λ_H` over the alphabet for `c` colours, `c` at least the
/// largest colour used.
pub fn build_labeling_with_palette(
    glg: &GridLikeGraph,
    h: &PathSubgraph,
    colouring: &EdgeColouring,
    c: usize,
) -> Result<EncodingLabeling, EncodingError> {
    let g = glg.graph();
    if !validate_strong(g, colouring)? {
        return Err(EncodingError::NotStrong);
    }
    if colouring.max_colour() > c {
        return Err(EncodingError::TooFewColours {
            max: colouring.max_colour(),
            c,
        });
    }
    let np = glg.paths().len();
    let mut seen = BTreeSet::new();
    for &p in &h.paths {
        if p >= np {
            return Err(EncodingError::UnknownPath(p));
        }
        if !seen.insert(p) {
            return Err(EncodingError::DuplicatePath(p));
        }
    }
    for (a, b) in h.graph.edges() {
        if glg.class_of(h.paths[a]) == glg.class_of(h.paths[b]) {
            return Err(EncodingError::Bipartition(a, b));
        }
    }
    let mut host = LabeledGraph::new(g.clone(), alphabet(c)).expect("alphabet is duplicate-free");
    for &p in &h.paths {
        let name = match glg.class_of(p) {
            PathClass::White => light,
            PathClass::Black => dark,
        };
        for e in glg.path(p).windows(2) {
            let colour = colouring.colour(e[0], e[1]).expect("validated total");
            host.add_label(e[0], &name(colour)).unwrap();
            host.add_label(e[1], &name(colour)).unwrap();
        }
    }
    let representatives = select_representatives(glg, &h.paths)?;
    for (&p, &v) in &representatives {
        let mark = match glg.class_of(p) {
            PathClass::White => WHITE_MARK,
            PathClass::Black => BLACK_MARK,
        };
        host.add_label(v, mark).unwrap();
    }
    let sets = glg.paths().vertex_sets(g.vertex_count());
    for (a, b) in h.graph.edges() {
        let (pa, pb) = (h.paths[a], h.paths[b]);
        for v in sets[pa].iter().filter(|&v| sets[pb].contains(v)) {
            host.add_label(v, MEET_MARK).unwrap();
        }
    }
    Ok(EncodingLabeling {
        host,
        representatives,
        colour_count: c,
    })
}

/// `con(t,z)`: every set containing `z` but not `t` is left by an edge
/// whose ends share one of the given colour labels, i.e. `t` and `z` are
/// connected through such edges.
pub fn con_formula(colour_label: fn(usize) -> String, c: usize) -> Formula {
    let shared = if c == 0 {
        not(eq("u", "u"))
    } else {
        any((1..=c).map(|i| and(lab(&colour_label(i), "u"), lab(&colour_label(i), "v"))))
    };
    forall(
        "Z",
        implies(
            and(is_in("z", "Z"), not(is_in("t", "Z"))),
            exists(
                "u",
                exists(
                    "v",
                    all([
                        is_in("v", "Z"),
                        not(is_in("u", "Z")),
                        crate::mso::build::adj("u", "v"),
                        shared,
                    ]),
                ),
            ),
        ),
    )
}

pub fn con_w(c: usize) -> Formula {
    con_formula(light, c)
}

pub fn con_b(c: usize) -> Formula {
    con_formula(dark, c)
}

/// `ϱ(t,z) = (w(t) → con_w(t,z)) ∧ (b(t) → con_b(t,z))`.
fn rho(t: &str, c: usize) -> Formula {
    let sub = |f: Formula| f.rename_free(&|v| (v == "t").then(|| t.to_string()));
    and(
        implies(lab(WHITE_MARK, t), sub(con_w(c))),
        implies(lab(BLACK_MARK, t), sub(con_b(c))),
    )
}

/// `I₂` for `c` colours: `α = w ∨ b`, `β = ∃z (m(z) ∧ ϱ(x,z) ∧ ϱ(y,z))`.
pub fn build_i2(c: usize) -> Interpretation {
    let alpha = or(lab(WHITE_MARK, "x"), lab(BLACK_MARK, "x"));
    let beta = exists("z", all([lab(MEET_MARK, "z"), rho("x", c), rho("y", c)]));
    Interpretation::new(alpha, beta, BTreeMap::new()).expect("closed over x, y")
}

fn colour_components(s: &dyn Structure, colour_label: fn(usize) -> String, c: usize) -> Vec<usize> {
    let n = s.vertex_count();
    let labels: Vec<usize> = (1..=c)
        .filter_map(|i| s.label_index(&colour_label(i)))
        .collect();
    let mut comp: Vec<usize> = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in s.neighbors(u) {
                if comp[v] == usize::MAX
                    && labels.iter().any(|&l| s.has_label(u, l) && s.has_label(v, l))
                {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

fn con_hook(name: &str, colour_label: fn(usize) -> String, c: usize, corpus: CorpusFn) -> Hook {
    let native: NativeFn = Arc::new(move |s: &dyn Structure| {
        let comp = colour_components(s, colour_label, c);
        Box::new(move |a: &[usize]| comp[a[0]] == comp[a[1]])
    });
    Hook {
        template: HookTemplate::new(name, &["t", "z"], con_formula(colour_label, c))
            .expect("con has free variables t, z"),
        native,
        corpus,
    }
}

/// Grids with at most `max_vertices` vertices and both dimensions ≥ 2.
fn small_grids(max_vertices: usize) -> Vec<GridLikeGraph> {
    let mut out = Vec::new();
    for rows in 2..=max_vertices / 2 {
        for cols in 2..=max_vertices / rows {
            out.push(make_grid(rows, cols).expect("dimensions ≥ 2"));
        }
    }
    out
}

/// Encoding hosts on grids with at most `max_vertices` vertices, one per
/// subset of paths (as an edgeless target), whose palette fits `c`.
pub fn encoding_corpus(c: usize, max_vertices: usize, max_subsets: usize) -> Vec<LabeledGraph> {
    let mut out = Vec::new();
    for grid in small_grids(max_vertices) {
        let colouring = strong_edge_colour(grid.graph());
        if colouring.max_colour() > c {
            continue;
        }
        let np = grid.paths().len();
        let total = 1usize << np;
        let step = (total / max_subsets.max(1)).max(1);
        for mask in (0..total).step_by(step) {
            let paths: Vec<usize> = (0..np).filter(|p| mask >> p & 1 == 1).collect();
            let h = PathSubgraph::new(paths.clone(), Graph::new(paths.len()));
            let enc = build_labeling_with_palette(&grid, &h, &colouring, c).expect("valid input");
            out.push(enc.host);
        }
    }
    out
}

/// Random graphs with random colour labels over `alphabet(c)`.
pub fn random_label_corpus(c: usize, count: usize, seed: u64) -> Vec<LabeledGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=8);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
            let mut lg = LabeledGraph::new(g, alphabet(c)).unwrap();
            for v in 0..n {
                for _ in 0..rng.gen_range(0..=2) {
                    lg.add_label(v, &light(rng.gen_range(1..=c.max(1)))).ok();
                }
                for _ in 0..rng.gen_range(0..=2) {
                    lg.add_label(v, &dark(rng.gen_range(1..=c.max(1)))).ok();
                }
            }
            lg
        })
        .collect()
}

/// The con_w / con_b hooks for `c` colours, uncertified.
pub fn i2_hooks(c: usize) -> HookSet {
    let corpus: CorpusFn = Arc::new(move || {
        let mut hosts = encoding_corpus(c, 9, 16);
        hosts.extend(random_label_corpus(c, 12, 0x5eed + c as u64));
        hosts
    });
    HookSet::new(
        format!("i2-c{c}"),
        vec![
            con_hook("con_w", light, c, corpus.clone()),
            con_hook("con_b", dark, c, corpus),
        ],
    )
}

/// Certified con_w / con_b hooks for `c` colours, cached per process.
pub fn certified_i2_hooks(c: usize) -> Result<Arc<CertifiedHooks>, EncodingError> {
    Ok(i2_hooks(c).certified()?)
}

/// The recovered copy of `H`: vertex `i` is the `i`-th entry of
/// `representatives` (in path order), edges as induced by `I₂`.
pub fn decode(enc: &EncodingLabeling) -> Result<Graph, EncodingError> {
    let hooks = certified_i2_hooks(enc.colour_count)?;
    decode_with(enc, EvalOptions::with_hooks(&hooks))
}

pub fn decode_with(enc: &EncodingLabeling, opts: EvalOptions<'_>) -> Result<Graph, EncodingError> {
    let induced = induced_structure(&enc.host, &build_i2(enc.colour_count), opts)?;
    let index: BTreeMap<usize, usize> = enc
        .representatives
        .values()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut g = Graph::new(enc.representatives.len());
    let g2 = induced.structure.graph();
    for (a, b) in g2.edges() {
        let (Some(&ia), Some(&ib)) = (
            index.get(&induced.domain[a]),
            index.get(&induced.domain[b]),
        ) else {
            continue;
        };
        g.add_edge(ia, ib).expect("distinct representatives");
    }
    Ok(g)
}
