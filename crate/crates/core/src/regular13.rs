//! Encoding an arbitrary graph `F` as a {1,3}-regular graph `h` with an
//! interpretation `I₁` such that `h^{I₁} ≅ F`, where `I₁` only speaks about
//! leaves, branch vertices and chains of degree-2 vertices. Its translations
//! therefore have the same truth value on every subdivision of `h`.
//!
//! Gadgets (numbered per `F`-vertex in order, then per `F`-edge in order):
//!
//! ```text
//!   vertex v of degree d ≥ 1:          vertex v of degree 0:
//!
//!   ℓ ─ a ─ s₁ ─ s₂ ─ … ─ s_d ─ leaf    ℓ ─ a ─ c'  (cherry)
//!       │   │    │        │                 │
//!       c   e₁   e₂       e_d               c   (cherry)
//!
//!   edge e = {u,v}:  s(u,e) ─ m_e ─ s(v,e),   m_e ─ c_e (cherry)
//! ```
//!
//! A cherry is a branch vertex with two pendant leaves. The anchor `ℓ` is
//! the only leaf whose neighbour is next to a cherry. Connectors `m_e` are
//! the branch vertices with a cherry and no leaf among their topological
//! neighbours; `x, y` are adjacent in `F` when some connector touches the
//! gadgets of both.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graphs::iso::graphs_up_to_iso;
use crate::graphs::{subdivide, Graph, LabeledGraph, PathSubgraph};
use crate::interp::{induced_structure, InterpError, Interpretation};
use crate::mso::build::{adj, all, and, eq, exists, forall, implies, is_in, not, or};
use crate::mso::hooks::{CorpusFn, Hook, HookError, HookSet, HookTemplate, NativeFn};
use crate::mso::{CertifiedHooks, EvalOptions, Formula, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Regular13Error {
    #[error("{what}: {needed} needed but only {available} available")]
    Capacity {
        what: &'static str,
        needed: usize,
        available: usize,
    },
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Hook(#[from] HookError),
}

/// `h`, `I₁` and the anchor of each `F`-vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regular13Encoding {
    pub h: Graph,
    pub i1: Interpretation,
    /// `anchors[v]` is the anchor leaf of `F`-vertex `v`; anchors increase
    /// with `v`.
    pub anchors: Vec<usize>,
}

/// `|V(h)|` for an `F` with `n` vertices, `m` edges and `isolated`
/// isolated vertices: `6n + 6m + 2·isolated`.
pub fn host_size(n: usize, m: usize, isolated: usize) -> usize {
    6 * n + 6 * m + 2 * isolated
}

struct Builder {
    g: Graph,
}

impl Builder {
    fn vertex(&mut self) -> usize {
        self.g.add_vertex()
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.g.add_edge(u, v).expect("gadget edges are simple");
    }

    /// A cherry hanging off `parent`.
    fn cherry(&mut self, parent: usize) -> usize {
        let c = self.vertex();
        self.edge(parent, c);
        for _ in 0..2 {
            let l = self.vertex();
            self.edge(c, l);
        }
        c
    }
}

pub fn encode_13regular(f: &Graph) -> Regular13Encoding {
    let n = f.vertex_count();
    let edges: Vec<(usize, usize)> = f.edges().collect();
    let mut b = Builder { g: Graph::new(0) };
    let mut anchors = Vec::with_capacity(n);
    // slot[(v, edge index)] = spine vertex of v serving that edge
    let mut slot: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for v in 0..n {
        let anchor = b.vertex();
        anchors.push(anchor);
        let flag = b.vertex();
        b.edge(anchor, flag);
        b.cherry(flag);
        let incident: Vec<usize> = (0..edges.len())
            .filter(|&e| edges[e].0 == v || edges[e].1 == v)
            .collect();
        if incident.is_empty() {
            b.cherry(flag);
            continue;
        }
        let mut prev = flag;
        for &e in &incident {
            let s = b.vertex();
            b.edge(prev, s);
            slot.insert((v, e), s);
            prev = s;
        }
        let closing = b.vertex();
        b.edge(prev, closing);
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        let m = b.vertex();
        b.edge(m, slot[&(u, e)]);
        b.edge(m, slot[&(v, e)]);
        b.cherry(m);
    }
    Regular13Encoding {
        h: b.g,
        i1: build_i1(),
        anchors,
    }
}

/// Fresh bound-variable names, so that nested instances never capture.
struct Fresh(usize);

impl Fresh {
    fn var(&mut self) -> String {
        self.0 += 1;
        format!("q{}", self.0)
    }

    fn set(&mut self) -> String {
        self.0 += 1;
        format!("Q{}", self.0)
    }
}

fn neq(a: &str, b: &str) -> Formula {
    not(eq(a, b))
}

/// Exactly two neighbours.
fn deg2(f: &mut Fresh, x: &str) -> Formula {
    let (a, b, c) = (f.var(), f.var(), f.var());
    exists(
        &a,
        exists(
            &b,
            all([
                neq(&a, &b),
                adj(x, &a),
                adj(x, &b),
                forall(&c, implies(adj(x, &c), or(eq(&c, &a), eq(&c, &b)))),
            ]),
        ),
    )
}

/// Exactly one neighbour.
fn leaf(f: &mut Fresh, x: &str) -> Formula {
    let (a, b) = (f.var(), f.var());
    exists(
        &a,
        and(adj(x, &a), forall(&b, implies(adj(x, &b), eq(&b, &a)))),
    )
}

/// At least three neighbours.
fn branch(f: &mut Fresh, x: &str) -> Formula {
    let (a, b, c) = (f.var(), f.var(), f.var());
    exists(
        &a,
        and(
            adj(x, &a),
            exists(
                &b,
                all([
                    adj(x, &b),
                    neq(&a, &b),
                    exists(&c, all([adj(x, &c), neq(&c, &a), neq(&c, &b)])),
                ]),
            ),
        ),
    )
}

/// `u = v`, or both have degree 2 and are joined through degree-2 vertices.
fn samechain(f: &mut Fresh, u: &str, v: &str) -> Formula {
    let z = f.set();
    let (a, b) = (f.var(), f.var());
    let crossing = all([
        is_in(&a, &z),
        not(is_in(&b, &z)),
        adj(&a, &b),
        deg2(f, &a),
        deg2(f, &b),
    ]);
    forall(
        &z,
        implies(
            and(is_in(u, &z), not(is_in(v, &z))),
            exists(&a, exists(&b, crossing)),
        ),
    )
}

/// `x ≠ y`, neither of degree 2, and adjacent once chains of degree-2
/// vertices are suppressed.
fn tadj(f: &mut Fresh, x: &str, y: &str) -> Formula {
    let (u, v) = (f.var(), f.var());
    let chain = exists(
        &u,
        exists(
            &v,
            all([
                deg2(f, &u),
                deg2(f, &v),
                adj(x, &u),
                adj(y, &v),
                samechain(f, &u, &v),
            ]),
        ),
    );
    all([
        neq(x, y),
        not(deg2(f, x)),
        not(deg2(f, y)),
        or(adj(x, y), chain),
    ])
}

/// A branch vertex with two leaves among its topological neighbours.
fn cherry(f: &mut Fresh, s: &str) -> Formula {
    let (p, q) = (f.var(), f.var());
    and(
        branch(f, s),
        exists(
            &p,
            and(
                and(leaf(f, &p), tadj(f, s, &p)),
                exists(&q, all([leaf(f, &q), neq(&p, &q), tadj(f, s, &q)])),
            ),
        ),
    )
}

/// A connector: a branch vertex with a cherry and no leaf among its
/// topological neighbours.
fn conn(f: &mut Fresh, m: &str) -> Formula {
    let (a, c) = (f.var(), f.var());
    all([
        branch(f, m),
        not(exists(&a, and(leaf(f, &a), tadj(f, m, &a)))),
        exists(&c, and(tadj(f, m, &c), cherry(f, &c))),
    ])
}

/// `x = s`, or both avoid connectors and are joined avoiding connectors.
fn gad(f: &mut Fresh, x: &str, s: &str) -> Formula {
    let z = f.set();
    let (a, b) = (f.var(), f.var());
    let crossing = all([
        is_in(&a, &z),
        not(is_in(&b, &z)),
        adj(&a, &b),
        not(conn(f, &a)),
        not(conn(f, &b)),
    ]);
    forall(
        &z,
        implies(
            and(is_in(x, &z), not(is_in(s, &z))),
            exists(&a, exists(&b, crossing)),
        ),
    )
}

/// `α₁(x)`: `x` is a leaf whose neighbour is topologically next to a cherry.
pub fn alpha1() -> Formula {
    let f = &mut Fresh(0);
    let (a, c) = (f.var(), f.var());
    and(
        leaf(f, "x"),
        exists(
            &a,
            and(
                tadj(f, "x", &a),
                exists(&c, and(tadj(f, &a, &c), cherry(f, &c))),
            ),
        ),
    )
}

/// `β₁(x,y)`: some connector has two non-cherry topological neighbours, one
/// in the gadget of `x` and one in the gadget of `y`.
pub fn beta1() -> Formula {
    let f = &mut Fresh(0);
    let (m, s, t) = (f.var(), f.var(), f.var());
    let inner_t = exists(
        &t,
        all([
            neq(&s, &t),
            tadj(f, &m, &t),
            not(cherry(f, &t)),
            gad(f, "y", &t),
        ]),
    );
    and(
        neq("x", "y"),
        exists(
            &m,
            and(
                conn(f, &m),
                exists(
                    &s,
                    all([tadj(f, &m, &s), not(cherry(f, &s)), gad(f, "x", &s), inner_t]),
                ),
            ),
        ),
    )
}

pub fn build_i1() -> Interpretation {
    Interpretation::new(alpha1(), beta1(), BTreeMap::new()).expect("closed over x, y")
}

/// Degree-based facts shared by the native predicates.
struct Topology {
    deg: Vec<usize>,
    chain: Vec<usize>,
    tadj: Vec<Vec<usize>>,
}

impl Topology {
    fn of(s: &dyn Structure) -> Self {
        let n = s.vertex_count();
        let nbrs: Vec<Vec<usize>> = (0..n).map(|v| s.neighbors(v)).collect();
        let deg: Vec<usize> = nbrs.iter().map(Vec::len).collect();
        let chain = components(n, &nbrs, |v| deg[v] == 2);
        // members of each degree-2 chain, to find the chain's attachments
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in (0..n).filter(|&v| deg[v] == 2) {
            members.entry(chain[v]).or_default().push(v);
        }
        let mut tadj = vec![Vec::new(); n];
        for x in (0..n).filter(|&x| deg[x] != 2) {
            let mut out: Vec<usize> = nbrs[x].iter().copied().filter(|&y| deg[y] != 2).collect();
            for &u in nbrs[x].iter().filter(|&&u| deg[u] == 2) {
                for &w in &members[&chain[u]] {
                    out.extend(nbrs[w].iter().copied().filter(|&y| deg[y] != 2 && y != x));
                }
            }
            out.sort_unstable();
            out.dedup();
            tadj[x] = out;
        }
        Topology { deg, chain, tadj }
    }

    fn is_tadj(&self, x: usize, y: usize) -> bool {
        self.tadj[x].binary_search(&y).is_ok()
    }

    fn cherries(&self) -> Vec<bool> {
        (0..self.deg.len())
            .map(|s| {
                self.deg[s] >= 3 && self.tadj[s].iter().filter(|&&p| self.deg[p] == 1).count() >= 2
            })
            .collect()
    }

    fn connectors(&self) -> Vec<bool> {
        let cherry = self.cherries();
        (0..self.deg.len())
            .map(|m| {
                self.deg[m] >= 3
                    && self.tadj[m].iter().all(|&a| self.deg[a] != 1)
                    && self.tadj[m].iter().any(|&c| cherry[c])
            })
            .collect()
    }
}

/// Component ids of the subgraph induced by `keep`; other vertices get
/// singleton ids.
fn components(n: usize, nbrs: &[Vec<usize>], keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        if keep(s) {
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &nbrs[u] {
                    if comp[v] == usize::MAX && keep(v) {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
        }
        next += 1;
    }
    comp
}

fn samechain_native() -> NativeFn {
    Arc::new(|s: &dyn Structure| {
        let t = Topology::of(s);
        Box::new(move |a: &[usize]| {
            a[0] == a[1] || (t.deg[a[0]] == 2 && t.deg[a[1]] == 2 && t.chain[a[0]] == t.chain[a[1]])
        })
    })
}

fn tadj_native() -> NativeFn {
    Arc::new(|s: &dyn Structure| {
        let t = Topology::of(s);
        Box::new(move |a: &[usize]| t.deg[a[0]] != 2 && t.is_tadj(a[0], a[1]))
    })
}

fn gad_native() -> NativeFn {
    Arc::new(|s: &dyn Structure| {
        let n = s.vertex_count();
        let t = Topology::of(s);
        let conn = t.connectors();
        let nbrs: Vec<Vec<usize>> = (0..n).map(|v| s.neighbors(v)).collect();
        let comp = components(n, &nbrs, |v| !conn[v]);
        Box::new(move |a: &[usize]| {
            a[0] == a[1] || (!conn[a[0]] && !conn[a[1]] && comp[a[0]] == comp[a[1]])
        })
    })
}

/// Small hosts for hook conformance: every graph with at most five
/// vertices, the single-vertex gadget and a subdivision of it, and random
/// graphs of maximum degree 3 with up to ten vertices.
pub fn conformance_corpus(random: usize, seed: u64) -> Vec<LabeledGraph> {
    let mut hosts: Vec<Graph> = (1..=5).flat_map(graphs_up_to_iso).collect();
    let gadget = encode_13regular(&Graph::new(1)).h;
    let mut plan = BTreeMap::new();
    plan.insert(gadget.edges().next().unwrap(), 2);
    hosts.push(subdivide(&gadget, &plan).expect("plan uses an edge"));
    hosts.push(gadget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let n = rng.gen_range(6..=10);
        let mut g = Graph::new(n);
        for _ in 0..2 * n {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && g.degree(u) < 3 && g.degree(v) < 3 {
                g.add_edge(u, v).unwrap();
            }
        }
        hosts.push(g);
    }
    hosts.into_iter().map(LabeledGraph::unlabeled).collect()
}

pub fn i1_hooks() -> HookSet {
    let corpus: CorpusFn = Arc::new(|| conformance_corpus(12, 0x13));
    let template = |name: &str, params: [&str; 2], f: Formula| {
        HookTemplate::new(name, &params, f).expect("templates have two free vertex variables")
    };
    let hooks = vec![
        Hook {
            template: template("samechain", ["u", "v"], samechain(&mut Fresh(0), "u", "v")),
            native: samechain_native(),
            corpus: corpus.clone(),
        },
        Hook {
            template: template("tadj", ["x", "y"], tadj(&mut Fresh(0), "x", "y")),
            native: tadj_native(),
            corpus: corpus.clone(),
        },
        Hook {
            template: template("gad", ["x", "s"], gad(&mut Fresh(0), "x", "s")),
            native: gad_native(),
            corpus,
        },
    ];
    HookSet::new("i1", hooks)
}

pub fn certified_i1_hooks() -> Result<Arc<CertifiedHooks>, Regular13Error> {
    Ok(i1_hooks().certified()?)
}

/// `h^{I₁}` computed with the certified hooks; vertex `i` is `F`-vertex `i`.
pub fn decode(h: &Graph) -> Result<Graph, Regular13Error> {
    let hooks = certified_i1_hooks()?;
    let r = induced_structure(&LabeledGraph::unlabeled(h.clone()), &build_i1(), EvalOptions::with_hooks(&hooks))?;
    Ok(r.structure.graph().clone())
}

/// The 1-subdivision of `h` inside `K_{rows,cols}`: `h`-vertex `i` becomes
/// left vertex (white path) `i`, `h`-edge `j` (in edge order) becomes right
/// vertex (black path) `rows + j`.
pub fn embed_subdivision(h: &Graph, rows: usize, cols: usize) -> Result<PathSubgraph, Regular13Error> {
    let (nv, ne) = (h.vertex_count(), h.edge_count());
    if nv > rows {
        return Err(Regular13Error::Capacity {
            what: "rows for the vertices of h",
            needed: nv,
            available: rows,
        });
    }
    if ne > cols {
        return Err(Regular13Error::Capacity {
            what: "columns for the edges of h",
            needed: ne,
            available: cols,
        });
    }
    let mut paths: Vec<usize> = (0..nv).collect();
    paths.extend((0..ne).map(|j| rows + j));
    let mut g = Graph::new(nv + ne);
    for (j, (u, v)) in h.edges().enumerate() {
        g.add_edge(u, nv + j).unwrap();
        g.add_edge(v, nv + j).unwrap();
    }
    Ok(PathSubgraph::new(paths, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::is_13_regular;
    use crate::graphs::iso::is_isomorphic;

    #[test]
    fn single_vertex_gadget() {
        let enc = encode_13regular(&Graph::new(1));
        assert!(is_13_regular(&enc.h));
        assert_eq!(enc.h.vertex_count(), host_size(1, 0, 1));
        assert_eq!(enc.anchors, vec![0]);
        let plain = induced_structure(
            &LabeledGraph::unlabeled(enc.h.clone()),
            &enc.i1,
            EvalOptions::fast(),
        )
        .unwrap();
        assert_eq!(plain.domain, vec![0]);
    }

    #[test]
    fn k2_round_trip_by_expansion() {
        let enc = encode_13regular(&Graph::complete(2));
        assert!(is_13_regular(&enc.h));
        let r = induced_structure(
            &LabeledGraph::unlabeled(enc.h.clone()),
            &enc.i1,
            EvalOptions::fast(),
        )
        .unwrap();
        assert_eq!(r.domain, enc.anchors);
        assert!(is_isomorphic(r.structure.graph(), &Graph::complete(2)));
    }

    #[test]
    fn host_size_formula() {
        for f in [Graph::complete(4), Graph::path(3), Graph::new(2)] {
            let iso = (0..f.vertex_count()).filter(|&v| f.degree(v) == 0).count();
            let enc = encode_13regular(&f);
            assert_eq!(enc.h.vertex_count(), host_size(f.vertex_count(), f.edge_count(), iso));
        }
        let k4 = encode_13regular(&Graph::complete(4)).h;
        assert_eq!((k4.vertex_count(), k4.edge_count()), (60, 62));
    }

    #[test]
    fn embedding_examples() {
        let e = embed_subdivision(&Graph::complete(2), 2, 1).unwrap();
        assert!(is_isomorphic(&e.graph, &Graph::path(3)));
        let e = embed_subdivision(&Graph::complete(3), 3, 3).unwrap();
        assert!(is_isomorphic(&e.graph, &Graph::cycle(6)));
        assert!(matches!(
            embed_subdivision(&Graph::complete(3), 2, 3),
            Err(Regular13Error::Capacity { .. })
        ));
    }

    #[test]
    fn hooks_certify_and_decode() {
        for f in [Graph::complete(3), Graph::complete(4), Graph::path(3), Graph::new(2)] {
            let enc = encode_13regular(&f);
            let d = decode(&enc.h).unwrap();
            assert_eq!(d, f);
        }
    }
}
