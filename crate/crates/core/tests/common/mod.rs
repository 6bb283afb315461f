//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls the library's evaluator, isomorphism test, game
//! solver or QBF evaluator; those are what the oracles check.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use gridmso::graphs::{Digraph, Graph, LabeledGraph};
use gridmso::interp::Interpretation;
use gridmso::mso::Formula;
use gridmso::sigmacol::{QbfFormula, SigmaColInstance};
use rand::seq::SliceRandom;
use rand::Rng;

/// Adjacency matrix plus label table.
pub struct NaiveHost {
    pub n: usize,
    pub directed: bool,
    pub adj: Vec<Vec<bool>>,
    pub labels: HashMap<String, Vec<bool>>,
}

impl NaiveHost {
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in g.edges() {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        NaiveHost {
            n,
            directed: false,
            adj,
            labels: HashMap::new(),
        }
    }

    pub fn from_labeled(lg: &LabeledGraph) -> Self {
        let mut h = Self::from_graph(lg.graph());
        for name in lg.alphabet() {
            let col = (0..h.n).map(|v| lg.has_label_named(v, name)).collect();
            h.labels.insert(name.clone(), col);
        }
        h
    }

    pub fn from_digraph(d: &Digraph) -> Self {
        let n = d.vertex_count();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in d.arcs() {
            adj[u][v] = true;
        }
        NaiveHost {
            n,
            directed: true,
            adj,
            labels: HashMap::new(),
        }
    }
}

/// Textbook recursive semantics; sets are bitmasks over at most 64 vertices.
pub fn naive_eval(
    h: &NaiveHost,
    f: &Formula,
    v: &mut HashMap<String, usize>,
    s: &mut HashMap<String, u64>,
) -> bool {
    use Formula::*;
    match f {
        Adj(a, b) => !h.directed && h.adj[v[a]][v[b]],
        Arc(a, b) => h.directed && h.adj[v[a]][v[b]],
        Label(l, a) => h.labels.get(l).is_some_and(|c| c[v[a]]),
        Eq(a, b) => v[a] == v[b],
        In(a, set) => s[set] >> v[a] & 1 == 1,
        Not(a) => !naive_eval(h, a, v, s),
        And(a, b) => naive_eval(h, a, v, s) && naive_eval(h, b, v, s),
        Or(a, b) => naive_eval(h, a, v, s) || naive_eval(h, b, v, s),
        Implies(a, b) => !naive_eval(h, a, v, s) || naive_eval(h, b, v, s),
        ExistsVertex(x, b) | ForallVertex(x, b) => {
            let exists = matches!(f, ExistsVertex(..));
            let saved = v.get(x).copied();
            let mut result = !exists;
            for u in 0..h.n {
                v.insert(x.clone(), u);
                if naive_eval(h, b, v, s) == exists {
                    result = exists;
                    break;
                }
            }
            match saved {
                Some(u) => v.insert(x.clone(), u),
                None => v.remove(x),
            };
            result
        }
        ExistsSet(x, b) | ForallSet(x, b) => {
            let exists = matches!(f, ExistsSet(..));
            let saved = s.get(x).copied();
            let mut result = !exists;
            for mask in 0..(1u64 << h.n) {
                s.insert(x.clone(), mask);
                if naive_eval(h, b, v, s) == exists {
                    result = exists;
                    break;
                }
            }
            match saved {
                Some(m) => s.insert(x.clone(), m),
                None => s.remove(x),
            };
            result
        }
    }
}

pub fn naive_holds(h: &NaiveHost, f: &Formula) -> bool {
    naive_eval(h, f, &mut HashMap::new(), &mut HashMap::new())
}

/// `H^I` by the definition: domain in host order, edge when `β(a,b)` or
/// `β(b,a)`, labels by `β_L`.
pub fn naive_induced(h: &NaiveHost, i: &Interpretation) -> NaiveHost {
    let one = |f: &Formula, a: usize| {
        let mut v = HashMap::from([("x".to_string(), a)]);
        naive_eval(h, f, &mut v, &mut HashMap::new())
    };
    let domain: Vec<usize> = (0..h.n).filter(|&a| one(i.alpha(), a)).collect();
    let n = domain.len();
    let mut adj = vec![vec![false; n]; n];
    for ia in 0..n {
        for ib in 0..n {
            if ia == ib {
                continue;
            }
            let mut v = HashMap::from([("x".to_string(), domain[ia]), ("y".to_string(), domain[ib])]);
            if naive_eval(h, i.beta_adj(), &mut v, &mut HashMap::new()) {
                adj[ia][ib] = true;
                adj[ib][ia] = true;
            }
        }
    }
    let labels = i
        .beta_labels()
        .iter()
        .map(|(name, f)| (name.clone(), domain.iter().map(|&a| one(f, a)).collect()))
        .collect();
    NaiveHost {
        n,
        directed: false,
        adj,
        labels,
    }
}

pub fn naive_graph(h: &NaiveHost) -> Graph {
    let mut g = Graph::new(h.n);
    for u in 0..h.n {
        for w in u + 1..h.n {
            if h.adj[u][w] {
                g.add_edge(u, w).unwrap();
            }
        }
    }
    g
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Isomorphism by trying every bijection; for graphs up to 8 vertices.
pub fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    assert!(n <= 8, "brute-force isomorphism is for small graphs");
    permutations(n)
        .into_iter()
        .any(|p| a.edges().all(|(u, v)| b.has_edge(p[u], p[v])))
}

/// Proper 3-colourability by trying all `3^n` colourings.
pub fn brute_three_colourable(g: &Graph) -> bool {
    let n = g.vertex_count();
    let total = 3usize.pow(n as u32);
    (0..total).any(|code| {
        let colour: Vec<usize> = (0..n).map(|v| code / 3usize.pow(v as u32) % 3).collect();
        g.edges().all(|(u, v)| colour[u] != colour[v])
    })
}

/// Every labelled graph on `n` vertices (not up to isomorphism).
pub fn all_labelled_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0..1u64 << pairs.len())
        .map(|mask| {
            let mut g = Graph::new(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v).unwrap();
                }
            }
            g
        })
        .collect()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Random graph with maximum degree at most `d`.
pub fn random_bounded_degree(rng: &mut impl Rng, n: usize, d: usize) -> Graph {
    let mut g = Graph::new(n);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let keep = rng.gen_range(0..=pairs.len());
    for &(u, v) in &pairs[..keep] {
        if g.degree(u) < d && g.degree(v) < d {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

pub fn random_labeled(rng: &mut impl Rng, n: usize, labels: &[&str]) -> LabeledGraph {
    let p = rng.gen_range(0.2..0.7);
    let g = random_graph(rng, n, p);
    let mut lg = LabeledGraph::new(g, labels.iter().map(|s| s.to_string()).collect()).unwrap();
    for v in 0..n {
        for l in labels {
            if rng.gen_bool(0.4) {
                lg.add_label(v, l).unwrap();
            }
        }
    }
    lg
}

/// Random formulas over `adj`, `=`, labels and set membership.
pub struct FormulaGen<'a> {
    pub labels: &'a [&'a str],
    pub max_sets: usize,
    counter: usize,
}

impl<'a> FormulaGen<'a> {
    pub fn new(labels: &'a [&'a str], max_sets: usize) -> Self {
        FormulaGen {
            labels,
            max_sets,
            counter: 0,
        }
    }

    /// A sentence of nesting depth at most `depth`.
    pub fn sentence(&mut self, rng: &mut impl Rng, depth: usize) -> Formula {
        let mut sets_left = self.max_sets;
        self.gen(rng, depth, &mut Vec::new(), &mut Vec::new(), &mut sets_left)
    }

    /// A formula whose free variables are among `free`.
    pub fn with_free(&mut self, rng: &mut impl Rng, depth: usize, free: &[&str]) -> Formula {
        let mut vs: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        let mut sets_left = self.max_sets;
        self.gen(rng, depth, &mut vs, &mut Vec::new(), &mut sets_left)
    }

    fn atom(&mut self, rng: &mut impl Rng, vs: &[String], ss: &[String]) -> Formula {
        let pick = |rng: &mut _| vs.choose(rng).unwrap().clone();
        loop {
            match rng.gen_range(0..4) {
                0 => return Formula::Adj(pick(rng), pick(rng)),
                1 => return Formula::Eq(pick(rng), pick(rng)),
                2 if !self.labels.is_empty() => {
                    return Formula::Label(self.labels.choose(rng).unwrap().to_string(), pick(rng))
                }
                3 if !ss.is_empty() => return Formula::In(pick(rng), ss.choose(rng).unwrap().clone()),
                _ => {}
            }
        }
    }

    fn gen(
        &mut self,
        rng: &mut impl Rng,
        depth: usize,
        vs: &mut Vec<String>,
        ss: &mut Vec<String>,
        sets_left: &mut usize,
    ) -> Formula {
        if vs.is_empty() && depth == 0 {
            // nothing to talk about: a closed atom-like sentence
            return Formula::ExistsVertex("z0".into(), Box::new(Formula::Eq("z0".into(), "z0".into())));
        }
        let roll = if depth == 0 { 0 } else { rng.gen_range(0..100) };
        let quantify = vs.is_empty() || roll >= 65;
        if !quantify && roll < 30 {
            return self.atom(rng, vs, ss);
        }
        if !quantify && roll < 42 {
            return Formula::Not(Box::new(self.gen(rng, depth - 1, vs, ss, sets_left)));
        }
        if !quantify {
            let a = self.gen(rng, depth - 1, vs, ss, sets_left);
            let b = self.gen(rng, depth - 1, vs, ss, sets_left);
            return match rng.gen_range(0..3) {
                0 => Formula::And(Box::new(a), Box::new(b)),
                1 => Formula::Or(Box::new(a), Box::new(b)),
                _ => Formula::Implies(Box::new(a), Box::new(b)),
            };
        }
        let depth = depth.max(1);
        self.counter += 1;
        let exists = rng.gen_bool(0.5);
        if *sets_left > 0 && !vs.is_empty() && rng.gen_bool(0.3) {
            *sets_left -= 1;
            let name = format!("S{}", self.counter);
            ss.push(name.clone());
            let body = self.gen(rng, depth - 1, vs, ss, sets_left);
            ss.pop();
            let b = Box::new(body);
            return if exists { Formula::ExistsSet(name, b) } else { Formula::ForallSet(name, b) };
        }
        let name = format!("v{}", self.counter);
        vs.push(name.clone());
        let body = self.gen(rng, depth - 1, vs, ss, sets_left);
        vs.pop();
        let b = Box::new(body);
        if exists {
            Formula::ExistsVertex(name, b)
        } else {
            Formula::ForallVertex(name, b)
        }
    }
}

/// A random interpretation over `labels_in` producing `labels_out`, with a
/// symmetric `β` (`β₀(x,y) | β₀(y,x)`).
pub fn random_interpretation(rng: &mut impl Rng, labels_in: &[&str], labels_out: &[&str]) -> Interpretation {
    let mut gen = FormulaGen::new(labels_in, 1);
    let alpha = gen.with_free(rng, 3, &["x"]);
    let beta0 = gen.with_free(rng, 3, &["x", "y"]);
    let swapped = beta0.rename_free(&|name: &str| match name {
        "x" => Some("y".to_string()),
        "y" => Some("x".to_string()),
        _ => None,
    });
    let beta = Formula::Or(Box::new(beta0), Box::new(swapped));
    let mut labels = BTreeMap::new();
    for l in labels_out {
        labels.insert(l.to_string(), gen.with_free(rng, 2, &["x"]));
    }
    Interpretation::new(alpha, beta, labels).expect("free variables are x and y")
}

/// QBF truth by enumerating assignments of each block as bitmasks.
pub fn naive_qbf(q: &QbfFormula) -> bool {
    fn go(q: &QbfFormula, block: usize, value: &mut Vec<bool>) -> bool {
        if block == q.blocks().len() {
            return q
                .clauses()
                .iter()
                .all(|c| c.iter().any(|&l| value[l.unsigned_abs() as usize] == (l > 0)));
        }
        let vars = q.blocks()[block].clone();
        let mut results = (0..1u64 << vars.len()).map(|mask| {
            for (i, &x) in vars.iter().enumerate() {
                value[x] = mask >> i & 1 == 1;
            }
            go(q, block + 1, value)
        });
        if block.is_multiple_of(2) {
            results.any(|r| r)
        } else {
            results.all(|r| r)
        }
    }
    go(q, 0, &mut vec![false; q.vars() + 1])
}

/// Game value by enumerating every colouring of each block (no pruning)
/// and checking the accumulated colouring afterwards.
pub fn naive_game(inst: &SigmaColInstance) -> bool {
    fn proper(g: &Graph, colour: &[u8]) -> bool {
        g.edges()
            .all(|(u, v)| colour[u] == 0 || colour[v] == 0 || colour[u] != colour[v])
    }
    fn go(inst: &SigmaColInstance, i: usize, colour: &[u8]) -> bool {
        let block = inst.block(i).to_vec();
        let total = 3usize.pow(block.len() as u32);
        let mut proper_extensions = (0..total).filter_map(|code| {
            let mut c = colour.to_vec();
            for (j, &v) in block.iter().enumerate() {
                c[v] = (code / 3usize.pow(j as u32) % 3) as u8 + 1;
            }
            proper(inst.graph(), &c).then_some(c)
        });
        if i % 2 == 1 {
            proper_extensions.any(|c| i == inst.k() || go(inst, i + 1, &c))
        } else {
            proper_extensions.all(|c| go(inst, i + 1, &c))
        }
    }
    let mut colour = vec![0u8; inst.graph().vertex_count()];
    for (&v, &c) in inst.precolouring() {
        colour[v] = c;
    }
    go(inst, 1, &colour)
}

/// Random CNF with `vars ≤ 6` variables over `k` alternating blocks.
pub fn random_qbf(rng: &mut impl Rng, k: usize, max_vars: usize, max_clauses: usize) -> QbfFormula {
    let vars = rng.gen_range(1..=max_vars);
    let mut blocks = vec![Vec::new(); k];
    for x in 1..=vars {
        blocks[rng.gen_range(0..k)].push(x);
    }
    let clauses = (0..rng.gen_range(0..=max_clauses))
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    let x = rng.gen_range(1..=vars) as i64;
                    if rng.gen_bool(0.5) {
                        x
                    } else {
                        -x
                    }
                })
                .collect()
        })
        .collect();
    QbfFormula::new(vars, blocks, clauses).unwrap()
}

/// Every instance on graph `g` with `k + 1` blocks, every placement of
/// vertices into blocks and every proper precolouring of `V₀`.
pub fn all_instances(g: &Graph, k: usize) -> Vec<SigmaColInstance> {
    let n = g.vertex_count();
    let blocks = k + 1;
    let mut out = Vec::new();
    for code in 0..blocks.pow(n as u32) {
        let owner: Vec<usize> = (0..n).map(|v| code / blocks.pow(v as u32) % blocks).collect();
        let parts: Vec<Vec<usize>> = (0..blocks)
            .map(|b| (0..n).filter(|&v| owner[v] == b).collect())
            .collect();
        let v0 = parts[0].clone();
        for pc in 0..3usize.pow(v0.len() as u32) {
            let pre: BTreeMap<usize, u8> = v0
                .iter()
                .enumerate()
                .map(|(j, &v)| (v, (pc / 3usize.pow(j as u32) % 3) as u8 + 1))
                .collect();
            if let Ok(inst) = SigmaColInstance::new(g.clone(), parts.clone(), pre) {
                out.push(inst);
            }
        }
    }
    out
}
