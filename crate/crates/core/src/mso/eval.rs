//! Brute-force evaluation of MSO₁-L formulas.
//!
//! A formula is compiled once per structure into a slot-addressed tree and
//! can then be evaluated under many assignments. Four optional
//! accelerations keep the brute force usable on the hosts produced by the
//! reductions; none of them changes the truth value:
//!
//! * certified hooks replace a subformula by a native procedure;
//! * domain restriction: a vertex quantifier whose body is guarded by
//!   conjuncts mentioning only its variable (`E y. G(y) & ...` or
//!   `A y. G(y) -> ...`) only visits the `G`-set, and a set quantifier whose
//!   membership atoms only test guarded variables ranges over subsets of
//!   the union of their guard sets;
//! * miniscoping: conjuncts that do not mention an existentially bound
//!   variable are moved out of its scope, innermost quantifiers first;
//! * memoization of quantified subformulas without free set variables and
//!   with at most three free vertex variables.
//!
//! Without accelerations, a sentence with `s` set quantifiers and `v`
//! vertex quantifiers on `n` vertices performs at most `2^(s·n) · n^v`
//! atomic checks. Quantifiers nested deeper iterate faster and subsets are
//! visited in binary-counter order, so short-circuiting is reproducible.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use super::ast::{is_set_var, Formula};
use super::hooks::{CertifiedHooks, PreparedNative};
use crate::bitset::BitSet;
use crate::graphs::{Digraph, Graph, LabeledGraph};

/// Largest set-quantifier domain that will be enumerated.
pub const SET_DOMAIN_CEILING: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is free but not bound by the assignment")]
    UnboundVariable(String),
    #[error("label `{0}` is not in the structure's alphabet")]
    UnknownLabel(String),
    #[error("`{atom}` is not in the signature of {structure} structures")]
    Signature {
        atom: &'static str,
        structure: &'static str,
    },
    #[error("vertex {vertex} bound to `{var}` is out of range (n = {n})")]
    VertexOutOfRange { var: String, vertex: usize, n: usize },
    #[error("`{0}` is bound with the wrong kind")]
    Kind(String),
    #[error("set quantifier over {size} vertices exceeds the enumeration ceiling of {ceiling}")]
    Capacity { size: usize, ceiling: usize },
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
}

/// What the evaluator needs to know about a finite structure.
pub trait Structure {
    fn vertex_count(&self) -> usize;
    /// Whether the binary relation is `arc` (directed) rather than `adj`.
    fn is_directed(&self) -> bool;
    fn edge(&self, u: usize, v: usize) -> bool;
    fn label_index(&self, name: &str) -> Option<usize>;
    fn has_label(&self, v: usize, label: usize) -> bool;
    /// Vertices `w` with `edge(v, w)`.
    fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&w| self.edge(v, w)).collect()
    }
}

impl Structure for LabeledGraph {
    fn vertex_count(&self) -> usize {
        self.graph().vertex_count()
    }
    fn is_directed(&self) -> bool {
        false
    }
    fn edge(&self, u: usize, v: usize) -> bool {
        self.graph().has_edge(u, v)
    }
    fn label_index(&self, name: &str) -> Option<usize> {
        LabeledGraph::label_index(self, name)
    }
    fn has_label(&self, v: usize, label: usize) -> bool {
        LabeledGraph::has_label(self, v, label)
    }
    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.graph().neighbors(v).to_vec()
    }
}

impl Structure for Graph {
    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }
    fn is_directed(&self) -> bool {
        false
    }
    fn edge(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
    fn label_index(&self, _: &str) -> Option<usize> {
        None
    }
    fn has_label(&self, _: usize, _: usize) -> bool {
        false
    }
    fn neighbors(&self, v: usize) -> Vec<usize> {
        Graph::neighbors(self, v).to_vec()
    }
}

impl Structure for Digraph {
    fn vertex_count(&self) -> usize {
        Digraph::vertex_count(self)
    }
    fn is_directed(&self) -> bool {
        true
    }
    fn edge(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v)
    }
    fn label_index(&self, _: &str) -> Option<usize> {
        None
    }
    fn has_label(&self, _: usize, _: usize) -> bool {
        false
    }
}

/// Values for the free variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub vertex: BTreeMap<String, usize>,
    pub set: BTreeMap<String, BTreeSet<usize>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertex(mut self, name: &str, v: usize) -> Self {
        self.vertex.insert(name.to_string(), v);
        self
    }

    pub fn with_set(mut self, name: &str, s: impl IntoIterator<Item = usize>) -> Self {
        self.set.insert(name.to_string(), s.into_iter().collect());
        self
    }
}

#[derive(Clone, Copy, Default)]
pub struct EvalOptions<'h> {
    pub hooks: Option<&'h CertifiedHooks>,
    pub restrict_domains: bool,
    pub memoize: bool,
    /// Move conjuncts that do not mention an existentially bound variable
    /// out of its scope before compiling the quantifier.
    pub miniscope: bool,
}

impl<'h> EvalOptions<'h> {
    /// Plain quantifier expansion.
    pub fn plain() -> Self {
        EvalOptions::default()
    }

    /// Domain restriction, miniscoping and memoization, no hooks.
    pub fn fast() -> Self {
        EvalOptions {
            hooks: None,
            restrict_domains: true,
            memoize: true,
            miniscope: true,
        }
    }

    pub fn with_hooks(hooks: &'h CertifiedHooks) -> Self {
        EvalOptions {
            hooks: Some(hooks),
            ..Self::fast()
        }
    }
}

/// Evaluates `phi` by plain expansion.
pub fn evaluate(
    s: &dyn Structure,
    phi: &Formula,
    env: &Assignment,
) -> Result<bool, EvalError> {
    evaluate_with(s, phi, env, EvalOptions::plain())
}

pub fn evaluate_with(
    s: &dyn Structure,
    phi: &Formula,
    env: &Assignment,
    opts: EvalOptions<'_>,
) -> Result<bool, EvalError> {
    let fv = phi.free_variables();
    let vnames: Vec<&str> = fv.vertex.iter().map(String::as_str).collect();
    let snames: Vec<&str> = fv.set.iter().map(String::as_str).collect();
    let n = s.vertex_count();
    let mut vargs = Vec::with_capacity(vnames.len());
    for name in &vnames {
        let v = *env
            .vertex
            .get(*name)
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))?;
        if v >= n {
            return Err(EvalError::VertexOutOfRange {
                var: name.to_string(),
                vertex: v,
                n,
            });
        }
        vargs.push(v);
    }
    let mut sargs = Vec::with_capacity(snames.len());
    for name in &snames {
        let set = env
            .set
            .get(*name)
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))?;
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            return Err(EvalError::VertexOutOfRange {
                var: name.to_string(),
                vertex: v,
                n,
            });
        }
        sargs.push(BitSet::from_indices(n, set.iter().copied()));
    }
    let ev = Evaluator::prepare_with_sets(s, phi, &vnames, &snames, opts)?;
    ev.holds_with_sets(&vargs, &sargs)
}

/// Evaluates a sentence.
pub fn holds(s: &dyn Structure, phi: &Formula) -> Result<bool, EvalError> {
    evaluate(s, phi, &Assignment::new())
}

#[derive(Debug)]
enum SetDomain {
    All,
    /// Union of these guards' domains.
    Guards(Vec<usize>),
    Empty,
}

#[derive(Debug)]
struct Memo {
    class: u32,
    args: Vec<usize>,
}

enum Node {
    Edge(usize, usize),
    Label(usize, usize),
    Eq(usize, usize),
    In(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Vertex {
        exists: bool,
        slot: usize,
        guard: Option<usize>,
        body: Box<Node>,
        memo: Option<Memo>,
    },
    Set {
        exists: bool,
        slot: usize,
        domain: SetDomain,
        body: Box<Node>,
        memo: Option<Memo>,
    },
    Hook {
        index: usize,
        args: Vec<usize>,
    },
}

struct Guard {
    node: Node,
    vslots: usize,
    sslots: usize,
}

struct VarInfo {
    name: String,
    // guard of the binding quantifier, if it is guarded
    guard: Option<usize>,
}

struct SetVarInfo {
    name: String,
    // guards of the vertex variables tested for membership, `None` for
    // an unguarded one
    memberships: Vec<Option<usize>>,
}

struct Compiler<'a> {
    s: &'a dyn Structure,
    opts: EvalOptions<'a>,
    vscope: Vec<VarInfo>,
    sscope: Vec<SetVarInfo>,
    max_v: usize,
    max_s: usize,
    guards: Vec<Guard>,
    guard_ids: HashMap<String, usize>,
    memo_ids: HashMap<String, u32>,
    hooks: Vec<PreparedNative>,
    hook_ids: HashMap<usize, usize>,
    hook_shapes: Vec<(std::mem::Discriminant<Formula>, usize)>,
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut out = conjuncts(a);
            out.extend(conjuncts(b));
            out
        }
        other => vec![other],
    }
}

fn tests_membership(f: &Formula, y: &str) -> bool {
    let mut found = false;
    f.visit(&mut |g| found |= matches!(g, Formula::In(x, _) if x == y));
    found
}

impl<'a> Compiler<'a> {
    fn new(s: &'a dyn Structure, opts: EvalOptions<'a>) -> Self {
        let hook_shapes = opts.hooks.map_or_else(Vec::new, |h| h.shapes());
        Compiler {
            s,
            opts,
            vscope: Vec::new(),
            sscope: Vec::new(),
            max_v: 0,
            max_s: 0,
            guards: Vec::new(),
            guard_ids: HashMap::new(),
            memo_ids: HashMap::new(),
            hooks: Vec::new(),
            hook_ids: HashMap::new(),
            hook_shapes,
        }
    }

    fn vslot(&self, x: &str) -> Result<usize, EvalError> {
        if is_set_var(x) {
            return Err(EvalError::Kind(x.to_string()));
        }
        self.vscope
            .iter()
            .rposition(|v| v.name == x)
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
    }

    fn sslot(&self, x: &str) -> Result<usize, EvalError> {
        if !is_set_var(x) {
            return Err(EvalError::Kind(x.to_string()));
        }
        self.sscope
            .iter()
            .rposition(|v| v.name == x)
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
    }

    fn push_v(&mut self, name: &str, guard: Option<usize>) -> usize {
        self.vscope.push(VarInfo {
            name: name.to_string(),
            guard,
        });
        self.max_v = self.max_v.max(self.vscope.len());
        self.vscope.len() - 1
    }

    fn push_s(&mut self, name: &str) -> usize {
        self.sscope.push(SetVarInfo {
            name: name.to_string(),
            memberships: Vec::new(),
        });
        self.max_s = self.max_s.max(self.sscope.len());
        self.sscope.len() - 1
    }

    fn try_hook(&mut self, f: &Formula) -> Result<Option<Node>, EvalError> {
        let Some(hooks) = self.opts.hooks else {
            return Ok(None);
        };
        let d = std::mem::discriminant(f);
        if !self.hook_shapes.iter().any(|&(hd, _)| hd == d) {
            return Ok(None);
        }
        let size = f.size();
        if !self.hook_shapes.iter().any(|&(hd, hs)| hd == d && hs == size) {
            return Ok(None);
        }
        let (key, free) = f.alpha_key();
        let Some((index, arg_positions)) = hooks.lookup(&key) else {
            return Ok(None);
        };
        if free.iter().any(|x| is_set_var(x)) {
            return Ok(None);
        }
        let mut args = Vec::with_capacity(arg_positions.len());
        for &p in arg_positions {
            args.push(self.vslot(&free[p])?);
        }
        let local = match self.hook_ids.get(&index) {
            Some(&l) => l,
            None => {
                self.hooks.push(hooks.prepare(index, self.s));
                self.hook_ids.insert(index, self.hooks.len() - 1);
                self.hooks.len() - 1
            }
        };
        Ok(Some(Node::Hook { index: local, args }))
    }

    /// Guard id for `g` if `g`'s only free variable is the vertex variable `y`.
    fn guard_for(&mut self, g: &Formula, y: &str) -> Result<Option<usize>, EvalError> {
        let fv = g.free_variables();
        if !fv.set.is_empty() || fv.vertex.len() != 1 || !fv.vertex.contains(y) {
            return Ok(None);
        }
        let (key, _) = g.alpha_key();
        if let Some(&id) = self.guard_ids.get(&key) {
            return Ok(Some(id));
        }
        // compile the guard on its own, with `y` as the only variable
        let saved_v = std::mem::take(&mut self.vscope);
        let saved_s = std::mem::take(&mut self.sscope);
        let (saved_mv, saved_ms) = (self.max_v, self.max_s);
        self.max_v = 0;
        self.max_s = 0;
        self.push_v(y, None);
        let node = self.compile(g);
        let (vslots, sslots) = (self.max_v, self.max_s);
        self.vscope = saved_v;
        self.sscope = saved_s;
        self.max_v = saved_mv;
        self.max_s = saved_ms;
        let node = node?;
        let id = self.guards.len();
        self.guards.push(Guard {
            node,
            vslots,
            sslots,
        });
        self.guard_ids.insert(key, id);
        Ok(Some(id))
    }

    fn memo_for(&mut self, f: &Formula) -> Result<Option<Memo>, EvalError> {
        if !self.opts.memoize {
            return Ok(None);
        }
        let fv = f.free_variables();
        if !fv.set.is_empty() || fv.vertex.len() > 3 {
            return Ok(None);
        }
        let (key, free) = f.alpha_key();
        let next = self.memo_ids.len() as u32;
        let class = *self.memo_ids.entry(key).or_insert(next);
        let mut args = Vec::with_capacity(free.len());
        for x in &free {
            args.push(self.vslot(x)?);
        }
        Ok(Some(Memo { class, args }))
    }

    /// Whether `f` would compile to a hook call.
    fn is_hooked(&self, f: &Formula) -> bool {
        let Some(hooks) = self.opts.hooks else {
            return false;
        };
        let d = std::mem::discriminant(f);
        if !self.hook_shapes.iter().any(|&(hd, _)| hd == d) {
            return false;
        }
        let size = f.size();
        self.hook_shapes.iter().any(|&(hd, hs)| hd == d && hs == size)
            && hooks.lookup(&f.alpha_key().0).is_some()
    }

    /// Miniscopes every existential quantifier reachable from `f` through
    /// conjunctions, leaving hook-shaped subformulas alone.
    fn spine(&self, f: &Formula) -> Formula {
        if self.is_hooked(f) {
            return f.clone();
        }
        match f {
            Formula::ExistsVertex(..) | Formula::ExistsSet(..) => {
                self.miniscoped(f).unwrap_or_else(|| f.clone())
            }
            Formula::And(a, b) => crate::mso::build::and(self.spine(a), self.spine(b)),
            _ => f.clone(),
        }
    }

    /// `E y. A & B(y)` as `A & E y. B(y)` when `A` does not mention `y`,
    /// applied inside out so that conjuncts move as far up as they can.
    fn miniscoped(&self, f: &Formula) -> Option<Formula> {
        let (y, body) = match f {
            Formula::ExistsVertex(y, body) | Formula::ExistsSet(y, body) => (y, body),
            _ => return None,
        };
        let inner = self.spine(body);
        let (own, rest): (Vec<&Formula>, Vec<&Formula>) =
            conjuncts(&inner).into_iter().partition(|c| {
                let fv = c.free_variables();
                fv.vertex.contains(y.as_str()) || fv.set.contains(y.as_str())
            });
        if rest.is_empty() || own.is_empty() {
            return (inner != **body).then(|| f.with_body(y.clone(), Box::new(inner.clone())));
        }
        let kept = own.into_iter().cloned().reduce(crate::mso::build::and).unwrap();
        let quantified = f.with_body(y.clone(), Box::new(kept));
        Some(rest.into_iter().cloned().chain([quantified]).reduce(crate::mso::build::and).unwrap())
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, EvalError> {
        if let Some(node) = self.try_hook(f)? {
            return Ok(node);
        }
        if self.opts.miniscope {
            if let Some(g) = self.miniscoped(f) {
                return self.compile(&g);
            }
        }
        use Formula as F;
        Ok(match f {
            F::Adj(x, y) | F::Arc(x, y) => {
                let directed = matches!(f, F::Arc(..));
                if directed != self.s.is_directed() {
                    return Err(EvalError::Signature {
                        atom: if directed { "arc" } else { "adj" },
                        structure: if directed { "undirected" } else { "directed" },
                    });
                }
                Node::Edge(self.vslot(x)?, self.vslot(y)?)
            }
            F::Label(l, x) => {
                let idx = self
                    .s
                    .label_index(l)
                    .ok_or_else(|| EvalError::UnknownLabel(l.clone()))?;
                Node::Label(idx, self.vslot(x)?)
            }
            F::Eq(x, y) => Node::Eq(self.vslot(x)?, self.vslot(y)?),
            F::In(x, y) => {
                let xs = self.vslot(x)?;
                let ys = self.sslot(y)?;
                // a guarded variable only takes values in its guard's domain,
                // wherever it is bound
                let g = self.vscope[xs].guard;
                self.sscope[ys].memberships.push(g);
                Node::In(xs, ys)
            }
            F::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            F::And(a, b) => Node::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Or(a, b) => Node::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Implies(a, b) => {
                Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?))
            }
            F::ExistsVertex(y, body) | F::ForallVertex(y, body) => {
                let exists = matches!(f, F::ExistsVertex(..));
                if is_set_var(y) {
                    return Err(EvalError::Kind(y.clone()));
                }
                let memo = self.memo_for(f)?;
                let mut guard = None;
                if self.opts.restrict_domains {
                    let candidates = match (exists, body.as_ref()) {
                        (true, b) => conjuncts(b),
                        (false, F::Implies(ante, _)) => conjuncts(ante),
                        _ => Vec::new(),
                    };
                    // every conjunct mentioning only `y` is implied, so their
                    // conjunction is a sound guard. Conjuncts testing `y` for
                    // membership stay out: the guard is compiled with `y`
                    // unguarded, so their set quantifiers would range over
                    // everything.
                    let own: Vec<&Formula> = candidates
                        .into_iter()
                        .filter(|c| {
                            let fv = c.free_variables();
                            fv.set.is_empty()
                                && fv.vertex.len() == 1
                                && fv.vertex.contains(y.as_str())
                                && !tests_membership(c, y)
                        })
                        .collect();
                    if let Some(conj) = own.into_iter().cloned().reduce(crate::mso::build::and) {
                        guard = self.guard_for(&conj, y)?;
                    }
                }
                let slot = self.push_v(y, guard);
                let body = self.compile(body);
                self.vscope.pop();
                Node::Vertex {
                    exists,
                    slot,
                    guard,
                    body: Box::new(body?),
                    memo,
                }
            }
            F::ExistsSet(y, body) | F::ForallSet(y, body) => {
                let exists = matches!(f, F::ExistsSet(..));
                if !is_set_var(y) {
                    return Err(EvalError::Kind(y.clone()));
                }
                let memo = self.memo_for(f)?;
                let slot = self.push_s(y);
                let body = self.compile(body);
                let info = self.sscope.pop().unwrap();
                let body = body?;
                let domain = if !self.opts.restrict_domains {
                    SetDomain::All
                } else if info.memberships.is_empty() {
                    SetDomain::Empty
                } else {
                    // membership is only ever tested on guarded vertices, so the
                    // union of those guards' domains is enough
                    match info.memberships.iter().copied().collect::<Option<BTreeSet<usize>>>() {
                        Some(gs) => SetDomain::Guards(gs.into_iter().collect()),
                        None => SetDomain::All,
                    }
                };
                Node::Set {
                    exists,
                    slot,
                    domain,
                    body: Box::new(body),
                    memo,
                }
            }
        })
    }
}

/// A formula compiled against one structure, ready for repeated evaluation.
pub struct Evaluator<'s> {
    s: &'s dyn Structure,
    root: Node,
    vparams: usize,
    sparams: usize,
    vslots: usize,
    sslots: usize,
    guards: Vec<Guard>,
    hooks: Vec<PreparedNative>,
    domains: RefCell<Vec<Option<Rc<Vec<usize>>>>>,
    memo: RefCell<HashMap<(u32, [usize; 3]), bool>>,
    all: Rc<Vec<usize>>,
}

struct Run {
    vals: Vec<usize>,
    sets: Vec<BitSet>,
}

impl<'s> Evaluator<'s> {
    /// Compiles `phi` whose free variables must be among `params` (vertex
    /// variables only).
    pub fn prepare(
        s: &'s dyn Structure,
        phi: &Formula,
        params: &[&str],
        opts: EvalOptions<'_>,
    ) -> Result<Self, EvalError> {
        Self::build(s, phi, params, &[], opts)
    }

    pub fn prepare_with_sets(
        s: &'s dyn Structure,
        phi: &Formula,
        vparams: &[&str],
        sparams: &[&str],
        opts: EvalOptions<'_>,
    ) -> Result<Self, EvalError> {
        Self::build(s, phi, vparams, sparams, opts)
    }

    fn build(
        s: &'s dyn Structure,
        phi: &Formula,
        vparams: &[&str],
        sparams: &[&str],
        opts: EvalOptions<'_>,
    ) -> Result<Self, EvalError> {
        let mut c = Compiler::new(s, opts);
        for p in vparams {
            if is_set_var(p) {
                return Err(EvalError::Kind(p.to_string()));
            }
            c.push_v(p, None);
        }
        for p in sparams {
            if !is_set_var(p) {
                return Err(EvalError::Kind(p.to_string()));
            }
            c.push_s(p);
        }
        let root = c.compile(phi)?;
        let n = s.vertex_count();
        let guard_count = c.guards.len();
        Ok(Evaluator {
            s,
            root,
            vparams: vparams.len(),
            sparams: sparams.len(),
            vslots: c.max_v,
            sslots: c.max_s,
            guards: c.guards,
            hooks: c.hooks,
            domains: RefCell::new(vec![None; guard_count]),
            memo: RefCell::new(HashMap::new()),
            all: Rc::new((0..n).collect()),
        })
    }

    pub fn holds(&self, args: &[usize]) -> Result<bool, EvalError> {
        self.holds_with_sets(args, &[])
    }

    pub fn holds_with_sets(&self, args: &[usize], sets: &[BitSet]) -> Result<bool, EvalError> {
        if args.len() != self.vparams {
            return Err(EvalError::Arity {
                expected: self.vparams,
                got: args.len(),
            });
        }
        if sets.len() != self.sparams {
            return Err(EvalError::Arity {
                expected: self.sparams,
                got: sets.len(),
            });
        }
        let n = self.s.vertex_count();
        if let Some(&v) = args.iter().find(|&&v| v >= n) {
            return Err(EvalError::VertexOutOfRange {
                var: String::from("<param>"),
                vertex: v,
                n,
            });
        }
        let mut run = Run {
            vals: vec![0; self.vslots],
            sets: vec![BitSet::new(n); self.sslots],
        };
        run.vals[..args.len()].copy_from_slice(args);
        for (i, s) in sets.iter().enumerate() {
            run.sets[i] = s.clone();
        }
        self.eval(&self.root, &mut run)
    }

    /// Number of memo entries so far.
    pub fn memo_entries(&self) -> usize {
        self.memo.borrow().len()
    }

    fn domain(&self, guard: usize) -> Result<Rc<Vec<usize>>, EvalError> {
        if let Some(d) = &self.domains.borrow()[guard] {
            return Ok(d.clone());
        }
        let g = &self.guards[guard];
        let n = self.s.vertex_count();
        let mut run = Run {
            vals: vec![0; g.vslots.max(1)],
            sets: vec![BitSet::new(n); g.sslots],
        };
        let mut out = Vec::new();
        for v in 0..n {
            run.vals[0] = v;
            if self.eval(&g.node, &mut run)? {
                out.push(v);
            }
        }
        let d = Rc::new(out);
        self.domains.borrow_mut()[guard] = Some(d.clone());
        Ok(d)
    }

    fn memo_key(&self, m: &Memo, run: &Run) -> (u32, [usize; 3]) {
        let mut k = [usize::MAX; 3];
        for (i, &slot) in m.args.iter().enumerate() {
            k[i] = run.vals[slot];
        }
        (m.class, k)
    }

    fn eval(&self, node: &Node, run: &mut Run) -> Result<bool, EvalError> {
        Ok(match node {
            Node::Edge(x, y) => self.s.edge(run.vals[*x], run.vals[*y]),
            Node::Label(l, x) => self.s.has_label(run.vals[*x], *l),
            Node::Eq(x, y) => run.vals[*x] == run.vals[*y],
            Node::In(x, y) => run.sets[*y].contains(run.vals[*x]),
            Node::Not(a) => !self.eval(a, run)?,
            Node::And(a, b) => self.eval(a, run)? && self.eval(b, run)?,
            Node::Or(a, b) => self.eval(a, run)? || self.eval(b, run)?,
            Node::Implies(a, b) => !self.eval(a, run)? || self.eval(b, run)?,
            Node::Hook { index, args } => {
                let mut vals = [0usize; 4];
                for (i, &slot) in args.iter().enumerate() {
                    vals[i] = run.vals[slot];
                }
                (self.hooks[*index])(&vals[..args.len()])
            }
            Node::Vertex {
                exists,
                slot,
                guard,
                body,
                memo,
            } => {
                let key = memo.as_ref().map(|m| self.memo_key(m, run));
                if let Some(k) = &key {
                    if let Some(&v) = self.memo.borrow().get(k) {
                        return Ok(v);
                    }
                }
                let domain = match guard {
                    Some(g) => self.domain(*g)?,
                    None => self.all.clone(),
                };
                let mut result = !*exists;
                for &v in domain.iter() {
                    run.vals[*slot] = v;
                    if self.eval(body, run)? == *exists {
                        result = *exists;
                        break;
                    }
                }
                if let Some(k) = key {
                    self.memo.borrow_mut().insert(k, result);
                }
                result
            }
            Node::Set {
                exists,
                slot,
                domain,
                body,
                memo,
            } => {
                let key = memo.as_ref().map(|m| self.memo_key(m, run));
                if let Some(k) = &key {
                    if let Some(&v) = self.memo.borrow().get(k) {
                        return Ok(v);
                    }
                }
                let dom = match domain {
                    SetDomain::All => self.all.clone(),
                    SetDomain::Guards(gs) if gs.len() == 1 => self.domain(gs[0])?,
                    SetDomain::Guards(gs) => {
                        let mut u = BTreeSet::new();
                        for &g in gs {
                            u.extend(self.domain(g)?.iter().copied());
                        }
                        Rc::new(u.into_iter().collect())
                    }
                    SetDomain::Empty => Rc::new(Vec::new()),
                };
                if dom.len() > SET_DOMAIN_CEILING {
                    return Err(EvalError::Capacity {
                        size: dom.len(),
                        ceiling: SET_DOMAIN_CEILING,
                    });
                }
                let mut result = !*exists;
                run.sets[*slot].clear();
                for mask in 0u64..1u64 << dom.len() {
                    if mask != 0 {
                        // binary counter: flip the trailing ones off and the next bit on
                        let bit = mask.trailing_zeros() as usize;
                        for &v in &dom[..bit] {
                            run.sets[*slot].remove(v);
                        }
                        run.sets[*slot].insert(dom[bit]);
                    }
                    if self.eval(body, run)? == *exists {
                        result = *exists;
                        break;
                    }
                }
                if let Some(k) = key {
                    self.memo.borrow_mut().insert(k, result);
                }
                result
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mso::parse;

    fn sentence(g: &Graph, text: &str) -> bool {
        holds(g, &parse(text).unwrap()).unwrap()
    }

    #[test]
    fn one_vertex_sentence() {
        let f = "E x. A y. (x = y)";
        assert!(sentence(&Graph::new(1), f));
        assert!(!sentence(&Graph::new(2), f));
        assert!(!sentence(&Graph::new(0), f));
    }

    #[test]
    fn labels_and_errors() {
        let mut lg = LabeledGraph::new(Graph::new(1), vec!["A".into()]).unwrap();
        lg.add_label(0, "A").unwrap();
        let env = Assignment::new().with_vertex("x", 0);
        assert!(evaluate(&lg, &parse("lab_A(x)").unwrap(), &env).unwrap());
        assert_eq!(
            evaluate(&lg, &parse("lab_B(x)").unwrap(), &env),
            Err(EvalError::UnknownLabel("B".into()))
        );
        assert_eq!(
            evaluate(&lg, &parse("adj(x,y)").unwrap(), &env),
            Err(EvalError::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn arc_is_rejected_on_graphs() {
        let err = holds(&Graph::new(2), &parse("E x. E y. arc(x,y)").unwrap()).unwrap_err();
        assert!(matches!(err, EvalError::Signature { .. }));
        let d = Digraph::from_arcs(2, [(0, 1)]).unwrap();
        assert!(holds(&d, &parse("E x. E y. arc(x,y) & ~arc(y,x)").unwrap()).unwrap());
        assert!(holds(&d, &parse("E x. adj(x,x)").unwrap()).is_err());
    }

    #[test]
    fn set_bindings_are_honoured() {
        let g = Graph::path(3);
        let env = Assignment::new().with_set("X", [0, 2]);
        let f = parse("A x. A y. (x in X & y in X -> ~adj(x,y))").unwrap();
        assert!(evaluate(&g, &f, &env).unwrap());
        let env = Assignment::new().with_set("X", [0, 1]);
        assert!(!evaluate(&g, &f, &env).unwrap());
    }

    #[test]
    fn accelerations_preserve_truth() {
        let f = parse(
            "E R. A x. (lab_A(x) -> (x in R | E y. lab_A(y) & adj(x,y) & y in R)) & E z. lab_A(z) & z in R",
        )
        .unwrap();
        let mut lg = LabeledGraph::new(Graph::cycle(5), vec!["A".into()]).unwrap();
        for v in [0, 1, 3] {
            lg.add_label(v, "A").unwrap();
        }
        let env = Assignment::new();
        let plain = evaluate_with(&lg, &f, &env, EvalOptions::plain()).unwrap();
        let fast = evaluate_with(&lg, &f, &env, EvalOptions::fast()).unwrap();
        assert_eq!(plain, fast);
        assert!(plain);
    }

    #[test]
    fn capacity_is_reported() {
        let g = Graph::new(SET_DOMAIN_CEILING + 1);
        let err = holds(&g, &parse("E X. A x. x in X").unwrap()).unwrap_err();
        assert!(matches!(err, EvalError::Capacity { .. }));
    }

    #[test]
    fn outer_guard_bounds_an_inner_set() {
        // only two labeled vertices on a host too large to enumerate
        let mut lg = LabeledGraph::new(Graph::path(SET_DOMAIN_CEILING + 6), vec!["A".into()]).unwrap();
        lg.add_label(3, "A").unwrap();
        lg.add_label(4, "A").unwrap();
        for (text, expected) in [
            ("E v. lab_A(v) & A S. v in S | ~v in S", true),
            ("E v. lab_A(v) & A S. v in S", false),
            ("A v. lab_A(v) -> E w. lab_A(w) & adj(v,w) & E S. v in S & ~w in S", true),
        ] {
            let f = parse(text).unwrap();
            assert_eq!(evaluate_with(&lg, &f, &Assignment::new(), EvalOptions::fast()).unwrap(), expected, "{text}");
        }
    }
}
