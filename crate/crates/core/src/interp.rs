//! One-dimensional interpretations: translating formulas and inducing
//! structures.
//!
//! An interpretation `I = (α(x), β(x,y), β_L(x) …)` maps a host structure
//! `H` to `H^I` (domain `α`, edges `β`, labels `β_L`) and a formula `φ` to
//! `φ^I` with `H ⊨ φ^I ⇔ H^I ⊨ φ` for sentences.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::graphs::{Graph, LabeledGraph};
use crate::mso::build::{and, implies, not, or};
use crate::mso::{
    is_set_var, parse, EvalError, EvalOptions, Evaluator, Formula, ParseError, Structure,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("no beta formula for target label `{0}`")]
    MissingBeta(String),
    #[error("`arc` atoms cannot be translated: the target signature is undirected")]
    ArcUnsupported,
    #[error("{which} has free variables {found:?}, allowed {allowed:?}")]
    FreeVariables {
        which: String,
        found: Vec<String>,
        allowed: Vec<String>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Parameter of `alpha` and the label formulas.
pub const X: &str = "x";
/// Second parameter of `beta_adj`.
pub const Y: &str = "y";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    alpha: Formula,
    beta_adj: Formula,
    beta_labels: BTreeMap<String, Formula>,
}

fn check_free(which: &str, f: &Formula, allowed: &[&str]) -> Result<(), InterpError> {
    let fv = f.free_variables();
    let found: Vec<String> = fv.vertex.iter().chain(fv.set.iter()).cloned().collect();
    if found.iter().any(|v| !allowed.contains(&v.as_str())) {
        return Err(InterpError::FreeVariables {
            which: which.to_string(),
            found,
            allowed: allowed.iter().map(|s| s.to_string()).collect(),
        });
    }
    Ok(())
}

impl Interpretation {
    /// `alpha` and label formulas may only have `x` free, `beta_adj` only
    /// `x` and `y`. `beta_adj` should be symmetric: the translation uses
    /// it in the order written while the induced structure symmetrizes it.
    pub fn new(
        alpha: Formula,
        beta_adj: Formula,
        beta_labels: BTreeMap<String, Formula>,
    ) -> Result<Self, InterpError> {
        check_free("alpha", &alpha, &[X])?;
        check_free("beta_adj", &beta_adj, &[X, Y])?;
        for (name, f) in &beta_labels {
            check_free(&format!("beta_lab_{name}"), f, &[X])?;
        }
        Ok(Interpretation {
            alpha,
            beta_adj,
            beta_labels,
        })
    }

    /// `α ≡ true`, `β ≡ adj`.
    pub fn identity() -> Self {
        Interpretation::new(
            Formula::Eq(X.into(), X.into()),
            Formula::Adj(X.into(), Y.into()),
            BTreeMap::new(),
        )
        .unwrap()
    }

    pub fn alpha(&self) -> &Formula {
        &self.alpha
    }

    pub fn beta_adj(&self) -> &Formula {
        &self.beta_adj
    }

    pub fn beta_labels(&self) -> &BTreeMap<String, Formula> {
        &self.beta_labels
    }

    /// Largest formula of the interpretation.
    pub fn max_size(&self) -> usize {
        self.beta_labels
            .values()
            .map(Formula::size)
            .chain([self.alpha.size(), self.beta_adj.size()])
            .max()
            .unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alpha: {}", self.alpha);
        let _ = writeln!(out, "beta_adj: {}", self.beta_adj);
        for (name, f) in &self.beta_labels {
            let _ = writeln!(out, "beta_lab_{name}: {f}");
        }
        out
    }

    /// Reads `alpha: F`, `beta_adj: F` and `beta_lab_NAME: F` entries. A
    /// key may name its parameters (`alpha(u): …`, `beta_adj(u,v): …`);
    /// they are renamed to `x` and `y`. Lines without a key continue the
    /// previous entry and `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self, InterpError> {
        struct Entry {
            key: String,
            params: Vec<String>,
            body: String,
            line: usize,
        }
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            if let Some((head, rest)) = split_key(line) {
                let (key, params) = parse_head(head).ok_or_else(|| InterpError::Format {
                    line: i + 1,
                    message: format!("malformed key `{head}`"),
                })?;
                entries.push(Entry {
                    key,
                    params,
                    body: rest.to_string(),
                    line: i + 1,
                });
            } else if let Some(last) = entries.last_mut() {
                last.body.push('\n');
                last.body.push_str(line);
            } else {
                return Err(InterpError::Format {
                    line: i + 1,
                    message: "expected `alpha:`, `beta_adj:` or `beta_lab_NAME:`".into(),
                });
            }
        }
        let mut alpha = None;
        let mut beta = None;
        let mut labels = BTreeMap::new();
        for e in entries {
            let f = parse(&e.body).map_err(|source| InterpError::Parse {
                line: e.line,
                source,
            })?;
            let (expected, target): (usize, &[&str]) = if e.key == "beta_adj" {
                (2, &[X, Y])
            } else {
                (1, &[X])
            };
            let params: Vec<String> = if e.params.is_empty() {
                target.iter().map(|s| s.to_string()).collect()
            } else {
                e.params.clone()
            };
            if params.len() != expected || params.iter().any(|p| is_set_var(p)) {
                return Err(InterpError::Format {
                    line: e.line,
                    message: format!("`{}` takes {expected} vertex parameter(s)", e.key),
                });
            }
            let f = rename_params(&f, &params, target);
            let slot = match e.key.as_str() {
                "alpha" => &mut alpha,
                "beta_adj" => &mut beta,
                k => match k.strip_prefix("beta_lab_") {
                    Some(name) if !name.is_empty() => {
                        if labels.insert(name.to_string(), f).is_some() {
                            return Err(InterpError::Format {
                                line: e.line,
                                message: format!("duplicate entry for label `{name}`"),
                            });
                        }
                        continue;
                    }
                    _ => {
                        return Err(InterpError::Format {
                            line: e.line,
                            message: format!("unknown key `{k}`"),
                        })
                    }
                },
            };
            if slot.replace(f).is_some() {
                return Err(InterpError::Format {
                    line: e.line,
                    message: format!("duplicate `{}`", e.key),
                });
            }
        }
        let missing = |k: &str| InterpError::Format {
            line: 0,
            message: format!("missing `{k}` entry"),
        };
        Interpretation::new(
            alpha.ok_or_else(|| missing("alpha"))?,
            beta.ok_or_else(|| missing("beta_adj"))?,
            labels,
        )
    }
}

fn split_key(line: &str) -> Option<(&str, &str)> {
    let (head, rest) = line.split_once(':')?;
    let head = head.trim();
    let name_end = head.find('(').unwrap_or(head.len());
    let name = &head[..name_end];
    if name == "alpha" || name == "beta_adj" || name.starts_with("beta_lab_") {
        Some((head, rest))
    } else {
        None
    }
}

fn parse_head(head: &str) -> Option<(String, Vec<String>)> {
    match head.split_once('(') {
        None => Some((head.to_string(), Vec::new())),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')')?;
            let params = inner.split(',').map(|p| p.trim().to_string()).collect();
            Some((name.to_string(), params))
        }
    }
}

/// Simultaneously renames free `from[i]` to `to[i]`, first moving bound
/// variables out of the way.
fn rename_params(f: &Formula, from: &[String], to: &[&str]) -> Formula {
    if from.iter().zip(to).all(|(a, b)| a == b) {
        return f.clone();
    }
    let mut fresh = FreshNames::avoiding(f);
    for t in to {
        fresh.reserve(t);
    }
    let g = f.freshen_bound(&mut |set| fresh.next(set));
    g.rename_free(&|v| from.iter().position(|p| p == v).map(|i| to[i].to_string()))
}

/// Generator of variable names not occurring in a set of formulas.
struct FreshNames {
    used: BTreeSet<String>,
    counter: usize,
}

impl FreshNames {
    fn avoiding(f: &Formula) -> Self {
        FreshNames {
            used: f.variable_names(),
            counter: 0,
        }
    }

    fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    fn next(&mut self, set: bool) -> String {
        loop {
            self.counter += 1;
            let name = if set {
                format!("S{}", self.counter)
            } else {
                format!("t{}", self.counter)
            };
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

struct Translator<'a> {
    i: &'a Interpretation,
    fresh: FreshNames,
}

impl Translator<'_> {
    /// A copy of `f` with fresh bound variables and parameters replaced.
    fn instance(&mut self, f: &Formula, args: &[(&str, &str)]) -> Formula {
        let fresh = &mut self.fresh;
        let g = f.freshen_bound(&mut |set| fresh.next(set));
        g.rename_free(&|v| {
            args.iter()
                .find(|(p, _)| *p == v)
                .map(|(_, a)| a.to_string())
        })
    }

    fn go(&mut self, f: &Formula) -> Result<Formula, InterpError> {
        use Formula as F;
        Ok(match f {
            F::Adj(x, y) => {
                // induced structures are loopless, so adjacency needs x ≠ y
                let beta = self.i.beta_adj.clone();
                and(
                    not(F::Eq(x.clone(), y.clone())),
                    self.instance(&beta, &[(X, x), (Y, y)]),
                )
            }
            F::Arc(..) => return Err(InterpError::ArcUnsupported),
            F::Label(l, x) => {
                let beta = self
                    .i
                    .beta_labels
                    .get(l)
                    .ok_or_else(|| InterpError::MissingBeta(l.clone()))?
                    .clone();
                self.instance(&beta, &[(X, x)])
            }
            F::Eq(..) | F::In(..) => f.clone(),
            F::Not(a) => not(self.go(a)?),
            F::And(a, b) => and(self.go(a)?, self.go(b)?),
            F::Or(a, b) => or(self.go(a)?, self.go(b)?),
            F::Implies(a, b) => implies(self.go(a)?, self.go(b)?),
            F::ExistsVertex(x, body) => {
                let alpha = self.i.alpha.clone();
                let guard = self.instance(&alpha, &[(X, x)]);
                F::ExistsVertex(x.clone(), Box::new(and(guard, self.go(body)?)))
            }
            F::ForallVertex(x, body) => {
                let alpha = self.i.alpha.clone();
                let guard = self.instance(&alpha, &[(X, x)]);
                F::ForallVertex(x.clone(), Box::new(implies(guard, self.go(body)?)))
            }
            F::ExistsSet(x, body) => F::ExistsSet(x.clone(), Box::new(self.go(body)?)),
            F::ForallSet(x, body) => F::ForallSet(x.clone(), Box::new(self.go(body)?)),
        })
    }
}

/// `φ^I`. Variables of `phi` keep their names; bound variables of the
/// substituted `α`/`β` instances get fresh names, so nothing is captured.
pub fn translate(phi: &Formula, i: &Interpretation) -> Result<Formula, InterpError> {
    let mut fresh = FreshNames::avoiding(phi);
    for f in [&i.alpha, &i.beta_adj].into_iter().chain(i.beta_labels.values()) {
        for v in f.variable_names() {
            fresh.reserve(&v);
        }
    }
    Translator { i, fresh }.go(phi)
}

/// Upper bound on `|translate(phi, i)|`.
pub fn translation_size_bound(phi: &Formula, i: &Interpretation) -> usize {
    phi.size() * (i.max_size() + 3)
}

/// `H^I` together with the host vertex behind each of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedStructure {
    pub structure: LabeledGraph,
    /// `domain[v]` is the host vertex that became vertex `v`.
    pub domain: Vec<usize>,
}

/// Computes `H^I`: vertices satisfying `α` in host order, an edge `{a,b}`
/// for `a ≠ b` when `β(a,b) ∨ β(b,a)` holds (loops are dropped), and the
/// labels given by `β_L`.
pub fn induced_structure(
    host: &dyn Structure,
    i: &Interpretation,
    opts: EvalOptions<'_>,
) -> Result<InducedStructure, InterpError> {
    let alpha = Evaluator::prepare(host, &i.alpha, &[X], opts)?;
    let mut domain = Vec::new();
    for v in 0..host.vertex_count() {
        if alpha.holds(&[v])? {
            domain.push(v);
        }
    }
    let beta = Evaluator::prepare(host, &i.beta_adj, &[X, Y], opts)?;
    let mut g = Graph::new(domain.len());
    for (ia, &a) in domain.iter().enumerate() {
        for (ib, &b) in domain.iter().enumerate().skip(ia + 1) {
            if beta.holds(&[a, b])? || beta.holds(&[b, a])? {
                g.add_edge(ia, ib).expect("distinct in-range vertices");
            }
        }
    }
    let alphabet: Vec<String> = i.beta_labels.keys().cloned().collect();
    let mut lg = LabeledGraph::new(g, alphabet).expect("map keys are distinct");
    for (li, f) in i.beta_labels.values().enumerate() {
        let ev = Evaluator::prepare(host, f, &[X], opts)?;
        for (iv, &v) in domain.iter().enumerate() {
            if ev.holds(&[v])? {
                lg.add_label_index(iv, li).expect("in range");
            }
        }
    }
    Ok(InducedStructure {
        structure: lg,
        domain,
    })
}

/// Rewrites `adj(x,y)` as `arc(x,y) | arc(y,x)` so that the formula can be
/// evaluated on any orientation of a graph.
pub fn to_directed_formula(phi: &Formula) -> Formula {
    use Formula as F;
    match phi {
        F::Adj(x, y) => or(
            F::Arc(x.clone(), y.clone()),
            F::Arc(y.clone(), x.clone()),
        ),
        F::Arc(..) | F::Label(..) | F::Eq(..) | F::In(..) => phi.clone(),
        F::Not(a) => not(to_directed_formula(a)),
        F::And(a, b) => and(to_directed_formula(a), to_directed_formula(b)),
        F::Or(a, b) => or(to_directed_formula(a), to_directed_formula(b)),
        F::Implies(a, b) => implies(to_directed_formula(a), to_directed_formula(b)),
        F::ExistsVertex(..) | F::ForallVertex(..) | F::ExistsSet(..) | F::ForallSet(..) => {
            let (x, body) = match phi {
                F::ExistsVertex(x, b)
                | F::ForallVertex(x, b)
                | F::ExistsSet(x, b)
                | F::ForallSet(x, b) => (x, b),
                _ => unreachable!(),
            };
            phi.with_body(x.clone(), Box::new(to_directed_formula(body)))
        }
    }
}
