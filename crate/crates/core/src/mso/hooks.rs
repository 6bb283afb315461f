//! Native replacements for designated subformulas.
//!
//! A hook pairs a template formula with a native procedure that decides it.
//! The evaluator substitutes the procedure for every subformula that equals
//! the template up to renaming of bound variables and a renaming of the
//! template parameters. Hooks are only usable through [`CertifiedHooks`],
//! which can only be obtained by checking native against full expansion on
//! every argument tuple of every host in the hook's conformance corpus.

use std::collections::HashMap;
use std::fmt;
use std::mem::Discriminant;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use super::ast::{is_set_var, Formula};
use super::eval::{EvalError, EvalOptions, Evaluator, Structure};
use crate::graphs::LabeledGraph;

/// A native predicate specialised to one structure.
pub type PreparedNative = Box<dyn Fn(&[usize]) -> bool>;
/// Builds a [`PreparedNative`] for a structure, typically precomputing
/// component ids or degrees.
pub type NativeFn = Arc<dyn Fn(&dyn Structure) -> PreparedNative + Send + Sync>;
/// Hosts on which a hook is checked before use.
pub type CorpusFn = Arc<dyn Fn() -> Vec<LabeledGraph> + Send + Sync>;

/// Largest hook arity.
pub const MAX_HOOK_PARAMS: usize = 4;

/// Hosts in a conformance corpus may have at most this many vertices.
pub const CONFORMANCE_HOST_CEILING: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HookError {
    #[error("hook `{name}`: {reason}")]
    InvalidTemplate { name: String, reason: String },
    #[error("hook `{hook}` disagrees with its formula on corpus host {host} at {args:?}")]
    Disagreement {
        hook: String,
        host: usize,
        args: Vec<usize>,
    },
    #[error("hook `{hook}`: corpus host {host} has {n} vertices, above the ceiling of {ceiling}")]
    HostTooLarge {
        hook: String,
        host: usize,
        n: usize,
        ceiling: usize,
    },
    #[error("hook `{hook}`: {source}")]
    Eval { hook: String, source: EvalError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookTemplate {
    pub name: String,
    pub params: Vec<String>,
    pub formula: Formula,
}

impl HookTemplate {
    /// `params` must be exactly the free variables of `formula`, all of them
    /// vertex variables.
    pub fn new(name: &str, params: &[&str], formula: Formula) -> Result<Self, HookError> {
        let bad = |reason: String| HookError::InvalidTemplate {
            name: name.to_string(),
            reason,
        };
        if params.len() > MAX_HOOK_PARAMS {
            return Err(bad(format!("more than {MAX_HOOK_PARAMS} parameters")));
        }
        let fv = formula.free_variables();
        if !fv.set.is_empty() {
            return Err(bad("free set variables are not supported".into()));
        }
        let mut sorted: Vec<&str> = params.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != params.len() || params.iter().any(|p| is_set_var(p)) {
            return Err(bad("parameters must be distinct vertex variables".into()));
        }
        let free: Vec<&str> = fv.vertex.iter().map(String::as_str).collect();
        if free != sorted {
            return Err(bad(format!(
                "parameters {params:?} differ from free variables {free:?}"
            )));
        }
        Ok(HookTemplate {
            name: name.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
            formula,
        })
    }
}

#[derive(Clone)]
pub struct Hook {
    pub template: HookTemplate,
    pub native: NativeFn,
    pub corpus: CorpusFn,
}

impl fmt::Debug for Hook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hook")
            .field("name", &self.template.name)
            .field("params", &self.template.params)
            .finish_non_exhaustive()
    }
}

/// Outcome of checking one hook against full expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformanceReport {
    pub hook: String,
    pub hosts: usize,
    pub checks: usize,
    pub disagreements: usize,
    /// First disagreement as (host index, arguments).
    pub first: Option<(usize, Vec<usize>)>,
}

/// Checks `hook` on every argument tuple of every host in `hosts`.
pub fn check_conformance(hook: &Hook, hosts: &[LabeledGraph]) -> Result<ConformanceReport, HookError> {
    let t = &hook.template;
    let params: Vec<&str> = t.params.iter().map(String::as_str).collect();
    let k = params.len();
    let mut report = ConformanceReport {
        hook: t.name.clone(),
        hosts: hosts.len(),
        checks: 0,
        disagreements: 0,
        first: None,
    };
    let expansion = EvalOptions {
        hooks: None,
        restrict_domains: false,
        memoize: true,
        miniscope: false,
    };
    for (hi, host) in hosts.iter().enumerate() {
        let n = host.vertex_count();
        if n > CONFORMANCE_HOST_CEILING {
            return Err(HookError::HostTooLarge {
                hook: t.name.clone(),
                host: hi,
                n,
                ceiling: CONFORMANCE_HOST_CEILING,
            });
        }
        let ev = Evaluator::prepare(host, &t.formula, &params, expansion).map_err(|source| {
            HookError::Eval {
                hook: t.name.clone(),
                source,
            }
        })?;
        let native = (hook.native)(host);
        let mut args = vec![0usize; k];
        let total = n.pow(k as u32);
        for idx in 0..total {
            let mut r = idx;
            for a in args.iter_mut() {
                *a = r % n;
                r /= n;
            }
            let expected = ev.holds(&args).map_err(|source| HookError::Eval {
                hook: t.name.clone(),
                source,
            })?;
            report.checks += 1;
            if native(&args) != expected {
                report.disagreements += 1;
                if report.first.is_none() {
                    report.first = Some((hi, args.clone()));
                }
            }
        }
    }
    Ok(report)
}

/// A named family of hooks awaiting certification. The name must identify
/// the family's contents, since certified sets are cached by name.
#[derive(Clone, Debug)]
pub struct HookSet {
    pub name: String,
    pub hooks: Vec<Hook>,
}

impl HookSet {
    pub fn new(name: impl Into<String>, hooks: Vec<Hook>) -> Self {
        HookSet {
            name: name.into(),
            hooks,
        }
    }

    pub fn conformance(&self) -> Result<Vec<ConformanceReport>, HookError> {
        self.hooks
            .iter()
            .map(|h| check_conformance(h, &(h.corpus)()))
            .collect()
    }

    /// Runs the conformance corpus and refuses on any disagreement.
    pub fn certify(self) -> Result<CertifiedHooks, HookError> {
        let reports = self.conformance()?;
        for r in &reports {
            if let Some((host, args)) = &r.first {
                return Err(HookError::Disagreement {
                    hook: r.hook.clone(),
                    host: *host,
                    args: args.clone(),
                });
            }
        }
        log::info!(
            "certified hook set `{}` ({} checks)",
            self.name,
            reports.iter().map(|r| r.checks).sum::<usize>()
        );
        Ok(CertifiedHooks::from_parts(self.name, self.hooks, reports))
    }

    /// Like [`HookSet::certify`], but each name is certified once per process.
    pub fn certified(self) -> Result<Arc<CertifiedHooks>, HookError> {
        static CACHE: OnceLock<Mutex<HashMap<String, Arc<CertifiedHooks>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(c) = cache.lock().unwrap().get(&self.name) {
            return Ok(c.clone());
        }
        let name = self.name.clone();
        let certified = Arc::new(self.certify()?);
        Ok(cache
            .lock()
            .unwrap()
            .entry(name)
            .or_insert(certified)
            .clone())
    }
}

/// Hooks that passed their conformance corpus.
pub struct CertifiedHooks {
    name: String,
    hooks: Vec<Hook>,
    // alpha key -> (hook index, template param i sits at free position arg_positions[i])
    by_key: HashMap<String, (usize, Vec<usize>)>,
    shapes: Vec<(Discriminant<Formula>, usize)>,
    reports: Vec<ConformanceReport>,
}

impl fmt::Debug for CertifiedHooks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CertifiedHooks")
            .field("name", &self.name)
            .field("hooks", &self.hooks)
            .finish_non_exhaustive()
    }
}

impl CertifiedHooks {
    fn from_parts(name: String, hooks: Vec<Hook>, reports: Vec<ConformanceReport>) -> Self {
        let mut by_key = HashMap::new();
        let mut shapes = Vec::new();
        for (i, h) in hooks.iter().enumerate() {
            let (key, free) = h.template.formula.alpha_key();
            let positions = h
                .template
                .params
                .iter()
                .map(|p| free.iter().position(|f| f == p).unwrap())
                .collect();
            by_key.entry(key).or_insert((i, positions));
            shapes.push((
                std::mem::discriminant(&h.template.formula),
                h.template.formula.size(),
            ));
        }
        CertifiedHooks {
            name,
            hooks,
            by_key,
            shapes,
            reports,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn hooks(&self) -> &[Hook] {
        &self.hooks
    }

    pub fn reports(&self) -> &[ConformanceReport] {
        &self.reports
    }

    pub(crate) fn lookup(&self, key: &str) -> Option<(usize, &[usize])> {
        self.by_key.get(key).map(|(i, p)| (*i, p.as_slice()))
    }

    pub(crate) fn shapes(&self) -> Vec<(Discriminant<Formula>, usize)> {
        self.shapes.clone()
    }

    pub(crate) fn prepare(&self, index: usize, s: &dyn Structure) -> PreparedNative {
        (self.hooks[index].native)(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::mso::{evaluate_with, parse, Assignment};

    fn reach_hook() -> Hook {
        // x and y in the same component
        let f = parse("A Z. (x in Z & ~y in Z) -> E u. E v. u in Z & ~v in Z & adj(u,v)").unwrap();
        let native: NativeFn = Arc::new(|s: &dyn Structure| {
            let n = s.vertex_count();
            let mut comp: Vec<usize> = (0..n).collect();
            fn find(c: &mut Vec<usize>, x: usize) -> usize {
                if c[x] != x {
                    let r = find(c, c[x]);
                    c[x] = r;
                }
                c[x]
            }
            for u in 0..n {
                for v in s.neighbors(u) {
                    let (a, b) = (find(&mut comp, u), find(&mut comp, v));
                    comp[a] = b;
                }
            }
            let ids: Vec<usize> = (0..n).map(|v| find(&mut comp, v)).collect();
            Box::new(move |a: &[usize]| ids[a[0]] == ids[a[1]])
        });
        Hook {
            template: HookTemplate::new("reach", &["x", "y"], f).unwrap(),
            native,
            corpus: Arc::new(|| {
                vec![
                    LabeledGraph::unlabeled(Graph::path(4)),
                    LabeledGraph::unlabeled(Graph::from_edges(5, [(0, 1), (2, 3)]).unwrap()),
                ]
            }),
        }
    }

    #[test]
    fn template_validation() {
        let f = parse("adj(x,y)").unwrap();
        assert!(HookTemplate::new("t", &["x"], f.clone()).is_err());
        assert!(HookTemplate::new("t", &["x", "y"], f).is_ok());
    }

    #[test]
    fn certified_hook_matches_renamed_subformulas() {
        let hooks = HookSet::new("test-reach", vec![reach_hook()]).certify().unwrap();
        assert_eq!(hooks.reports()[0].disagreements, 0);
        // the template with renamed bound and free variables, used twice
        let f = parse(
            "E a. E b. ~a = b & (A W. (b in W & ~a in W) -> E p. E q. p in W & ~q in W & adj(p,q))",
        )
        .unwrap();
        for g in [
            Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap(),
            Graph::new(3),
        ] {
            let lg = LabeledGraph::unlabeled(g);
            let plain = evaluate_with(&lg, &f, &Assignment::new(), EvalOptions::plain()).unwrap();
            let hooked =
                evaluate_with(&lg, &f, &Assignment::new(), EvalOptions::with_hooks(&hooks)).unwrap();
            assert_eq!(plain, hooked);
        }
    }

    #[test]
    fn wrong_native_is_refused() {
        let mut h = reach_hook();
        h.native = Arc::new(|_: &dyn Structure| Box::new(|_: &[usize]| true));
        let err = HookSet::new("test-wrong", vec![h]).certify().unwrap_err();
        assert!(matches!(err, HookError::Disagreement { .. }));
    }
}
