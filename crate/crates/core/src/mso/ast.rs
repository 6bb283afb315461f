use std::collections::BTreeSet;
use std::fmt;

/// Vertex variables start with a lowercase letter, set variables with an
/// uppercase one. The kind is therefore a property of the name.
pub fn is_set_var(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

/// MSO₁-L formula. `Arc` belongs to the digraph signature only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Adj(String, String),
    Arc(String, String),
    Label(String, String),
    Eq(String, String),
    In(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ExistsVertex(String, Box<Formula>),
    ForallVertex(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

pub use Formula::*;

/// Shorthand constructors.
pub mod build {
    use super::Formula;

    pub fn adj(x: &str, y: &str) -> Formula {
        Formula::Adj(x.into(), y.into())
    }
    pub fn arc(x: &str, y: &str) -> Formula {
        Formula::Arc(x.into(), y.into())
    }
    pub fn lab(name: &str, x: &str) -> Formula {
        Formula::Label(name.into(), x.into())
    }
    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.into(), y.into())
    }
    pub fn is_in(x: &str, set: &str) -> Formula {
        Formula::In(x.into(), set.into())
    }
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn exists(x: &str, f: Formula) -> Formula {
        if super::is_set_var(x) {
            Formula::ExistsSet(x.into(), Box::new(f))
        } else {
            Formula::ExistsVertex(x.into(), Box::new(f))
        }
    }
    pub fn forall(x: &str, f: Formula) -> Formula {
        if super::is_set_var(x) {
            Formula::ForallSet(x.into(), Box::new(f))
        } else {
            Formula::ForallVertex(x.into(), Box::new(f))
        }
    }
    /// Left-nested conjunction; panics on an empty list.
    pub fn all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(and).expect("empty conjunction")
    }
    /// Left-nested disjunction; panics on an empty list.
    pub fn any(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().reduce(or).expect("empty disjunction")
    }
    /// `x = x`, true whenever `x` is bound.
    pub fn truth(x: &str) -> Formula {
        eq(x, x)
    }
    pub fn falsity(x: &str) -> Formula {
        not(eq(x, x))
    }
}

/// Free vertex and set variables of a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub vertex: BTreeSet<String>,
    pub set: BTreeSet<String>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.set.is_empty()
    }
}

impl Formula {
    /// Number of AST nodes; this is the formula size `|φ|`.
    pub fn size(&self) -> usize {
        match self {
            Adj(..) | Arc(..) | Label(..) | Eq(..) | In(..) => 1,
            Not(f)
            | ExistsVertex(_, f)
            | ForallVertex(_, f)
            | ExistsSet(_, f)
            | ForallSet(_, f) => 1 + f.size(),
            And(a, b) | Or(a, b) | Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn free_variables(&self) -> FreeVars {
        let mut out = FreeVars::default();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut FreeVars) {
        let mut note = |name: &str, bound: &[&str]| {
            if !bound.contains(&name) {
                if is_set_var(name) {
                    out.set.insert(name.to_string());
                } else {
                    out.vertex.insert(name.to_string());
                }
            }
        };
        match self {
            Adj(x, y) | Arc(x, y) | Eq(x, y) | In(x, y) => {
                note(x, bound);
                note(y, bound);
            }
            Label(_, x) => note(x, bound),
            Not(f) => f.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            ExistsVertex(x, f) | ForallVertex(x, f) | ExistsSet(x, f) | ForallSet(x, f) => {
                bound.push(x);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Label names used by `Label` atoms.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Label(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Adj(x, y) | Arc(x, y) | Eq(x, y) | In(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Label(_, x)
            | ExistsVertex(x, _)
            | ForallVertex(x, _)
            | ExistsSet(x, _)
            | ForallSet(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Not(g) | ExistsVertex(_, g) | ForallVertex(_, g) | ExistsSet(_, g) | ForallSet(_, g) => {
                g.visit(f)
            }
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn set_quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, ExistsSet(..) | ForallSet(..)) {
                n += 1
            }
        });
        n
    }

    pub fn vertex_quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, ExistsVertex(..) | ForallVertex(..)) {
                n += 1
            }
        });
        n
    }

    /// Renames free occurrences of vertex or set variables according to
    /// `map`. Bound variables of `self` that would capture a substituted
    /// name are not renamed here; callers substitute into formulas whose
    /// bound names are already fresh.
    pub fn rename_free(&self, map: &dyn Fn(&str) -> Option<String>) -> Formula {
        self.rename_free_inner(map, &mut Vec::new())
    }

    fn rename_free_inner<'a>(
        &'a self,
        map: &dyn Fn(&str) -> Option<String>,
        bound: &mut Vec<&'a str>,
    ) -> Formula {
        let r = |x: &String, bound: &[&str]| -> String {
            if bound.contains(&x.as_str()) {
                x.clone()
            } else {
                map(x).unwrap_or_else(|| x.clone())
            }
        };
        match self {
            Adj(x, y) => Adj(r(x, bound), r(y, bound)),
            Arc(x, y) => Arc(r(x, bound), r(y, bound)),
            Eq(x, y) => Eq(r(x, bound), r(y, bound)),
            In(x, y) => In(r(x, bound), r(y, bound)),
            Label(l, x) => Label(l.clone(), r(x, bound)),
            Not(f) => Not(Box::new(f.rename_free_inner(map, bound))),
            And(a, b) => And(
                Box::new(a.rename_free_inner(map, bound)),
                Box::new(b.rename_free_inner(map, bound)),
            ),
            Or(a, b) => Or(
                Box::new(a.rename_free_inner(map, bound)),
                Box::new(b.rename_free_inner(map, bound)),
            ),
            Implies(a, b) => Implies(
                Box::new(a.rename_free_inner(map, bound)),
                Box::new(b.rename_free_inner(map, bound)),
            ),
            ExistsVertex(x, f) | ForallVertex(x, f) | ExistsSet(x, f) | ForallSet(x, f) => {
                bound.push(x);
                let body = Box::new(f.rename_free_inner(map, bound));
                bound.pop();
                self.with_body(x.clone(), body)
            }
        }
    }

    /// Rebuilds a quantifier node with a new variable and body.
    pub(crate) fn with_body(&self, var: String, body: Box<Formula>) -> Formula {
        match self {
            ExistsVertex(..) => ExistsVertex(var, body),
            ForallVertex(..) => ForallVertex(var, body),
            ExistsSet(..) => ExistsSet(var, body),
            ForallSet(..) => ForallSet(var, body),
            _ => unreachable!("with_body on a non-quantifier"),
        }
    }

    /// Renames every bound variable to a fresh name from `fresh`, leaving
    /// free variables untouched.
    pub fn freshen_bound(&self, fresh: &mut dyn FnMut(bool) -> String) -> Formula {
        self.freshen_inner(fresh, &mut Vec::new())
    }

    fn freshen_inner(
        &self,
        fresh: &mut dyn FnMut(bool) -> String,
        scope: &mut Vec<(String, String)>,
    ) -> Formula {
        let r = |x: &String, scope: &[(String, String)]| -> String {
            scope
                .iter()
                .rev()
                .find(|(old, _)| old == x)
                .map_or_else(|| x.clone(), |(_, new)| new.clone())
        };
        match self {
            Adj(x, y) => Adj(r(x, scope), r(y, scope)),
            Arc(x, y) => Arc(r(x, scope), r(y, scope)),
            Eq(x, y) => Eq(r(x, scope), r(y, scope)),
            In(x, y) => In(r(x, scope), r(y, scope)),
            Label(l, x) => Label(l.clone(), r(x, scope)),
            Not(f) => Not(Box::new(f.freshen_inner(fresh, scope))),
            And(a, b) => And(
                Box::new(a.freshen_inner(fresh, scope)),
                Box::new(b.freshen_inner(fresh, scope)),
            ),
            Or(a, b) => Or(
                Box::new(a.freshen_inner(fresh, scope)),
                Box::new(b.freshen_inner(fresh, scope)),
            ),
            Implies(a, b) => Implies(
                Box::new(a.freshen_inner(fresh, scope)),
                Box::new(b.freshen_inner(fresh, scope)),
            ),
            ExistsVertex(x, f) | ForallVertex(x, f) | ExistsSet(x, f) | ForallSet(x, f) => {
                let new = fresh(is_set_var(x));
                scope.push((x.clone(), new.clone()));
                let body = Box::new(f.freshen_inner(fresh, scope));
                scope.pop();
                self.with_body(new, body)
            }
        }
    }
}

impl Formula {
    /// A key identifying `self` up to renaming of bound variables, together
    /// with its free variables in order of first occurrence. Two formulas
    /// have the same key iff they are equal after a bijective renaming of
    /// bound variables and an injective renaming of free variables that
    /// maps the first free list onto the second.
    pub fn alpha_key(&self) -> (String, Vec<String>) {
        let mut key = String::new();
        let mut free = Vec::new();
        let mut bound: Vec<(&str, usize)> = Vec::new();
        let mut next = 0;
        self.alpha_inner(&mut key, &mut free, &mut bound, &mut next);
        (key, free)
    }

    fn alpha_inner<'a>(
        &'a self,
        key: &mut String,
        free: &mut Vec<String>,
        bound: &mut Vec<(&'a str, usize)>,
        next: &mut usize,
    ) {
        use std::fmt::Write;
        let mut var = |key: &mut String, x: &str, bound: &[(&str, usize)]| {
            if let Some((_, id)) = bound.iter().rev().find(|(name, _)| *name == x) {
                let _ = write!(key, "b{id}");
            } else {
                let pos = match free.iter().position(|f| f == x) {
                    Some(p) => p,
                    None => {
                        free.push(x.to_string());
                        free.len() - 1
                    }
                };
                let _ = write!(key, "f{pos}");
            }
        };
        match self {
            Adj(x, y) | Arc(x, y) | Eq(x, y) | In(x, y) => {
                key.push_str(match self {
                    Adj(..) => "adj(",
                    Arc(..) => "arc(",
                    Eq(..) => "eq(",
                    _ => "in(",
                });
                var(key, x, bound);
                key.push(',');
                var(key, y, bound);
                key.push(')');
            }
            Label(l, x) => {
                let _ = write!(key, "lab_{l}(");
                var(key, x, bound);
                key.push(')');
            }
            Not(f) => {
                key.push('~');
                f.alpha_inner(key, free, bound, next);
            }
            And(a, b) | Or(a, b) | Implies(a, b) => {
                key.push_str(match self {
                    And(..) => "&(",
                    Or(..) => "|(",
                    _ => ">(",
                });
                a.alpha_inner(key, free, bound, next);
                key.push(',');
                b.alpha_inner(key, free, bound, next);
                key.push(')');
            }
            ExistsVertex(x, f) | ForallVertex(x, f) | ExistsSet(x, f) | ForallSet(x, f) => {
                let id = *next;
                *next += 1;
                key.push_str(match self {
                    ExistsVertex(..) => "Ev",
                    ForallVertex(..) => "Av",
                    ExistsSet(..) => "ES",
                    _ => "AS",
                });
                let _ = write!(key, "{id}.");
                bound.push((x, id));
                f.alpha_inner(key, free, bound, next);
                bound.pop();
            }
        }
    }
}

// Precedence levels for printing: higher binds tighter.
const PREC_QUANT: u8 = 0;
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            ExistsVertex(..) | ForallVertex(..) | ExistsSet(..) | ForallSet(..) => PREC_QUANT,
            Implies(..) => PREC_IMPLIES,
            Or(..) => PREC_OR,
            And(..) => PREC_AND,
            _ => PREC_NOT,
        }
    }

    /// Writes `self` so that it re-parses to the same tree. `min` is the
    /// loosest precedence the context accepts without parentheses and
    /// `open_right` says whether a quantifier may extend to the right.
    fn write(&self, out: &mut String, min: u8, open_right: bool) {
        let p = self.prec();
        let paren = if p == PREC_QUANT { !open_right } else { p < min };
        if paren {
            out.push('(');
        }
        let inner_open = paren || open_right;
        match self {
            Adj(x, y) => out.push_str(&format!("adj({x},{y})")),
            Arc(x, y) => out.push_str(&format!("arc({x},{y})")),
            Label(l, x) => out.push_str(&format!("lab_{l}({x})")),
            Eq(x, y) => out.push_str(&format!("{x} = {y}")),
            In(x, y) => out.push_str(&format!("{x} in {y}")),
            Not(f) => {
                out.push('~');
                f.write(out, PREC_NOT, inner_open);
            }
            // & and | are left-associative, -> is right-associative
            And(a, b) => {
                a.write(out, PREC_AND, false);
                out.push_str(" & ");
                b.write(out, PREC_AND + 1, inner_open);
            }
            Or(a, b) => {
                a.write(out, PREC_OR, false);
                out.push_str(" | ");
                b.write(out, PREC_OR + 1, inner_open);
            }
            Implies(a, b) => {
                a.write(out, PREC_IMPLIES + 1, false);
                out.push_str(" -> ");
                b.write(out, PREC_IMPLIES, inner_open);
            }
            ExistsVertex(x, f) | ExistsSet(x, f) => {
                out.push_str(&format!("E {x}. "));
                f.write(out, PREC_QUANT, true);
            }
            ForallVertex(x, f) | ForallSet(x, f) => {
                out.push_str(&format!("A {x}. "));
                f.write(out, PREC_QUANT, true);
            }
        }
        if paren {
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, PREC_QUANT, true);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::build::*;

    #[test]
    fn sizes() {
        assert_eq!(adj("x", "y").size(), 1);
        assert_eq!(not(adj("x", "y")).size(), 2);
    }

    #[test]
    fn free_variables_respect_binding() {
        let fv = adj("x", "y").free_variables();
        assert_eq!(fv.vertex, ["x", "y"].iter().map(|s| s.to_string()).collect());
        assert!(fv.set.is_empty());
        let fv = exists("x", adj("x", "y")).free_variables();
        assert_eq!(fv.vertex, ["y".to_string()].into_iter().collect());
        let fv = forall("X", is_in("x", "X")).free_variables();
        assert!(fv.set.is_empty());
        assert_eq!(fv.vertex.len(), 1);
    }

    #[test]
    fn printing_parenthesizes_by_precedence() {
        let f = and(or(adj("x", "y"), eq("x", "y")), not(exists("z", adj("x", "z"))));
        assert_eq!(f.to_string(), "(adj(x,y) | x = y) & ~E z. adj(x,z)");
        let f = and(not(exists("z", adj("x", "z"))), eq("x", "x"));
        assert_eq!(f.to_string(), "~(E z. adj(x,z)) & x = x");
        let f = implies(implies(adj("x", "y"), adj("y", "x")), adj("x", "x"));
        assert_eq!(f.to_string(), "(adj(x,y) -> adj(y,x)) -> adj(x,x)");
        let f = and(exists("x", eq("x", "x")), eq("y", "y"));
        assert_eq!(f.to_string(), "(E x. x = x) & y = y");
        let f = and(eq("y", "y"), exists("x", eq("x", "x")));
        assert_eq!(f.to_string(), "y = y & E x. x = x");
    }

    #[test]
    fn alpha_keys_ignore_bound_names() {
        let f = exists("z", and(adj("x", "z"), adj("z", "y")));
        let g = exists("w", and(adj("a", "w"), adj("w", "b")));
        let (kf, ff) = f.alpha_key();
        let (kg, fg) = g.alpha_key();
        assert_eq!(kf, kg);
        assert_eq!(ff, vec!["x", "y"]);
        assert_eq!(fg, vec!["a", "b"]);
        let h = exists("w", and(adj("a", "w"), adj("w", "a")));
        assert_ne!(h.alpha_key().0, kf);
    }

    #[test]
    fn freshening_keeps_free_names() {
        let f = exists("z", and(adj("x", "z"), forall("Z", is_in("z", "Z"))));
        let mut i = 0;
        let g = f.freshen_bound(&mut |set| {
            i += 1;
            if set {
                format!("S{i}")
            } else {
                format!("v{i}")
            }
        });
        assert_eq!(g.to_string(), "E v1. adj(x,v1) & A S2. v1 in S2");
    }
}
