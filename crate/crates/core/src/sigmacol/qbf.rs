//! Prenex CNF formulas `∃x̃¹ ∀x̃² ⋯ ∃x̃ᵏ φ` and their QDIMACS text form.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::SigmaColError;

/// Largest variable count `evaluate_qbf` accepts.
pub const QBF_VARIABLE_CEILING: usize = 20;

/// Variables are `1..=vars`; literal `-v` is the negation of `v`. Block `i`
/// (0-based) is existential for even `i`, and the block count is odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    vars: usize,
    blocks: Vec<Vec<usize>>,
    clauses: Vec<Vec<i64>>,
}

fn qerr(line: usize, message: impl Into<String>) -> SigmaColError {
    SigmaColError::Qdimacs {
        line,
        message: message.into(),
    }
}

impl QbfFormula {
    /// Variables missing from every block join the first (existential)
    /// block. The block count must be odd.
    pub fn new(vars: usize, mut blocks: Vec<Vec<usize>>, clauses: Vec<Vec<i64>>) -> Result<Self, SigmaColError> {
        if blocks.len().is_multiple_of(2) {
            return Err(SigmaColError::EvenK(blocks.len()));
        }
        let mut seen = BTreeSet::new();
        for b in &blocks {
            for &v in b {
                if v == 0 || v > vars || !seen.insert(v) {
                    return Err(qerr(0, format!("variable {v} is out of range or quantified twice")));
                }
            }
        }
        for c in &clauses {
            if let Some(&l) = c.iter().find(|l| l.unsigned_abs() as usize > vars || **l == 0) {
                return Err(qerr(0, format!("literal {l} is out of range")));
            }
        }
        blocks[0].extend((1..=vars).filter(|v| !seen.contains(v)));
        blocks[0].sort_unstable();
        Ok(QbfFormula { vars, blocks, clauses })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.vars + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                out[v] = i;
            }
        }
        out
    }
}

/// Parses QDIMACS: `c` comments, a `p cnf <vars> <clauses>` header,
/// quantifier lines `e …  0` / `a … 0`, then clause lines ending in `0`.
/// Adjacent blocks of one kind merge, a leading universal block gets an
/// empty existential block in front, and a trailing universal block gets an
/// empty existential block behind, so the block count is always odd.
pub fn parse_qdimacs(text: &str) -> Result<QbfFormula, SigmaColError> {
    let mut header: Option<(usize, usize)> = None;
    let mut blocks: Vec<(bool, Vec<usize>)> = Vec::new();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let first = toks.next().unwrap();
        if first == "p" {
            let rest: Vec<&str> = toks.collect();
            match rest.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| qerr(line, "bad variable count"))?;
                    let c = c.parse().map_err(|_| qerr(line, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(qerr(line, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        if header.is_none() {
            return Err(qerr(line, "missing `p cnf` header"));
        }
        if first == "e" || first == "a" {
            if !clauses.is_empty() || !pending.is_empty() {
                return Err(qerr(line, "quantifier line after clauses"));
            }
            let mut vars = Vec::new();
            let mut closed = false;
            for tok in toks {
                let v: usize = tok.parse().map_err(|_| qerr(line, format!("bad variable `{tok}`")))?;
                if v == 0 {
                    closed = true;
                    break;
                }
                vars.push(v);
            }
            if !closed {
                return Err(qerr(line, "quantifier line must end with 0"));
            }
            let existential = first == "e";
            match blocks.last_mut() {
                Some((e, b)) if *e == existential => b.extend(vars),
                _ => blocks.push((existential, vars)),
            }
            continue;
        }
        for tok in std::iter::once(first).chain(toks) {
            let l: i64 = tok.parse().map_err(|_| qerr(line, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut pending));
            } else {
                pending.push(l);
            }
        }
    }
    let Some((vars, count)) = header else {
        return Err(qerr(1, "missing `p cnf` header"));
    };
    if !pending.is_empty() {
        return Err(qerr(text.lines().count(), "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(qerr(0, format!("header announces {count} clauses, found {}", clauses.len())));
    }
    if blocks.first().is_none_or(|(e, _)| !e) {
        blocks.insert(0, (true, Vec::new()));
    }
    if blocks.len().is_multiple_of(2) {
        blocks.push((true, Vec::new()));
    }
    QbfFormula::new(vars, blocks.into_iter().map(|(_, b)| b).collect(), clauses)
}

/// QDIMACS text. Empty blocks are omitted, so the output parses back to an
/// equal formula unless an inner block was empty.
pub fn write_qdimacs(q: &QbfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", q.vars, q.clauses.len());
    for (i, b) in q.blocks.iter().enumerate() {
        if b.is_empty() {
            continue;
        }
        out.push(if i % 2 == 0 { 'e' } else { 'a' });
        for v in b {
            let _ = write!(out, " {v}");
        }
        out.push_str(" 0\n");
    }
    for c in &q.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Truth value by exhaustive alternation over the blocks.
pub fn evaluate_qbf(q: &QbfFormula) -> Result<bool, SigmaColError> {
    if q.vars > QBF_VARIABLE_CEILING {
        return Err(SigmaColError::Capacity {
            what: "variables of a QBF",
            size: q.vars,
            ceiling: QBF_VARIABLE_CEILING,
        });
    }
    let order: Vec<usize> = q.blocks.iter().flatten().copied().collect();
    let block = q.block_of();
    let mut value = vec![false; q.vars + 1];
    Ok(alternate(q, &order, &block, 0, &mut value))
}

fn alternate(q: &QbfFormula, order: &[usize], block: &[usize], i: usize, value: &mut [bool]) -> bool {
    let Some(&v) = order.get(i) else {
        return q.clauses.iter().all(|c| {
            c.iter().any(|&l| value[l.unsigned_abs() as usize] == (l > 0))
        });
    };
    let existential = block[v].is_multiple_of(2);
    let branch = |b: bool, value: &mut [bool]| {
        value[v] = b;
        alternate(q, order, block, i + 1, value)
    };
    if existential {
        branch(false, value) || branch(true, value)
    } else {
        branch(false, value) && branch(true, value)
    }
}
