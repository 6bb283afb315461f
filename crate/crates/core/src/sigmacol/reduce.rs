//! QSAT_k → ΣₖCol by the SAT → 3-colouring gadgets.
//!
//! Vertex layout: `⊖ = 0`, `⊕ = 1`, `⊗ = 2`, then `v_x = 2x + 1` and
//! `v_x̄ = 2x + 2` for each variable `x ≥ 1`, then three vertices per OR
//! gadget in clause order.
//!
//! An OR gadget with inputs `a`, `b` is a triangle `g₁ g₂ o` with `a – g₁`
//! and `b – g₂`. If both inputs are coloured 1 (false) the output `o` is
//! forced to 1; otherwise `o` may take 2. A clause `l₁ … l_m` chains
//! `OR(OR(l₁, l₂), l₃) …`; a unit clause uses `OR(l, l)` and the empty
//! clause uses `OR(⊖, ⊖)`, which can never output 2.

use std::collections::BTreeMap;

use super::{QbfFormula, SigmaColInstance};
use crate::graphs::Graph;

pub const OMINUS: usize = 0;
pub const OPLUS: usize = 1;
pub const OTIMES: usize = 2;

/// The vertex standing for a literal: `v_x` for `x`, `v_x̄` for `-x`.
pub fn literal_vertex(l: i64) -> usize {
    let x = l.unsigned_abs() as usize;
    if l > 0 {
        2 * x + 1
    } else {
        2 * x + 2
    }
}

/// OR gadgets used by a clause of `m` literals.
pub fn or_gadget_count(m: usize) -> usize {
    m.saturating_sub(1).max(1)
}

pub fn reduce_qsat_to_sigmacol(q: &QbfFormula) -> SigmaColInstance {
    let vars = q.vars();
    let mut g = Graph::new(3 + 2 * vars);
    let edge = |g: &mut Graph, u: usize, v: usize| {
        g.add_edge(u, v).expect("gadget edges are simple");
    };
    edge(&mut g, OMINUS, OPLUS);
    edge(&mut g, OPLUS, OTIMES);
    edge(&mut g, OMINUS, OTIMES);
    for x in 1..=vars as i64 {
        let (p, n) = (literal_vertex(x), literal_vertex(-x));
        edge(&mut g, p, n);
        edge(&mut g, p, OTIMES);
        edge(&mut g, n, OTIMES);
    }
    let mut gadgets = Vec::new();
    let mut or = |g: &mut Graph, a: usize, b: usize| {
        let g1 = g.add_vertex();
        let g2 = g.add_vertex();
        let o = g.add_vertex();
        gadgets.extend([g1, g2, o]);
        edge(g, a, g1);
        edge(g, b, g2);
        edge(g, g1, g2);
        edge(g, g1, o);
        edge(g, g2, o);
        edge(g, o, OTIMES);
        o
    };
    for clause in q.clauses() {
        let lits: Vec<usize> = clause.iter().map(|&l| literal_vertex(l)).collect();
        let out = match lits.as_slice() {
            [] => or(&mut g, OMINUS, OMINUS),
            [l] => or(&mut g, *l, *l),
            [a, b, rest @ ..] => {
                let mut o = or(&mut g, *a, *b);
                for &l in rest {
                    o = or(&mut g, o, l);
                }
                o
            }
        };
        edge(&mut g, out, OMINUS);
    }
    let k = q.k();
    let mut blocks = vec![vec![OMINUS, OPLUS, OTIMES]];
    for b in q.blocks() {
        let mut vs = Vec::new();
        for &x in b {
            vs.push(literal_vertex(x as i64));
            vs.push(literal_vertex(-(x as i64)));
        }
        blocks.push(vs);
    }
    blocks[k].extend(gadgets);
    let f0: BTreeMap<usize, u8> = [(OMINUS, 1), (OPLUS, 2), (OTIMES, 3)].into_iter().collect();
    SigmaColInstance::new(g, blocks, f0).expect("reduction output is a valid instance")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigmacol::{decide_alternating, parse_qdimacs};

    #[test]
    fn precolouring_of_the_triangle() {
        let q = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        let inst = reduce_qsat_to_sigmacol(&q);
        let f0 = inst.precolouring();
        assert_eq!((f0[&OMINUS], f0[&OPLUS], f0[&OTIMES]), (1, 2, 3));
    }

    #[test]
    fn unit_clause_counts_are_frozen() {
        let q = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        let inst = reduce_qsat_to_sigmacol(&q);
        assert_eq!(inst.graph().vertex_count(), 8);
        assert_eq!(inst.graph().edge_count(), 13);
        assert!(decide_alternating(&inst).unwrap());
    }

    #[test]
    fn zero_clauses_and_empty_clause() {
        let q = parse_qdimacs("p cnf 2 0\ne 1 0\na 2 0\ne 0\n").unwrap();
        assert!(decide_alternating(&reduce_qsat_to_sigmacol(&q)).unwrap());
        let q = parse_qdimacs("p cnf 1 1\ne 1 0\n0\n").unwrap();
        assert!(!decide_alternating(&reduce_qsat_to_sigmacol(&q)).unwrap());
    }

    #[test]
    fn variable_vertices_see_forbid() {
        let q = parse_qdimacs("p cnf 3 1\ne 1 0\na 2 0\ne 3 0\n1 -2 3 0\n").unwrap();
        let inst = reduce_qsat_to_sigmacol(&q);
        for x in 1..=3 {
            assert!(inst.graph().has_edge(literal_vertex(x), OTIMES));
            assert!(inst.graph().has_edge(literal_vertex(-x), OTIMES));
        }
    }
}
