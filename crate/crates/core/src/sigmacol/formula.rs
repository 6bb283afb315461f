//! The sentences `σ_k` over the alphabet `V1 … Vk, R0, G0, B0`, the
//! labeled-graph encoding of instances, and a checker that enumerates each
//! colour block as a partition of its `V_i`.

use crate::graphs::LabeledGraph;
use crate::mso::build::{adj, and, forall, implies, is_in, lab, not, or};
use crate::mso::{evaluate_with, Assignment, EvalOptions, Formula};

use super::{SigmaColError, SigmaColInstance};

const COLOURS: [&str; 3] = ["R", "G", "B"];

/// `V1, …, Vk, R0, G0, B0`: `k + 3` labels.
pub fn sigmacol_alphabet(k: usize) -> Vec<String> {
    let mut out: Vec<String> = (1..=k).map(|i| format!("V{i}")).collect();
    out.extend(COLOURS.iter().map(|c| format!("{c}0")));
    out
}

/// Labels `V_i` on blocks `i ≥ 1` and `R0/G0/B0` on `V₀` for colours 1, 2, 3.
pub fn instance_to_labeled_graph(inst: &SigmaColInstance) -> LabeledGraph {
    let mut lg = LabeledGraph::new(inst.graph().clone(), sigmacol_alphabet(inst.k()))
        .expect("alphabet has distinct names");
    for (i, b) in inst.blocks().iter().enumerate().skip(1) {
        for &v in b {
            lg.add_label(v, &format!("V{i}")).expect("label in alphabet");
        }
    }
    for (&v, &c) in inst.precolouring() {
        lg.add_label(v, &format!("{}0", COLOURS[c as usize - 1])).expect("label in alphabet");
    }
    lg
}

fn iff(a: Formula, b: Formula) -> Formula {
    and(implies(a.clone(), b.clone()), implies(b, a))
}

/// `v` has colour `c` in the colouring accumulated up to block `i`.
fn coloured(c: &str, i: usize, v: &str) -> Formula {
    (1..=i).fold(lab(&format!("{c}0"), v), |acc, j| or(acc, is_in(v, &format!("{c}{j}"))))
}

/// `R_i, G_i, B_i` partition `V_i`, and the accumulated colouring is proper.
fn precol(i: usize) -> Formula {
    let [r, g, b] = COLOURS.map(|c| format!("{c}{i}"));
    let member = or(or(is_in("v", &r), is_in("v", &g)), is_in("v", &b));
    let partition = forall(
        "v",
        and(
            iff(lab(&format!("V{i}"), "v"), member),
            and(
                not(and(is_in("v", &r), is_in("v", &g))),
                and(
                    not(and(is_in("v", &r), is_in("v", &b))),
                    not(and(is_in("v", &g), is_in("v", &b))),
                ),
            ),
        ),
    );
    let clash = COLOURS
        .iter()
        .map(|c| and(coloured(c, i, "v"), coloured(c, i, "w")))
        .reduce(or)
        .unwrap();
    let proper = forall("v", forall("w", implies(adj("v", "w"), not(clash))));
    and(partition, proper)
}

fn colour_block(i: usize, existential: bool, body: Formula) -> Formula {
    COLOURS.iter().rev().fold(body, |acc, c| {
        let name = format!("{c}{i}");
        if existential {
            Formula::ExistsSet(name, Box::new(acc))
        } else {
            Formula::ForallSet(name, Box::new(acc))
        }
    })
}

/// `∃R₁G₁B₁[Precol₁ ∧ ∀R₂G₂B₂(Precol₂ → ∃R₃G₃B₃[Precol₃ ∧ …])]`.
pub fn sigmacol_formula(k: usize) -> Result<Formula, SigmaColError> {
    if k.is_multiple_of(2) {
        return Err(SigmaColError::EvenK(k));
    }
    let mut phi = colour_block(k, true, precol(k));
    for i in (1..k).rev() {
        phi = if i % 2 == 1 {
            colour_block(i, true, and(precol(i), phi))
        } else {
            colour_block(i, false, implies(precol(i), phi))
        };
    }
    Ok(phi)
}

/// `(i, existential, body)` when `phi` is a block `Q R_i Q G_i Q B_i. body`.
fn split_block(phi: &Formula) -> Option<(usize, bool, &Formula)> {
    let (existential, r, rest) = match phi {
        Formula::ExistsSet(r, rest) => (true, r, rest),
        Formula::ForallSet(r, rest) => (false, r, rest),
        _ => return None,
    };
    let i: usize = r.strip_prefix('R')?.parse().ok()?;
    let mut cur: &Formula = rest;
    for c in &COLOURS[1..] {
        let expected = format!("{c}{i}");
        cur = match cur {
            Formula::ExistsSet(n, b) if existential && *n == expected => b,
            Formula::ForallSet(n, b) if !existential && *n == expected => b,
            _ => return None,
        };
    }
    Some((i, existential, cur))
}

/// Evaluates a `σ_k`-shaped sentence, letting each colour block range over
/// the `3^{|V_i|}` partitions of `V_i` rather than all triples of sets.
/// Sound because each block's `Precol_i` is false on every other triple:
/// under `∃` those triples never help and under `∀` they hold vacuously.
pub fn check_sigmacol_formula(lg: &LabeledGraph, phi: &Formula) -> Result<bool, SigmaColError> {
    walk(lg, phi, &mut Assignment::new())
}

fn walk(lg: &LabeledGraph, phi: &Formula, env: &mut Assignment) -> Result<bool, SigmaColError> {
    if let Some((i, existential, body)) = split_block(phi) {
        let vi: Vec<usize> = (0..lg.vertex_count())
            .filter(|&v| lg.has_label_named(v, &format!("V{i}")))
            .collect();
        let mut digits = vec![0usize; vi.len()];
        loop {
            for (c, name) in COLOURS.iter().enumerate() {
                let set = vi.iter().zip(&digits).filter(|(_, &d)| d == c).map(|(&v, _)| v);
                env.set.insert(format!("{name}{i}"), set.collect());
            }
            let value = walk(lg, body, env)?;
            if value == existential {
                return Ok(existential);
            }
            // next base-3 counter value
            let mut pos = 0;
            while pos < digits.len() && digits[pos] == 2 {
                digits[pos] = 0;
                pos += 1;
            }
            if pos == digits.len() {
                return Ok(!existential);
            }
            digits[pos] += 1;
        }
    }
    match phi {
        Formula::And(a, b) => Ok(walk(lg, a, env)? && walk(lg, b, env)?),
        Formula::Implies(a, b) => Ok(!walk(lg, a, env)? || walk(lg, b, env)?),
        _ => Ok(evaluate_with(lg, phi, env, EvalOptions::fast())?),
    }
}
