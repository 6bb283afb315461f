//! Alternating precolouring games (ΣₖCol), quantified Boolean formulas, the
//! gadget reduction from the latter to the former, and the MSO₁-L sentences
//! `σ_k` deciding the game on labeled graphs.

mod formula;
mod qbf;
mod reduce;

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::graphs::format::{write_graph, FormatError, GraphDocument};
use crate::graphs::{Graph, LabeledGraph};

pub use formula::{
    check_sigmacol_formula, instance_to_labeled_graph, sigmacol_alphabet, sigmacol_formula,
};
pub use qbf::{evaluate_qbf, parse_qdimacs, write_qdimacs, QbfFormula, QBF_VARIABLE_CEILING};
pub use reduce::{
    literal_vertex, or_gadget_count, reduce_qsat_to_sigmacol, OMINUS, OPLUS, OTIMES,
};

/// Largest number of vertices outside `V₀` the game solver accepts.
pub const GAME_VERTEX_CEILING: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigmaColError {
    #[error("k must be odd and positive, got {0}")]
    EvenK(usize),
    #[error("vertex {0} is in no block or in two blocks")]
    Partition(usize),
    #[error("precolouring must be given exactly on V0: {0}")]
    Precolouring(String),
    #[error("precolouring is not proper on edge {{{0},{1}}}")]
    ImproperPrecolouring(usize, usize),
    #[error("{size} exceeds the ceiling of {ceiling} for {what}")]
    Capacity {
        what: &'static str,
        size: usize,
        ceiling: usize,
    },
    #[error("qdimacs line {line}: {message}")]
    Qdimacs { line: usize, message: String },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Eval(#[from] crate::mso::EvalError),
}

/// `(G, f₀, V₀, V₁, …, V_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaColInstance {
    graph: Graph,
    blocks: Vec<Vec<usize>>,
    precolouring: BTreeMap<usize, u8>,
}

impl SigmaColInstance {
    /// `blocks[i]` is `V_i`; there must be `k + 1` of them with `k` odd.
    pub fn new(
        graph: Graph,
        mut blocks: Vec<Vec<usize>>,
        precolouring: BTreeMap<usize, u8>,
    ) -> Result<Self, SigmaColError> {
        if blocks.len() < 2 || !blocks.len().is_multiple_of(2) {
            return Err(SigmaColError::EvenK(blocks.len().saturating_sub(1)));
        }
        let n = graph.vertex_count();
        let mut owner = vec![None; n];
        for (i, b) in blocks.iter_mut().enumerate() {
            b.sort_unstable();
            for &v in b.iter() {
                if v >= n || owner[v].is_some() {
                    return Err(SigmaColError::Partition(v.min(n)));
                }
                owner[v] = Some(i);
            }
        }
        if let Some(v) = owner.iter().position(Option::is_none) {
            return Err(SigmaColError::Partition(v));
        }
        let keys: Vec<usize> = precolouring.keys().copied().collect();
        if keys != blocks[0] {
            return Err(SigmaColError::Precolouring(format!(
                "V0 = {:?}, coloured {:?}",
                blocks[0], keys
            )));
        }
        if let Some((&v, &c)) = precolouring.iter().find(|(_, &c)| !(1..=3).contains(&c)) {
            return Err(SigmaColError::Precolouring(format!("vertex {v} has colour {c}")));
        }
        for (u, v) in graph.edges() {
            if let (Some(a), Some(b)) = (precolouring.get(&u), precolouring.get(&v)) {
                if a == b {
                    return Err(SigmaColError::ImproperPrecolouring(u, v));
                }
            }
        }
        Ok(SigmaColInstance {
            graph,
            blocks,
            precolouring,
        })
    }

    /// The 3-colouring game with `V₀ = ∅`, `V₁ = V`.
    pub fn three_colouring(graph: Graph) -> Self {
        let all = (0..graph.vertex_count()).collect();
        SigmaColInstance::new(graph, vec![Vec::new(), all], BTreeMap::new())
            .expect("one block is a partition")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn precolouring(&self) -> &BTreeMap<usize, u8> {
        &self.precolouring
    }

    /// Graph format plus `part` and `f0` lines. Every block gets a `part`
    /// line, so `k` survives even when trailing blocks are empty.
    pub fn to_text(&self) -> String {
        let mut out = write_graph(&self.graph);
        for (i, b) in self.blocks.iter().enumerate() {
            let _ = write!(out, "part {i}");
            for v in b {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for (v, c) in &self.precolouring {
            let _ = writeln!(out, "f0 {v} {c}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SigmaColError> {
        let doc = GraphDocument::parse(text)?;
        let graph = doc.to_graph()?;
        let blocks_needed = doc.parts.iter().map(|(i, _)| i + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); blocks_needed];
        for (i, vs) in doc.parts {
            blocks[i].extend(vs);
        }
        let precolouring = doc.precolours.into_iter().collect();
        SigmaColInstance::new(graph, blocks, precolouring)
    }

    pub fn to_labeled_graph(&self) -> LabeledGraph {
        instance_to_labeled_graph(self)
    }
}

/// Backtracking state: `colour[v] == 0` means uncoloured.
struct Game<'a> {
    g: &'a Graph,
    colour: Vec<u8>,
}

impl Game<'_> {
    fn fits(&self, v: usize, c: u8) -> bool {
        self.g.neighbors(v).iter().all(|&w| self.colour[w] != c)
    }

    /// Calls `visit` on every proper extension colouring all of `block`,
    /// stopping as soon as `visit` returns `stop`. Returns whether it
    /// stopped.
    fn extensions(&mut self, block: &[usize], stop: bool, visit: &mut dyn FnMut(&mut Self) -> bool) -> bool {
        let Some((&v, rest)) = block.split_first() else {
            return visit(self) == stop;
        };
        for c in 1..=3 {
            if self.fits(v, c) {
                self.colour[v] = c;
                let stopped = self.extensions(rest, stop, visit);
                self.colour[v] = 0;
                if stopped {
                    return true;
                }
            }
        }
        false
    }

    /// Whether an alternating colouring exists for blocks `i..`, `i` odd.
    fn exists_from(&mut self, blocks: &[Vec<usize>], i: usize) -> bool {
        let k = blocks.len() - 1;
        self.extensions(&blocks[i], true, &mut |game| {
            if i == k {
                return true;
            }
            // every proper f_{i+1} must leave a winning continuation
            let refuted = game.extensions(&blocks[i + 1], false, &mut |game| {
                game.exists_from(blocks, i + 2)
            });
            !refuted
        })
    }
}

/// Decides the game by the literal recursion: some proper `f₁`, then for
/// every proper `f₂` a `(k−2)`-alternating colouring, and so on.
pub fn decide_alternating(inst: &SigmaColInstance) -> Result<bool, SigmaColError> {
    let free: usize = inst.blocks[1..].iter().map(Vec::len).sum();
    if free > GAME_VERTEX_CEILING {
        return Err(SigmaColError::Capacity {
            what: "uncoloured vertices of a game",
            size: free,
            ceiling: GAME_VERTEX_CEILING,
        });
    }
    let mut colour = vec![0u8; inst.graph.vertex_count()];
    for (&v, &c) in &inst.precolouring {
        colour[v] = c;
    }
    let mut game = Game {
        g: &inst.graph,
        colour,
    };
    Ok(game.exists_from(&inst.blocks, 1))
}
