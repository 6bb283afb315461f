//! MSO₁-L: syntax, parser, printer and a brute-force evaluator.

pub mod ast;
pub mod eval;
pub mod hooks;
mod parser;

pub use ast::{is_set_var, build, Formula, FreeVars};
pub use eval::{
    evaluate, evaluate_with, holds, Assignment, EvalError, EvalOptions, Evaluator, Structure,
    SET_DOMAIN_CEILING,
};
pub use hooks::{CertifiedHooks, Hook, HookError, HookSet, HookTemplate};
pub use parser::{parse, ParseError};

/// `|φ|`, the number of AST nodes.
pub fn formula_size(phi: &Formula) -> usize {
    phi.size()
}

pub fn free_variables(phi: &Formula) -> FreeVars {
    phi.free_variables()
}

/// Fixed sentences over unlabeled graphs used across tests and the CLI.
pub mod fixtures {
    use super::{parse, Formula};

    /// Three-colourability, as a union of three independent sets.
    pub const THREE_COLOURABLE: &str = "E V1. E V2. E V3. \
        (A v. v in V1 | v in V2 | v in V3) \
        & (A v. A w. ~v in V1 | ~w in V1 | ~adj(v,w)) \
        & (A v. A w. ~v in V2 | ~w in V2 | ~adj(v,w)) \
        & (A v. A w. ~v in V3 | ~w in V3 | ~adj(v,w))";
    pub const HAS_ISOLATED_VERTEX: &str = "E x. A y. ~adj(x,y)";
    pub const EDGELESS: &str = "A x. A y. ~adj(x,y)";
    pub const HAS_DOMINATING_VERTEX: &str = "E x. A y. (x = y | adj(x,y))";
    pub const ONE_VERTEX: &str = "E x. A y. (x = y)";

    pub fn three_colourable() -> Formula {
        parse(THREE_COLOURABLE).expect("fixture parses")
    }

    /// The four sentences of the end-to-end suite, with short names.
    pub fn suite() -> Vec<(&'static str, Formula)> {
        [
            ("3col", THREE_COLOURABLE),
            ("isolated", HAS_ISOLATED_VERTEX),
            ("edgeless", EDGELESS),
            ("dominating", HAS_DOMINATING_VERTEX),
        ]
        .into_iter()
        .map(|(n, t)| (n, parse(t).expect("fixture parses")))
        .collect()
    }
}
