//! Workbench for MSO₁ model checking on graphs and the reductions that move
//! model-checking instances onto labeled grid-like graphs.
//!
//! * [`graphs`]: graphs, labeled graphs, digraphs, grid-like path systems.
//! * [`mso`]: MSO₁-L syntax and a brute-force evaluator.
//! * [`interp`]: interpretations, formula translation, induced structures.
//! * [`strongcolor`]: greedy strong edge colouring.
//! * [`encoding`]: encoding a subgraph of a grid's intersection graph as a
//!   vertex labeling.
//! * [`regular13`]: encoding arbitrary graphs as {1,3}-regular graphs.
//! * [`sigmacol`]: alternating precolouring games, QBF and the gadget
//!   reduction between them.
//! * [`pipeline`]: the end-to-end reduction and its checker.

pub mod bitset;
pub mod encoding;
pub mod graphs;
pub mod interp;
pub mod mso;
pub mod pipeline;
pub mod regular13;
pub mod sigmacol;
pub mod strongcolor;

pub use encoding::EncodingLabeling;
pub use graphs::{Digraph, Graph, GraphError, GridLikeGraph, LabeledGraph, PathClass, PathCollection, PathSubgraph};
pub use interp::Interpretation;
pub use mso::{Formula, Structure};
pub use pipeline::{Advice, ReducedInstance};
pub use regular13::Regular13Encoding;
pub use sigmacol::{QbfFormula, SigmaColInstance};
pub use strongcolor::EdgeColouring;
