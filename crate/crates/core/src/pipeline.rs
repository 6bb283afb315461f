//! End-to-end reduction of `(F, φ)` to a labeled grid `((G, λ), ψ)`:
//!
//! ```text
//! F ──encode_13regular──▶ h ──embed_subdivision──▶ h₁ ⊆ I(grid)
//!   ──build_labeling──▶ (G, λ),     ψ = (φ^{I₁})^{I₂}
//! ```
//!
//! [`check_reduced`] decides the reduced instance in two tiers: it recovers
//! `h₁` from `(G, λ)` through `I₂` with the certified connectivity hooks,
//! then evaluates `φ^{I₁}` on the recovered graph.

use std::collections::BTreeMap;
use std::fmt::Write;

use log::info;
use thiserror::Error;

use crate::encoding::{build_i2, build_labeling, certified_i2_hooks, EncodingError, EncodingLabeling};
use crate::graphs::format::{parse_graph, write_graph, FormatError};
use crate::graphs::{make_grid, Graph, GridLikeGraph, PathSubgraph};
use crate::interp::{induced_structure, translate, InterpError, Interpretation};
use crate::mso::{evaluate_with, parse, Assignment, EvalError, EvalOptions, Formula, ParseError};
use crate::regular13::{certified_i1_hooks, embed_subdivision, encode_13regular, Regular13Error};
use crate::strongcolor::{strong_edge_colour, EdgeColouring};
use crate::LabeledGraph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("the source formula must be a sentence without labels or arcs")]
    SourceFormula,
    #[error("{stage}: {source}")]
    Regular13 {
        stage: &'static str,
        source: Regular13Error,
    },
    #[error("{stage}: {source}")]
    Encoding {
        stage: &'static str,
        source: EncodingError,
    },
    #[error("{stage}: {source}")]
    Interp {
        stage: &'static str,
        source: InterpError,
    },
    #[error("{stage}: {source}")]
    Eval {
        stage: &'static str,
        source: EvalError,
    },
    #[error("bundle file `{file}`: {message}")]
    Bundle { file: String, message: String },
}

impl From<FormatError> for PipelineError {
    fn from(e: FormatError) -> Self {
        PipelineError::Bundle {
            file: "graph".into(),
            message: e.to_string(),
        }
    }
}

/// Explicit stand-in for the grid advice: a grid with one row per vertex
/// and one column per edge of `h`, and a strong colouring of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Advice {
    pub grid: GridLikeGraph,
    pub colouring: EdgeColouring,
    pub rows: usize,
    pub cols: usize,
}

pub fn build_advice(h: &Graph) -> Advice {
    let rows = h.vertex_count().max(2);
    let cols = h.edge_count().max(2);
    let grid = make_grid(rows, cols).expect("dimensions are at least 2");
    let colouring = strong_edge_colour(grid.graph());
    Advice {
        grid,
        colouring,
        rows,
        cols,
    }
}

/// Sizes after each stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageSizes {
    pub f: (usize, usize),
    pub h: (usize, usize),
    pub h1: (usize, usize),
    pub host: (usize, usize),
    pub alphabet: usize,
    pub phi: usize,
    pub phi_i1: usize,
    pub psi: usize,
}

impl StageSizes {
    fn log(&self) {
        info!("F: {} vertices, {} edges", self.f.0, self.f.1);
        info!("h: {} vertices, {} edges", self.h.0, self.h.1);
        info!("h1: {} vertices, {} edges", self.h1.0, self.h1.1);
        info!(
            "host: {} vertices, {} edges, {} labels",
            self.host.0, self.host.1, self.alphabet
        );
        info!(
            "formula sizes: phi {}, phi^I1 {}, psi {}",
            self.phi, self.phi_i1, self.psi
        );
    }
}

/// Everything the reduction produced on the way to the host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub f: Graph,
    pub phi: Formula,
    pub h: Graph,
    pub anchors: Vec<usize>,
    pub h1: PathSubgraph,
    pub rows: usize,
    pub cols: usize,
    pub i1: Interpretation,
    pub i2: Interpretation,
    pub phi_i1: Formula,
    pub sizes: StageSizes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub encoding: EncodingLabeling,
    pub psi: Formula,
    pub provenance: Provenance,
}

impl ReducedInstance {
    pub fn host(&self) -> &LabeledGraph {
        &self.encoding.host
    }
}

fn is_plain_sentence(phi: &Formula) -> bool {
    let mut ok = phi.is_sentence() && phi.labels().is_empty();
    phi.visit(&mut |f| ok &= !matches!(f, Formula::Arc(..)));
    ok
}

pub fn reduce_instance(f: &Graph, phi: &Formula) -> Result<ReducedInstance, PipelineError> {
    if !is_plain_sentence(phi) {
        return Err(PipelineError::SourceFormula);
    }
    let enc13 = encode_13regular(f);
    let h = enc13.h;
    let advice = build_advice(&h);
    let h1 = embed_subdivision(&h, advice.rows, advice.cols).map_err(|source| PipelineError::Regular13 {
        stage: "embed_subdivision",
        source,
    })?;
    let encoding = build_labeling(&advice.grid, &h1, &advice.colouring).map_err(|source| {
        PipelineError::Encoding {
            stage: "build_labeling",
            source,
        }
    })?;
    let i2 = build_i2(encoding.colour_count);
    let phi_i1 = translate(phi, &enc13.i1).map_err(|source| PipelineError::Interp {
        stage: "translate through I1",
        source,
    })?;
    let psi = translate(&phi_i1, &i2).map_err(|source| PipelineError::Interp {
        stage: "translate through I2",
        source,
    })?;
    let g = encoding.host.graph();
    let sizes = StageSizes {
        f: (f.vertex_count(), f.edge_count()),
        h: (h.vertex_count(), h.edge_count()),
        h1: (h1.graph.vertex_count(), h1.graph.edge_count()),
        host: (g.vertex_count(), g.edge_count()),
        alphabet: encoding.host.alphabet().len(),
        phi: phi.size(),
        phi_i1: phi_i1.size(),
        psi: psi.size(),
    };
    sizes.log();
    Ok(ReducedInstance {
        encoding,
        psi,
        provenance: Provenance {
            f: f.clone(),
            phi: phi.clone(),
            h,
            anchors: enc13.anchors,
            h1,
            rows: advice.rows,
            cols: advice.cols,
            i1: enc13.i1,
            i2,
            phi_i1,
            sizes,
        },
    })
}

/// The copy of `h₁` recovered from the host through `I₂`, computed with the
/// certified connectivity hooks. Vertices follow host order.
pub fn recover_h1(ri: &ReducedInstance) -> Result<Graph, PipelineError> {
    let hooks = certified_i2_hooks(ri.encoding.colour_count).map_err(|source| PipelineError::Encoding {
        stage: "certifying I2 hooks",
        source,
    })?;
    let induced = induced_structure(&ri.encoding.host, &ri.provenance.i2, EvalOptions::with_hooks(&hooks))
        .map_err(|source| PipelineError::Interp {
            stage: "tier 1: induced structure through I2",
            source,
        })?;
    Ok(induced.structure.graph().clone())
}

/// Two-tier decision of the reduced instance: recover `h₁` through `I₂`,
/// then evaluate `φ^{I₁}` on it. Refuses to run when either hook set fails
/// certification.
pub fn check_reduced(ri: &ReducedInstance) -> Result<bool, PipelineError> {
    let h1 = recover_h1(ri)?;
    let hooks = certified_i1_hooks().map_err(|source| PipelineError::Regular13 {
        stage: "certifying I1 hooks",
        source,
    })?;
    evaluate_with(
        &h1,
        &ri.provenance.phi_i1,
        &Assignment::new(),
        EvalOptions::with_hooks(&hooks),
    )
    .map_err(|source| PipelineError::Eval {
        stage: "tier 2: evaluating phi^I1",
        source,
    })
}

/// File names of a serialized reduced instance, in bundle order.
pub const BUNDLE_FILES: [&str; 8] = [
    "f.graph",
    "phi.mso",
    "host.graph",
    "psi.mso",
    "h.graph",
    "i1.interp",
    "i2.interp",
    "meta.txt",
];

impl ReducedInstance {
    /// Deterministic text files: equal instances give identical bytes.
    pub fn to_files(&self) -> BTreeMap<String, String> {
        let p = &self.provenance;
        let s = &p.sizes;
        let mut meta = String::new();
        let _ = writeln!(meta, "grid {} {}", p.rows, p.cols);
        let _ = writeln!(meta, "colours {}", self.encoding.colour_count);
        let _ = write!(meta, "anchors");
        for a in &p.anchors {
            let _ = write!(meta, " {a}");
        }
        meta.push('\n');
        for (name, (n, m)) in [("f", s.f), ("h", s.h), ("h1", s.h1), ("host", s.host)] {
            let _ = writeln!(meta, "size {name} {n} {m}");
        }
        let _ = writeln!(meta, "formula phi {}", s.phi);
        let _ = writeln!(meta, "formula phi_i1 {}", s.phi_i1);
        let _ = writeln!(meta, "formula psi {}", s.psi);
        let contents = [
            write_graph(&p.f),
            format!("{}\n", p.phi),
            self.encoding.to_text(),
            format!("{}\n", self.psi),
            write_graph(&p.h),
            p.i1.to_text(),
            p.i2.to_text(),
            meta,
        ];
        BUNDLE_FILES
            .iter()
            .map(|n| n.to_string())
            .zip(contents)
            .collect()
    }

    /// Reads a bundle back. `psi` and `φ^{I₁}` are recomputed from `φ` and
    /// the interpretations, and `h₁` from `h` and the grid size; a stored
    /// `psi` that disagrees is an error.
    pub fn from_files(files: &BTreeMap<String, String>) -> Result<Self, PipelineError> {
        let get = |name: &str| {
            files.get(name).ok_or_else(|| PipelineError::Bundle {
                file: name.into(),
                message: "missing".into(),
            })
        };
        let bundle_err = |file: &str, message: String| PipelineError::Bundle {
            file: file.into(),
            message,
        };
        let parse_formula = |name: &str| -> Result<Formula, PipelineError> {
            parse(get(name)?).map_err(|e: ParseError| bundle_err(name, e.to_string()))
        };
        let f = parse_graph(get("f.graph")?).map_err(|e| bundle_err("f.graph", e.to_string()))?;
        let phi = parse_formula("phi.mso")?;
        let encoding =
            EncodingLabeling::from_text(get("host.graph")?).map_err(|e| bundle_err("host.graph", e.to_string()))?;
        let h = parse_graph(get("h.graph")?).map_err(|e| bundle_err("h.graph", e.to_string()))?;
        let i1 = Interpretation::parse_text(get("i1.interp")?).map_err(|e| bundle_err("i1.interp", e.to_string()))?;
        let i2 = Interpretation::parse_text(get("i2.interp")?).map_err(|e| bundle_err("i2.interp", e.to_string()))?;
        let meta = get("meta.txt")?;
        let mut grid = None;
        let mut anchors = Vec::new();
        for line in meta.lines() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let nums = |t: &[&str]| -> Result<Vec<usize>, PipelineError> {
                t.iter()
                    .map(|x| x.parse().map_err(|_| bundle_err("meta.txt", format!("bad number `{x}`"))))
                    .collect()
            };
            match toks.first() {
                Some(&"grid") => {
                    let d = nums(&toks[1..])?;
                    if d.len() != 2 {
                        return Err(bundle_err("meta.txt", "grid takes rows and cols".into()));
                    }
                    grid = Some((d[0], d[1]));
                }
                Some(&"anchors") => anchors = nums(&toks[1..])?,
                _ => {}
            }
        }
        let (rows, cols) = grid.ok_or_else(|| bundle_err("meta.txt", "missing grid line".into()))?;
        let h1 = embed_subdivision(&h, rows, cols).map_err(|source| PipelineError::Regular13 {
            stage: "embed_subdivision",
            source,
        })?;
        let phi_i1 = translate(&phi, &i1).map_err(|source| PipelineError::Interp {
            stage: "translate through I1",
            source,
        })?;
        let psi = translate(&phi_i1, &i2).map_err(|source| PipelineError::Interp {
            stage: "translate through I2",
            source,
        })?;
        if let Some(stored) = files.get("psi.mso") {
            if stored.trim() != psi.to_string() {
                return Err(bundle_err("psi.mso", "does not match phi translated through I1 and I2".into()));
            }
        }
        let g = encoding.host.graph();
        let sizes = StageSizes {
            f: (f.vertex_count(), f.edge_count()),
            h: (h.vertex_count(), h.edge_count()),
            h1: (h1.graph.vertex_count(), h1.graph.edge_count()),
            host: (g.vertex_count(), g.edge_count()),
            alphabet: encoding.host.alphabet().len(),
            phi: phi.size(),
            phi_i1: phi_i1.size(),
            psi: psi.size(),
        };
        Ok(ReducedInstance {
            encoding,
            psi,
            provenance: Provenance {
                f,
                phi,
                h,
                anchors,
                h1,
                rows,
                cols,
                i1,
                i2,
                phi_i1,
                sizes,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mso::fixtures;

    #[test]
    fn advice_dimensions() {
        let a = build_advice(&Graph::complete(2));
        assert_eq!((a.rows, a.cols), (2, 2));
        let cube = Graph::from_edges(
            8,
            [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        )
        .unwrap();
        let a = build_advice(&cube);
        assert_eq!((a.rows, a.cols, a.grid.graph().vertex_count()), (8, 12, 96));
        assert!(crate::strongcolor::validate_strong(a.grid.graph(), &a.colouring).unwrap());
    }

    #[test]
    fn identity_sanity() {
        let ri = reduce_instance(&Graph::new(1), &parse("E x. x = x").unwrap()).unwrap();
        assert!(check_reduced(&ri).unwrap());
    }

    #[test]
    fn one_vertex_test_on_k2() {
        let phi = parse(fixtures::ONE_VERTEX).unwrap();
        let ri = reduce_instance(&Graph::complete(2), &phi).unwrap();
        assert!(!check_reduced(&ri).unwrap());
    }

    #[test]
    fn bundle_round_trip() {
        let phi = parse(fixtures::HAS_ISOLATED_VERTEX).unwrap();
        let ri = reduce_instance(&Graph::path(2), &phi).unwrap();
        let files = ri.to_files();
        let back = ReducedInstance::from_files(&files).unwrap();
        assert_eq!(back, ri);
        assert_eq!(back.to_files(), files);
    }

    #[test]
    fn labeled_sources_are_refused() {
        let phi = parse("E x. lab_A(x)").unwrap();
        assert_eq!(reduce_instance(&Graph::new(1), &phi), Err(PipelineError::SourceFormula));
    }
}
