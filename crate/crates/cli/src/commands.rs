use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gridmso::graphs::format::{write_graph, write_grid_like, GraphDocument};
use gridmso::graphs::iso::is_isomorphic;
use gridmso::graphs::{make_grid, Digraph, Graph, LabeledGraph};
use gridmso::mso::{evaluate_with, parse, Assignment, EvalError, EvalOptions, Formula, Structure};
use gridmso::pipeline::{check_reduced, recover_h1, reduce_instance, BUNDLE_FILES};
use gridmso::sigmacol::{
    check_sigmacol_formula, decide_alternating, instance_to_labeled_graph, parse_qdimacs,
    reduce_qsat_to_sigmacol, sigmacol_alphabet, sigmacol_formula,
};
use gridmso::strongcolor::{strong_edge_colour, validate_strong};
use gridmso::{ReducedInstance, SigmaColInstance};
use serde_json::{json, Value};

use crate::{Cli, Command, SigmacolCommand};

pub const TRUE: u8 = 0;
pub const FALSE: u8 = 1;
pub const ERROR: u8 = 2;
/// The bundle's host does not encode its `h₁`, or the reduced and direct
/// verdicts disagree.
pub const MISMATCH: u8 = 3;

pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

fn verdict(b: bool) -> u8 {
    if b {
        TRUE
    } else {
        FALSE
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_formula(path: &Path) -> Result<Formula> {
    parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

enum AnyGraph {
    Plain(Graph),
    Labeled(LabeledGraph),
    Directed(Digraph),
}

impl AnyGraph {
    fn load(path: &Path) -> Result<Self> {
        let doc = GraphDocument::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        Ok(if doc.directed {
            AnyGraph::Directed(doc.to_digraph()?)
        } else if doc.alphabet.is_some() || !doc.labels.is_empty() {
            AnyGraph::Labeled(doc.to_labeled_graph()?)
        } else {
            AnyGraph::Plain(doc.to_graph()?)
        })
    }

    fn structure(&self) -> &dyn Structure {
        match self {
            AnyGraph::Plain(g) => g,
            AnyGraph::Labeled(g) => g,
            AnyGraph::Directed(g) => g,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            AnyGraph::Plain(_) => "graph",
            AnyGraph::Labeled(_) => "labeled graph",
            AnyGraph::Directed(_) => "digraph",
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Parse { formula } => parse_cmd(formula),
        Command::Check { graph, formula, plain } => check(graph, formula, *plain),
        Command::Reduce { graph, formula, out } => reduce(graph, formula, out),
        Command::Verify { dir, no_direct } => verify(dir, *no_direct),
        Command::Sigmacol { command } => match command {
            SigmacolCommand::Reduce { qdimacs, out } => sigmacol_reduce(qdimacs, out.as_deref()),
            SigmacolCommand::Solve {
                instance,
                via_formula,
            } => sigmacol_solve(instance, *via_formula),
            SigmacolCommand::Formula { k } => sigmacol_print(*k),
        },
        Command::Color { graph } => color(graph),
        Command::Grid { rows, cols } => grid(*rows, *cols),
    }
}

fn parse_cmd(path: &Path) -> Result<Outcome> {
    let f = read_formula(path)?;
    let fv = f.free_variables();
    let free: Vec<String> = fv.vertex.iter().chain(fv.set.iter()).cloned().collect();
    let labels: Vec<String> = f.labels().into_iter().collect();
    let mut text = format!("{f}\n");
    let _ = writeln!(
        text,
        "size {}, vertex quantifiers {}, set quantifiers {}, free [{}], labels [{}]",
        f.size(),
        f.vertex_quantifier_count(),
        f.set_quantifier_count(),
        free.join(","),
        labels.join(",")
    );
    Ok(Outcome {
        text,
        json: json!({
            "formula": f.to_string(),
            "size": f.size(),
            "vertex_quantifiers": f.vertex_quantifier_count(),
            "set_quantifiers": f.set_quantifier_count(),
            "free": free,
            "labels": labels,
            "sentence": f.is_sentence(),
        }),
        code: TRUE,
    })
}

fn check(graph: &Path, formula: &Path, plain: bool) -> Result<Outcome> {
    let g = AnyGraph::load(graph)?;
    let f = read_formula(formula)?;
    if !f.is_sentence() {
        bail!("{} is not a sentence", formula.display());
    }
    let opts = if plain { EvalOptions::plain() } else { EvalOptions::fast() };
    let start = Instant::now();
    let value = evaluate_with(g.structure(), &f, &Assignment::new(), opts)?;
    let elapsed = start.elapsed();
    Ok(Outcome {
        text: format!("{value}\n"),
        json: json!({
            "value": value,
            "structure": g.kind(),
            "vertices": g.structure().vertex_count(),
            "formula_size": f.size(),
            "seconds": elapsed.as_secs_f64(),
        }),
        code: verdict(value),
    })
}

fn sizes_json(ri: &ReducedInstance) -> Value {
    let s = &ri.provenance.sizes;
    json!({
        "f": [s.f.0, s.f.1],
        "h": [s.h.0, s.h.1],
        "h1": [s.h1.0, s.h1.1],
        "host": [s.host.0, s.host.1],
        "alphabet": s.alphabet,
        "phi": s.phi,
        "phi_i1": s.phi_i1,
        "psi": s.psi,
    })
}

fn reduce(graph: &Path, formula: &Path, out: &Path) -> Result<Outcome> {
    let f = match AnyGraph::load(graph)? {
        AnyGraph::Plain(g) => g,
        other => bail!("reduce takes an unlabeled undirected graph, got a {}", other.kind()),
    };
    let phi = read_formula(formula)?;
    let ri = reduce_instance(&f, &phi)?;
    let files = ri.to_files();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (name, content) in &files {
        let p = out.join(name);
        fs::write(&p, content).with_context(|| format!("writing {}", p.display()))?;
    }
    let s = &ri.provenance.sizes;
    let text = format!(
        "wrote {} files to {}\nhost {} vertices, {} edges, {} labels; psi size {}\n",
        files.len(),
        out.display(),
        s.host.0,
        s.host.1,
        s.alphabet,
        s.psi
    );
    Ok(Outcome {
        text,
        json: json!({ "out": out.display().to_string(), "sizes": sizes_json(&ri), "files": files }),
        code: TRUE,
    })
}

fn verify(dir: &Path, no_direct: bool) -> Result<Outcome> {
    let mut files = BTreeMap::new();
    for name in BUNDLE_FILES {
        files.insert(name.to_string(), read(&dir.join(name))?);
    }
    let ri = ReducedInstance::from_files(&files)?;
    // the host must still encode the subdivided gadget graph
    let h1_ok = is_isomorphic(&recover_h1(&ri)?, &ri.provenance.h1.graph);
    let start = Instant::now();
    let reduced = check_reduced(&ri)?;
    let reduced_secs = start.elapsed().as_secs_f64();
    let direct = if no_direct {
        None
    } else {
        let p = &ri.provenance;
        match evaluate_with(&p.f, &p.phi, &Assignment::new(), EvalOptions::fast()) {
            Ok(v) => Some(v),
            // too large to check directly; the reduced verdict stands alone
            Err(EvalError::Capacity { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    };
    let agree = h1_ok && direct.is_none_or(|d| d == reduced);
    let mut text = format!("reduced: {reduced}\n");
    match direct {
        Some(d) => {
            let _ = writeln!(text, "direct: {d}");
        }
        None => text.push_str("direct: skipped\n"),
    }
    if !h1_ok {
        text.push_str("MISMATCH: the host does not encode h1\n");
    } else if !agree {
        text.push_str("MISMATCH between reduced and direct evaluation\n");
    }
    Ok(Outcome {
        text,
        json: json!({
            "reduced": reduced,
            "direct": direct,
            "agree": agree,
            "h1_recovered": h1_ok,
            "seconds": reduced_secs,
            "sizes": sizes_json(&ri),
        }),
        code: if agree { verdict(reduced) } else { MISMATCH },
    })
}

fn sigmacol_reduce(qdimacs: &Path, out: Option<&Path>) -> Result<Outcome> {
    let q = parse_qdimacs(&read(qdimacs)?)?;
    let inst = reduce_qsat_to_sigmacol(&q);
    let body = inst.to_text();
    let g = inst.graph();
    let mut text = String::new();
    match out {
        Some(p) => {
            fs::write(p, &body).with_context(|| format!("writing {}", p.display()))?;
            let _ = writeln!(
                text,
                "wrote k = {} instance with {} vertices, {} edges to {}",
                inst.k(),
                g.vertex_count(),
                g.edge_count(),
                p.display()
            );
        }
        None => text = body.clone(),
    }
    Ok(Outcome {
        text,
        json: json!({
            "k": inst.k(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "instance": body,
        }),
        code: TRUE,
    })
}

fn sigmacol_solve(path: &Path, via_formula: bool) -> Result<Outcome> {
    let inst = SigmaColInstance::from_text(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let value = if via_formula {
        let sigma = sigmacol_formula(inst.k())?;
        check_sigmacol_formula(&instance_to_labeled_graph(&inst), &sigma)?
    } else {
        decide_alternating(&inst)?
    };
    Ok(Outcome {
        text: format!("{value}\n"),
        json: json!({
            "value": value,
            "k": inst.k(),
            "vertices": inst.graph().vertex_count(),
            "method": if via_formula { "formula" } else { "game" },
        }),
        code: verdict(value),
    })
}

fn sigmacol_print(k: usize) -> Result<Outcome> {
    let sigma = sigmacol_formula(k)?;
    let alphabet = sigmacol_alphabet(k);
    Ok(Outcome {
        text: format!("# alphabet {}\n{sigma}\n", alphabet.join(",")),
        json: json!({
            "k": k,
            "alphabet": alphabet,
            "formula": sigma.to_string(),
            "size": sigma.size(),
        }),
        code: TRUE,
    })
}

fn color(path: &Path) -> Result<Outcome> {
    let g = match AnyGraph::load(path)? {
        AnyGraph::Plain(g) => g,
        AnyGraph::Labeled(lg) => lg.graph().clone(),
        AnyGraph::Directed(_) => bail!("colouring needs an undirected graph"),
    };
    let c = strong_edge_colour(&g);
    let valid = validate_strong(&g, &c)?;
    let colours: Vec<[usize; 3]> = c.iter().map(|((u, v), k)| [u, v, k]).collect();
    Ok(Outcome {
        text: format!("{}{}# palette {}\n", write_graph(&g), c.to_lines(), c.palette_size()),
        json: json!({
            "palette": c.palette_size(),
            "max_degree": g.max_degree(),
            "valid": valid,
            "colours": colours,
        }),
        code: verdict(valid),
    })
}

fn grid(rows: usize, cols: usize) -> Result<Outcome> {
    let g = make_grid(rows, cols)?;
    let text = write_grid_like(&g);
    Ok(Outcome {
        json: json!({
            "rows": rows,
            "cols": cols,
            "vertices": g.graph().vertex_count(),
            "edges": g.graph().edge_count(),
            "graph": text,
        }),
        text,
        code: TRUE,
    })
}
