mod common;

use gridmso::graphs::iso::is_isomorphic;
use gridmso::mso::{holds, parse};
use gridmso::pipeline::{check_reduced, recover_h1, reduce_instance, PipelineError, BUNDLE_FILES};
use gridmso::{Graph, ReducedInstance};

use common::*;

#[test]
fn reduction_is_deterministic() {
    let f = Graph::path(3);
    let phi = parse("E x. A y. ~adj(x,y)").unwrap();
    let a = reduce_instance(&f, &phi).unwrap();
    let b = reduce_instance(&f, &phi).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_files(), b.to_files());
}

#[test]
fn bundles_round_trip() {
    let f = Graph::cycle(3);
    let ri = reduce_instance(&f, &parse("A x. E y. adj(x,y)").unwrap()).unwrap();
    let files = ri.to_files();
    assert_eq!(files.keys().map(String::as_str).collect::<Vec<_>>(), {
        let mut names = BUNDLE_FILES.to_vec();
        names.sort_unstable();
        names
    });
    let back = ReducedInstance::from_files(&files).unwrap();
    assert_eq!(back, ri);
}

#[test]
fn tampered_bundles_are_rejected_or_detected() {
    let ri = reduce_instance(&Graph::path(2), &parse("E x. E y. adj(x,y)").unwrap()).unwrap();
    let files = ri.to_files();

    let mut bad = files.clone();
    bad.insert("psi.mso".into(), "E x. x = x\n".into());
    assert!(matches!(ReducedInstance::from_files(&bad), Err(PipelineError::Bundle { .. })));

    let mut missing = files.clone();
    missing.remove("i2.interp");
    assert!(ReducedInstance::from_files(&missing).is_err());

    // stripping the meet labels empties the recovered h1
    let mut stripped = files.clone();
    let host: String = files["host.graph"]
        .lines()
        .filter_map(|l| match l.strip_prefix("l ") {
            Some(rest) => {
                let (v, labels) = rest.split_once(' ').unwrap();
                let kept: Vec<&str> = labels.split(',').filter(|&x| x != "m").collect();
                (!kept.is_empty()).then(|| format!("l {v} {}\n", kept.join(",")))
            }
            None => Some(format!("{l}\n")),
        })
        .collect();
    stripped.insert("host.graph".into(), host);
    let ri2 = ReducedInstance::from_files(&stripped).unwrap();
    assert!(!is_isomorphic(&recover_h1(&ri2).unwrap(), &ri.provenance.h1.graph));
}

#[test]
fn reduced_truth_matches_direct_truth_beyond_the_fixtures() {
    let sentences = [
        "E x. E y. adj(x,y)",
        "A x. E y. adj(x,y)",
        "E X. (E x. x in X) & (A x. A y. (x in X & adj(x,y)) -> y in X) & (E z. ~z in X)",
    ];
    for text in sentences {
        let phi = parse(text).unwrap();
        for f in [Graph::new(1), Graph::path(2), Graph::new(2), Graph::path(3)] {
            let ri = reduce_instance(&f, &phi).unwrap();
            let direct = naive_holds(&NaiveHost::from_graph(&f), &phi);
            assert_eq!(direct, holds(&f, &phi).unwrap());
            assert_eq!(check_reduced(&ri).unwrap(), direct, "{text} on {f:?}");
        }
    }
}

#[test]
fn open_and_directed_sources_are_refused() {
    let f = Graph::path(2);
    assert!(reduce_instance(&f, &parse("adj(x,y)").unwrap()).is_err());
    assert!(reduce_instance(&f, &parse("E x. E y. arc(x,y)").unwrap()).is_err());
}
