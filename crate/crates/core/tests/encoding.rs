mod common;

use std::collections::BTreeSet;

use gridmso::encoding::{
    alphabet, build_labeling, decode, decode_with, select_representatives, EncodingError,
};
use gridmso::graphs::make_grid;
use gridmso::mso::EvalOptions;
use gridmso::strongcolor::strong_edge_colour;
use gridmso::{EncodingLabeling, Graph, PathSubgraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Random target: some paths of the grid and random edges between paths of
/// different classes.
fn random_target(rng: &mut impl Rng, rows: usize, cols: usize, max_paths: usize) -> PathSubgraph {
    let grid = make_grid(rows, cols).unwrap();
    let mut all: Vec<usize> = (0..rows + cols).collect();
    all.shuffle(rng);
    let take = rng.gen_range(1..=max_paths.min(all.len()));
    let mut paths = all[..take].to_vec();
    paths.sort_unstable();
    let mut g = Graph::new(paths.len());
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            if grid.class_of(paths[a]) != grid.class_of(paths[b]) && rng.gen_bool(0.5) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    PathSubgraph::new(paths, g)
}

#[test]
fn larger_grids_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..25 {
        let (rows, cols) = (rng.gen_range(3..=6), rng.gen_range(3..=6));
        let grid = make_grid(rows, cols).unwrap();
        let colouring = strong_edge_colour(grid.graph());
        let target = random_target(&mut rng, rows, cols, 6);
        let enc = build_labeling(&grid, &target, &colouring).unwrap();
        assert!(brute_isomorphic(&decode(&enc).unwrap(), &target.graph));
    }
}

#[test]
fn plain_decoding_agrees_with_hooks_on_small_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..6 {
        let grid = make_grid(2, 3).unwrap();
        let colouring = strong_edge_colour(grid.graph());
        let target = random_target(&mut rng, 2, 3, 3);
        let enc = build_labeling(&grid, &target, &colouring).unwrap();
        assert_eq!(decode_with(&enc, EvalOptions::plain()).unwrap(), decode(&enc).unwrap());
    }
}

#[test]
fn representatives_are_distinct_and_on_their_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        let (rows, cols) = (rng.gen_range(2..=6), rng.gen_range(2..=6));
        let grid = make_grid(rows, cols).unwrap();
        let target = random_target(&mut rng, rows, cols, rows + cols);
        let reps = select_representatives(&grid, &target.paths).unwrap();
        assert_eq!(reps.len(), target.paths.len());
        let distinct: BTreeSet<usize> = reps.values().copied().collect();
        assert_eq!(distinct.len(), reps.len());
        for (&p, &v) in &reps {
            assert!(grid.path(p).contains(&v));
        }
        // deterministic
        assert_eq!(select_representatives(&grid, &target.paths).unwrap(), reps);
    }
}

#[test]
fn labelings_use_the_documented_alphabet() {
    let grid = make_grid(4, 4).unwrap();
    let colouring = strong_edge_colour(grid.graph());
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let target = random_target(&mut rng, 4, 4, 4);
    let enc = build_labeling(&grid, &target, &colouring).unwrap();
    let c = enc.colour_count;
    assert_eq!(alphabet(c).len(), 2 * c + 3);
    assert_eq!(enc.host.alphabet(), alphabet(c).as_slice());
    assert_eq!(EncodingLabeling::from_text(&enc.to_text()).unwrap(), enc);
}

#[test]
fn same_class_edges_are_rejected() {
    let grid = make_grid(3, 3).unwrap();
    let colouring = strong_edge_colour(grid.graph());
    let same = (0..grid.paths().len())
        .flat_map(|a| (a + 1..grid.paths().len()).map(move |b| (a, b)))
        .find(|&(a, b)| grid.class_of(a) == grid.class_of(b))
        .unwrap();
    let target = PathSubgraph::new(vec![same.0, same.1], Graph::from_edges(2, [(0, 1)]).unwrap());
    assert!(matches!(
        build_labeling(&grid, &target, &colouring),
        Err(EncodingError::Bipartition(..))
    ));
}

#[test]
fn weak_colourings_are_rejected() {
    let grid = make_grid(3, 3).unwrap();
    let mut flat = strong_edge_colour(grid.graph());
    for (u, v) in grid.graph().edges() {
        flat.set(u, v, 1);
    }
    let target = PathSubgraph::new(vec![0], Graph::new(1));
    assert!(matches!(build_labeling(&grid, &target, &flat), Err(EncodingError::NotStrong)));
}
