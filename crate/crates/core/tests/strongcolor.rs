mod common;

use std::collections::BTreeSet;

use gridmso::graphs::make_grid;
use gridmso::strongcolor::{key_observation_check, strong_edge_colour, validate_strong, white_colours};
use gridmso::{EdgeColouring, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Distance of two edges is at most one when they share a vertex or some
/// edge joins them.
fn conflict(g: &Graph, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let touch = |x: usize, y: usize| x == y || g.has_edge(x, y);
    touch(a, c) || touch(a, d) || touch(b, c) || touch(b, d)
}

fn naive_strong(g: &Graph, c: &EdgeColouring) -> bool {
    let edges: Vec<_> = g.edges().collect();
    edges.iter().all(|&e| c.colour(e.0, e.1).is_some())
        && edges.iter().enumerate().all(|(i, &e)| {
            edges[i + 1..]
                .iter()
                .all(|&f| !conflict(g, e, f) || c.colour(e.0, e.1) != c.colour(f.0, f.1))
        })
}

#[test]
fn greedy_colourings_are_strong_and_within_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let n = rng.gen_range(1..=20);
        let d = rng.gen_range(1..=5);
        let g = random_bounded_degree(&mut rng, n, d);
        let c = strong_edge_colour(&g);
        assert_eq!(c.len(), g.edge_count());
        assert!(validate_strong(&g, &c).unwrap());
        assert!(naive_strong(&g, &c));
        let delta = g.max_degree();
        assert!(c.palette_size() <= (2 * delta * delta.saturating_sub(1) + 1).max(1));
    }
}

#[test]
fn validation_catches_a_clash() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut caught = 0;
    for _ in 0..100 {
        let g = random_bounded_degree(&mut rng, 12, 4);
        let edges: Vec<_> = g.edges().collect();
        let mut pairs = Vec::new();
        for (i, &e) in edges.iter().enumerate() {
            for &f in &edges[i + 1..] {
                if conflict(&g, e, f) {
                    pairs.push((e, f));
                }
            }
        }
        if pairs.is_empty() {
            continue;
        }
        let (e, f) = pairs[rng.gen_range(0..pairs.len())];
        let mut c = strong_edge_colour(&g);
        let k = c.colour(f.0, f.1).unwrap();
        c.set(e.0, e.1, k);
        assert!(!validate_strong(&g, &c).unwrap());
        assert!(!naive_strong(&g, &c));
        caught += 1;
    }
    assert!(caught > 50);
}

#[test]
fn greedy_is_deterministic() {
    let g = make_grid(5, 5).unwrap().graph().clone();
    assert_eq!(strong_edge_colour(&g), strong_edge_colour(&g));
}

#[test]
fn white_edges_are_recovered_from_shared_colours() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let g = random_bounded_degree(&mut rng, 14, 4);
        let c = strong_edge_colour(&g);
        let white: BTreeSet<(usize, usize)> = g.edges().filter(|_| rng.gen_bool(0.5)).collect();
        assert!(key_observation_check(&g, &c, &white));
        for (u, v) in g.edges() {
            let shared = !white_colours(&g, &c, &white, u)
                .is_disjoint(&white_colours(&g, &c, &white, v));
            assert_eq!(shared, white.contains(&(u, v)));
        }
    }
}
