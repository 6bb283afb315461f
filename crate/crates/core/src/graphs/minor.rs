use std::collections::HashSet;

use super::{Graph, GraphError};

/// Largest vertex count accepted by [`has_clique_minor`].
pub const MINOR_VERTEX_CEILING: usize = 16;

/// Whether `g` has a `K_ell` minor.
///
/// Branch-and-bound over edge contractions: a `K_ell` minor exists iff some
/// sequence of contractions produces a graph containing `K_ell` as a
/// subgraph. Visited partitions are memoized; a branch is cut once it has
/// fewer than `ell` blocks or fewer than `ell(ell-1)/2` edges. Exponential,
/// so inputs above [`MINOR_VERTEX_CEILING`] vertices are refused.
pub fn has_clique_minor(g: &Graph, ell: usize) -> Result<bool, GraphError> {
    let n = g.vertex_count();
    if n > MINOR_VERTEX_CEILING {
        return Err(GraphError::Capacity {
            vertices: n,
            ceiling: MINOR_VERTEX_CEILING,
        });
    }
    if ell == 0 {
        return Ok(true);
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let blocks: Vec<u32> = (0..n).map(|v| 1u32 << v).collect();
    let mut search = Search {
        adj,
        ell,
        visited: HashSet::new(),
    };
    Ok(search.run(blocks))
}

struct Search {
    adj: Vec<u32>,
    ell: usize,
    visited: HashSet<Vec<u32>>,
}

impl Search {
    fn neighbourhood(&self, block: u32) -> u32 {
        let mut m = 0;
        let mut b = block;
        while b != 0 {
            let v = b.trailing_zeros() as usize;
            m |= self.adj[v];
            b &= b - 1;
        }
        m & !block
    }

    fn run(&mut self, blocks: Vec<u32>) -> bool {
        let k = blocks.len();
        if k < self.ell {
            return false;
        }
        let nbr: Vec<u32> = blocks.iter().map(|&b| self.neighbourhood(b)).collect();
        // block adjacency as index masks
        let badj: Vec<u64> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| j != i && nbr[i] & blocks[j] != 0)
                    .fold(0u64, |m, j| m | 1 << j)
            })
            .collect();
        let edges: usize = badj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2;
        if edges < self.ell * (self.ell - 1) / 2 {
            return false;
        }
        if has_clique(&badj, self.ell) {
            return true;
        }
        if k == self.ell {
            return false;
        }
        for i in 0..k {
            let mut rest = badj[i] & !((1u64 << (i + 1)) - 1);
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let mut next: Vec<u32> = blocks
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != i && t != j)
                    .map(|(_, &b)| b)
                    .collect();
                next.push(blocks[i] | blocks[j]);
                next.sort_unstable();
                if self.visited.insert(next.clone()) && self.run(next) {
                    return true;
                }
            }
        }
        false
    }
}

fn has_clique(adj: &[u64], size: usize) -> bool {
    fn extend(adj: &[u64], candidates: u64, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        if (candidates.count_ones() as usize) < need {
            return false;
        }
        let mut c = candidates;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            // only extend with higher-numbered vertices to avoid repeats
            if extend(adj, adj[v] & c, need - 1) {
                return true;
            }
        }
        false
    }
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    extend(adj, all, size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biclique_4_7_has_k5_minor() {
        assert!(has_clique_minor(&Graph::complete_bipartite(4, 7), 5).unwrap());
    }

    #[test]
    fn four_cycle_has_triangle_minor() {
        assert!(has_clique_minor(&Graph::cycle(4), 3).unwrap());
        assert!(!has_clique_minor(&Graph::cycle(4), 4).unwrap());
    }

    #[test]
    fn edgeless_has_no_k2_minor() {
        assert!(!has_clique_minor(&Graph::new(5), 2).unwrap());
        assert!(has_clique_minor(&Graph::new(5), 1).unwrap());
    }

    #[test]
    fn refuses_large_inputs() {
        assert!(matches!(
            has_clique_minor(&Graph::new(MINOR_VERTEX_CEILING + 1), 2),
            Err(GraphError::Capacity { .. })
        ));
    }
}
