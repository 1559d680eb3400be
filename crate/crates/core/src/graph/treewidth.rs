//! Min-fill greedy elimination ordering.

use std::collections::BTreeSet;

use super::SimpleGraph;

/// Width of the min-fill elimination order of `graph`, an upper bound on its
/// treewidth. Ties go to the smallest vertex id.
pub fn treewidth_estimate(graph: &SimpleGraph) -> usize {
    let n = graph.len();
    let mut adjacency: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).clone()).collect();
    let mut alive = vec![true; n];
    let mut width = 0;
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let fill = fill_in(&adjacency, v);
            if best.is_none_or(|(b, _)| fill < b) {
                best = Some((fill, v));
            }
            if fill == 0 {
                break;
            }
        }
        let (_, v) = best.expect("a live vertex remains");
        let nbrs: Vec<usize> = adjacency[v].iter().copied().collect();
        width = width.max(nbrs.len());
        for (x, &a) in nbrs.iter().enumerate() {
            adjacency[a].remove(&v);
            for &b in &nbrs[x + 1..] {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        adjacency[v].clear();
        alive[v] = false;
    }
    width
}

fn fill_in(adjacency: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adjacency[v].iter().copied().collect();
    let mut missing = 0;
    for (x, &a) in nbrs.iter().enumerate() {
        missing += nbrs[x + 1..].iter().filter(|b| !adjacency[a].contains(b)).count();
    }
    missing
}
