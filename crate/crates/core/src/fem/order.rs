//! Reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use super::sparse::SparseOperator;

fn bfs_levels(adj: &[Vec<usize>], start: usize, seen: &mut [bool]) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![start]];
    seen[start] = true;
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

fn pseudo_peripheral(adj: &[Vec<usize>], start: usize, mask: &[bool]) -> usize {
    let mut node = start;
    let mut ecc = 0;
    loop {
        let mut seen = mask.to_vec();
        let levels = bfs_levels(adj, node, &mut seen);
        let depth = levels.len();
        if depth <= ecc {
            return node;
        }
        ecc = depth;
        let last = levels.last().unwrap();
        let cand = *last.iter().min_by_key(|&&v| (adj[v].len(), v)).unwrap();
        if cand == node {
            return node;
        }
        node = cand;
    }
}

/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseOperator) -> Vec<usize> {
    let n = a.dim;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        let start = pseudo_peripheral(&adj, seed, &placed);
        let mut queue = VecDeque::from([start]);
        placed[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !placed[w]).collect();
            nb.sort_by_key(|&w| (adj[w].len(), w));
            for w in nb {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Half-bandwidth `max |i − j|` of the permuted matrix.
pub fn bandwidth(a: &SparseOperator, perm: &[usize]) -> usize {
    let mut inv = vec![0; a.dim];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut b = 0;
    for i in 0..a.dim {
        for (j, _) in a.row(i) {
            b = b.max(inv[i].abs_diff(inv[j]));
        }
    }
    b
}
