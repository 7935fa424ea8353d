//! Bipartite matching: Hopcroft–Karp for perfection tests and a Hungarian
//! solver for maximum-weight assignment.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Maximum matching of a bipartite graph given as left-side adjacency lists.
/// Returns the partner of every left vertex.
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0usize; left];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NIL;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == NIL {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left {
            if match_l[u] == NIL {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist);
            }
        }
    }
    match_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_r[v];
        if w == NIL || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist)) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = NIL;
    false
}

pub fn matching_size(adj: &[Vec<usize>], right: usize) -> usize {
    maximum_matching(adj, right).iter().flatten().count()
}

pub fn has_perfect_matching(adj: &[Vec<usize>], right: usize) -> bool {
    adj.len() == right && matching_size(adj, right) == right
}

/// The perfect matching whose partner sequence `(m[0], m[1], ...)` is
/// lexicographically smallest, if any perfect matching exists.
pub fn lex_smallest_perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    if !has_perfect_matching(adj, right) {
        return None;
    }
    let n = adj.len();
    let mut used = vec![false; right];
    let mut result = Vec::with_capacity(n);
    for u in 0..n {
        let mut candidates: Vec<usize> = adj[u].iter().copied().filter(|&v| !used[v]).collect();
        candidates.sort_unstable();
        candidates.dedup();
        let pick = candidates.into_iter().find(|&v| {
            used[v] = true;
            let ok = residual_is_perfect(adj, &used, u + 1);
            used[v] = false;
            ok
        })?;
        used[pick] = true;
        result.push(pick);
    }
    Some(result)
}

fn residual_is_perfect(adj: &[Vec<usize>], used: &[bool], from: usize) -> bool {
    // compact the remaining right vertices
    let mut remap = vec![NIL; used.len()];
    let mut next = 0;
    for (v, &u) in used.iter().enumerate() {
        if !u {
            remap[v] = next;
            next += 1;
        }
    }
    let sub: Vec<Vec<usize>> = adj[from..]
        .iter()
        .map(|a| a.iter().filter(|&&v| !used[v]).map(|&v| remap[v]).collect())
        .collect();
    has_perfect_matching(&sub, next)
}

/// Maximum-weight perfect matching on a square matrix; `None` entries are
/// forbidden. Returns the column assigned to each row, or `None` when no
/// perfect matching avoids the forbidden cells.
pub fn max_weight_perfect_matching(weights: &[Vec<Option<f64>>]) -> Option<Vec<usize>> {
    let n = weights.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let finite: Vec<f64> = weights.iter().flatten().flatten().copied().collect();
    let spread = finite.iter().fold(0.0f64, |m, w| m.max(w.abs())) + 1.0;
    let forbidden = spread * (n as f64 + 1.0) * 4.0;
    let cost = |r: usize, c: usize| weights[r][c].map_or(forbidden, |w| -w);

    // Shortest augmenting path Hungarian with 1-based potentials.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        p[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
        .iter()
        .enumerate()
        .all(|(r, &c)| weights[r][c].is_some())
        .then_some(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn brute_max_matching(adj: &[Vec<usize>], right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; right])
    }

    fn arb_graph() -> impl Strategy<Value = (Vec<Vec<usize>>, usize)> {
        (1usize..7, 1usize..7).prop_flat_map(|(l, r)| {
            (prop::collection::vec(prop::collection::vec(0..r, 0..=r), l), Just(r))
        })
    }

    proptest! {
        #[test]
        fn hopcroft_karp_is_maximum((adj, right) in arb_graph()) {
            let m = maximum_matching(&adj, right);
            let mut seen = vec![false; right];
            for (u, v) in m.iter().enumerate() {
                if let Some(v) = *v {
                    prop_assert!(adj[u].contains(&v));
                    prop_assert!(!seen[v]);
                    seen[v] = true;
                }
            }
            prop_assert_eq!(m.iter().flatten().count(), brute_max_matching(&adj, right));
        }

        #[test]
        fn lex_matching_is_smallest((adj, right) in arb_graph()) {
            let n = adj.len();
            let best = (0..right)
                .permutations(n.min(right))
                .filter(|p| n == right && p.iter().enumerate().all(|(u, v)| adj[u].contains(v)))
                .min();
            prop_assert_eq!(lex_smallest_perfect_matching(&adj, right), best);
        }

        #[test]
        fn hungarian_matches_brute_force(
            w in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.7, -5.0f64..5.0), 5), 5),
            n in 1usize..6,
        ) {
            let w: Vec<Vec<Option<f64>>> = w.into_iter().take(n).map(|r| r.into_iter().take(n).collect()).collect();
            let brute = (0..n)
                .permutations(n)
                .filter_map(|p| p.iter().enumerate().map(|(r, &c)| w[r][c]).sum::<Option<f64>>())
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
            let got = max_weight_perfect_matching(&w)
                .map(|p| p.iter().enumerate().map(|(r, &c)| w[r][c].unwrap()).sum::<f64>());
            match (brute, got) {
                (None, None) => {}
                (Some(b), Some(g)) => prop_assert!((b - g).abs() < 1e-9, "{} vs {}", b, g),
                other => prop_assert!(false, "mismatch {:?}", other),
            }
        }
    }

    #[test]
    fn empty_graph() {
        assert!(has_perfect_matching(&[], 0));
        assert_eq!(lex_smallest_perfect_matching(&[], 0), Some(vec![]));
        assert!(!has_perfect_matching(&[vec![]], 1));
    }
}
