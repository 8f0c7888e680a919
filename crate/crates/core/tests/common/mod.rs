#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use kernsom::graph::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
    let e: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    WeightedGraph::from_index_edges(n, &e).unwrap()
}

/// `G(n, p)` with integer weights in `1..=max_w`.
pub fn random_graph(n: usize, p: f64, max_w: u32, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                e.push((i, j, rng.gen_range(1..=max_w) as f64));
            }
        }
    }
    WeightedGraph::from_index_edges(n, &e).unwrap()
}

pub fn random_connected(n: usize, p: f64, max_w: u32, rng: &mut ChaCha8Rng) -> WeightedGraph {
    loop {
        let g = random_graph(n, p, max_w, rng);
        if g.is_connected() {
            return g;
        }
    }
}

/// Every vertex set of size >= 2 that is a clique whose members share the
/// same outside neighbors, reduced to the inclusion-maximal ones.
pub fn brute_force_perfect(g: &WeightedGraph) -> BTreeSet<Vec<usize>> {
    let n = g.vertex_count();
    let mut ok = Vec::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let clique = members.iter().all(|&a| members.iter().all(|&b| a == b || g.has_edge(a, b)));
        if !clique {
            continue;
        }
        let outside = |v: usize| -> Vec<usize> { (0..n).filter(|&u| mask & (1 << u) == 0 && g.has_edge(u, v)).collect() };
        let first = outside(members[0]);
        if members.iter().all(|&v| outside(v) == first) {
            ok.push(mask);
        }
    }
    ok.iter()
        .filter(|&&m| !ok.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|&v| m & (1 << v) != 0).collect())
        .collect()
}

fn hop_distances(g: &WeightedGraph, s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.vertex_count()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for (w, _) in g.neighbors(v) {
            if d[w] == usize::MAX {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn enumerate_paths(g: &WeightedGraph, dist_to_t: &[usize], v: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if v == t {
        out.push(path.clone());
        return;
    }
    for (w, _) in g.neighbors(v) {
        if dist_to_t[w] != usize::MAX && dist_to_t[w] + 1 == dist_to_t[v] {
            path.push(w);
            enumerate_paths(g, dist_to_t, w, t, path, out);
            path.pop();
        }
    }
}

/// Betweenness by listing every shortest path of every unordered pair.
pub fn betweenness_by_enumeration(g: &WeightedGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let dt = hop_distances(g, t);
            if dt[s] == usize::MAX {
                continue;
            }
            let mut paths = Vec::new();
            enumerate_paths(g, &dt, s, t, &mut vec![s], &mut paths);
            let total = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    bc[v] += 1.0 / total;
                }
            }
        }
    }
    bc
}
