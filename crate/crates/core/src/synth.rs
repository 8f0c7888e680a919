//! Seeded synthetic graphs for tests, examples and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::communities::find_perfect_communities;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

fn from_pairs(n: usize, pairs: &BTreeSet<(usize, usize)>) -> WeightedGraph {
    let edges: Vec<_> = pairs.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    WeightedGraph::from_index_edges(n, &edges).expect("generated edges are valid")
}

/// `G(n, p)` with unit weights.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                pairs.insert((i, j));
            }
        }
    }
    from_pairs(n, &pairs)
}

/// `G(n, p)` conditioned on connectivity (resampled until connected).
pub fn connected_erdos_renyi(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = erdos_renyi(n, p, rng.gen());
        if g.is_connected() {
            return g;
        }
    }
}

/// Ring lattice where each vertex links to its `k` nearest neighbors
/// (`k` even), each edge rewired with probability `p`.
pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    if k % 2 == 1 || k >= n {
        return Err(Error::InvalidParameter(format!("need an even k < n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        for s in 1..=k / 2 {
            pairs.insert(key(i, (i + s) % n));
        }
    }
    for s in 1..=k / 2 {
        for i in 0..n {
            let old = key(i, (i + s) % n);
            if !rng.gen_bool(p) || !pairs.contains(&old) {
                continue;
            }
            let target = rng.gen_range(0..n);
            if target == i || pairs.contains(&key(i, target)) {
                continue;
            }
            pairs.remove(&old);
            pairs.insert(key(i, target));
        }
    }
    Ok(from_pairs(n, &pairs))
}

/// Replaces vertex `v` of `base` by a clique of `sizes[v]` twins, each
/// linked to every twin of every neighbor of `v`. Returns the graph and the
/// blown-up classes (positions) in base order.
pub fn twin_blowup(base: &WeightedGraph, sizes: &[usize]) -> Result<(WeightedGraph, Vec<Vec<usize>>)> {
    if sizes.len() != base.vertex_count() || sizes.contains(&0) {
        return Err(Error::InvalidParameter("one positive size per base vertex is required".into()));
    }
    let mut classes = Vec::with_capacity(sizes.len());
    let mut next = 0;
    for &s in sizes {
        classes.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let mut pairs = BTreeSet::new();
    for class in &classes {
        for (a, &x) in class.iter().enumerate() {
            for &y in &class[a + 1..] {
                pairs.insert((x, y));
            }
        }
    }
    for (u, v, _) in base.edges() {
        for &x in &classes[u] {
            for &y in &classes[v] {
                pairs.insert((x.min(y), x.max(y)));
            }
        }
    }
    Ok((from_pairs(next, &pairs), classes))
}

#[derive(Debug, Clone)]
pub struct PlantedCommunities {
    pub graph: WeightedGraph,
    /// Classes of size >= 2, exactly the perfect communities of `graph`.
    pub planted: Vec<Vec<usize>>,
}

/// Connected twin-free base graph on `base_n` vertices blown up with random
/// class sizes in `1..=max_size`. A twin-free base guarantees that the
/// planted classes are exactly the maximal perfect communities.
pub fn planted_communities(base_n: usize, p: f64, max_size: usize, seed: u64) -> Result<PlantedCommunities> {
    if base_n < 4 || max_size == 0 {
        return Err(Error::InvalidParameter("need base_n >= 4 and max_size >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let base = erdos_renyi(base_n, p, rng.gen());
        if !base.is_connected() || !find_perfect_communities(&base).is_empty() {
            continue;
        }
        let sizes: Vec<usize> = (0..base_n).map(|_| rng.gen_range(1..=max_size)).collect();
        let (graph, classes) = twin_blowup(&base, &sizes)?;
        let planted = classes.into_iter().filter(|c| c.len() >= 2).collect();
        return Ok(PlantedCommunities { graph, planted });
    }
    Err(Error::InvalidParameter(format!("no twin-free connected base found for n = {base_n}, p = {p}")))
}

/// Small-world stand-in for a 615-vertex, 4193-edge interaction graph:
/// a rewired ring lattice thinned to the target edge count, with integer
/// weights skewed toward 1.
pub fn large_social_graph(seed: u64) -> Result<WeightedGraph> {
    const N: usize = 615;
    const EDGES: usize = 4193;
    let ring = watts_strogatz(N, 14, 0.1, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut edges: Vec<(usize, usize)> = ring.edges().map(|(a, b, _)| (a, b)).collect();
    edges.shuffle(&mut rng);
    let mut degree = vec![0usize; N];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    // drop edges whose endpoints keep a comfortable degree
    let mut kept = Vec::with_capacity(EDGES);
    let mut surplus = edges.len().saturating_sub(EDGES);
    for (a, b) in edges {
        if surplus > 0 && degree[a] > 4 && degree[b] > 4 {
            degree[a] -= 1;
            degree[b] -= 1;
            surplus -= 1;
        } else {
            kept.push((a, b));
        }
    }
    let weighted: Vec<_> = kept
        .into_iter()
        .map(|(a, b)| {
            let w = if rng.gen_bool(0.6) { 1.0 } else { rng.gen_range(2..=6) as f64 };
            (a, b, w)
        })
        .collect();
    WeightedGraph::from_index_edges(N, &weighted)
}
