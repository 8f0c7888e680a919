//! Hop-count metrology on the induced non-weighted graph: diameter, mean
//! shortest path, local connectivity, betweenness, degree distributions.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WeightedGraph;

/// Number of BFS sources processed per parallel batch. Results are summed
/// in source order so the output does not depend on the thread schedule.
const SOURCE_BATCH: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub total_weight: f64,
    pub density: f64,
    pub diameter: usize,
    pub mean_shortest_path: f64,
    pub local_connectivity: f64,
    pub component_count: usize,
    /// True when diameter and mean path were measured on the largest
    /// component because the graph is disconnected.
    pub paths_on_largest_component: bool,
}

/// Components as sorted position lists, ordered by smallest member.
pub fn connected_components(g: &WeightedGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
pub fn bfs_hops(g: &WeightedGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for (v, _) in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Hop diameter, or `None` when the graph is disconnected. Empty and
/// single-vertex graphs have diameter 0.
pub fn hop_diameter(g: &WeightedGraph) -> Option<usize> {
    let mut diameter = 0;
    for s in 0..g.vertex_count() {
        for d in bfs_hops(g, s) {
            if d == usize::MAX {
                return None;
            }
            diameter = diameter.max(d);
        }
    }
    Some(diameter)
}

fn density_of(n: usize, m: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        m as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
    }
}

pub fn graph_stats(g: &WeightedGraph) -> GraphStats {
    let n = g.vertex_count();
    let m = g.edge_count();
    let comps = connected_components(g);
    let disconnected = comps.len() > 1;
    let (diameter, mean_shortest_path) = if disconnected {
        let lcc = g.largest_connected_component().expect("non-empty");
        path_lengths(&lcc)
    } else {
        path_lengths(g)
    };

    let mut local_sum = 0.0;
    let mut local_count = 0usize;
    for i in 0..n {
        let nbrs: Vec<usize> = g.neighbors(i).map(|(j, _)| j).collect();
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[a + 1..] {
                if g.has_edge(u, v) {
                    links += 1;
                }
            }
        }
        local_sum += density_of(k, links);
        local_count += 1;
    }

    GraphStats {
        vertex_count: n,
        edge_count: m,
        total_weight: g.total_weight(),
        density: density_of(n, m),
        diameter,
        mean_shortest_path,
        local_connectivity: if local_count == 0 { 0.0 } else { local_sum / local_count as f64 },
        component_count: comps.len(),
        paths_on_largest_component: disconnected,
    }
}

/// (diameter, mean over unordered pairs) for a connected graph.
fn path_lengths(g: &WeightedGraph) -> (usize, f64) {
    let n = g.vertex_count();
    if n < 2 {
        return (0, 0.0);
    }
    let sources: Vec<usize> = (0..n).collect();
    let mut diameter = 0usize;
    let mut total = 0u64;
    for batch in sources.chunks(SOURCE_BATCH) {
        let partial: Vec<(usize, u64)> = batch
            .par_iter()
            .map(|&s| {
                let d = bfs_hops(g, s);
                let far = d[s + 1..].iter().copied().max().unwrap_or(0);
                let sum = d[s + 1..].iter().map(|&x| x as u64).sum();
                (far, sum)
            })
            .collect();
        for (far, sum) in partial {
            diameter = diameter.max(far);
            total += sum;
        }
    }
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    (diameter, total as f64 / pairs)
}

/// Unnormalized shortest-path betweenness on the induced non-weighted
/// graph, indexed by vertex position. Each unordered pair `{s, t}`
/// contributes `sigma_st(v) / sigma_st` to every interior vertex `v`.
pub fn betweenness(g: &WeightedGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut total = vec![0.0; n];
    let sources: Vec<usize> = (0..n).collect();
    for batch in sources.chunks(SOURCE_BATCH) {
        let partial: Vec<Vec<f64>> = batch.par_iter().map(|&s| dependencies_from(g, s)).collect();
        for delta in partial {
            for (t, d) in total.iter_mut().zip(delta) {
                *t += d;
            }
        }
    }
    // every unordered pair was visited from both endpoints
    for t in &mut total {
        *t /= 2.0;
    }
    total
}

/// Brandes single-source dependency accumulation.
fn dependencies_from(g: &WeightedGraph, s: usize) -> Vec<f64> {
    let n = g.vertex_count();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for (w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    let mut delta = vec![0.0; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

/// `(k, fraction of vertices with degree >= k)` over the distinct degrees,
/// ascending. Weighted mode uses `d_i = sum_j w_ij`.
pub fn cumulative_degree_distribution(g: &WeightedGraph, weighted: bool) -> Vec<(f64, f64)> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let mut degrees: Vec<f64> = (0..n)
        .map(|i| if weighted { g.weighted_degree(i) } else { g.degree(i) as f64 })
        .collect();
    degrees.sort_by(f64::total_cmp);
    let mut curve = Vec::new();
    let mut i = 0;
    while i < n {
        let k = degrees[i];
        curve.push((k, (n - i) as f64 / n as f64));
        while i < n && degrees[i] == k {
            i += 1;
        }
    }
    curve
}
