use serde::{Deserialize, Serialize};

use super::{PerfectCommunity, RichClub};
use crate::error::{Error, Result};
use crate::graph::{betweenness, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralK {
    Fixed(usize),
    /// Pick the k right after the largest single-step drop in component
    /// count; drops smaller than `min_drop` are ignored.
    Auto { min_drop: usize },
}

impl Default for CentralK {
    fn default() -> Self {
        CentralK::Auto { min_drop: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralSelection {
    /// Candidate positions by decreasing betweenness (ties by position).
    pub ranked_vertices: Vec<usize>,
    pub ranked_betweenness: Vec<f64>,
    /// `(k, components of the subgraph induced by communities, rich-club
    /// and the top-k candidates)`.
    pub component_curve: Vec<(usize, usize)>,
    pub chosen_k: usize,
    pub chosen_vertices: Vec<usize>,
    pub chosen_labels: Vec<String>,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Ranks the vertices outside communities and rich-club by betweenness and
/// tracks how adding them merges the summary into fewer components.
pub fn central_vertices(
    g: &WeightedGraph,
    communities: &[PerfectCommunity],
    rich_club: &RichClub,
    k: CentralK,
) -> Result<CentralSelection> {
    let n = g.vertex_count();
    let mut in_base = vec![false; n];
    for c in communities {
        for &m in &c.members {
            in_base[m] = true;
        }
    }
    for &m in &rich_club.members {
        in_base[m] = true;
    }

    let scores = betweenness(g);
    let mut ranked: Vec<usize> = (0..n).filter(|&v| !in_base[v]).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let horizon = match k {
        CentralK::Fixed(k) if k > ranked.len() => {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds the {} candidate vertices",
                ranked.len()
            )))
        }
        CentralK::Fixed(k) => k,
        CentralK::Auto { .. } => ranked.len(),
    };

    let mut dsu = DisjointSet::new(n);
    let mut present = vec![false; n];
    let mut components = 0usize;
    let add = |v: usize, present: &mut Vec<bool>, dsu: &mut DisjointSet, components: &mut usize| {
        present[v] = true;
        *components += 1;
        for (u, _) in g.neighbors(v) {
            if present[u] && dsu.union(u, v) {
                *components -= 1;
            }
        }
    };
    for v in (0..n).filter(|&v| in_base[v]) {
        add(v, &mut present, &mut dsu, &mut components);
    }
    let mut curve = vec![(0, components)];
    for (i, &v) in ranked[..horizon].iter().enumerate() {
        add(v, &mut present, &mut dsu, &mut components);
        curve.push((i + 1, components));
    }

    let chosen_k = match k {
        CentralK::Fixed(k) => k,
        CentralK::Auto { min_drop } => {
            let mut best = (0usize, 0usize);
            for w in curve.windows(2) {
                let drop = w[0].1.saturating_sub(w[1].1);
                if drop > best.1 {
                    best = (w[1].0, drop);
                }
            }
            if best.1 >= min_drop.max(1) {
                best.0
            } else {
                0
            }
        }
    };
    let chosen_vertices = ranked[..chosen_k].to_vec();
    Ok(CentralSelection {
        ranked_betweenness: ranked.iter().map(|&v| scores[v]).collect(),
        chosen_labels: chosen_vertices.iter().map(|&v| g.label(v).to_string()).collect(),
        ranked_vertices: ranked,
        component_curve: curve,
        chosen_k,
        chosen_vertices,
    })
}
