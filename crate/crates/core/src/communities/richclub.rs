use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{hop_diameter, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichClub {
    /// Positions in scan order (non-increasing degree, ties by position).
    pub members: Vec<usize>,
    pub member_labels: Vec<String>,
    /// `(size, density)` of every degree-ordered prefix of size >= 2, over
    /// the whole vertex set.
    pub density_curve: Vec<(usize, f64)>,
    pub diameter_limit: usize,
}

impl RichClub {
    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }
}

/// Vertex positions sorted by non-increasing unweighted degree, ties by
/// position.
pub fn degree_order(g: &WeightedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    order
}

/// Greedy rich-club: the longest degree-ordered prefix whose induced
/// subgraph has hop diameter at most `diameter_limit`. The first candidate
/// that breaks the limit ends the scan.
pub fn rich_club(g: &WeightedGraph, diameter_limit: usize) -> Result<RichClub> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let order = degree_order(g);
    let n = order.len();

    let mut in_prefix = vec![false; n];
    let mut links = 0usize;
    let mut density_curve = Vec::with_capacity(n.saturating_sub(1));
    for (size, &v) in order.iter().enumerate().map(|(i, v)| (i + 1, v)) {
        links += g.neighbors(v).filter(|&(u, _)| in_prefix[u]).count();
        in_prefix[v] = true;
        if size >= 2 {
            let pairs = size as f64 * (size as f64 - 1.0) / 2.0;
            density_curve.push((size, links as f64 / pairs));
        }
    }

    let mut members = vec![order[0]];
    for &v in &order[1..] {
        members.push(v);
        let mut sorted = members.clone();
        sorted.sort_unstable();
        let fits = hop_diameter(&g.induced_by_positions(&sorted)).is_some_and(|d| d <= diameter_limit);
        if !fits {
            members.pop();
            break;
        }
    }

    Ok(RichClub {
        member_labels: members.iter().map(|&m| g.label(m).to_string()).collect(),
        members,
        density_curve,
        diameter_limit,
    })
}
