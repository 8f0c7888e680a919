//! Perfect communities, rich-club, central vertices, and the glyph-level
//! summary graph assembled from them.
//!
//! A perfect community is a clique of at least two vertices whose members
//! share exactly the same neighbors outside the clique, i.e. a class of
//! vertices with identical closed neighborhoods. Detection is combinatorial;
//! the Laplacian spectrum is used afterwards to verify each community.

mod central;
mod richclub;
mod summary;

pub use central::{central_vertices, CentralK, CentralSelection};
pub use richclub::{rich_club, RichClub};
pub use summary::{summary_graph, Glyph, GlyphEdge, GlyphKind, NodeMetadata, SummaryGraph, VertexMeta};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::spectral::{grouping_tolerance, EigenDecomposition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectCommunity {
    /// Member positions, ascending.
    pub members: Vec<usize>,
    pub member_labels: Vec<String>,
    /// Positions of the shared outside neighbors, ascending.
    pub outside_neighbors: Vec<usize>,
    /// Unweighted degree of any member.
    pub inside_degree: usize,
    pub expected_eigenvalue: f64,
}

impl PerfectCommunity {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All maximal perfect communities of the induced non-weighted graph,
/// ordered by smallest member position.
pub fn find_perfect_communities(g: &WeightedGraph) -> Vec<PerfectCommunity> {
    let n = g.vertex_count();
    let mut classes: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let mut closed: Vec<usize> = g.neighbors(i).map(|(j, _)| j).collect();
        closed.push(i);
        closed.sort_unstable();
        classes.entry(closed).or_default().push(i);
    }
    let mut out: Vec<PerfectCommunity> = classes
        .into_iter()
        .filter(|(_, members)| members.len() >= 2)
        .map(|(closed, members)| {
            let outside: Vec<usize> = closed.iter().copied().filter(|v| members.binary_search(v).is_err()).collect();
            let d = g.degree(members[0]);
            PerfectCommunity {
                member_labels: members.iter().map(|&m| g.label(m).to_string()).collect(),
                members,
                outside_neighbors: outside,
                inside_degree: d,
                expected_eigenvalue: (d + 1) as f64,
            }
        })
        .collect();
    out.sort_by_key(|c| c.members[0]);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub members: Vec<String>,
    pub expected_eigenvalue: f64,
    /// `||L (e_first - e_j) - (d+1)(e_first - e_j)||_2` for every other member.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Number of eigenvalues within the grouping tolerance of `d + 1`.
    pub multiplicity: usize,
    pub multiplicity_ok: bool,
    /// Largest coordinate spread over the community among eigenvectors that
    /// do not define it.
    pub corollary_max_deviation: f64,
    pub corollary_ok: bool,
    pub verified: bool,
}

/// Checks a community against the spectrum of the unweighted Laplacian.
///
/// (a) indicator differences `e_i - e_j` are eigenvectors for `d + 1`;
/// (b) `d + 1` has multiplicity at least `k - 1`;
/// (c) every eigenvector outside the `d + 1` group, and every eigenvector
///     in it that is orthogonal to the difference space, is constant on the
///     community.
pub fn verify_community_spectral(
    g: &WeightedGraph,
    community: &PerfectCommunity,
    decomp: &EigenDecomposition,
    tol: f64,
) -> Result<VerificationReport> {
    let n = g.vertex_count();
    if decomp.order() != n {
        return Err(Error::InvalidParameter(format!(
            "decomposition has order {}, graph has {n} vertices",
            decomp.order()
        )));
    }
    let members = &community.members;
    let k = members.len();
    let lambda = community.expected_eigenvalue;
    let first = members[0];

    let is_adj = |a: usize, b: usize| if g.has_edge(a, b) { 1.0 } else { 0.0 };
    let mut residuals = Vec::with_capacity(k - 1);
    for &j in &members[1..] {
        // L (e_first - e_j) evaluated row by row on the unweighted graph
        let mut sq = 0.0;
        for r in 0..n {
            let l_r_first = if r == first { g.degree(first) as f64 } else { -is_adj(r, first) };
            let l_r_j = if r == j { g.degree(j) as f64 } else { -is_adj(r, j) };
            let v = (r == first) as u8 as f64 - (r == j) as u8 as f64;
            let x = l_r_first - l_r_j - lambda * v;
            sq += x * x;
        }
        residuals.push(sq.sqrt());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    if max_residual > tol {
        return Err(Error::NotPerfect { residual: max_residual, tolerance: tol });
    }

    let group_tol = grouping_tolerance(decomp);
    let in_group: Vec<bool> = decomp.eigenvalues.iter().map(|l| (l - lambda).abs() <= group_tol).collect();
    let multiplicity = in_group.iter().filter(|&&b| b).count();

    let mut corollary_max_deviation = 0.0f64;
    for (idx, &grouped) in in_group.iter().enumerate() {
        let h = decomp.vector(idx);
        let vals: Vec<f64> = members.iter().map(|&m| h[m]).collect();
        let mean = vals.iter().sum::<f64>() / k as f64;
        let projection = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>().sqrt();
        if grouped && projection > tol {
            continue;
        }
        let spread = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - vals.iter().copied().fold(f64::INFINITY, f64::min);
        corollary_max_deviation = corollary_max_deviation.max(spread);
    }

    let multiplicity_ok = multiplicity + 1 >= k;
    let corollary_ok = corollary_max_deviation <= tol;
    Ok(VerificationReport {
        members: community.member_labels.clone(),
        expected_eigenvalue: lambda,
        residuals,
        max_residual,
        multiplicity,
        multiplicity_ok,
        corollary_max_deviation,
        corollary_ok,
        verified: multiplicity_ok && corollary_ok,
    })
}
