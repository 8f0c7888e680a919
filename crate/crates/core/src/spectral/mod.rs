//! Graph Laplacians, their eigendecomposition, the relaxed-cut embedding and
//! the spectral clustering built on it.

mod eigen;
mod kmeans;

pub use eigen::{eig_sym, grouping_tolerance, EigenDecomposition, RESIDUAL_TOL, SYMMETRY_TOL};
pub use kmeans::{kmeans, KMeansOptions, KMeansResult};

use std::collections::BTreeSet;
use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Smallest positive eigenvalue accepted as evidence of connectivity.
pub const CONNECTIVITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianMode {
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    pub matrix: Array2<f64>,
    pub mode: LaplacianMode,
}

impl LaplacianMatrix {
    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn decompose(&self) -> Result<EigenDecomposition> {
        eig_sym(&self.matrix)
    }
}

/// `L_ii = d_i`, `L_ij = -w_ij`. Unweighted mode builds the Laplacian of
/// the induced non-weighted graph.
pub fn laplacian(g: &WeightedGraph, mode: LaplacianMode) -> LaplacianMatrix {
    let n = g.vertex_count();
    let mut m = Array2::zeros((n, n));
    for (i, j, w) in g.edges() {
        let w = match mode {
            LaplacianMode::Weighted => w,
            LaplacianMode::Unweighted => 1.0,
        };
        m[[i, j]] = -w;
        m[[j, i]] = -w;
        m[[i, i]] += w;
        m[[j, j]] += w;
    }
    LaplacianMatrix { matrix: m, mode }
}

#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub dimension: usize,
    /// Row `i` holds the coordinates of vertex `i`.
    pub coordinates: Array2<f64>,
}

impl SpectralEmbedding {
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coordinates.rows().into_iter().map(|r| r.to_vec()).collect()
    }
}

/// Maps vertex `i` to `(h1_i, ..., hp_i)` using the eigenvectors of the `p`
/// smallest positive eigenvalues.
pub fn spectral_embedding(decomp: &EigenDecomposition, p: usize) -> Result<SpectralEmbedding> {
    let n = decomp.order();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("embedding needs at least 2 vertices, got {n}")));
    }
    let lambda1 = decomp.eigenvalues[1];
    if lambda1 <= CONNECTIVITY_EPS {
        return Err(Error::Disconnected { lambda1 });
    }
    if p == 0 || p >= n {
        return Err(Error::InvalidParameter(format!("p = {p} must be in 1..={}", n - 1)));
    }
    let coordinates = decomp.eigenvectors.slice(ndarray::s![.., 1..=p]).to_owned();
    Ok(SpectralEmbedding { dimension: p, coordinates })
}

/// Number of k-means restarts used by [`spectral_clustering`]; the run with
/// the lowest objective wins.
pub const SPECTRAL_RESTARTS: u64 = 10;

/// Spectral embedding of the weighted Laplacian followed by k-means.
pub fn spectral_clustering(g: &WeightedGraph, p: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    let decomp = laplacian(g, LaplacianMode::Weighted).decompose()?;
    let points = spectral_embedding(&decomp, p)?.rows();
    let mut best: Option<KMeansResult> = None;
    for r in 0..SPECTRAL_RESTARTS {
        let run = kmeans(&points, k, seed.wrapping_add(r), &KMeansOptions::default())?;
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart").assignment)
}

/// `sum_i W(S_i, V \ S_i)`: every crossing edge is counted once from each
/// side.
pub fn evaluate_cut<S: AsRef<str>>(g: &WeightedGraph, partition: &[Vec<S>]) -> Result<f64> {
    let n = g.vertex_count();
    let mut block = vec![usize::MAX; n];
    for (b, set) in partition.iter().enumerate() {
        for label in set {
            let i = g.position_of(label.as_ref())?;
            if block[i] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "vertex `{}` appears in more than one block",
                    label.as_ref()
                )));
            }
            block[i] = b;
        }
    }
    if let Some(i) = block.iter().position(|&b| b == usize::MAX) {
        return Err(Error::InvalidParameter(format!("vertex `{}` is not covered", g.label(i))));
    }
    Ok(g.edges().filter(|&(i, j, _)| block[i] != block[j]).map(|(_, _, w)| 2.0 * w).sum())
}

/// Partition blocks from a vertex-to-cluster assignment, in order of first
/// appearance of each cluster id.
pub fn assignment_blocks(g: &WeightedGraph, assignment: &[usize]) -> Vec<Vec<String>> {
    let ids: BTreeSet<usize> = assignment.iter().copied().collect();
    ids.into_iter()
        .map(|c| {
            assignment
                .iter()
                .enumerate()
                .filter(|(_, &a)| a == c)
                .map(|(i, _)| g.label(i).to_string())
                .collect()
        })
        .collect()
}

/// Row-major CSV dump with 17 significant digits per entry.
pub fn write_matrix_csv<W: Write>(m: &Array2<f64>, mut out: W) -> Result<()> {
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
