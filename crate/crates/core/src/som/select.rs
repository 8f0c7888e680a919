use serde::{Deserialize, Serialize};

use super::{quality_report, train, GridTopology, SomConfig};
use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::kernel::diffusion_kernel;
use crate::spectral::{laplacian, LaplacianMode};

pub const DEFAULT_BETAS: [f64; 5] = [0.01, 0.02, 0.03, 0.04, 0.05];
/// Square maps from 5x5 to 10x10.
pub const DEFAULT_SIDES: [usize; 6] = [5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub beta: f64,
    pub grid: String,
    pub quantization_error: f64,
    pub kaski_lagus: Option<f64>,
    pub q_modularity: Option<f64>,
    pub nonempty_units: usize,
    /// 1 = lowest Kaski-Lagus value.
    pub kl_rank: Option<usize>,
    /// 1 = highest q-modularity.
    pub q_rank: Option<usize>,
}

fn ranks(values: &[Option<f64>], descending: bool) -> Vec<Option<usize>> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (values[a].unwrap(), values[b].unwrap());
        let o = if descending { y.total_cmp(&x) } else { x.total_cmp(&y) };
        o.then(a.cmp(&b))
    });
    let mut out = vec![None; values.len()];
    for (r, i) in idx.into_iter().enumerate() {
        out[i] = Some(r + 1);
    }
    out
}

/// Trains one map per `(beta, grid)` pair and ranks them by both measures.
/// No pair is singled out; the table is meant to be read by a person.
pub fn model_selection(
    g: &WeightedGraph,
    betas: &[f64],
    grids: &[GridTopology],
    base: &SomConfig,
    weighted_modularity: bool,
) -> Result<Vec<SelectionRow>> {
    let decomp = laplacian(g, LaplacianMode::Weighted).decompose()?;
    let mut rows = Vec::with_capacity(betas.len() * grids.len());
    for &beta in betas {
        let kernel = diffusion_kernel(&decomp, beta)?;
        for grid in grids {
            let config = SomConfig { grid: *grid, ..base.clone() };
            let model = train(&kernel, &config)?;
            let q = quality_report(g, &kernel, &model, weighted_modularity)?;
            log::info!("beta {beta} grid {grid}: KL {:?} Q {:?}", q.kaski_lagus, q.q_modularity);
            rows.push(SelectionRow {
                beta,
                grid: grid.to_string(),
                quantization_error: q.quantization_error,
                kaski_lagus: q.kaski_lagus,
                q_modularity: q.q_modularity,
                nonempty_units: q.nonempty_units,
                kl_rank: None,
                q_rank: None,
            });
        }
    }
    let kl: Vec<_> = rows.iter().map(|r| r.kaski_lagus).collect();
    let qm: Vec<_> = rows.iter().map(|r| r.q_modularity).collect();
    for ((row, k), q) in rows.iter_mut().zip(ranks(&kl, false)).zip(ranks(&qm, true)) {
        row.kl_rank = k;
        row.q_rank = q;
    }
    Ok(rows)
}
