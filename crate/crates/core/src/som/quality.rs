use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Geometry, GridTopology, SomModel};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::kernel::{clamp_distance, DiffusionKernel};

fn check_model(kernel: &DiffusionKernel, model: &SomModel) -> Result<()> {
    if model.gamma.ncols() != kernel.order() || model.assignment.len() != kernel.order() {
        return Err(Error::InvalidParameter(format!(
            "model covers {} vertices, kernel has order {}",
            model.assignment.len(),
            kernel.order()
        )));
    }
    Ok(())
}

/// `sum_i ||phi(x_i) - p_{f(x_i)}||^2`.
pub fn quantization_error(kernel: &DiffusionKernel, model: &SomModel) -> Result<f64> {
    check_model(kernel, model)?;
    let geo = Geometry::new(kernel, &model.gamma);
    let mut total = 0.0;
    for (i, &j) in model.assignment.iter().enumerate() {
        total += clamp_distance(geo.distance_sq(kernel, j, i))?;
    }
    Ok(total)
}

/// Squared distances between all pairs of prototypes.
fn prototype_distances(kernel: &DiffusionKernel, gamma: &Array2<f64>) -> Result<Array2<f64>> {
    let gram = gamma.dot(&kernel.matrix).dot(&gamma.t());
    let m = gamma.nrows();
    let mut d = Array2::zeros((m, m));
    for a in 0..m {
        for b in (a + 1)..m {
            let v = clamp_distance(gram[[a, a]] + gram[[b, b]] - 2.0 * gram[[a, b]])?;
            d[[a, b]] = v;
            d[[b, a]] = v;
        }
    }
    Ok(d)
}

#[derive(PartialEq)]
struct State {
    cost: f64,
    unit: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.unit.cmp(&self.unit))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest grid-path lengths from `source`, edges between 4-neighbors
/// weighted by `lengths`.
pub(crate) fn grid_paths(grid: &GridTopology, lengths: &Array2<f64>, source: usize) -> Vec<f64> {
    let m = grid.unit_count();
    let mut dist = vec![f64::INFINITY; m];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State { cost: 0.0, unit: source });
    while let Some(State { cost, unit }) = heap.pop() {
        if cost > dist[unit] {
            continue;
        }
        for v in grid.neighbors(unit) {
            let next = cost + lengths[[unit, v]];
            if next < dist[v] {
                dist[v] = next;
                heap.push(State { cost: next, unit: v });
            }
        }
    }
    dist
}

/// Kaski-Lagus topology-preservation measure: for each vertex, the distance
/// to its best matching unit plus the shortest grid path (in prototype
/// distances) from the BMU to the second BMU, averaged over vertices.
pub fn kaski_lagus(kernel: &DiffusionKernel, model: &SomModel) -> Result<f64> {
    check_model(kernel, model)?;
    let grid = &model.config.grid;
    let m = grid.unit_count();
    if m < 2 {
        return Err(Error::InvalidParameter("Kaski-Lagus needs at least 2 units".into()));
    }
    let geo = Geometry::new(kernel, &model.gamma);
    let lengths = prototype_distances(kernel, &model.gamma)?.mapv(f64::sqrt);
    let mut paths: Vec<Option<Vec<f64>>> = vec![None; m];
    let n = model.assignment.len();
    let mut total = 0.0;
    for (i, &bmu) in model.assignment.iter().enumerate() {
        let quant = clamp_distance(geo.distance_sq(kernel, bmu, i))?.sqrt();
        let second = (0..m)
            .filter(|&j| j != bmu)
            .min_by(|&a, &b| geo.score(a, i).total_cmp(&geo.score(b, i)).then(a.cmp(&b)))
            .expect("at least two units");
        let from_bmu = paths[bmu].get_or_insert_with(|| grid_paths(grid, &lengths, bmu));
        total += quant + from_bmu[second];
    }
    Ok(total / n as f64)
}

/// Newman-style modularity of a partition, normalized by its maximum:
/// `sum_j (e_j - a_j^2) / (1 - sum_j a_j^2)`. With `weighted = false`
/// every edge counts 1.
pub fn q_modularity(g: &WeightedGraph, assignment: &[usize], weighted: bool) -> Result<f64> {
    if assignment.len() != g.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "assignment covers {} vertices, graph has {}",
            assignment.len(),
            g.vertex_count()
        )));
    }
    let clusters = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut intra = vec![0.0; clusters];
    let mut ends = vec![0.0; clusters];
    let mut total = 0.0;
    for (i, j, w) in g.edges() {
        let w = if weighted { w } else { 1.0 };
        total += w;
        ends[assignment[i]] += w;
        ends[assignment[j]] += w;
        if assignment[i] == assignment[j] {
            intra[assignment[i]] += w;
        }
    }
    if total == 0.0 {
        return Err(Error::UndefinedModularity(0.0));
    }
    let mut num = 0.0;
    let mut sum_a2 = 0.0;
    for c in 0..clusters {
        let a = ends[c] / (2.0 * total);
        num += intra[c] / total - a * a;
        sum_a2 += a * a;
    }
    let denom = 1.0 - sum_a2;
    if denom.abs() < 1e-12 {
        return Err(Error::UndefinedModularity(denom));
    }
    Ok(num / denom)
}

/// Number of vertices on each unit.
pub fn unit_sizes(model: &SomModel) -> Vec<usize> {
    let mut sizes = vec![0; model.unit_count()];
    for &j in &model.assignment {
        sizes[j] += 1;
    }
    sizes
}

/// Mean prototype distance from each unit to its grid neighbors.
pub fn u_matrix(kernel: &DiffusionKernel, model: &SomModel) -> Result<Vec<f64>> {
    check_model(kernel, model)?;
    let grid = &model.config.grid;
    let d = prototype_distances(kernel, &model.gamma)?;
    Ok((0..grid.unit_count())
        .map(|j| {
            let nb = grid.neighbors(j);
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().map(|&v| d[[j, v]].sqrt()).sum::<f64>() / nb.len() as f64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub quantization_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kaski_lagus: Option<f64>,
    /// Why `kaski_lagus` is missing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kaski_lagus_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_modularity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_modularity_reason: Option<String>,
    pub weighted_modularity: bool,
    pub nonempty_units: usize,
    pub unit_sizes: Vec<usize>,
}

/// Every quality measure of a trained map. Measures whose preconditions fail
/// (a single unit, a single cluster) are reported as missing with a reason.
pub fn quality_report(
    g: &WeightedGraph,
    kernel: &DiffusionKernel,
    model: &SomModel,
    weighted_modularity: bool,
) -> Result<QualityReport> {
    let quantization_error = quantization_error(kernel, model)?;
    let (kaski_lagus, kaski_lagus_reason) = if model.unit_count() < 2 {
        (None, Some("map has a single unit; the second best matching unit is undefined".to_string()))
    } else {
        (Some(kaski_lagus(kernel, model)?), None)
    };
    let (q_modularity, q_modularity_reason) = match q_modularity(g, &model.assignment, weighted_modularity) {
        Ok(q) => (Some(q), None),
        Err(e @ Error::UndefinedModularity(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let sizes = unit_sizes(model);
    Ok(QualityReport {
        quantization_error,
        kaski_lagus,
        kaski_lagus_reason,
        q_modularity,
        q_modularity_reason,
        weighted_modularity,
        nonempty_units: sizes.iter().filter(|&&s| s > 0).count(),
        unit_sizes: sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::som::tests::kernel_of;
    use crate::som::{SomConfig, SomInit};

    fn two_triangles(bridge: bool) -> WeightedGraph {
        let mut e = vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)];
        if bridge {
            e.push((2, 3, 1.0));
        }
        WeightedGraph::from_index_edges(6, &e).unwrap()
    }

    fn model(grid: GridTopology, gamma: Array2<f64>, assignment: Vec<usize>) -> SomModel {
        SomModel {
            config: SomConfig::new(grid, SomInit::KernelPca),
            beta: 0.5,
            labels: vec![],
            vertex_set_hash: String::new(),
            gamma,
            assignment,
            log: vec![],
            lineage: vec![],
        }
    }

    #[test]
    fn modularity_examples() {
        let split = vec![0, 0, 0, 1, 1, 1];
        assert_eq!(q_modularity(&two_triangles(false), &split, true).unwrap(), 1.0);
        let q = q_modularity(&two_triangles(true), &split, true).unwrap();
        assert!((q - 5.0 / 7.0).abs() < 1e-12);
        assert!(matches!(
            q_modularity(&two_triangles(true), &[0; 6], true),
            Err(Error::UndefinedModularity(_))
        ));
    }

    #[test]
    fn modularity_weighting() {
        let g = WeightedGraph::from_index_edges(4, &[(0, 1, 3.0), (2, 3, 1.0), (1, 2, 1.0)]).unwrap();
        let f = [0, 0, 1, 1];
        // weighted: e = (3/5, 1/5), a = (7/10, 3/10)
        let q = q_modularity(&g, &f, true).unwrap();
        let expected = (0.6 - 0.49 + 0.2 - 0.09) / (1.0 - 0.49 - 0.09);
        assert!((q - expected).abs() < 1e-12);
        // unweighted: e = (1/3, 1/3), a = (1/2, 1/2)
        let q = q_modularity(&g, &f, false).unwrap();
        assert!((q - (2.0 / 3.0 - 0.5) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn kaski_lagus_on_k2() {
        let g = WeightedGraph::from_index_edges(2, &[(0, 1, 1.0)]).unwrap();
        let k = kernel_of(&g, 0.5);
        let m = model(GridTopology::new(1, 2).unwrap(), Array2::eye(2), vec![0, 1]);
        let kl = kaski_lagus(&k, &m).unwrap();
        assert!((kl - (2.0 * (-1.0f64).exp()).sqrt()).abs() < 1e-12);
        assert_eq!(quantization_error(&k, &m).unwrap(), 0.0);
        let single = model(GridTopology::new(1, 1).unwrap(), Array2::from_elem((1, 2), 0.5), vec![0, 0]);
        assert!(kaski_lagus(&k, &single).is_err());
        let rep = quality_report(&g, &k, &single, true).unwrap();
        assert!(rep.kaski_lagus.is_none() && rep.kaski_lagus_reason.is_some());
        assert!(rep.q_modularity.is_none());
        let u = u_matrix(&k, &m).unwrap();
        assert!((u[0] - (2.0 * (-1.0f64).exp()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dijkstra_prefers_cheap_detour() {
        let grid = GridTopology::new(2, 2).unwrap();
        let mut len = Array2::from_elem((4, 4), 1.0);
        len[[0, 1]] = 10.0;
        len[[1, 0]] = 10.0;
        let d = grid_paths(&grid, &len, 0);
        assert_eq!(d, vec![0.0, 3.0, 1.0, 2.0]);
    }

    // every simple path from a to b, for grids small enough to enumerate
    fn exhaustive(grid: &GridTopology, len: &Array2<f64>, at: usize, to: usize, seen: &mut Vec<bool>, acc: f64) -> f64 {
        if at == to {
            return acc;
        }
        let mut best = f64::INFINITY;
        for v in grid.neighbors(at) {
            if !seen[v] {
                seen[v] = true;
                best = best.min(exhaustive(grid, len, v, to, seen, acc + len[[at, v]]));
                seen[v] = false;
            }
        }
        best
    }

    proptest::proptest! {
        #[test]
        fn dijkstra_matches_enumeration(
            rows in 1usize..=3,
            cols in 1usize..=3,
            raw in proptest::collection::vec(0.01f64..5.0, 81),
        ) {
            let grid = GridTopology::new(rows, cols).unwrap();
            let m = grid.unit_count();
            let mut len = Array2::zeros((m, m));
            for a in 0..m {
                for b in (a + 1)..m {
                    len[[a, b]] = raw[a * 9 + b];
                    len[[b, a]] = raw[a * 9 + b];
                }
            }
            for s in 0..m {
                let d = grid_paths(&grid, &len, s);
                for t in 0..m {
                    let mut seen = vec![false; m];
                    seen[s] = true;
                    let e = exhaustive(&grid, &len, s, t, &mut seen, 0.0);
                    proptest::prop_assert!((d[t] - e).abs() <= 1e-12 * e.max(1.0));
                }
            }
        }
    }
}
