//! Batch kernel self-organizing map.
//!
//! Each unit of a rectangular grid holds a prototype `p_j = sum_i gamma_ji
//! phi(x_i)` in the feature space of a graph kernel. Training alternates an
//! assignment step (nearest prototype, computed through the kernel) with a
//! representation step (neighborhood-weighted means), while a Gaussian
//! neighborhood `exp(-h^2 / T)` is annealed geometrically. The temperature
//! only drops once the assignment is stable; after the annealing ends a
//! final hard-neighborhood phase (kernel k-means) runs to stability.

mod grid;
mod hierarchy;
mod quality;
mod select;

pub use grid::GridTopology;
pub use hierarchy::{hierarchical_som, ChildMap};
pub use quality::{
    kaski_lagus, q_modularity, quality_report, quantization_error, u_matrix, unit_sizes, QualityReport,
};
pub use select::{model_selection, SelectionRow, DEFAULT_BETAS, DEFAULT_SIDES};

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use ndarray::{Array2, Axis};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::kernel::{diffusion_kernel, kernel_pca, DiffusionKernel};
use crate::spectral::{laplacian, LaplacianMode};

/// Row denominators below this leave the previous prototype untouched.
const EMPTY_ROW: f64 = 1e-300;
/// Leading kernel-PCA variance below this is a degenerate kernel.
const MIN_PCA_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SomInit {
    Random { seed: u64 },
    KernelPca,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub grid: GridTopology,
    /// Defaults to the squared grid diameter (at least 1).
    pub initial_temperature: Option<f64>,
    pub anneal_ratio: f64,
    /// Annealing stops once `exp(-1 / T)` falls below this.
    pub final_epsilon: f64,
    /// Defaults to `10 * M * n`.
    pub max_iterations: Option<usize>,
    pub init: SomInit,
}

impl SomConfig {
    pub fn new(grid: GridTopology, init: SomInit) -> Self {
        Self { grid, initial_temperature: None, anneal_ratio: 0.9, final_epsilon: 0.01, max_iterations: None, init }
    }

    pub fn start_temperature(&self) -> f64 {
        self.initial_temperature.unwrap_or_else(|| self.grid.max_distance_sq().max(1.0))
    }

    pub fn validate(&self) -> Result<()> {
        let t0 = self.start_temperature();
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("initial temperature {t0} must be positive")));
        }
        if !(self.anneal_ratio > 0.0 && self.anneal_ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("anneal ratio {} must lie in (0, 1)", self.anneal_ratio)));
        }
        if !(self.final_epsilon > 0.0 && self.final_epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "final epsilon {} must lie in (0, 1)",
                self.final_epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Anneal,
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub phase: Phase,
    /// Temperature used by the representation step; 0 in the final phase.
    pub temperature: f64,
    /// Vertices whose unit changed in this assignment step.
    pub changes: usize,
    pub assignment_hash: u64,
    /// The assignment repeated a non-consecutive earlier state at this
    /// temperature; the temperature was advanced.
    pub cycle: bool,
    /// Quantization error after the representation step.
    pub quantization_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineageStep {
    pub parent_vertex_set_hash: String,
    pub unit: usize,
    pub cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    pub config: SomConfig,
    pub beta: f64,
    /// Vertex labels in kernel order; empty when trained on a bare kernel.
    pub labels: Vec<String>,
    pub vertex_set_hash: String,
    /// `M x n` coefficient matrix, row `j` describing prototype `j`.
    #[serde(with = "matrix_serde")]
    pub gamma: Array2<f64>,
    pub assignment: Vec<usize>,
    pub log: Vec<IterationRecord>,
    pub lineage: Vec<LineageStep>,
}

impl SomModel {
    pub fn unit_count(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn members(&self, unit: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == unit).collect()
    }

    pub fn nonempty_units(&self) -> usize {
        unit_sizes(self).iter().filter(|&&s| s > 0).count()
    }
}

mod matrix_serde {
    use ndarray::Array2;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    }

    pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
        Repr { rows: m.nrows(), cols: m.ncols(), data: m.iter().copied().collect() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<f64>, D::Error> {
        let r = Repr::deserialize(d)?;
        Array2::from_shape_vec((r.rows, r.cols), r.data).map_err(serde::de::Error::custom)
    }
}

/// Prototype `j` is `phi(x_{k_j})` for distinct random vertices `k_j`.
/// With more units than vertices the extra units reuse random vertices.
pub fn init_random(kernel: &DiffusionKernel, grid: &GridTopology, seed: u64) -> Array2<f64> {
    let n = kernel.order();
    let m = grid.unit_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, n, m.min(n)).into_vec();
    if m > n {
        log::warn!("{m} units for {n} vertices; some prototypes start on the same vertex");
        while picks.len() < m {
            picks.push(rng.gen_range(0..n));
        }
    }
    let mut gamma = Array2::zeros((m, n));
    for (j, &k) in picks.iter().enumerate() {
        gamma[[j, k]] = 1.0;
    }
    gamma
}

/// Lays the grid on the plane of the two leading kernel principal
/// directions. The longer grid axis (rows on a square map) follows the first
/// direction `v1` and the other axis follows `v2`; along each axis the units
/// span the range of the projected data. An axis with a single unit sits at
/// the mean.
pub fn init_kernel_pca(kernel: &DiffusionKernel, grid: &GridTopology) -> Result<Array2<f64>> {
    let n = kernel.order();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("kernel PCA initialization needs n >= 3, got {n}")));
    }
    let pca = kernel_pca(kernel, 2)?;
    let lead = pca.components[0].variance;
    if lead < MIN_PCA_VARIANCE {
        return Err(Error::DegenerateKernel(lead));
    }
    let axis = |c: usize, steps: usize| -> Vec<f64> {
        if steps == 1 || pca.components[c].variance < MIN_PCA_VARIANCE {
            return vec![0.0; steps];
        }
        let col = pca.projections.column(c);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..steps).map(|s| lo + (hi - lo) * s as f64 / (steps - 1) as f64).collect()
    };
    let (row_pc, col_pc) = if grid.cols > grid.rows { (1, 0) } else { (0, 1) };
    let a = axis(row_pc, grid.rows);
    let b = axis(col_pc, grid.cols);
    let va = &pca.components[row_pc].coefficients;
    let vb = &pca.components[col_pc].coefficients;
    let mut gamma = Array2::from_elem((grid.unit_count(), n), 1.0 / n as f64);
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            let j = grid.unit(r, c);
            for i in 0..n {
                gamma[[j, i]] += a[r] * va[i] + b[c] * vb[i];
            }
        }
    }
    Ok(gamma)
}

/// `gamma K` together with the squared prototype norms `gamma_j^T K gamma_j`.
pub(crate) struct Geometry {
    pub gk: Array2<f64>,
    pub norms: Vec<f64>,
}

impl Geometry {
    pub fn new(kernel: &DiffusionKernel, gamma: &Array2<f64>) -> Self {
        let gk = gamma.dot(&kernel.matrix);
        let norms = gk.axis_iter(Axis(0)).zip(gamma.axis_iter(Axis(0))).map(|(a, b)| a.dot(&b)).collect();
        Self { gk, norms }
    }

    /// `||phi(x_i) - p_j||^2 - K_ii`.
    pub fn score(&self, j: usize, i: usize) -> f64 {
        self.norms[j] - 2.0 * self.gk[[j, i]]
    }

    pub fn best_unit(&self, i: usize) -> usize {
        let mut best = 0;
        let mut best_score = self.score(0, i);
        for j in 1..self.norms.len() {
            let s = self.score(j, i);
            if s < best_score {
                best = j;
                best_score = s;
            }
        }
        best
    }

    pub fn assign_all(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.best_unit(i)).collect()
    }

    pub fn distance_sq(&self, kernel: &DiffusionKernel, j: usize, i: usize) -> f64 {
        kernel.get(i, i) + self.score(j, i)
    }

    pub fn quantization_error(&self, kernel: &DiffusionKernel, assignment: &[usize]) -> f64 {
        assignment.iter().enumerate().map(|(i, &j)| self.distance_sq(kernel, j, i).max(0.0)).sum()
    }
}

/// Best matching unit of vertex `i`; ties go to the lowest unit index.
pub fn assign(kernel: &DiffusionKernel, gamma: &Array2<f64>, i: usize) -> usize {
    Geometry::new(kernel, gamma).best_unit(i)
}

/// Gaussian neighborhood `exp(-h^2 / T)`; `T = 0` is the hard limit
/// (1 at `h = 0`, 0 elsewhere) and `T = inf` is constant 1.
pub fn neighborhood(h: f64, temperature: f64) -> f64 {
    if h == 0.0 {
        1.0
    } else if temperature == 0.0 {
        0.0
    } else {
        (-h * h / temperature).exp()
    }
}

/// Representation step: `gamma_ji = R(h(f(x_i), j)) / sum_u R(h(f(x_u), j))`.
/// Rows whose denominator underflows keep their value from `previous`.
pub fn represent(grid: &GridTopology, assignment: &[usize], temperature: f64, previous: &Array2<f64>) -> Array2<f64> {
    let m = grid.unit_count();
    let n = assignment.len();
    let mut weights = Array2::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            weights[[a, b]] = neighborhood(grid.distance(a, b), temperature);
        }
    }
    let mut gamma = Array2::zeros((m, n));
    for j in 0..m {
        let denom: f64 = assignment.iter().map(|&f| weights[[f, j]]).sum();
        if denom < EMPTY_ROW {
            gamma.row_mut(j).assign(&previous.row(j));
            continue;
        }
        for (i, &f) in assignment.iter().enumerate() {
            gamma[[j, i]] = weights[[f, j]] / denom;
        }
    }
    gamma
}

fn assignment_hash(f: &[usize]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    f.hash(&mut h);
    h.finish()
}

/// Trains a batch kernel SOM on a precomputed kernel.
pub fn train(kernel: &DiffusionKernel, config: &SomConfig) -> Result<SomModel> {
    config.validate()?;
    let n = kernel.order();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let grid = &config.grid;
    let m = grid.unit_count();
    if m > n {
        log::warn!("map has {m} units for only {n} vertices");
    }
    let guard = config.max_iterations.unwrap_or(10 * m * n).max(1);
    let final_temperature_reached = |t: f64| (-1.0 / t).exp() < config.final_epsilon;

    let mut gamma = match config.init {
        SomInit::Random { seed } => init_random(kernel, grid, seed),
        SomInit::KernelPca => init_kernel_pca(kernel, grid)?,
    };
    let mut geometry = Geometry::new(kernel, &gamma);
    let mut temperature = config.start_temperature();
    let mut phase = Phase::Anneal;
    let mut previous: Option<Vec<usize>> = None;
    let mut seen: HashSet<u64> = HashSet::new();
    let mut log = Vec::new();

    let assignment = loop {
        if log.len() >= guard {
            return Err(Error::IterationGuard(guard));
        }
        let f = geometry.assign_all(n);
        let hash = assignment_hash(&f);
        let changes = match &previous {
            Some(p) => p.iter().zip(&f).filter(|(a, b)| a != b).count(),
            None => n,
        };
        let stable = previous.as_ref() == Some(&f);
        let cycle = !stable && !seen.insert(hash);
        if cycle {
            log::warn!("assignment cycle detected at temperature {temperature}; advancing");
        }
        if stable || cycle {
            match phase {
                Phase::Final => break f,
                Phase::Anneal if final_temperature_reached(temperature) => phase = Phase::Final,
                Phase::Anneal => temperature *= config.anneal_ratio,
            }
            seen.clear();
            seen.insert(hash);
        }
        let t = match phase {
            Phase::Anneal => temperature,
            Phase::Final => 0.0,
        };
        gamma = represent(grid, &f, t, &gamma);
        geometry = Geometry::new(kernel, &gamma);
        log.push(IterationRecord {
            iteration: log.len() + 1,
            phase,
            temperature: t,
            changes,
            assignment_hash: hash,
            cycle,
            quantization_error: geometry.quantization_error(kernel, &f),
        });
        previous = Some(f);
    };

    Ok(SomModel {
        config: config.clone(),
        beta: kernel.beta,
        labels: Vec::new(),
        vertex_set_hash: String::new(),
        gamma,
        assignment,
        log,
        lineage: Vec::new(),
    })
}

/// Builds the weighted Laplacian diffusion kernel of `g` and trains a map
/// on it; the model records the graph's labels.
pub fn train_on_graph(g: &WeightedGraph, beta: f64, config: &SomConfig) -> Result<(SomModel, DiffusionKernel)> {
    let decomp = laplacian(g, LaplacianMode::Weighted).decompose()?;
    let kernel = diffusion_kernel(&decomp, beta)?;
    let mut model = train(&kernel, config)?;
    model.labels = g.labels().to_vec();
    model.vertex_set_hash = g.vertex_set_hash();
    Ok((model, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::diffusion_kernel;
    use crate::spectral::{laplacian, LaplacianMode};

    pub(crate) fn kernel_of(g: &WeightedGraph, beta: f64) -> DiffusionKernel {
        diffusion_kernel(&laplacian(g, LaplacianMode::Weighted).decompose().unwrap(), beta).unwrap()
    }

    fn k2() -> DiffusionKernel {
        kernel_of(&WeightedGraph::from_index_edges(2, &[(0, 1, 1.0)]).unwrap(), 0.5)
    }

    #[test]
    fn random_init_properties() {
        let k = kernel_of(&WeightedGraph::from_index_edges(5, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]).unwrap(), 0.1);
        let one = init_random(&k, &GridTopology::new(1, 1).unwrap(), 3);
        assert_eq!(one.sum(), 1.0);
        assert_eq!(one.iter().filter(|&&x| x == 1.0).count(), 1);
        let grid = GridTopology::new(1, 5).unwrap();
        let a = init_random(&k, &grid, 11);
        assert_eq!(a, init_random(&k, &grid, 11));
        // permutation matrix
        for axis in [Axis(0), Axis(1)] {
            for lane in a.axis_iter(axis) {
                assert_eq!(lane.sum(), 1.0);
            }
        }
    }

    #[test]
    fn pca_init_single_unit_is_mean() {
        let g = WeightedGraph::from_index_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let gamma = init_kernel_pca(&kernel_of(&g, 0.5), &GridTopology::new(1, 1).unwrap()).unwrap();
        for x in gamma.iter() {
            assert!((x - 0.25).abs() < 1e-15);
        }
        assert!(init_kernel_pca(&k2(), &GridTopology::new(2, 2).unwrap()).is_err());
    }

    #[test]
    fn assignment_examples() {
        let k = k2();
        let single = Array2::from_elem((1, 2), 0.5);
        assert_eq!(assign(&k, &single, 0), 0);
        assert_eq!(assign(&k, &single, 1), 0);
        let eye = Array2::eye(2);
        assert_eq!(assign(&k, &eye, 0), 0);
        assert_eq!(assign(&k, &eye, 1), 1);
        let dup = Array2::from_shape_vec((2, 2), vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(assign(&k, &dup, 0), 0);
        assert_eq!(assign(&k, &dup, 1), 0);
    }

    #[test]
    fn representation_limits() {
        let grid = GridTopology::new(1, 3).unwrap();
        let f = vec![0, 0, 2, 2, 2];
        let prev = Array2::from_elem((3, 5), 0.2);
        let soft = represent(&grid, &f, f64::INFINITY, &prev);
        assert!(soft.iter().all(|&x| (x - 0.2).abs() < 1e-15));
        let hard = represent(&grid, &f, 0.0, &prev);
        assert_eq!(hard.row(0).to_vec(), vec![0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(hard.row(1), prev.row(1));
        let third = 1.0 / 3.0;
        assert_eq!(hard.row(2).to_vec(), vec![0.0, 0.0, third, third, third]);
        let single = represent(&GridTopology::new(1, 1).unwrap(), &[0, 0, 0, 0], 1.0, &Array2::zeros((1, 4)));
        assert!(single.iter().all(|&x| x == 0.25));
        for row in represent(&grid, &f, 2.0, &prev).rows() {
            assert!((row.sum() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_unit_closed_form() {
        let k = k2();
        let cfg = SomConfig::new(GridTopology::new(1, 1).unwrap(), SomInit::Random { seed: 0 });
        let model = train(&k, &cfg).unwrap();
        assert!(model.gamma.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        let e = quantization_error(&k, &model).unwrap();
        assert!((e - (-1.0f64).exp()).abs() < 1e-12);
        assert!(model.log.iter().skip(1).all(|r| r.changes == 0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SomConfig::new(GridTopology::new(2, 2).unwrap(), SomInit::KernelPca);
        cfg.anneal_ratio = 1.0;
        assert!(cfg.validate().is_err());
        cfg.anneal_ratio = 0.5;
        cfg.initial_temperature = Some(0.0);
        assert!(cfg.validate().is_err());
        assert_eq!(SomConfig::new(GridTopology::new(7, 7).unwrap(), SomInit::KernelPca).start_temperature(), 72.0);
    }

    #[test]
    fn guard_triggers() {
        let g = WeightedGraph::from_index_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let mut cfg = SomConfig::new(GridTopology::new(1, 2).unwrap(), SomInit::Random { seed: 1 });
        cfg.max_iterations = Some(2);
        assert!(matches!(train(&kernel_of(&g, 0.5), &cfg), Err(Error::IterationGuard(2))));
    }
}
