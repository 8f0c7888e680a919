//! The Laplacian diffusion kernel `D = exp(-beta L)` and the feature-space
//! geometry it induces.
//!
//! Prototypes are represented as coefficient vectors `gamma` over the mapped
//! vertices, `p = sum_i gamma_i phi(x_i)`, and every distance is evaluated
//! through the kernel matrix alone.

mod cache;
mod pca;

pub use cache::{read_kernel_cache, write_kernel_cache, CACHE_MAGIC, CACHE_VERSION};
pub use pca::{kernel_pca, KernelPca, PcaComponent};

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::spectral::EigenDecomposition;

/// Squared distances down to `-CLAMP_TOL` are treated as roundoff and
/// clamped to zero; anything more negative signals a non-PSD kernel.
pub const CLAMP_TOL: f64 = 1e-10;
/// Decompositions with a larger residual are rejected.
pub const MAX_DECOMP_RESIDUAL: f64 = 1e-8;
/// Range of beta values that has been studied on social graphs.
pub const RECOMMENDED_BETA: (f64, f64) = (0.01, 0.05);

#[derive(Debug, Clone)]
pub struct DiffusionKernel {
    pub beta: f64,
    pub matrix: Array2<f64>,
    /// [`EigenDecomposition::id`] of the source, or 0 when loaded from disk.
    pub source_decomp_id: u64,
}

impl DiffusionKernel {
    /// Wraps a precomputed kernel matrix (e.g. from a cache file).
    pub fn from_matrix(beta: f64, matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidParameter("kernel matrix must be square".into()));
        }
        Ok(Self { beta, matrix, source_decomp_id: 0 })
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[[i, j]]
    }

    /// Largest deviation of a row sum from 1.
    pub fn row_sum_deviation(&self) -> f64 {
        self.matrix.rows().into_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Assembles `sum_k exp(-beta lambda_k) h_k h_k^T` from a Laplacian
/// decomposition. `beta = 0` is accepted and yields the identity.
pub fn diffusion_kernel(decomp: &EigenDecomposition, beta: f64) -> Result<DiffusionKernel> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta = {beta} must be a non-negative number")));
    }
    if decomp.residual_bound > MAX_DECOMP_RESIDUAL {
        return Err(Error::ResidualTooLarge { residual: decomp.residual_bound, tolerance: MAX_DECOMP_RESIDUAL });
    }
    if beta > 0.0 && (beta < RECOMMENDED_BETA.0 || beta > RECOMMENDED_BETA.1) {
        log::warn!(
            "beta = {beta} lies outside the usual range [{}, {}]",
            RECOMMENDED_BETA.0,
            RECOMMENDED_BETA.1
        );
    }
    let raw = decomp.reconstruct_with(|l| (-beta * l).exp());
    let matrix = (&raw + &raw.t()) * 0.5;
    Ok(DiffusionKernel { beta, matrix, source_decomp_id: decomp.id() })
}

/// Explicit coordinates of the feature map under the weighted inner product
/// `<z, z'> = sum_k exp(-beta lambda_k) z_k z'_k`. Used as an oracle for the
/// kernel-trick computations.
#[derive(Debug, Clone)]
pub struct ExplicitFeatureMap {
    /// Row `i` is `(h0_i, ..., h{n-1}_i)`.
    pub coordinates: Array2<f64>,
    pub weights: Array1<f64>,
}

impl ExplicitFeatureMap {
    pub fn inner(&self, a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
        a.iter().zip(b).zip(&self.weights).map(|((x, y), w)| w * x * y).sum()
    }

    /// Explicit image of `sum_i gamma_i phi(x_i)`.
    pub fn combine(&self, gamma: &[f64]) -> Array1<f64> {
        self.coordinates.t().dot(&ArrayView1::from(gamma))
    }

    pub fn distance_sq(&self, a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
        let diff = &a - &b;
        self.inner(diff.view(), diff.view())
    }
}

pub fn explicit_feature_map(decomp: &EigenDecomposition, beta: f64) -> ExplicitFeatureMap {
    ExplicitFeatureMap {
        coordinates: decomp.eigenvectors.clone(),
        weights: decomp.eigenvalues.iter().map(|l| (-beta * l).exp()).collect(),
    }
}

pub(crate) fn clamp_distance(d: f64) -> Result<f64> {
    if d >= 0.0 {
        Ok(d)
    } else if d >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeDistance(d))
    }
}

fn check_len(kernel: &DiffusionKernel, gamma: &[f64]) -> Result<()> {
    if gamma.len() != kernel.order() {
        return Err(Error::InvalidParameter(format!(
            "coefficient vector has length {}, kernel has order {}",
            gamma.len(),
            kernel.order()
        )));
    }
    Ok(())
}

/// `||phi(x_i) - sum_j gamma_j phi(x_j)||^2 = K_ii + gamma^T K gamma - 2 (K gamma)_i`.
pub fn kernel_distance_sq(kernel: &DiffusionKernel, i: usize, gamma: &[f64]) -> Result<f64> {
    check_len(kernel, gamma)?;
    let g = ArrayView1::from(gamma);
    let kg = kernel.matrix.dot(&g);
    clamp_distance(kernel.get(i, i) + g.dot(&kg) - 2.0 * kg[i])
}

/// `(gamma_a - gamma_b)^T K (gamma_a - gamma_b)`.
pub fn prototype_distance_sq(kernel: &DiffusionKernel, gamma_a: &[f64], gamma_b: &[f64]) -> Result<f64> {
    check_len(kernel, gamma_a)?;
    check_len(kernel, gamma_b)?;
    let diff = &ArrayView1::from(gamma_a) - &ArrayView1::from(gamma_b);
    clamp_distance(diff.dot(&kernel.matrix.dot(&diff)))
}
