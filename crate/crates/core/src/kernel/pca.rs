use ndarray::{Array1, Array2};

use super::DiffusionKernel;
use crate::error::{Error, Result};
use crate::spectral::eig_sym;

/// Eigenvalues of the centered kernel below this are treated as zero.
const NULL_EIGENVALUE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct PcaComponent {
    /// Coefficients `alpha` of the unit-norm feature-space direction
    /// `sum_i alpha_i phi(x_i)`; they sum to zero.
    pub coefficients: Vec<f64>,
    /// Variance of the projected data along this direction (`mu / n`).
    pub variance: f64,
}

#[derive(Debug, Clone)]
pub struct KernelPca {
    pub components: Vec<PcaComponent>,
    /// `n x c`: projection of each centered mapped vertex on each component.
    pub projections: Array2<f64>,
}

/// Kernel PCA of the mapped vertices, components by decreasing variance.
pub fn kernel_pca(kernel: &DiffusionKernel, num_components: usize) -> Result<KernelPca> {
    let n = kernel.order();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("kernel PCA needs at least 2 vertices, got {n}")));
    }
    if num_components == 0 || num_components > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "num_components = {num_components} must be in 1..={}",
            n - 1
        )));
    }
    let k = &kernel.matrix;
    let row_means: Array1<f64> = k.rows().into_iter().map(|r| r.mean().unwrap_or(0.0)).collect();
    let grand = row_means.mean().unwrap_or(0.0);
    let mut centered = k.clone();
    for i in 0..n {
        for j in 0..n {
            centered[[i, j]] = k[[i, j]] - row_means[i] - row_means[j] + grand;
        }
    }
    let centered = (&centered + &centered.t()) * 0.5;
    let dec = eig_sym(&centered)?;

    let mut components = Vec::with_capacity(num_components);
    let mut projections = Array2::zeros((n, num_components));
    for c in 0..num_components {
        let idx = n - 1 - c;
        let mu = dec.eigenvalues[idx];
        let u = dec.vector(idx);
        let coefficients: Vec<f64> = if mu > NULL_EIGENVALUE {
            let alpha: Vec<f64> = u.iter().map(|x| x / mu.sqrt()).collect();
            let mean = alpha.iter().sum::<f64>() / n as f64;
            alpha.into_iter().map(|a| a - mean).collect()
        } else {
            vec![0.0; n]
        };
        let proj = centered.dot(&Array1::from(coefficients.clone()));
        projections.column_mut(c).assign(&proj);
        components.push(PcaComponent { coefficients, variance: mu.max(0.0) / n as f64 });
    }
    Ok(KernelPca { components, projections })
}
