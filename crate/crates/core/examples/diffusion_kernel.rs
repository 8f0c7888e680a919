//! Diffusion kernels over a range of beta, their cache format, and kernel
//! PCA of the result.

use kernsom::kernel::{diffusion_kernel, kernel_pca, read_kernel_cache, write_kernel_cache};
use kernsom::spectral::{laplacian, LaplacianMode};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::watts_strogatz(40, 4, 0.1, 2)?;
    let dec = laplacian(&g, LaplacianMode::Weighted).decompose()?;
    for beta in [0.01, 0.05, 0.5, 2.0] {
        let k = diffusion_kernel(&dec, beta)?;
        let diag: f64 = (0..k.order()).map(|i| k.get(i, i)).sum::<f64>() / k.order() as f64;
        println!("beta {beta:<4}: mean self-similarity {diag:.4}, row sum deviation {:.1e}", k.row_sum_deviation());
    }

    let k = diffusion_kernel(&dec, 0.5)?;
    let mut buf = Vec::new();
    write_kernel_cache(&k, &mut buf)?;
    let back = read_kernel_cache(&buf[..])?;
    println!("cache: {} bytes, identical {}", buf.len(), back.matrix == k.matrix);

    let pca = kernel_pca(&k, 3)?;
    for (i, c) in pca.components.iter().enumerate() {
        println!("component {i}: variance {:.5}", c.variance);
    }
    Ok(())
}
