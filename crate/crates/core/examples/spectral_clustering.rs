//! Laplacian spectrum, Fiedler vector and spectral clustering of a small
//! world graph.

use kernsom::spectral::{assignment_blocks, evaluate_cut, laplacian, spectral_clustering, LaplacianMode};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::watts_strogatz(60, 4, 0.05, 3)?;
    let dec = laplacian(&g, LaplacianMode::Weighted).decompose()?;
    let head: Vec<String> = dec.eigenvalues.iter().take(6).map(|l| format!("{l:.4}")).collect();
    println!("smallest eigenvalues: {}", head.join(" "));
    println!("residual bound {:.2e}", dec.residual_bound);

    for k in [2, 3, 4] {
        let assignment = spectral_clustering(&g, k, k, 1)?;
        let blocks = assignment_blocks(&g, &assignment);
        let sizes: Vec<usize> = blocks.iter().map(Vec::len).collect();
        println!("k = {k}: sizes {sizes:?}, cut {}", evaluate_cut(&g, &blocks)?);
    }
    Ok(())
}
