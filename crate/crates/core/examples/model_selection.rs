//! Sweeps beta and map sizes and prints the ranking table.

use kernsom::som::{model_selection, GridTopology, SomConfig, SomInit};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::watts_strogatz(120, 6, 0.1, 5)?;
    let grids = [GridTopology::new(3, 3)?, GridTopology::new(4, 4)?, GridTopology::new(5, 5)?];
    let base = SomConfig::new(grids[0], SomInit::KernelPca);
    let rows = model_selection(&g, &[0.01, 0.03, 0.05], &grids, &base, true)?;

    println!("{:>5} {:>5} {:>9} {:>8} {:>4} {:>4}", "beta", "grid", "KL", "Q", "klr", "qr");
    for r in rows {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        let n = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        println!(
            "{:>5} {:>5} {:>9} {:>8} {:>4} {:>4}",
            r.beta,
            r.grid,
            f(r.kaski_lagus),
            f(r.q_modularity),
            n(r.kl_rank),
            n(r.q_rank)
        );
    }
    Ok(())
}
