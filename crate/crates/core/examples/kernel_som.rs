//! Trains a kernel SOM on planted communities and reports its quality.

use kernsom::som::{quality_report, train_on_graph, u_matrix, GridTopology, Phase, SomConfig, SomInit};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::planted_communities(40, 0.12, 5, 8)?.graph;
    let g = g.largest_connected_component()?;
    let config = SomConfig::new(GridTopology::new(4, 4)?, SomInit::KernelPca);
    let (model, kernel) = train_on_graph(&g, 0.05, &config)?;

    let anneal = model.log.iter().filter(|r| r.phase == Phase::Anneal).count();
    println!("{} iterations ({anneal} annealing)", model.log.len());
    let q = quality_report(&g, &kernel, &model, true)?;
    println!("quantization error {:.4}", q.quantization_error);
    println!("Kaski-Lagus {:?}, Q {:?}", q.kaski_lagus, q.q_modularity);

    let um = u_matrix(&kernel, &model)?;
    let grid = model.config.grid;
    for r in 0..grid.rows {
        let line: Vec<String> = (0..grid.cols)
            .map(|c| {
                let j = grid.unit(r, c);
                format!("{:>3}/{:.2}", q.unit_sizes[j], um[j])
            })
            .collect();
        println!("{}", line.join("  "));
    }
    Ok(())
}
