//! Cross-tabulates perfect communities against the units of a trained map.

use kernsom::cli::{crosstab, dominant_units};
use kernsom::communities::find_perfect_communities;
use kernsom::som::{train_on_graph, GridTopology, SomConfig, SomInit};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::planted_communities(30, 0.15, 4, 21)?.graph;
    let communities = find_perfect_communities(&g);
    let (model, _) = train_on_graph(&g, 0.05, &SomConfig::new(GridTopology::new(3, 3)?, SomInit::KernelPca))?;

    let rows = crosstab(&communities, &model)?;
    let dominant = dominant_units(&rows, communities.len());
    for (ci, c) in communities.iter().enumerate() {
        let spread: Vec<String> = rows.iter().filter(|r| r.0 == ci).map(|r| format!("u{}:{}", r.1, r.2)).collect();
        println!("{:?} -> {} (dominant {:?})", c.member_labels, spread.join(" "), dominant[ci]);
    }
    Ok(())
}
