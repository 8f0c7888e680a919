//! Trains a small map, then a child map on its largest cluster.

use kernsom::som::{hierarchical_som, train_on_graph, unit_sizes, GridTopology, SomConfig, SomInit};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::watts_strogatz(150, 6, 0.05, 12)?;
    let top = SomConfig::new(GridTopology::new(2, 2)?, SomInit::KernelPca);
    let (parent, _) = train_on_graph(&g, 0.05, &top)?;
    let sizes = unit_sizes(&parent);
    println!("top level sizes {sizes:?}");

    let largest = (0..sizes.len()).max_by_key(|&j| (sizes[j], std::cmp::Reverse(j))).unwrap();
    let child_config = SomConfig::new(GridTopology::new(3, 3)?, SomInit::KernelPca);
    let child = hierarchical_som(&g, &parent, largest, &child_config, 0.05)?;
    println!(
        "unit {largest}: {} vertices in {} component(s), child sizes {:?}",
        child.subgraph.vertex_count(),
        child.component_count,
        unit_sizes(&child.model)
    );
    for step in &child.model.lineage {
        println!("  from {} unit {} ({} vertices)", &step.parent_vertex_set_hash[..12], step.unit, step.cluster_size);
    }
    Ok(())
}
