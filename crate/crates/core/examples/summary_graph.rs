//! Rich-club, central vertices and the summary graph, written as DOT.

use kernsom::cli::summary_dot;
use kernsom::communities::{central_vertices, find_perfect_communities, rich_club, summary_graph, CentralK};
use kernsom::synth;

fn main() -> kernsom::Result<()> {
    let g = synth::planted_communities(30, 0.15, 3, 4)?.graph;
    let communities = find_perfect_communities(&g);
    let club = rich_club(&g, 2)?;
    let centrals = central_vertices(&g, &communities, &club, CentralK::Auto { min_drop: 1 })?;
    println!("{} communities, rich-club {:?}", communities.len(), club.member_labels);
    println!("component curve {:?}, chose k = {}", centrals.component_curve, centrals.chosen_k);

    let summary = summary_graph(&g, &communities, &club, &centrals, None)?;
    print!("{}", summary_dot(&summary, None).render());
    Ok(())
}
