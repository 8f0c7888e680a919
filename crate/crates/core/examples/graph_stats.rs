//! Loads an edge list and prints the basic statistics and betweenness.
//!
//! cargo run --example graph_stats -- data/bridged_triangles.csv

use std::fs::File;
use std::io::BufReader;

use kernsom::graph::{betweenness, graph_stats, load_edge_list, EdgeListOptions};

fn main() -> kernsom::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/bridged_triangles.csv".into());
    let file = File::open(&path).map_err(|e| kernsom::Error::file(&path, e))?;
    let g = load_edge_list(BufReader::new(file), &EdgeListOptions::default())?;

    let s = graph_stats(&g);
    println!("{} vertices, {} edges, density {:.3}", s.vertex_count, s.edge_count, s.density);
    println!("diameter {}, mean path {:.3}, local connectivity {:.3}", s.diameter, s.mean_shortest_path, s.local_connectivity);

    let bc = betweenness(&g);
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by(|&a, &b| bc[b].total_cmp(&bc[a]));
    for &v in order.iter().take(5) {
        println!("  {:<8} betweenness {:.2}", g.label(v), bc[v]);
    }
    Ok(())
}
