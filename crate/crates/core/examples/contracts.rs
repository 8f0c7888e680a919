//! Builds a co-occurrence graph from contract records.

use std::fs::File;

use kernsom::graph::{build_from_contracts, graph_stats, load_contracts, ContractGraphConfig, ContractOptions};

fn main() -> kernsom::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/contracts.csv".into());
    let file = File::open(&path).map_err(|e| kernsom::Error::file(&path, e))?;
    let records = load_contracts(file, &ContractOptions::default())?;

    let mut config = ContractGraphConfig::default();
    for window in [5, 15, 30] {
        config.window_years = window;
        let g = build_from_contracts(&records, &config)?;
        let s = graph_stats(&g);
        println!("window {window:>2}: {} persons, {} links, total weight {}", s.vertex_count, s.edge_count, s.total_weight);
    }

    // the heaviest ties under the default window
    config.window_years = 15;
    let g = build_from_contracts(&records, &config)?;
    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_by(|a, b| b.2.total_cmp(&a.2));
    for (a, b, w) in edges.into_iter().take(5) {
        println!("  {} -- {} ({w})", g.label(a), g.label(b));
    }
    Ok(())
}
