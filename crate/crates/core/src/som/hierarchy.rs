use super::{train_on_graph, LineageStep, SomConfig, SomModel};
use crate::error::{Error, Result};
use crate::graph::{connected_components, WeightedGraph};
use crate::kernel::DiffusionKernel;

#[derive(Debug, Clone)]
pub struct ChildMap {
    pub model: SomModel,
    pub kernel: DiffusionKernel,
    /// Subgraph induced by the parent cluster.
    pub subgraph: WeightedGraph,
    pub component_count: usize,
}

/// Trains a fresh map on the subgraph induced by one cluster of `parent`.
/// `g` must be the graph the parent was trained on.
pub fn hierarchical_som(
    g: &WeightedGraph,
    parent: &SomModel,
    unit: usize,
    config: &SomConfig,
    beta: f64,
) -> Result<ChildMap> {
    if parent.assignment.len() != g.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "parent model covers {} vertices, graph has {}",
            parent.assignment.len(),
            g.vertex_count()
        )));
    }
    let hash = g.vertex_set_hash();
    if !parent.vertex_set_hash.is_empty() && parent.vertex_set_hash != hash {
        return Err(Error::VertexSetMismatch(parent.vertex_set_hash.clone(), hash));
    }
    if unit >= parent.unit_count() {
        return Err(Error::InvalidParameter(format!("unit {unit} is not on a {} map", parent.config.grid)));
    }
    let members = parent.members(unit);
    if members.is_empty() {
        return Err(Error::EmptyUnit(unit));
    }
    let required = config.grid.unit_count().max(3);
    if members.len() < required {
        return Err(Error::ClusterTooSmall { unit, size: members.len(), required });
    }

    let subgraph = g.induced_by_positions(&members);
    let component_count = connected_components(&subgraph).len();
    if component_count > 1 {
        log::info!("cluster of unit {unit} spans {component_count} components");
    }
    let (mut model, kernel) = train_on_graph(&subgraph, beta, config)?;
    model.lineage = parent.lineage.clone();
    model.lineage.push(LineageStep { parent_vertex_set_hash: hash, unit, cluster_size: members.len() });
    Ok(ChildMap { model, kernel, subgraph, component_count })
}
