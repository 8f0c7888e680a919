//! Weighted undirected graphs with stable vertex labels.
//!
//! Positions are fixed by insertion order and every algorithm in the crate
//! refers to vertices by position. Weights are interaction counts: strictly
//! positive, symmetric, and never attached to self-loops.

mod contracts;
mod metrics;

pub use contracts::{
    build_from_contracts, load_contracts, ContractGraphConfig, ContractOptions, ContractRecord,
    Role,
};
pub use metrics::{
    betweenness, bfs_hops, connected_components, cumulative_degree_distribution, graph_stats,
    hop_diameter, GraphStats,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<BTreeMap<usize, f64>>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adjacency == other.adjacency
    }
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from labelled vertices and weighted edges.
    ///
    /// Vertices listed in `vertices` come first, in order; endpoints of
    /// `edges` not yet seen are appended on first appearance. Repeated pairs
    /// have their weights summed.
    pub fn from_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, f64)]) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v.as_ref());
        }
        for (line, (a, b, w)) in edges.iter().enumerate() {
            let ia = g.add_vertex(a.as_ref());
            let ib = g.add_vertex(b.as_ref());
            g.add_weight(ia, ib, *w, line + 1)?;
        }
        Ok(g)
    }

    /// Graph on vertices labelled `"0"`, …, `"n-1"`.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::new();
        for i in 0..n {
            g.add_vertex(&i.to_string());
        }
        for (line, &(a, b, w)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            g.add_weight(a, b, w, line + 1)?;
        }
        Ok(g)
    }

    pub(crate) fn add_vertex(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), i);
        self.adjacency.push(BTreeMap::new());
        i
    }

    pub(crate) fn add_weight(&mut self, a: usize, b: usize, w: f64, line: usize) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoop { line, label: self.labels[a].clone() });
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::NonPositiveWeight { line, weight: w });
        }
        *self.adjacency[a].entry(b).or_insert(0.0) += w;
        *self.adjacency[b].entry(a).or_insert(0.0) += w;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn position_of(&self, label: &str) -> Result<usize> {
        self.position(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Neighbors of `i` in increasing position order, with edge weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adjacency[i].iter().map(|(&j, &w)| (j, w))
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[i].get(&j).copied().unwrap_or(0.0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains_key(&j)
    }

    /// Unweighted degree.
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Weighted degree `d_i = sum_j w_ij`.
    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.adjacency[i].values().sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Every edge once, as `(i, j, w)` with `i < j`, ordered by `(i, j)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, nbrs)| {
            nbrs.range(i + 1..).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// The induced non-weighted graph: same vertices and edges, all weights 1.
    pub fn induced_unweighted(&self) -> WeightedGraph {
        let mut g = self.clone();
        for nbrs in &mut g.adjacency {
            for w in nbrs.values_mut() {
                *w = 1.0;
            }
        }
        g
    }

    /// Subgraph induced by `labels`; the parent's relative vertex order is kept.
    pub fn induced_subgraph<S: AsRef<str>>(&self, labels: &[S]) -> Result<WeightedGraph> {
        let mut positions = BTreeSet::new();
        for l in labels {
            positions.insert(self.position_of(l.as_ref())?);
        }
        Ok(self.induced_by_positions(&positions.into_iter().collect::<Vec<_>>()))
    }

    /// Subgraph induced by a sorted, duplicate-free list of positions.
    pub fn induced_by_positions(&self, positions: &[usize]) -> WeightedGraph {
        let mut g = WeightedGraph::new();
        let mut remap = HashMap::with_capacity(positions.len());
        for &p in positions {
            remap.insert(p, g.add_vertex(&self.labels[p]));
        }
        for &p in positions {
            let a = remap[&p];
            for (q, w) in self.neighbors(p) {
                if let Some(&b) = remap.get(&q) {
                    g.adjacency[a].insert(b, w);
                }
            }
        }
        g
    }

    /// Induced subgraph on the largest connected component. Ties go to the
    /// component whose smallest position is lowest.
    pub fn largest_connected_component(&self) -> Result<WeightedGraph> {
        if self.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let comps = connected_components(self);
        let mut best = &comps[0];
        for c in &comps[1..] {
            if c.len() > best.len() {
                best = c;
            }
        }
        Ok(self.induced_by_positions(best))
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() <= 1
    }

    /// SHA-256 over the sorted vertex labels; identifies the vertex set
    /// independently of order.
    pub fn vertex_set_hash(&self) -> String {
        let mut sorted: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        let mut hasher = Sha256::new();
        for l in sorted {
            hasher.update(l.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }

    /// Writes `source,target,weight` rows with a header line.
    ///
    /// Isolated vertices and vertex order are not representable in this
    /// format; use the JSON form when order must survive a round trip.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "source,target,weight")?;
        for (i, j, w) in self.edges() {
            writeln!(out, "{},{},{}", self.labels[i], self.labels[j], w)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
}

impl Serialize for WeightedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { vertices: self.labels.clone(), edges: self.edges().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let mut g = WeightedGraph::new();
        for v in &repr.vertices {
            g.add_vertex(v);
        }
        if g.vertex_count() != repr.vertices.len() {
            return Err(serde::de::Error::custom("duplicate vertex label"));
        }
        for (line, (a, b, w)) in repr.edges.into_iter().enumerate() {
            if a >= g.vertex_count() || b >= g.vertex_count() {
                return Err(serde::de::Error::custom(format!("edge ({a}, {b}) out of range")));
            }
            g.add_weight(a, b, w, line + 1).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeaderMode {
    /// Skip the first data line when it reads `source,target[,weight]`.
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub delimiter: char,
    pub header: HeaderMode,
    pub default_weight: f64,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        Self { delimiter: ',', header: HeaderMode::Auto, default_weight: 1.0 }
    }
}

/// Reads `source,target[,weight]` rows. Blank lines and `#` comments are
/// skipped; duplicate pairs are merged by summing weights.
pub fn load_edge_list<R: BufRead>(source: R, options: &EdgeListOptions) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new();
    let mut seen_data = false;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(options.delimiter).map(str::trim).collect();
        if !seen_data {
            seen_data = true;
            let looks_like_header = fields.len() >= 2
                && fields[0].eq_ignore_ascii_case("source")
                && fields[1].eq_ignore_ascii_case("target");
            match options.header {
                HeaderMode::Present => continue,
                HeaderMode::Auto if looks_like_header => continue,
                _ => {}
            }
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 or 3 fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::Parse { line: line_no, message: "empty vertex label".into() });
        }
        let weight = match fields.get(2) {
            Some(s) if !s.is_empty() => s.parse::<f64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad weight `{s}`: {e}"),
            })?,
            _ => options.default_weight,
        };
        if fields[0] == fields[1] {
            return Err(Error::SelfLoop { line: line_no, label: fields[0].to_string() });
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::NonPositiveWeight { line: line_no, weight });
        }
        let a = g.add_vertex(fields[0]);
        let b = g.add_vertex(fields[1]);
        g.add_weight(a, b, weight, line_no)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<WeightedGraph> {
        load_edge_list(text.as_bytes(), &EdgeListOptions::default())
    }

    #[test]
    fn loads_simple_rows() {
        let g = load("a,b,2\nb,c,1\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.total_weight(), 3.0);
        assert_eq!(g.labels(), ["a", "b", "c"]);
    }

    #[test]
    fn merges_reversed_duplicates() {
        let g = load("a,b,1\nb,a,2\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 3.0);
        assert_eq!(g.weight(1, 0), 3.0);
    }

    #[test]
    fn rejects_self_loop_and_bad_weight() {
        assert!(matches!(load("a,a,1"), Err(Error::SelfLoop { line: 1, .. })));
        assert!(matches!(load("a,b,0"), Err(Error::NonPositiveWeight { line: 1, .. })));
        assert!(matches!(load("a,b,-3"), Err(Error::NonPositiveWeight { .. })));
        assert!(matches!(load("# c\na,b\nx"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load("a,b,zz"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn header_and_comments() {
        let g = load("# comment\nsource,target,weight\n\na,b\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), 1.0);
        let opts = EdgeListOptions { delimiter: ';', header: HeaderMode::Absent, default_weight: 2.5 };
        let g = load_edge_list("x;y\n".as_bytes(), &opts).unwrap();
        assert_eq!(g.weight(0, 1), 2.5);
    }

    #[test]
    fn unweighted_is_idempotent() {
        let g = WeightedGraph::from_edges(&["a", "b"], &[("a", "b", 7.0)]).unwrap();
        let u = g.induced_unweighted();
        assert_eq!(u.weight(0, 1), 1.0);
        assert_eq!(u.induced_unweighted(), u);
        let empty = WeightedGraph::from_index_edges(3, &[]).unwrap();
        assert_eq!(empty.induced_unweighted(), empty);
    }

    fn paw() -> WeightedGraph {
        WeightedGraph::from_edges(
            &["1", "2", "3", "4"],
            &[("1", "2", 1.0), ("1", "3", 1.0), ("2", "3", 1.0), ("3", "4", 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn induced_subgraphs_of_paw() {
        let g = paw();
        let k3 = g.induced_subgraph(&["3", "1", "2"]).unwrap();
        assert_eq!(k3.labels(), ["1", "2", "3"]);
        assert_eq!(k3.edge_count(), 3);
        let pair = g.induced_subgraph(&["1", "4"]).unwrap();
        assert_eq!(pair.vertex_count(), 2);
        assert_eq!(pair.edge_count(), 0);
        assert_eq!(g.induced_subgraph(&["1", "2", "3", "4"]).unwrap(), g);
        assert!(matches!(g.induced_subgraph(&["9"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn largest_component_tie_break() {
        let g = WeightedGraph::from_edges(
            &["p", "q", "a1", "a2", "a3", "b1", "b2", "b3"],
            &[
                ("p", "q", 1.0),
                ("b1", "b2", 1.0),
                ("b2", "b3", 1.0),
                ("b1", "b3", 1.0),
                ("a1", "a2", 1.0),
                ("a2", "a3", 1.0),
                ("a1", "a3", 1.0),
            ],
        )
        .unwrap();
        let lcc = g.largest_connected_component().unwrap();
        assert_eq!(lcc.labels(), ["a1", "a2", "a3"]);
        assert_eq!(lcc.largest_connected_component().unwrap(), lcc);
        let connected = paw();
        assert_eq!(connected.largest_connected_component().unwrap(), connected);
        assert!(matches!(WeightedGraph::new().largest_connected_component(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn k4_beats_k2() {
        let mut edges = vec![(4, 5, 1.0)];
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((i, j, 1.0));
            }
        }
        let g = WeightedGraph::from_index_edges(6, &edges).unwrap();
        let lcc = g.largest_connected_component().unwrap();
        assert_eq!(lcc.vertex_count(), 4);
        assert_eq!(lcc.edge_count(), 6);
    }

    #[test]
    fn json_round_trip_keeps_order() {
        let g = WeightedGraph::from_edges(&["z", "a", "m", "solo"], &[("z", "m", 2.0), ("a", "m", 1.5)])
            .unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: WeightedGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.labels(), ["z", "a", "m", "solo"]);
    }

    #[test]
    fn vertex_hash_ignores_order() {
        let a = WeightedGraph::from_edges(&["x", "y"], &[]).unwrap();
        let b = WeightedGraph::from_edges(&["y", "x"], &[]).unwrap();
        let c = WeightedGraph::from_edges(&["y", "z"], &[]).unwrap();
        assert_eq!(a.vertex_set_hash(), b.vertex_set_hash());
        assert_ne!(a.vertex_set_hash(), c.vertex_set_hash());
    }
}
