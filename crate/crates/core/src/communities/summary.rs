use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{CentralSelection, PerfectCommunity, RichClub};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlyphKind {
    Community,
    RichClub,
    Central,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexMeta {
    pub date: Option<f64>,
    pub location: Option<String>,
    pub family: Option<String>,
}

/// Optional per-vertex attributes keyed by label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeMetadata {
    pub vertices: BTreeMap<String, VertexMeta>,
}

#[derive(Debug, Deserialize)]
struct MetaRow {
    label: String,
    #[serde(default)]
    date: Option<f64>,
    #[serde(default)]
    location: Option<String>,
    #[serde(default)]
    family: Option<String>,
}

impl NodeMetadata {
    /// Reads a CSV with a `label` column and optional `date`, `location`,
    /// `family` columns.
    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let mut vertices = BTreeMap::new();
        for row in reader.deserialize::<MetaRow>() {
            let row = row?;
            let clean = |s: Option<String>| s.filter(|x| !x.is_empty());
            vertices.insert(
                row.label,
                VertexMeta { date: row.date, location: clean(row.location), family: clean(row.family) },
            );
        }
        Ok(Self { vertices })
    }

    /// `(min, max)` over dates of the given labels.
    pub fn date_range<'a>(&self, labels: impl IntoIterator<Item = &'a str>) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for l in labels {
            if let Some(d) = self.vertices.get(l).and_then(|m| m.date) {
                range = Some(match range {
                    None => (d, d),
                    Some((lo, hi)) => (lo.min(d), hi.max(d)),
                });
            }
        }
        range
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glyph {
    pub id: usize,
    pub kind: GlyphKind,
    pub members: Vec<String>,
    pub size: usize,
    /// Index into the community list for community glyphs.
    pub community: Option<usize>,
    pub mean_date: Option<f64>,
    pub dominant_location: Option<String>,
    pub location_share: Option<f64>,
    pub dominant_family: Option<String>,
    pub family_share: Option<f64>,
    /// True when no summary edge touches this glyph.
    pub isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlyphEdge {
    pub source: usize,
    pub target: usize,
    /// Summed original weight between the two member sets.
    pub weight: f64,
    pub edge_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryGraph {
    pub glyphs: Vec<Glyph>,
    pub edges: Vec<GlyphEdge>,
}

impl SummaryGraph {
    pub fn isolated_communities(&self) -> impl Iterator<Item = &Glyph> {
        self.glyphs.iter().filter(|g| g.kind == GlyphKind::Community && g.isolated)
    }
}

fn modal<'a>(values: impl Iterator<Item = &'a str>, size: usize) -> (Option<String>, Option<f64>) {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    // BTreeMap order makes the lexicographically smallest value win ties
    let best = counts.into_iter().fold(None, |best: Option<(&str, usize)>, (v, c)| match best {
        Some((_, bc)) if bc >= c => best,
        _ => Some((v, c)),
    });
    match best {
        Some((v, c)) => (Some(v.to_string()), Some(c as f64 / size as f64)),
        None => (None, None),
    }
}

/// Builds one glyph per community, one for the rich-club, one per central
/// vertex. A vertex in both a community and the rich-club is drawn in the
/// rich-club; communities emptied that way are dropped.
pub fn summary_graph(
    g: &WeightedGraph,
    communities: &[PerfectCommunity],
    rich_club: &RichClub,
    centrals: &CentralSelection,
    metadata: Option<&NodeMetadata>,
) -> Result<SummaryGraph> {
    if let Some(meta) = metadata {
        for label in meta.vertices.keys() {
            g.position_of(label)?;
        }
    }
    let n = g.vertex_count();
    let mut in_club = vec![false; n];
    for &m in &rich_club.members {
        in_club[m] = true;
    }

    let mut groups: Vec<(GlyphKind, Option<usize>, Vec<usize>)> = Vec::new();
    for (ci, c) in communities.iter().enumerate() {
        let members: Vec<usize> = c.members.iter().copied().filter(|&m| !in_club[m]).collect();
        if !members.is_empty() {
            groups.push((GlyphKind::Community, Some(ci), members));
        }
    }
    if !rich_club.members.is_empty() {
        let mut members = rich_club.members.clone();
        members.sort_unstable();
        groups.push((GlyphKind::RichClub, None, members));
    }
    for &v in &centrals.chosen_vertices {
        groups.push((GlyphKind::Central, None, vec![v]));
    }

    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (id, (_, _, members)) in groups.iter().enumerate() {
        for &m in members {
            if let Some(prev) = owner.insert(m, id) {
                return Err(Error::InvalidParameter(format!(
                    "vertex `{}` claimed by glyphs {prev} and {id}",
                    g.label(m)
                )));
            }
        }
    }

    let mut acc: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (i, j, w) in g.edges() {
        if let (Some(&a), Some(&b)) = (owner.get(&i), owner.get(&j)) {
            if a != b {
                let e = acc.entry((a.min(b), a.max(b))).or_default();
                e.0 += w;
                e.1 += 1;
            }
        }
    }
    let edges: Vec<GlyphEdge> = acc
        .into_iter()
        .map(|((source, target), (weight, edge_count))| GlyphEdge { source, target, weight, edge_count })
        .collect();
    let mut touched = vec![false; groups.len()];
    for e in &edges {
        touched[e.source] = true;
        touched[e.target] = true;
    }

    let glyphs = groups
        .into_iter()
        .enumerate()
        .map(|(id, (kind, community, members))| {
            let labels: Vec<String> = members.iter().map(|&m| g.label(m).to_string()).collect();
            let size = labels.len();
            let metas: Vec<&VertexMeta> =
                labels.iter().filter_map(|l| metadata.and_then(|md| md.vertices.get(l))).collect();
            let dates: Vec<f64> = metas.iter().filter_map(|m| m.date).collect();
            let mean_date = (!dates.is_empty()).then(|| dates.iter().sum::<f64>() / dates.len() as f64);
            let (dominant_location, location_share) =
                modal(metas.iter().filter_map(|m| m.location.as_deref()), size);
            let (dominant_family, family_share) = modal(metas.iter().filter_map(|m| m.family.as_deref()), size);
            Glyph {
                id,
                kind,
                members: labels,
                size,
                community,
                mean_date,
                dominant_location,
                location_share,
                dominant_family,
                family_share,
                isolated: !touched[id],
            }
        })
        .collect();
    Ok(SummaryGraph { glyphs, edges })
}
