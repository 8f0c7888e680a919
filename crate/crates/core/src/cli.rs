//! Command-line front end. Each command reads a graph, runs one stage of the
//! analysis and writes JSON, CSV and DOT artifacts into an output directory.
//! All commands except `stats` work on the largest connected component.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::communities::{
    central_vertices, find_perfect_communities, rich_club, summary_graph, verify_community_spectral, CentralK,
    CentralSelection, GlyphKind, NodeMetadata, PerfectCommunity, RichClub, SummaryGraph,
};
use crate::dot::{attrs, DotEdge, DotGraph, DotNode};
use crate::error::{Error, Result};
use crate::graph::{
    build_from_contracts, cumulative_degree_distribution, graph_stats, load_contracts, load_edge_list,
    ContractGraphConfig, ContractOptions, EdgeListOptions, WeightedGraph,
};
use crate::kernel::{write_kernel_cache, DiffusionKernel};
use crate::som::{
    hierarchical_som, model_selection, quality_report, train_on_graph, u_matrix, unit_sizes, GridTopology,
    SomConfig, SomInit, SomModel, DEFAULT_BETAS, DEFAULT_SIDES,
};
use crate::spectral::{laplacian, write_matrix_csv, LaplacianMode};

pub const SCHEMA_VERSION: &str = "1";
/// Caps the worker threads used for parallel loops.
pub const THREADS_ENV: &str = "TOOL_THREADS";
pub const DEFAULT_BETA: f64 = 0.05;

/// Sixteen distinguishable fill colors for the overlay.
pub const PALETTE: [&str; 16] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
];

#[derive(Parser, Debug)]
#[command(name = "kernsom", version, about = "Spectral communities and kernel self-organizing maps for weighted social graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Graph statistics and cumulative degree distributions.
    Stats(StatsArgs),
    /// Perfect communities, rich-club, central vertices and the summary graph.
    Communities(CommunitiesArgs),
    /// Train a kernel SOM, or sweep beta and map sizes with --select.
    Som(SomArgs),
    /// Train a child map on the vertices of one unit of a saved model.
    Drilldown(DrilldownArgs),
    /// Cross-tabulate perfect communities against SOM units.
    ExportOverlay(OverlayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Edge list (`source,target[,weight]`) or, with --contracts, contract records.
    #[arg(long)]
    pub input: PathBuf,
    /// Read contract records (`contract_id,date,lord,notary,persons,roles`).
    #[arg(long)]
    pub contracts: bool,
    /// Per-vertex `label,date,location,family` CSV.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// Edge-list field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Contracts closer than this many years can link their parties.
    #[arg(long, default_value_t = 15)]
    pub window_years: i64,
    /// Lord ignored by the shared-lord rule (repeatable).
    #[arg(long = "exclude-lord")]
    pub excluded_lords: Vec<String>,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Only write artifacts of this format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Clone, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also write the weighted Laplacian and its spectrum.
    #[arg(long)]
    pub dump_laplacian: bool,
}

#[derive(Args, Clone, Debug)]
pub struct CommunitiesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 2)]
    pub diameter_limit: usize,
    /// Number of central vertices, or `auto`.
    #[arg(long, default_value = "auto")]
    pub k: String,
    /// Smallest component drop that `--k auto` accepts.
    #[arg(long, default_value_t = 1)]
    pub min_drop: usize,
    /// Tolerance of the spectral verification.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Pca,
    Random,
}

#[derive(Args, Clone, Debug)]
pub struct SomParams {
    /// Diffusion parameter (default 0.05; drilldown defaults to the parent's).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value = "7x7")]
    pub grid: String,
    /// Seed of the random initialization.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitKind::Pca)]
    pub init: InitKind,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub weighted_modularity: bool,
    #[arg(long)]
    pub initial_temperature: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub anneal_ratio: f64,
    #[arg(long, default_value_t = 0.01)]
    pub final_epsilon: f64,
    /// Also write the kernel matrix as `kernel.bin`.
    #[arg(long)]
    pub save_kernel: bool,
}

impl SomParams {
    pub fn config(&self) -> Result<SomConfig> {
        self.config_for(GridTopology::parse(&self.grid)?)
    }

    fn config_for(&self, grid: GridTopology) -> Result<SomConfig> {
        let init = match self.init {
            InitKind::Pca => SomInit::KernelPca,
            InitKind::Random => SomInit::Random { seed: self.seed },
        };
        let mut cfg = SomConfig::new(grid, init);
        cfg.initial_temperature = self.initial_temperature;
        cfg.anneal_ratio = self.anneal_ratio;
        cfg.final_epsilon = self.final_epsilon;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_beta(beta: f64) -> Result<f64> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(beta)
    } else {
        Err(Error::InvalidParameter(format!("beta = {beta} must be a non-negative number")))
    }
}

#[derive(Args, Clone, Debug)]
pub struct SomArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: SomParams,
    /// Sweep beta values and map sizes and write a ranking table instead.
    #[arg(long)]
    pub select: bool,
    #[arg(long, value_delimiter = ',')]
    pub betas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub grids: Vec<String>,
}

#[derive(Args, Clone, Debug)]
pub struct DrilldownArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: SomParams,
    /// `model.json` of the parent map.
    #[arg(long)]
    pub model: PathBuf,
    /// Unit index, or `largest`.
    #[arg(long, default_value = "largest")]
    pub unit: String,
}

#[derive(Args, Clone, Debug)]
pub struct OverlayArgs {
    /// Optional graph; when given its vertex set is checked too.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub contracts: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    /// `communities.json` from the communities command.
    #[arg(long)]
    pub communities: PathBuf,
    /// `model.json` from the som or drilldown command.
    #[arg(long)]
    pub model: PathBuf,
}

/// Applies `TOOL_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{THREADS_ENV}=`{raw}` is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidParameter(format!("{THREADS_ENV}: {e}")))
}

/// Runs one command and returns the files it wrote.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Stats(a) => cmd_stats(&a),
        Command::Communities(a) => cmd_communities(&a),
        Command::Som(a) => cmd_som(&a),
        Command::Drilldown(a) => cmd_drilldown(&a),
        Command::ExportOverlay(a) => cmd_export_overlay(&a),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::file(path, e))
}

pub fn load_graph(input: &InputArgs) -> Result<WeightedGraph> {
    let file = open(&input.input)?;
    if input.contracts {
        let records = load_contracts(BufReader::new(file), &ContractOptions::default())?;
        let config = ContractGraphConfig {
            window_years: input.window_years,
            excluded_lords: input.excluded_lords.iter().cloned().collect(),
            ..Default::default()
        };
        build_from_contracts(&records, &config)
    } else {
        let opts = EdgeListOptions { delimiter: input.delimiter, ..Default::default() };
        load_edge_list(BufReader::new(file), &opts)
    }
}

fn largest_component(g: WeightedGraph) -> Result<WeightedGraph> {
    if g.is_connected() {
        if g.is_empty() {
            return Err(Error::EmptyGraph);
        }
        return Ok(g);
    }
    let lcc = g.largest_connected_component()?;
    log::info!(
        "graph is disconnected; keeping the largest component ({} of {} vertices)",
        lcc.vertex_count(),
        g.vertex_count()
    );
    Ok(lcc)
}

/// Metadata restricted to `g`; labels unknown to the full input are errors.
fn load_metadata(path: &Path, full: &WeightedGraph, g: &WeightedGraph) -> Result<NodeMetadata> {
    let mut meta = NodeMetadata::from_csv(open(path)?)?;
    for label in meta.vertices.keys() {
        full.position_of(label)?;
    }
    meta.vertices.retain(|l, _| g.position(l).is_some());
    Ok(meta)
}

struct Artifacts {
    dir: PathBuf,
    format: Option<Format>,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(out: &OutputArgs) -> Result<Self> {
        fs::create_dir_all(&out.out).map_err(|e| Error::file(&out.out, e))?;
        Ok(Self { dir: out.out.clone(), format: out.format, written: Vec::new() })
    }

    fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|x| x == f)
    }

    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, data).map_err(|e| Error::file(&path, e))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if !self.wants(Format::Json) {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
    {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let data = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        self.bytes(name, &data)
    }

    fn dot(&mut self, name: &str, graph: &DotGraph) -> Result<()> {
        if !self.wants(Format::Dot) {
            return Ok(());
        }
        self.bytes(name, graph.render().as_bytes())
    }
}

pub fn cmd_stats(args: &StatsArgs) -> Result<Vec<PathBuf>> {
    let g = load_graph(&args.input)?;
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut out = Artifacts::new(&args.output)?;
    let stats = graph_stats(&g);
    out.json(
        "stats.json",
        &json!({ "schema_version": SCHEMA_VERSION, "vertex_set_hash": g.vertex_set_hash(), "stats": stats }),
    )?;
    let cdf = |weighted| {
        cumulative_degree_distribution(&g, weighted).into_iter().map(|(k, f)| [k.to_string(), f.to_string()])
    };
    out.csv("degree_distribution.csv", &["k", "fraction"], cdf(false))?;
    out.csv("degree_distribution_weighted.csv", &["k", "fraction"], cdf(true))?;
    if args.dump_laplacian && out.wants(Format::Csv) {
        let lap = laplacian(&g, LaplacianMode::Weighted);
        let mut buf = Vec::new();
        write_matrix_csv(&lap.matrix, &mut buf)?;
        out.bytes("laplacian.csv", &buf)?;
        let dec = lap.decompose()?;
        let rows = dec.eigenvalues.iter().enumerate().map(|(i, l)| [i.to_string(), format!("{l:.16e}")]);
        out.csv("eigenvalues.csv", &["index", "eigenvalue"], rows)?;
    }
    Ok(out.written)
}

fn parse_k(raw: &str, min_drop: usize) -> Result<CentralK> {
    if raw.eq_ignore_ascii_case("auto") {
        return Ok(CentralK::Auto { min_drop });
    }
    raw.parse()
        .map(CentralK::Fixed)
        .map_err(|_| Error::InvalidParameter(format!("--k `{raw}` is neither a count nor `auto`")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommunitiesFile {
    pub schema_version: String,
    pub vertex_set_hash: String,
    pub vertex_count: usize,
    pub communities: Vec<PerfectCommunity>,
    pub rich_club: RichClub,
    pub centrals: CentralSelection,
    pub summary: SummaryGraph,
}

fn gray(level: f64) -> String {
    let v = (level.clamp(0.0, 1.0) * 255.0).round() as u8;
    format!("#{v:02x}{v:02x}{v:02x}")
}

/// Fill for a glyph dated `date` on a `[lo, hi]` scale, black to white.
pub fn date_fill(date: f64, range: (f64, f64)) -> String {
    let (lo, hi) = range;
    if hi - lo <= 0.0 {
        return "#808080".to_string();
    }
    gray((date - lo) / (hi - lo))
}

fn glyph_width(size: usize) -> String {
    format!("{:.3}", 0.3 * (size as f64).sqrt())
}

pub fn summary_dot(summary: &SummaryGraph, date_range: Option<(f64, f64)>) -> DotGraph {
    let mut dot = DotGraph::new("summary");
    dot.graph_attrs = attrs([("overlap", "false")]);
    dot.node_defaults = attrs([("fixedsize", "true"), ("fontsize", "10")]);
    for glyph in &summary.glyphs {
        let shape = match glyph.kind {
            GlyphKind::Community => "circle",
            GlyphKind::RichClub => "box",
            GlyphKind::Central => "square",
        };
        let kind = match glyph.kind {
            GlyphKind::Community => "community",
            GlyphKind::RichClub => "rich_club",
            GlyphKind::Central => "central",
        };
        let mut a = attrs([
            ("shape", shape.to_string()),
            ("label", glyph.size.to_string()),
            ("width", glyph_width(glyph.size)),
            ("kind", kind.to_string()),
        ]);
        if let (Some(d), Some(range)) = (glyph.mean_date, date_range) {
            let fill = date_fill(d, range);
            let dark = u8::from_str_radix(&fill[1..3], 16).unwrap_or(255) < 128;
            a.extend(attrs([("style", "filled"), ("fillcolor", fill.as_str())]));
            if dark {
                a.push(("fontcolor".into(), "white".into()));
            }
        }
        dot.nodes.push(DotNode { id: format!("g{}", glyph.id), attrs: a });
    }
    for e in &summary.edges {
        dot.edges.push(DotEdge {
            source: format!("g{}", e.source),
            target: format!("g{}", e.target),
            attrs: attrs([("weight", e.weight.to_string()), ("penwidth", format!("{:.3}", 1.0 + e.weight.ln()))]),
        });
    }
    dot
}

pub fn cmd_communities(args: &CommunitiesArgs) -> Result<Vec<PathBuf>> {
    let k = parse_k(&args.k, args.min_drop)?;
    if !(args.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", args.tolerance)));
    }
    let full = load_graph(&args.input)?;
    let g = largest_component(full.clone())?;
    let metadata = args.input.metadata.as_deref().map(|p| load_metadata(p, &full, &g)).transpose()?;

    let communities = find_perfect_communities(&g);
    let club = rich_club(&g, args.diameter_limit)?;
    let centrals = central_vertices(&g, &communities, &club, k)?;
    let summary = summary_graph(&g, &communities, &club, &centrals, metadata.as_ref())?;
    log::info!(
        "{} perfect communities, rich-club of {}, {} central vertices",
        communities.len(),
        club.members.len(),
        centrals.chosen_k
    );

    let decomp = laplacian(&g, LaplacianMode::Unweighted).decompose()?;
    let reports = communities
        .iter()
        .map(|c| verify_community_spectral(&g, c, &decomp, args.tolerance))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Artifacts::new(&args.output)?;
    let date_range = metadata.as_ref().and_then(|m| m.date_range(g.labels().iter().map(String::as_str)));
    out.json(
        "communities.json",
        &CommunitiesFile {
            schema_version: SCHEMA_VERSION.into(),
            vertex_set_hash: g.vertex_set_hash(),
            vertex_count: g.vertex_count(),
            communities,
            rich_club: club,
            centrals,
            summary: summary.clone(),
        },
    )?;
    out.json(
        "verification.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "tolerance": args.tolerance,
            "all_verified": reports.iter().all(|r| r.verified),
            "reports": reports,
        }),
    )?;
    out.dot("summary.dot", &summary_dot(&summary, date_range))?;
    Ok(out.written)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: String,
    #[serde(flatten)]
    pub model: SomModel,
}

pub fn read_model(path: &Path) -> Result<SomModel> {
    let file: ModelFile = serde_json::from_reader(BufReader::new(open(path)?))?;
    let m = &file.model;
    if m.gamma.nrows() != m.config.grid.unit_count()
        || m.gamma.ncols() != m.assignment.len()
        || m.labels.len() != m.assignment.len()
        || m.assignment.iter().any(|&u| u >= m.gamma.nrows())
    {
        return Err(Error::Format(format!("{}: inconsistent model dimensions", path.display())));
    }
    Ok(file.model)
}

pub fn map_dot(g: &WeightedGraph, model: &SomModel) -> DotGraph {
    let grid = model.config.grid;
    let sizes = unit_sizes(model);
    let mut dot = DotGraph::new("map");
    dot.graph_attrs = attrs([("overlap", "false")]);
    dot.node_defaults = attrs([("shape", "square"), ("fixedsize", "true"), ("fontsize", "10")]);
    for (j, &s) in sizes.iter().enumerate().filter(|(_, &s)| s > 0) {
        let (r, c) = grid.coords(j);
        dot.nodes.push(DotNode {
            id: format!("u{j}"),
            attrs: attrs([
                ("label", s.to_string()),
                ("width", glyph_width(s)),
                ("pos", format!("{},{}!", c, grid.rows - 1 - r)),
                ("row", r.to_string()),
                ("col", c.to_string()),
            ]),
        });
    }
    let mut between: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, j, w) in g.edges() {
        let (a, b) = (model.assignment[i], model.assignment[j]);
        if a != b {
            *between.entry((a.min(b), a.max(b))).or_default() += w;
        }
    }
    for ((a, b), w) in between {
        dot.edges.push(DotEdge {
            source: format!("u{a}"),
            target: format!("u{b}"),
            attrs: attrs([("weight", w.to_string()), ("penwidth", format!("{:.3}", 1.0 + w.ln()))]),
        });
    }
    dot
}

fn write_som_artifacts(
    out: &mut Artifacts,
    g: &WeightedGraph,
    kernel: &DiffusionKernel,
    model: &SomModel,
    params: &SomParams,
    extra: Value,
) -> Result<()> {
    let grid = model.config.grid;
    let quality = quality_report(g, kernel, model, params.weighted_modularity)?;
    log::info!(
        "{} nonempty units, quantization error {:.6}",
        quality.nonempty_units,
        quality.quantization_error
    );
    out.json("model.json", &ModelFile { schema_version: SCHEMA_VERSION.into(), model: model.clone() })?;
    let mut q = json!({ "schema_version": SCHEMA_VERSION, "beta": model.beta, "grid": grid.to_string() });
    if let (Value::Object(target), Value::Object(src)) = (&mut q, serde_json::to_value(&quality)?) {
        target.extend(src);
    }
    if let (Value::Object(target), Value::Object(src)) = (&mut q, extra) {
        target.extend(src);
    }
    out.json("quality.json", &q)?;
    let rows = model.assignment.iter().enumerate().map(|(i, &u)| {
        let (r, c) = grid.coords(u);
        [g.label(i).to_string(), u.to_string(), r.to_string(), c.to_string()]
    });
    out.csv("assignment.csv", &["label", "unit", "row", "col"], rows)?;
    if out.wants(Format::Csv) {
        let um = u_matrix(kernel, model)?;
        let rows = um.iter().enumerate().map(|(j, d)| {
            let (r, c) = grid.coords(j);
            [j.to_string(), r.to_string(), c.to_string(), d.to_string()]
        });
        out.csv("umatrix.csv", &["unit", "row", "col", "mean_distance"], rows)?;
    }
    out.dot("map.dot", &map_dot(g, model))?;
    if params.save_kernel {
        let path = out.dir.join("kernel.bin");
        let f = File::create(&path).map_err(|e| Error::file(&path, e))?;
        write_kernel_cache(kernel, BufWriter::new(f))?;
        out.written.push(path);
    }
    Ok(())
}

fn sweep_grids(raw: &[String]) -> Result<Vec<GridTopology>> {
    if raw.is_empty() {
        return DEFAULT_SIDES.iter().map(|&s| GridTopology::new(s, s)).collect();
    }
    raw.iter().map(|s| GridTopology::parse(s)).collect()
}

pub fn cmd_som(args: &SomArgs) -> Result<Vec<PathBuf>> {
    let config = args.params.config()?;
    let beta = check_beta(args.params.beta.unwrap_or(DEFAULT_BETA))?;
    if args.select {
        let grids = sweep_grids(&args.grids)?;
        let betas = if args.betas.is_empty() { DEFAULT_BETAS.to_vec() } else { args.betas.clone() };
        for &b in &betas {
            check_beta(b)?;
        }
        let g = largest_component(load_graph(&args.input)?)?;
        let rows = model_selection(&g, &betas, &grids, &config, args.params.weighted_modularity)?;
        let mut out = Artifacts::new(&args.output)?;
        out.json("selection.json", &json!({ "schema_version": SCHEMA_VERSION, "rows": rows }))?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let rank = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let table = rows.iter().map(|r| {
            [
                r.beta.to_string(),
                r.grid.clone(),
                r.quantization_error.to_string(),
                opt(r.kaski_lagus),
                opt(r.q_modularity),
                r.nonempty_units.to_string(),
                rank(r.kl_rank),
                rank(r.q_rank),
            ]
        });
        out.csv(
            "selection.csv",
            &["beta", "grid", "quantization_error", "kaski_lagus", "q_modularity", "nonempty_units", "kl_rank", "q_rank"],
            table,
        )?;
        return Ok(out.written);
    }
    let g = largest_component(load_graph(&args.input)?)?;
    let (model, kernel) = train_on_graph(&g, beta, &config)?;
    let mut out = Artifacts::new(&args.output)?;
    write_som_artifacts(&mut out, &g, &kernel, &model, &args.params, json!({}))?;
    Ok(out.written)
}

fn pick_unit(raw: &str, model: &SomModel) -> Result<usize> {
    if raw.eq_ignore_ascii_case("largest") {
        let sizes = unit_sizes(model);
        // first unit among the largest
        let best = sizes.iter().enumerate().fold(0, |b, (j, &s)| if s > sizes[b] { j } else { b });
        return Ok(best);
    }
    raw.parse().map_err(|_| Error::InvalidParameter(format!("--unit `{raw}` is neither an index nor `largest`")))
}

pub fn cmd_drilldown(args: &DrilldownArgs) -> Result<Vec<PathBuf>> {
    let config = args.params.config()?;
    let parent = read_model(&args.model)?;
    let unit = pick_unit(&args.unit, &parent)?;
    let beta = check_beta(args.params.beta.unwrap_or(parent.beta))?;
    let g = largest_component(load_graph(&args.input)?)?;
    if g.labels() != parent.labels.as_slice() {
        return Err(Error::VertexSetMismatch(parent.vertex_set_hash.clone(), g.vertex_set_hash()));
    }
    let child = hierarchical_som(&g, &parent, unit, &config, beta)?;
    let mut out = Artifacts::new(&args.output)?;
    let extra = json!({
        "parent_unit": unit,
        "cluster_size": child.subgraph.vertex_count(),
        "component_count": child.component_count,
    });
    write_som_artifacts(&mut out, &child.subgraph, &child.kernel, &child.model, &args.params, extra)?;
    Ok(out.written)
}

/// `(community, unit, overlap)` rows, sorted.
pub fn crosstab(communities: &[PerfectCommunity], model: &SomModel) -> Result<Vec<(usize, usize, usize)>> {
    let unit_of: HashMap<&str, usize> =
        model.labels.iter().map(String::as_str).zip(model.assignment.iter().copied()).collect();
    let mut rows = Vec::new();
    for (ci, c) in communities.iter().enumerate() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for l in &c.member_labels {
            let u = unit_of.get(l.as_str()).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
            *counts.entry(*u).or_default() += 1;
        }
        rows.extend(counts.into_iter().map(|(u, n)| (ci, u, n)));
    }
    Ok(rows)
}

/// Unit holding most members of each community; ties go to the lower unit.
pub fn dominant_units(rows: &[(usize, usize, usize)], count: usize) -> Vec<Option<usize>> {
    let mut best: Vec<Option<(usize, usize)>> = vec![None; count];
    for &(c, u, n) in rows {
        match best[c] {
            Some((_, bn)) if bn >= n => {}
            _ => best[c] = Some((u, n)),
        }
    }
    best.into_iter().map(|b| b.map(|(u, _)| u)).collect()
}

pub fn cmd_export_overlay(args: &OverlayArgs) -> Result<Vec<PathBuf>> {
    let comms: CommunitiesFile = serde_json::from_reader(BufReader::new(open(&args.communities)?))?;
    let model = read_model(&args.model)?;
    if comms.vertex_set_hash != model.vertex_set_hash {
        return Err(Error::VertexSetMismatch(comms.vertex_set_hash, model.vertex_set_hash));
    }
    if let Some(input) = &args.input {
        let spec = InputArgs {
            input: input.clone(),
            contracts: args.contracts,
            metadata: None,
            delimiter: ',',
            window_years: 15,
            excluded_lords: vec![],
        };
        let g = largest_component(load_graph(&spec)?)?;
        if g.vertex_set_hash() != model.vertex_set_hash {
            return Err(Error::VertexSetMismatch(g.vertex_set_hash(), model.vertex_set_hash));
        }
    }

    let rows = crosstab(&comms.communities, &model)?;
    let dominant = dominant_units(&rows, comms.communities.len());
    let distinct: BTreeSet<usize> = dominant.iter().flatten().copied().collect();
    let color_of = |u: usize| PALETTE[distinct.iter().position(|&x| x == u).unwrap_or(0) % PALETTE.len()];

    let mut out = Artifacts::new(&args.output)?;
    out.csv(
        "crosstab.csv",
        &["community", "unit", "overlap"],
        rows.iter().map(|(c, u, n)| [c.to_string(), u.to_string(), n.to_string()]),
    )?;
    let mut dot = summary_dot(&comms.summary, None);
    dot.name = "overlay".into();
    for (node, glyph) in dot.nodes.iter_mut().zip(&comms.summary.glyphs) {
        let Some(unit) = glyph.community.and_then(|c| dominant[c]) else {
            continue;
        };
        node.attrs.extend(attrs([
            ("style", "filled".to_string()),
            ("fillcolor", color_of(unit).to_string()),
            ("unit", unit.to_string()),
        ]));
    }
    out.dot("overlay.dot", &dot)?;
    Ok(out.written)
}
