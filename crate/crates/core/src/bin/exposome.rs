use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exposome::cluster::{dendrogram, Linkage};
use exposome::coverage::{coverage_by_year, coverage_table, disease_profiles};
use exposome::export::{
    clique_rows, newick_with_manifest, write_dot, write_graphml, write_json, DendrogramDump, DotOptions, Report, ReportInputs, RunManifest,
    Summary,
    RunParameters,
};
use exposome::groups;
use exposome::ingest::{read_records_file, rejects_path, write_records_csv, write_rejects};
use exposome::synth::{generate, SyntheticConfig};
use exposome::temporal::{project, snapshot_diff};
use exposome::{
    dedupe, metrics, parse_code, Axis, Error, Exposome, ExposomeParams, IngestOptions, KeyMode, OhpRecord, Result,
    Tables,
};

#[derive(Parser)]
#[command(name = "exposome", version, about = "Build and analyse exposomes from coded OHP records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the exposome and print its summary.
    Build(Common),
    /// Density, degree distribution and clustering coefficients.
    Metrics(Common),
    /// Exposure groups, unshared exposures, bridging nodes and group overlap.
    Groups(Common),
    /// Maximal cliques classified as single or hybrid.
    Cliques {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        max_cliques: usize,
    },
    /// Average-linkage dendrogram of the exposure groups.
    Dendro(Common),
    /// New and incremented nodes between two cumulative snapshots.
    Diff {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t1: i32,
        #[arg(long)]
        t2: i32,
    },
    /// Overlay occupation or sector codes on the exposome.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: Axis,
        /// Comma-separated codes to select.
        #[arg(long, value_delimiter = ',', required = true)]
        codes: Vec<String>,
    },
    /// Distinct codes used per axis against each table's code space.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        by_year: bool,
    },
    /// Write the exposome in an interchange format.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        max_cliques: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Record file (.csv, or .jsonl for JSON lines). Without one, synthetic
    /// records are generated from --seed.
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    eta: u64,
    #[arg(long, default_value_t = KeyMode::Cortege)]
    key_mode: KeyMode,
    #[arg(long)]
    agg_exposure: Option<usize>,
    /// Directory of classification table CSVs.
    #[arg(long, env = "EXPOSOME_TABLES")]
    tables: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of synthetic records generated with --seed.
    #[arg(long, default_value_t = 1000)]
    records: usize,
    /// Also write the accepted records as CSV.
    #[arg(long)]
    write_records: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Graphml,
    Dot,
    Report,
    Newick,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Graphml => "graphml",
            Format::Dot => "dot",
            Format::Report => "report",
            Format::Newick => "newick",
        }
    }
}

struct Loaded {
    records: Vec<OhpRecord>,
    tables: Tables,
    params: ExposomeParams,
    manifest: RunManifest,
}

impl Common {
    fn load(&self, command: &str) -> Result<Loaded> {
        let params = ExposomeParams::new(self.d, self.eta)?;
        let mut run = RunParameters::new(params, self.key_mode);
        run.extra.insert("command".into(), command.into());
        let mut options = IngestOptions::default();
        if let Some(level) = self.agg_exposure {
            if level == 0 {
                return Err(Error::InvalidParams("--agg-exposure must be at least 1".into()));
            }
            options = options.with_aggregation(Axis::Exposure, level);
            run.agg_levels.insert(Axis::Exposure, level);
        }

        let mut table_files = Vec::new();
        if let Some(dir) = &self.tables {
            options = options.with_tables(Tables::load_dir(dir)?);
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            paths.sort();
            for p in paths {
                let bytes = fs::read(&p)?;
                table_files.push((p, bytes));
            }
        }

        let records = match (&self.input, self.seed) {
            (Some(path), _) => {
                let parsed = read_records_file(path, &options)?;
                if !parsed.rejects.is_empty() {
                    let sidecar = rejects_path(path);
                    write_rejects(BufWriter::new(File::create(&sidecar)?), &parsed.rejects)?;
                    eprintln!("warning: {} rows rejected, see {}", parsed.rejects.len(), sidecar.display());
                }
                parsed.records
            }
            (None, Some(seed)) => {
                run.seed = Some(seed);
                run.extra.insert("records".into(), self.records.to_string());
                let config = SyntheticConfig { records: self.records, ..SyntheticConfig::default() };
                generate(&config, seed)
            }
            (None, None) => return Err(Error::InvalidParams("either an input file or --seed is required".into())),
        };
        if let Some(path) = &self.write_records {
            let mut out = BufWriter::new(File::create(path)?);
            write_records_csv(&mut out, &records)?;
            out.flush()?;
        }

        let mut manifest = RunManifest::new(run);
        if let Some(path) = &self.input {
            manifest.add_input(path, &fs::read(path)?);
        }
        for (p, bytes) in &table_files {
            manifest.add_input(p, bytes);
        }
        Ok(Loaded { tables: options.tables, records, params, manifest })
    }

    fn graph(&self, loaded: &Loaded) -> Result<Exposome> {
        Exposome::build(&dedupe(&loaded.records, self.key_mode), loaded.params)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn format_or(&self, default: Format, allowed: &[Format], command: &str) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidParams(format!("{command} does not support --format {}", f.name())))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(c) => {
            let loaded = c.load("build")?;
            let g = c.graph(&loaded)?;
            let p = g.params();
            let out = serde_json::json!({
                "records": loaded.records.len(),
                "W": g.total_weight(),
                "V": g.node_count(),
                "L": g.edge_count(),
                "D": p.d,
                "eta": p.eta,
                "density": metrics::density(&g),
                "density_display": format!("{:.2}", metrics::density(&g)),
                "manifest": &loaded.manifest,
            });
            write_json(c.sink()?, &out)
        }
        Command::Metrics(c) => {
            let loaded = c.load("metrics")?;
            let g = c.graph(&loaded)?;
            let k = metrics::degrees(&g);
            let cc = metrics::clustering(&g);
            let density = metrics::density(&g);
            let nodes: Vec<serde_json::Value> = k
                .ranked()
                .into_iter()
                .map(|i| {
                    let n = g.node(i);
                    serde_json::json!({
                        "node_id": n.id, "label": n.key.to_string(), "weight": n.weight,
                        "k": k.per_node[i], "c": cc.per_node[i],
                    })
                })
                .collect();
            let out = serde_json::json!({
                "summary": Summary::of(&g),
                "density": density,
                "density_display": format!("{density:.2}"),
                "degree_histogram": k.histogram,
                "nodes": nodes,
                "clustering": metrics::clustering_summary(&k, &cc),
                "manifest": &loaded.manifest,
            });
            write_json(c.sink()?, &out)
        }
        Command::Groups(c) => {
            let loaded = c.load("groups")?;
            let g = c.graph(&loaded)?;
            let k = metrics::degrees(&g);
            let cc = metrics::clustering(&g);
            let table = groups::exposure_groups(&g);
            let bridges = groups::bridging_nodes(&g, &table.groups, &k, &cc);
            let overlap = groups::group_overlap(&table.groups);
            let report = Report::new(ReportInputs {
                graph: &g,
                degrees: &k,
                clustering: &cc,
                groups: &table,
                bridges: &bridges,
                cliques: &[],
                cliques_truncated: false,
                coverage: &[],
                tables: Some(&loaded.tables),
                manifest: Some(&loaded.manifest),
            });
            let components: Vec<Vec<String>> = overlap
                .components()
                .into_iter()
                .map(|c| c.into_iter().map(|i| table.groups[i].exposure.to_string()).collect())
                .collect();
            let out = serde_json::json!({
                "summary": report.summary,
                "groups": report.groups,
                "unshared_exposures": report.unshared_exposures,
                "bridges": report.bridges,
                "overlap_components": components,
                "manifest": report.manifest,
            });
            write_json(c.sink()?, &out)
        }
        Command::Cliques { common: c, max_cliques } => {
            let mut loaded = c.load("cliques")?;
            loaded.manifest.parameters.extra.insert("max_cliques".into(), max_cliques.to_string());
            let g = c.graph(&loaded)?;
            let (cliques, overflow) = match groups::maximal_cliques(&g, max_cliques) {
                Ok(found) => (found, None),
                Err(Error::OutputCapExceeded { cap, partial }) => {
                    let n = partial.len();
                    (partial, Some(Error::OutputCapExceeded { cap, partial: Vec::with_capacity(n) }))
                }
                Err(e) => return Err(e),
            };
            let rows = clique_rows(&g, &cliques);
            let out = serde_json::json!({
                "cliques": rows,
                "truncated": overflow.is_some(),
                "manifest": &loaded.manifest,
            });
            write_json(c.sink()?, &out)?;
            match overflow {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Dendro(c) => {
            let loaded = c.load("dendro")?;
            let fmt = c.format_or(Format::Newick, &[Format::Newick, Format::Report], "dendro")?;
            let g = c.graph(&loaded)?;
            let table = groups::exposure_groups(&g);
            if table.groups.is_empty() {
                return Err(Error::InvalidParams("no exposure groups to cluster".into()));
            }
            let tree = dendrogram(&table.groups, Linkage::Average);
            let mut out = c.sink()?;
            match fmt {
                Format::Newick => {
                    out.write_all(newick_with_manifest(&tree, Some(&loaded.manifest)).as_bytes())?;
                    out.flush()?;
                    Ok(())
                }
                _ => write_json(out, &DendrogramDump::new(&tree, Some(&loaded.manifest))),
            }
        }
        Command::Diff { common: c, t1, t2 } => {
            let mut loaded = c.load("diff")?;
            loaded.manifest.parameters.extra.insert("t1".into(), t1.to_string());
            loaded.manifest.parameters.extra.insert("t2".into(), t2.to_string());
            let diff = snapshot_diff(&loaded.records, t1, t2, c.key_mode, loaded.params)?;
            let out = serde_json::json!({
                "new_node_count": diff.new_nodes.len(),
                "incremented_count": diff.incremented.len(),
                "new_edge_count": diff.new_edges.len(),
                "added_weight": diff.added_weight(),
                "diff": diff,
                "manifest": &loaded.manifest,
            });
            write_json(c.sink()?, &out)
        }
        Command::Project { common: c, axis, codes } => {
            let mut loaded = c.load("project")?;
            loaded.manifest.parameters.extra.insert("axis".into(), axis.to_string());
            loaded.manifest.parameters.extra.insert("codes".into(), codes.join(","));
            let fmt = c.format_or(Format::Report, &[Format::Report, Format::Dot], "project")?;
            let g = c.graph(&loaded)?;
            let sep = loaded.tables.separator(axis);
            let selected = codes.iter().map(|s| parse_code(axis, s, sep)).collect::<Result<Vec<_>>>()?;
            let overlay = project(&g, axis, &selected)?;
            match fmt {
                Format::Dot => write_dot(
                    c.sink()?,
                    &g,
                    DotOptions { overlay: Some(&overlay), manifest: Some(&loaded.manifest) },
                ),
                _ => {
                    let nodes: Vec<serde_json::Value> = overlay
                        .counts
                        .iter()
                        .map(|(&pos, counts)| {
                            let n = g.node(pos);
                            serde_json::json!({
                                "node_id": n.id,
                                "label": n.key.to_string(),
                                "weight": n.weight,
                                "counts": counts.iter().map(|(c, k)| (c.to_string(), *k)).collect::<std::collections::BTreeMap<_, _>>(),
                            })
                        })
                        .collect();
                    let out = serde_json::json!({
                        "axis": overlay.axis,
                        "codes": overlay.codes,
                        "nodes": nodes,
                        "manifest": &loaded.manifest,
                    });
                    write_json(c.sink()?, &out)
                }
            }
        }
        Command::Coverage { common: c, by_year } => {
            let loaded = c.load("coverage")?;
            let rows = if by_year {
                coverage_by_year(&loaded.records, &loaded.tables)?
            } else {
                coverage_table(&loaded.records, &loaded.tables)?
            };
            let out = serde_json::json!({
                "coverage": rows,
                "diseases": disease_profiles(&loaded.records)?,
                "manifest": &loaded.manifest,
            });
            write_json(c.sink()?, &out)
        }
        Command::Export { common: c, max_cliques } => {
            let loaded = c.load("export")?;
            let g = c.graph(&loaded)?;
            let m = Some(&loaded.manifest);
            let mut out = c.sink()?;
            match c.format.unwrap_or(Format::Graphml) {
                Format::Graphml => write_graphml(out, &g, m),
                Format::Dot => write_dot(out, &g, DotOptions { overlay: None, manifest: m }),
                Format::Report => {
                    let cov = coverage_table(&loaded.records, &loaded.tables)?;
                    let report = Report::analyze(&g, max_cliques, &cov, Some(&loaded.tables), m);
                    write_json(out, &report)
                }
                Format::Newick => {
                    let table = groups::exposure_groups(&g);
                    if table.groups.is_empty() {
                        return Err(Error::InvalidParams("no exposure groups to cluster".into()));
                    }
                    let tree = dendrogram(&table.groups, Linkage::Average);
                    out.write_all(newick_with_manifest(&tree, m).as_bytes())?;
                    out.flush()?;
                    Ok(())
                }
            }
        }
    }
}

fn broken_pipe(e: &Error) -> bool {
    match e {
        Error::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
        Error::Json(e) => e.io_error_kind() == Some(io::ErrorKind::BrokenPipe),
        _ => false,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {}", e.kind(), message);
            ExitCode::FAILURE
        }
    }
}
