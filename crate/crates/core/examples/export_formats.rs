//! Writes GraphML, DOT, a JSON report and a Newick tree into a directory,
//! all tied to one run manifest, then reads the GraphML back.
//!
//!     cargo run --example export_formats -- out/

use std::fs::{self, File};
use std::path::PathBuf;

use exposome::cluster::{dendrogram, Linkage};
use exposome::coverage::coverage_table;
use exposome::export::{
    newick_with_manifest, read_graphml, write_dot, write_graphml, write_json, DotOptions, Report, RunManifest,
    RunParameters,
};
use exposome::groups::exposure_groups;
use exposome::ingest::read_records_file;
use exposome::{dedupe, Exposome, ExposomeParams, IngestOptions, KeyMode, Tables};

fn main() -> exposome::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "exposome-out".into()));
    fs::create_dir_all(&out)?;
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let input = root.join("nhl_style.csv");
    let tables = Tables::load_dir(root.join("tables"))?;
    let records = read_records_file(&input, &IngestOptions::default())?.records;
    let params = ExposomeParams::default();
    let g = Exposome::build(&dedupe(&records, KeyMode::Cortege), params)?;

    let mut manifest = RunManifest::new(RunParameters::new(params, KeyMode::Cortege));
    manifest.add_input(&input, &fs::read(&input)?);

    write_graphml(File::create(out.join("exposome.graphml"))?, &g, Some(&manifest))?;
    write_dot(File::create(out.join("exposome.dot"))?, &g, DotOptions { overlay: None, manifest: Some(&manifest) })?;
    let coverage = coverage_table(&records, &tables)?;
    let report = Report::analyze(&g, 10_000, &coverage, Some(&tables), Some(&manifest));
    write_json(File::create(out.join("report.json"))?, &report)?;
    let tree = dendrogram(&exposure_groups(&g).groups, Linkage::Average);
    fs::write(out.join("groups.nwk"), newick_with_manifest(&tree, Some(&manifest)))?;

    let back = read_graphml(&fs::read_to_string(out.join("exposome.graphml"))?)?;
    println!("wrote {} (manifest {})", out.display(), &manifest.digest()[..12]);
    println!("graphml round trip: V {} -> {}, L {} -> {}", g.node_count(), back.node_count(), g.edge_count(), back.edge_count());
    Ok(())
}
