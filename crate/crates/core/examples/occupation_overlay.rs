//! Projects two occupations onto the exposome and writes the marked graph as
//! DOT.
//!
//!     cargo run --example occupation_overlay > overlay.dot

use std::path::PathBuf;

use exposome::export::{write_dot, DotOptions};
use exposome::ingest::read_records_file;
use exposome::temporal::project;
use exposome::{dedupe, parse_code, Axis, Exposome, ExposomeParams, IngestOptions, KeyMode};

fn main() -> exposome::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/nhl_style.csv");
    let records = read_records_file(path, &IngestOptions::default())?.records;
    let g = Exposome::build(&dedupe(&records, KeyMode::Cortege), ExposomeParams::default())?;

    let codes = vec![parse_code(Axis::Occupation, "31.15", '.')?, parse_code(Axis::Occupation, "72.31", '.')?];
    let overlay = project(&g, Axis::Occupation, &codes)?;
    for (pos, counts) in &overlay.counts {
        let tally: Vec<String> = counts.iter().map(|(c, n)| format!("{c}={n}")).collect();
        eprintln!("{} (w={}): {}", g.node(*pos).key, g.node(*pos).weight, tally.join(", "));
    }
    write_dot(std::io::stdout().lock(), &g, DotOptions { overlay: Some(&overlay), manifest: None })
}
