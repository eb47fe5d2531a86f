//! Which nodes are new in the latest year and which grew, with the new links
//! they bring.
//!
//!     cargo run --example temporal_diff

use std::path::PathBuf;

use exposome::ingest::read_records_file;
use exposome::temporal::snapshot_diff;
use exposome::{ExposomeParams, IngestOptions, KeyMode};

fn main() -> exposome::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/temporal_77.csv");
    let records = read_records_file(path, &IngestOptions::default())?.records;
    let diff = snapshot_diff(&records, 2006, 2007, KeyMode::Cortege, ExposomeParams::default())?;

    println!("{} observations added between {} and {}", diff.added_weight(), diff.t1, diff.t2);
    println!("\nnew nodes ({}):", diff.new_nodes.len());
    for c in &diff.new_nodes {
        println!("  {} w={}", c.key, c.after);
    }
    println!("\nincremented ({}):", diff.incremented.len());
    for c in &diff.incremented {
        println!("  {} {} -> {}", c.key, c.before, c.after);
    }
    println!("\nnew edges ({}), first ten:", diff.new_edges.len());
    for e in diff.new_edges.iter().take(10) {
        let shared: Vec<&str> = e.shared.iter().map(|c| c.raw()).collect();
        println!("  {}  --[{}]--  {}", e.a, shared.join(" x "), e.b);
    }
    Ok(())
}
