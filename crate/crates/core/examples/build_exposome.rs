//! Parse a record file, deduplicate it into weighted nodes and build the
//! exposome at a few (D, eta) settings.
//!
//!     cargo run --example build_exposome [records.csv]

use std::path::PathBuf;

use exposome::ingest::read_records_file;
use exposome::metrics::density;
use exposome::{dedupe, Exposome, ExposomeParams, IngestOptions, KeyMode};

fn main() -> exposome::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/nhl_style.csv"));
    let parsed = read_records_file(&path, &IngestOptions::default())?;
    println!("{}: {} records, {} rejected", path.display(), parsed.records.len(), parsed.rejects.len());
    for r in &parsed.rejects {
        println!("  row {}: {}", r.row, r.reason);
    }

    for mode in [KeyMode::Cortege, KeyMode::Strict] {
        let nodes = dedupe(&parsed.records, mode);
        println!("\nkey mode {mode}: {} nodes", nodes.len());
        for (d, eta) in [(1, 1), (2, 1), (1, 2)] {
            let g = Exposome::build(&nodes, ExposomeParams::new(d, eta)?)?;
            println!(
                "  D={d} eta={eta}: W={} V={} L={} density={:.2}",
                g.total_weight(),
                g.node_count(),
                g.edge_count(),
                density(&g)
            );
        }
    }

    let g = Exposome::build(&dedupe(&parsed.records, KeyMode::Cortege), ExposomeParams::default())?;
    println!("\nheaviest nodes:");
    let mut by_weight: Vec<_> = g.nodes().iter().collect();
    by_weight.sort_by(|a, b| b.weight.cmp(&a.weight).then(a.id.cmp(&b.id)));
    for n in by_weight.iter().take(5) {
        println!("  [{}] {} w={}", n.id, n.key, n.weight);
    }
    Ok(())
}
