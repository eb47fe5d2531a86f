//! Builds an exposome from a large synthetic record set and reports timings.
//!
//!     cargo run --release --example synthetic_scale -- [records] [zipf exponent]

use std::time::Instant;

use exposome::metrics::{degrees, density};
use exposome::synth::{generate, SyntheticConfig};
use exposome::{dedupe, Exposome, ExposomeParams, KeyMode};

fn main() -> exposome::Result<()> {
    let mut args = std::env::args().skip(1);
    let records: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let zipf: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.8);
    let config = SyntheticConfig { records, exposures: 1500, zipf_exponent: zipf, ..Default::default() };

    let t = Instant::now();
    let data = generate(&config, 1);
    println!("generated {records} records in {:.2?}", t.elapsed());
    let t = Instant::now();
    let nodes = dedupe(&data, KeyMode::Cortege);
    drop(data);
    println!("dedupe: {} nodes in {:.2?}", nodes.len(), t.elapsed());
    let t = Instant::now();
    let g = Exposome::from_nodes(nodes, ExposomeParams::default())?;
    println!("build: V={} L={} in {:.2?}", g.node_count(), g.edge_count(), t.elapsed());
    println!("density {:.5}, max degree {}", density(&g), degrees(&g).max());
    Ok(())
}
