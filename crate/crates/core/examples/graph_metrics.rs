//! Density, degree histogram and the k-c table of an exposome.
//!
//!     cargo run --example graph_metrics

use exposome::metrics::{clustering, clustering_summary, degrees, density};
use exposome::synth::{generate, SyntheticConfig};
use exposome::{dedupe, Exposome, ExposomeParams, KeyMode};

fn main() -> exposome::Result<()> {
    let records = generate(&SyntheticConfig { records: 400, exposures: 60, ..Default::default() }, 42);
    let g = Exposome::build(&dedupe(&records, KeyMode::Cortege), ExposomeParams::new(1, 2)?)?;
    let k = degrees(&g);
    let c = clustering(&g);

    println!("V={} L={} density={:.4} ({:.2})", g.node_count(), g.edge_count(), density(&g), density(&g));
    println!("\ndegree histogram:");
    for (degree, count) in &k.histogram {
        println!("  k={degree:<3} {}", "#".repeat(*count));
    }

    let s = clustering_summary(&k, &c);
    println!("\nc = 0 on {} nodes, c = 1 on {} nodes", s.zero, s.one);
    println!("\ntop nodes by degree:");
    println!("  {:>4} {:>4} {:>6}  node", "k", "w", "c");
    for i in k.ranked().into_iter().take(10) {
        let n = g.node(i);
        println!("  {:>4} {:>4} {:>6.3}  {}", k.per_node[i], n.weight, c.per_node[i], n.key);
    }
    Ok(())
}
