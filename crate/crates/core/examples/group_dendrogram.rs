//! Average-linkage dendrogram of exposure groups, printed as Newick and as a
//! merge table.
//!
//!     cargo run --example group_dendrogram

use exposome::cluster::{dendrogram, Cluster, Linkage};
use exposome::groups::exposure_groups;
use exposome::synth::{generate, SyntheticConfig};
use exposome::{dedupe, Exposome, ExposomeParams, KeyMode};

fn main() -> exposome::Result<()> {
    let records = generate(&SyntheticConfig { records: 120, exposures: 25, ..Default::default() }, 3);
    let g = Exposome::build(&dedupe(&records, KeyMode::Cortege), ExposomeParams::default())?;
    let groups = exposure_groups(&g).groups;
    let tree = dendrogram(&groups, Linkage::Average);

    println!("{}\n", tree.to_newick());
    let name = |c: Cluster| match c {
        Cluster::Leaf(i) => format!("{}[{}]", tree.leaves[i].label, tree.leaves[i].ohp_count),
        Cluster::Merge(i) => format!("m{i}"),
    };
    for (i, m) in tree.merges.iter().enumerate() {
        println!("m{i:<3} {:.4}  {} + {}", m.height, name(m.left), name(m.right));
    }

    println!("\nclusters below height 0.9:");
    for cluster in tree.cut_below(0.9) {
        let labels: Vec<&str> = cluster.iter().map(|&i| tree.leaves[i].label.as_str()).collect();
        println!("  {}", labels.join(" "));
    }
    Ok(())
}
