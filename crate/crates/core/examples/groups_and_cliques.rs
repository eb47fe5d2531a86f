//! Exposure groups, bridging nodes, the group overlap graph and maximal
//! cliques split into single and hybrid.
//!
//!     cargo run --example groups_and_cliques

use std::path::PathBuf;

use exposome::groups::{bridging_nodes, exposure_groups, group_overlap, maximal_cliques, Witnesses};
use exposome::ingest::read_records_file;
use exposome::metrics::{clustering, degrees};
use exposome::{dedupe, Exposome, ExposomeParams, IngestOptions, KeyMode, Tables};

fn main() -> exposome::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let tables = Tables::load_dir(root.join("tables"))?;
    let records = read_records_file(root.join("nhl_style.csv"), &IngestOptions::default())?.records;
    let g = Exposome::build(&dedupe(&records, KeyMode::Cortege), ExposomeParams::default())?;
    let table = exposure_groups(&g);
    let exposure_label = |code: &exposome::Code| tables.get(exposome::Axis::Exposure).label(code).unwrap_or("?").to_string();

    println!("{} exposure groups:", table.groups.len());
    for grp in &table.groups {
        println!("  {:<10} {} nodes [{}]  {}", grp.exposure, grp.len(), grp.ohp_count, exposure_label(&grp.exposure));
    }
    println!("unshared: {:?}", table.unshared.iter().map(|c| c.raw()).collect::<Vec<_>>());

    println!("\nbridging nodes:");
    for b in bridging_nodes(&g, &table.groups, &degrees(&g), &clustering(&g)) {
        let groups: Vec<&str> = b.groups.iter().map(|c| c.raw()).collect();
        println!("  {} k={} c={:.2} in {}", g.node(b.node).key, b.k, b.c, groups.join(", "));
    }

    let overlap = group_overlap(&table.groups);
    println!("\ngroups sharing nodes:");
    for e in &overlap.edges {
        println!("  {} - {}: {}", overlap.groups[e.a], overlap.groups[e.b], e.shared_nodes);
    }

    println!("\nmaximal cliques:");
    for c in maximal_cliques(&g, 1000)? {
        let members: Vec<String> = c.members.iter().map(|&m| g.node(m).key.to_string()).collect();
        match &c.witnesses {
            Witnesses::Single { common } => println!("  single via {}: {}", common[0], members.join(" | ")),
            Witnesses::Hybrid { pairs } => {
                let via: Vec<String> = pairs.iter().map(|p| p.shared[0].to_string()).collect();
                println!("  hybrid via {}: {}", via.join(" x "), members.join(" | "));
            }
        }
    }
    Ok(())
}
