mod common;

use std::collections::BTreeSet;

use common::{adjacency_matrix, brute_clustering, brute_degrees, cortege_strings, records};
use exposome::metrics::{clustering, degrees, density};
use exposome::synth::{nodes_from_corteges, random_nodes};
use exposome::{dedupe, Exposome, ExposomeParams, KeyMode};
use proptest::prelude::*;

fn corteges(g: &Exposome) -> Vec<BTreeSet<String>> {
    g.nodes().iter().map(cortege_strings).collect()
}

#[test]
fn complete_graph_of_six() {
    let g = Exposome::build(&nodes_from_corteges(&[&["X"] as &[&str]; 6]), ExposomeParams::default()).unwrap();
    assert!(degrees(&g).per_node.iter().all(|&k| k == 5));
    assert!(clustering(&g).per_node.iter().all(|&c| c == 1.0));
    assert_eq!(density(&g), 1.0);
}

#[test]
fn five_leaf_star() {
    let g = Exposome::build(
        &nodes_from_corteges(&[&["A", "B", "C", "D", "E"], &["A"], &["B"], &["C"], &["D"], &["E"]]),
        ExposomeParams::default(),
    )
    .unwrap();
    assert_eq!(degrees(&g).per_node, vec![5, 1, 1, 1, 1, 1]);
    assert_eq!(clustering(&g).per_node[0], 0.0);
}

#[test]
fn nhl_fixture_metrics() {
    let g = Exposome::build(&dedupe(&records("nhl_style.csv"), KeyMode::Cortege), ExposomeParams::default()).unwrap();
    let k = degrees(&g);
    let c = clustering(&g);
    // the toluene/virus/aldehydes node links three otherwise separate leaves
    assert_eq!((k.per_node[3], c.per_node[3]), (3, 0.0));
    // benzene-halogen node: neighbors 8, 9, 10, 11 with 4 of 6 pairs linked
    assert_eq!(k.per_node[7], 4);
    assert!((c.per_node[7] - 4.0 / 6.0).abs() < 1e-15);
    // a node inside a single group sees a complete neighborhood
    assert_eq!(c.per_node[9], 1.0);
    assert_eq!(k.per_node[14], 0);
    assert!((density(&g) - 2.0 * 16.0 / (15.0 * 14.0)).abs() < 1e-15);
}

proptest! {
    #[test]
    fn degrees_and_clustering_match_brute_force(seed in 0u64..100_000, n in 1usize..=12, d in 1usize..=2) {
        let g = Exposome::build(&random_nodes(n, 8, 1, seed), ExposomeParams::new(d, 1).unwrap()).unwrap();
        let m = adjacency_matrix(&corteges(&g), d);
        prop_assert_eq!(&degrees(&g).per_node, &brute_degrees(&m));
        prop_assert_eq!(&clustering(&g).per_node, &brute_clustering(&m));
        let hist = degrees(&g).histogram;
        prop_assert_eq!(hist.values().sum::<usize>(), g.node_count());
        prop_assert_eq!(hist.iter().map(|(k, c)| k * c).sum::<usize>(), 2 * g.edge_count());
    }
}
