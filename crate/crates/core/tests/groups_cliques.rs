mod common;

use std::collections::BTreeSet;

use common::{adjacency_matrix, brute_cliques, cortege_strings, has_common_exposure, records};
use exposome::groups::{bridging_nodes, exposure_groups, group_overlap, maximal_cliques, CliqueKind, Witnesses};
use exposome::metrics::{clustering, degrees};
use exposome::synth::{nodes_from_corteges, random_nodes};
use exposome::{dedupe, Error, Exposome, ExposomeParams, KeyMode};
use proptest::prelude::*;

fn nhl() -> Exposome {
    Exposome::build(&dedupe(&records("nhl_style.csv"), KeyMode::Cortege), ExposomeParams::default()).unwrap()
}

#[test]
fn petrol_oils_solvents_triangle_is_one_hybrid_clique() {
    let g = Exposome::build(
        &nodes_from_corteges(&[&["PETROL", "OILS"], &["OILS", "SOLVENTS"], &["SOLVENTS", "PETROL"]]),
        ExposomeParams::default(),
    )
    .unwrap();
    let cliques = maximal_cliques(&g, 100).unwrap();
    assert_eq!(cliques.len(), 1);
    assert_eq!(cliques[0].kind(), CliqueKind::Hybrid);
    let Witnesses::Hybrid { pairs } = &cliques[0].witnesses else { unreachable!() };
    let witnesses: BTreeSet<&str> = pairs.iter().map(|p| p.shared[0].raw()).collect();
    assert_eq!(pairs.len(), 3);
    assert_eq!(witnesses, BTreeSet::from(["OILS", "PETROL", "SOLVENTS"]));
}

#[test]
fn nhl_fixture_groups() {
    let g = nhl();
    let table = exposure_groups(&g);
    let sizes: Vec<(&str, usize, u64)> =
        table.groups.iter().map(|gr| (gr.exposure.raw(), gr.len(), gr.ohp_count)).collect();
    // tallied by hand from the fixture rows
    assert_eq!(
        sizes,
        vec![
            ("BENZENE", 4, 6),
            ("HALO", 3, 5),
            ("ALDEHYDES", 2, 2),
            ("BLACK", 2, 2),
            ("OILS", 2, 3),
            ("PETROL", 2, 3),
            ("RADIATION", 2, 2),
            ("SOLVENTS", 2, 2),
            ("TOLUENE", 2, 2),
            ("VIRUS", 2, 2),
        ]
    );
    assert_eq!(table.unshared.iter().map(|c| c.raw()).collect::<Vec<_>>(), vec!["WOOD"]);

    let overlap = group_overlap(&table.groups);
    let benzene_halo = overlap.edges.iter().find(|e| e.a == 0 && e.b == 1).unwrap();
    assert_eq!(benzene_halo.shared_nodes, 2);

    let bridges = bridging_nodes(&g, &table.groups, &degrees(&g), &clustering(&g));
    assert_eq!(bridges[0].node, 3);
    let names: Vec<&str> = bridges[0].groups.iter().map(|c| c.raw()).collect();
    assert_eq!(names, vec!["ALDEHYDES", "TOLUENE", "VIRUS"]);
    assert_eq!((bridges[0].k, bridges[0].c), (3, 0.0));
    let bridge_nodes: BTreeSet<usize> = bridges.iter().map(|b| b.node).collect();
    assert_eq!(bridge_nodes, BTreeSet::from([0, 1, 2, 3, 7, 8, 11, 12]));
}

#[test]
fn nhl_fixture_cliques() {
    let g = nhl();
    let cliques = maximal_cliques(&g, 100).unwrap();
    let hybrids: Vec<_> = cliques.iter().filter(|c| c.kind() == CliqueKind::Hybrid).collect();
    assert_eq!(hybrids.len(), 1);
    assert_eq!(hybrids[0].members, vec![0, 1, 2]);
    assert_eq!(cliques[0].members, vec![7, 8, 9, 11]);
    assert_eq!(cliques.len(), 8);
}

#[test]
fn cap_returns_partial_result() {
    let g = nhl();
    match maximal_cliques(&g, 3) {
        Err(Error::OutputCapExceeded { cap, partial }) => {
            assert_eq!(cap, 3);
            assert_eq!(partial.len(), 3);
        }
        other => panic!("expected truncation, got {other:?}"),
    }
}

#[test]
fn groups_are_cliques_at_d1() {
    for seed in 0..50 {
        let g = Exposome::build(&random_nodes(25, 10, 2, seed), ExposomeParams::default()).unwrap();
        for group in exposure_groups(&g).groups {
            for (i, &a) in group.members.iter().enumerate() {
                for &b in &group.members[i + 1..] {
                    assert!(g.is_adjacent(a, b));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn cliques_match_subset_enumeration(seed in 0u64..100_000, n in 1usize..=8, d in 1usize..=2) {
        let g = Exposome::build(&random_nodes(n, 7, 1, seed), ExposomeParams::new(d, 1).unwrap()).unwrap();
        let corteges: Vec<BTreeSet<String>> = g.nodes().iter().map(cortege_strings).collect();
        let m = adjacency_matrix(&corteges, d);
        let found = maximal_cliques(&g, 10_000).unwrap();
        let got: BTreeSet<Vec<usize>> = found.iter().map(|c| c.members.clone()).collect();
        prop_assert_eq!(got.len(), found.len());
        prop_assert_eq!(got, brute_cliques(&m));
        for c in &found {
            let expected = if has_common_exposure(&corteges, &c.members) { CliqueKind::Single } else { CliqueKind::Hybrid };
            prop_assert_eq!(c.kind(), expected);
        }
        // size descending, then members
        for w in found.windows(2) {
            prop_assert!(w[0].len() > w[1].len() || (w[0].len() == w[1].len() && w[0].members < w[1].members));
        }
    }
}
