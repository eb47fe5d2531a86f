//! Brute-force oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls into the graph, metrics or groups code; each
//! oracle works from raw code strings.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;

use exposome::ingest::{read_records_file, Parsed};
use exposome::synth::{generate, SyntheticConfig};
use exposome::{Exposome, IngestOptions, KeyMode, Node, OhpRecord, Tables};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn tables() -> Tables {
    Tables::load_dir(fixture("tables")).expect("fixture tables load")
}

/// Parses a fixture from a scratch copy so the rejects sidecar never lands
/// in the source tree.
pub fn load(name: &str) -> Parsed {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::copy(fixture(name), &path).unwrap();
    read_records_file(&path, &IngestOptions::default().with_tables(tables())).expect("fixture parses")
}

pub fn records(name: &str) -> Vec<OhpRecord> {
    load(name).records
}

/// Small dense record set: `n` records over `alphabet` exposure codes.
pub fn random_records(n: usize, alphabet: usize, seed: u64) -> Vec<OhpRecord> {
    generate(&SyntheticConfig::small(n, alphabet), seed)
}

pub fn cortege_strings(node: &Node) -> BTreeSet<String> {
    node.exposures().iter().map(|c| c.raw().to_string()).collect()
}

/// All-pairs edge set over dedupe ids: every pair of nodes at or above
/// `eta` sharing at least `d` exposure strings.
pub fn oracle_edges(nodes: &[Node], d: usize, eta: u64) -> BTreeSet<(usize, usize)> {
    let kept: Vec<(usize, HashSet<String>)> = nodes
        .iter()
        .filter(|n| n.weight >= eta)
        .map(|n| (n.id, n.exposures().iter().map(|c| c.raw().to_string()).collect()))
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            let shared = kept[i].1.intersection(&kept[j].1).count();
            if shared >= d {
                let (a, b) = (kept[i].0, kept[j].0);
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    out
}

/// The graph's edges over dedupe ids.
pub fn graph_edges(g: &Exposome) -> BTreeSet<(usize, usize)> {
    g.edges()
        .map(|e| {
            let (a, b) = (g.node(e.source()).id, g.node(e.target()).id);
            (a.min(b), a.max(b))
        })
        .collect()
}

/// Dense adjacency matrix over the given corteges at threshold `d`.
pub fn adjacency_matrix(corteges: &[BTreeSet<String>], d: usize) -> Vec<Vec<bool>> {
    let v = corteges.len();
    let mut m = vec![vec![false; v]; v];
    for i in 0..v {
        for j in 0..v {
            if i != j && corteges[i].intersection(&corteges[j]).count() >= d {
                m[i][j] = true;
            }
        }
    }
    m
}

pub fn brute_degrees(m: &[Vec<bool>]) -> Vec<usize> {
    m.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
}

/// Fraction of neighbor pairs that are themselves linked; 0 below degree 2.
pub fn brute_clustering(m: &[Vec<bool>]) -> Vec<f64> {
    (0..m.len())
        .map(|i| {
            let nbrs: Vec<usize> = (0..m.len()).filter(|&j| m[i][j]).collect();
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            let mut linked = 0;
            for a in 0..k {
                for b in a + 1..k {
                    if m[nbrs[a]][nbrs[b]] {
                        linked += 1;
                    }
                }
            }
            linked as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

/// Every maximal clique with at least two members, found by checking all
/// 2^V subsets.
pub fn brute_cliques(m: &[Vec<bool>]) -> BTreeSet<Vec<usize>> {
    let v = m.len();
    assert!(v <= 20, "subset enumeration is for small graphs");
    let is_clique = |mask: u32| {
        (0..v).all(|i| mask & (1 << i) == 0 || (i + 1..v).all(|j| mask & (1 << j) == 0 || m[i][j]))
    };
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << v) {
        if mask.count_ones() < 2 || !is_clique(mask) {
            continue;
        }
        let maximal = (0..v).all(|x| mask & (1 << x) != 0 || !is_clique(mask | (1 << x)));
        if maximal {
            out.insert((0..v).filter(|&i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// True when the members' corteges share at least one exposure.
pub fn has_common_exposure(corteges: &[BTreeSet<String>], members: &[usize]) -> bool {
    let mut common = corteges[members[0]].clone();
    for &m in &members[1..] {
        common = common.intersection(&corteges[m]).cloned().collect();
    }
    !common.is_empty()
}

type Key = (String, Vec<String>, Option<(String, String)>);

fn key_of(r: &OhpRecord, mode: KeyMode) -> Key {
    let strict = match mode {
        KeyMode::Cortege => None,
        KeyMode::Strict => Some((r.occupation.raw().to_string(), r.sector.raw().to_string())),
    };
    (r.disease.raw().to_string(), r.exposures.iter().map(|c| c.raw().to_string()).collect(), strict)
}

/// Key → weight over records observed up to `cutoff`, keeping weights at
/// or above `eta`.
pub fn key_weights(records: &[OhpRecord], cutoff: i32, mode: KeyMode, eta: u64) -> BTreeMap<Key, u64> {
    let mut w: BTreeMap<Key, u64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.year <= cutoff) {
        *w.entry(key_of(r, mode)).or_default() += 1;
    }
    w.retain(|_, &mut n| n >= eta);
    w
}

/// (new keys, incremented keys) between two cumulative snapshots.
pub fn key_map_diff(records: &[OhpRecord], t1: i32, t2: i32, mode: KeyMode, eta: u64) -> (usize, usize) {
    let before = key_weights(records, t1, mode, eta);
    let after = key_weights(records, t2, mode, eta);
    let mut new = 0;
    let mut incremented = 0;
    for (k, w) in &after {
        match before.get(k) {
            None => new += 1,
            Some(b) if w > b => incremented += 1,
            Some(_) => {}
        }
    }
    (new, incremented)
}
