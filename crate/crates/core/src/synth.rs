//! Seeded synthetic data: random record sets with Zipf-distributed exposure
//! popularity, and small hand-specified node sets.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::codes::{parse_code, Axis, Code};
use crate::ingest::{Multiset, Node, NodeKey, OhpRecord, MAX_EXPOSURES};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub records: usize,
    pub diseases: usize,
    pub exposures: usize,
    pub occupations: usize,
    pub sectors: usize,
    /// Zipf exponent for exposure and disease popularity.
    pub zipf_exponent: f64,
    /// Relative frequency of cortege sizes 1 through 5.
    pub cortege_sizes: [f64; MAX_EXPOSURES],
    pub first_year: i32,
    pub last_year: i32,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            records: 1000,
            diseases: 40,
            exposures: 200,
            occupations: 60,
            sectors: 20,
            zipf_exponent: 1.1,
            cortege_sizes: [0.5, 0.3, 0.12, 0.05, 0.03],
            first_year: 2002,
            last_year: 2007,
        }
    }
}

impl SyntheticConfig {
    /// Small, dense datasets for oracle comparisons.
    pub fn small(records: usize, exposures: usize) -> Self {
        SyntheticConfig {
            records,
            diseases: 3,
            exposures,
            occupations: 5,
            sectors: 3,
            zipf_exponent: 0.8,
            cortege_sizes: [0.3, 0.3, 0.2, 0.1, 0.1],
            ..Default::default()
        }
    }
}

pub fn exposure_code(index: usize) -> Code {
    code(Axis::Exposure, &format!("{:02}.{:03}", index / 100, index % 100))
}

fn code(axis: Axis, text: &str) -> Code {
    parse_code(axis, text, '.').expect("generated codes are well formed")
}

/// Generates `config.records` valid records from `seed`.
pub fn generate(config: &SyntheticConfig, seed: u64) -> Vec<OhpRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exposure_rank = Zipf::new(config.exposures.max(1) as f64, config.zipf_exponent).expect("valid zipf");
    let disease_rank = Zipf::new(config.diseases.max(1) as f64, config.zipf_exponent).expect("valid zipf");
    let sizes = WeightedIndex::new(config.cortege_sizes).expect("valid cortege size weights");
    let max_size = config.exposures.clamp(1, MAX_EXPOSURES);

    let exposures: Vec<Code> = (0..config.exposures.max(1)).map(exposure_code).collect();
    let diseases: Vec<Code> = (0..config.diseases.max(1)).map(|i| code(Axis::Disease, &format!("D{i:03}"))).collect();
    let occupations: Vec<Code> =
        (0..config.occupations.max(1)).map(|i| code(Axis::Occupation, &format!("{}.{}", i / 10, i % 10))).collect();
    let sectors: Vec<Code> = (0..config.sectors.max(1)).map(|i| code(Axis::Sector, &format!("S{i:02}"))).collect();

    (0..config.records)
        .map(|i| {
            let size = (sizes.sample(&mut rng) + 1).min(max_size);
            let mut cortege = BTreeSet::new();
            while cortege.len() < size {
                let rank = exposure_rank.sample(&mut rng) as usize;
                cortege.insert(exposures[rank - 1].clone());
            }
            let disease = diseases[disease_rank.sample(&mut rng) as usize - 1].clone();
            OhpRecord {
                record_id: format!("R{i:06}"),
                year: rng.random_range(config.first_year..=config.last_year),
                disease,
                exposures: cortege,
                occupation: occupations[rng.random_range(0..occupations.len())].clone(),
                sector: sectors[rng.random_range(0..sectors.len())].clone(),
            }
        })
        .collect()
}

/// A node with the given exposures and weight; disease `C82`, occupation
/// `O`, sector `S`, year 2004.
pub fn node(id: usize, exposures: &[&str], weight: u64) -> Node {
    let mut ex: Vec<Code> = exposures.iter().map(|e| code(Axis::Exposure, e)).collect();
    ex.sort();
    ex.dedup();
    let mut years = Multiset::new();
    years.insert_n(2004, weight);
    let mut occupations = Multiset::new();
    occupations.insert_n(code(Axis::Occupation, "O"), weight);
    let mut sectors = Multiset::new();
    sectors.insert_n(code(Axis::Sector, "S"), weight);
    Node {
        id,
        key: NodeKey { disease: code(Axis::Disease, "C82"), exposures: ex, strict_extra: None },
        weight,
        years,
        occupations,
        sectors,
    }
}

/// One weight-1 node per cortege, ids in order.
pub fn nodes_from_corteges(corteges: &[&[&str]]) -> Vec<Node> {
    corteges.iter().enumerate().map(|(i, c)| node(i, c, 1)).collect()
}

/// Random graph-shaped node set: `n` nodes whose corteges are drawn from
/// `alphabet` exposures, with weights in `1..=max_weight`.
pub fn random_nodes(n: usize, alphabet: usize, max_weight: u64, seed: u64) -> Vec<Node> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..alphabet.max(1)).map(|i| format!("E{i}")).collect();
    (0..n)
        .map(|id| {
            let size = rng.random_range(1..=MAX_EXPOSURES.min(names.len()));
            let picks: Vec<&str> = (0..size).map(|_| names[rng.random_range(0..names.len())].as_str()).collect();
            node(id, &picks, rng.random_range(1..=max_weight.max(1)))
        })
        .collect()
}
