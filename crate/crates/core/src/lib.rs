//! Exposome construction and analysis.
//!
//! An exposome is a network built from coded occupational health
//! observations. Each observation pairs a disease with a set of one to five
//! suspected exposures (its cortege), an occupation and an activity sector.
//! Identical disease/cortege combinations are merged into weighted nodes, and
//! two nodes are linked when their corteges share at least `D` exposures and
//! both carry at least `eta` observations.
//!
//! The pipeline, module by module:
//!
//! - [`codes`]: hierarchical classification codes, aggregation, coverage.
//! - [`ingest`]: record files to validated records to weighted [`Node`]s.
//! - [`graph`]: the [`Exposome`] itself, built through an inverted index.
//! - [`metrics`]: density, degree distribution, clustering coefficients.
//! - [`groups`]: exposure groups, maximal (hybrid) cliques, bridging nodes.
//! - [`cluster`]: average-linkage dendrogram of exposure groups.
//! - [`temporal`]: snapshot diffs and occupation/sector projection.
//! - [`export`]: GraphML, DOT, Newick and JSON reports.
//!
//! ```
//! use exposome::{dedupe, Exposome, ExposomeParams, KeyMode};
//! use exposome::synth::{generate, SyntheticConfig};
//!
//! let records = generate(&SyntheticConfig::default(), 42);
//! let nodes = dedupe(&records, KeyMode::Cortege);
//! let g = Exposome::build(&nodes, ExposomeParams::default()).unwrap();
//! assert_eq!(g.total_weight(), records.len() as u64);
//! ```

pub mod cluster;
pub mod codes;
pub mod coverage;
pub mod error;
pub mod export;
pub mod graph;
pub mod groups;
pub mod ingest;
pub mod metrics;
pub mod synth;
pub mod temporal;

#[cfg(test)]
mod testutil;

pub use codes::{aggregate, coverage, parse_code, Axis, ClassificationTable, Code, Tables};
pub use error::{Error, Result};
pub use graph::{connection_strength, Edge, Exposome, ExposomeParams};
pub use ingest::{dedupe, parse_records, IngestOptions, KeyMode, Node, NodeKey, OhpRecord, RecordFormat};
