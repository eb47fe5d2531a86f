//! Interchange formats: GraphML, DOT, Newick and JSON reports, each
//! carrying the run manifest it was produced under.

mod dot;
mod graphml;
mod manifest;
mod report;

pub use dot::{write_dot, DotOptions, NODE_SIZE_BASE};
pub use graphml::{read_graphml, write_graphml};
pub use manifest::{InputDigest, RunManifest, RunParameters};
pub use report::{
    clique_rows, write_json, BridgeRow, CliqueRow, DendrogramDump, GroupRow, NodeRow, PairRow, Report, ReportInputs,
    Summary,
};

use crate::cluster::Dendrogram;

/// Newick text preceded by a bracket comment referencing the manifest.
pub fn newick_with_manifest(tree: &Dendrogram, manifest: Option<&RunManifest>) -> String {
    match manifest {
        Some(m) => format!("[{}]{}\n", m.reference(), tree.to_newick()),
        None => format!("{}\n", tree.to_newick()),
    }
}
