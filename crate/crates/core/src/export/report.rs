use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::RunManifest;
use crate::cluster::{Dendrogram, Leaf, Merge};
use crate::codes::{Axis, Code, Tables};
use crate::coverage::CoverageRow;
use crate::error::{Error, Result};
use crate::graph::Exposome;
use crate::groups::{self, BridgeReport, CliqueFinding, CliqueKind, GroupTable, Witnesses};
use crate::metrics::{self, ClusteringProfile, ClusteringSummary, DegreeProfile};

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    #[serde(rename = "W")]
    pub total_weight: u64,
    #[serde(rename = "V")]
    pub nodes: usize,
    #[serde(rename = "L")]
    pub edges: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub eta: u64,
}

impl Summary {
    pub fn of(g: &Exposome) -> Self {
        Summary {
            total_weight: g.total_weight(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            d: g.params().d,
            eta: g.params().eta,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub node_id: usize,
    pub label: String,
    pub weight: u64,
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupRow {
    pub exposure: Code,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub nodes: usize,
    pub ohp_count: u64,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeRow {
    pub node_id: usize,
    pub groups: Vec<Code>,
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub a: usize,
    pub b: usize,
    pub shared: Vec<Code>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueRow {
    pub members: Vec<usize>,
    pub kind: CliqueKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub common: Vec<Code>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairRow>,
}

/// Clique table rows with node references mapped to dedupe ids.
pub fn clique_rows(g: &Exposome, cliques: &[CliqueFinding]) -> Vec<CliqueRow> {
    let id = |pos: usize| g.node(pos).id;
    cliques
        .iter()
        .map(|c| {
            let (common, pairs) = match &c.witnesses {
                Witnesses::Single { common } => (common.clone(), Vec::new()),
                Witnesses::Hybrid { pairs } => (
                    Vec::new(),
                    pairs.iter().map(|p| PairRow { a: id(p.a), b: id(p.b), shared: p.shared.clone() }).collect(),
                ),
            };
            CliqueRow { members: c.members.iter().map(|&m| id(m)).collect(), kind: c.kind(), common, pairs }
        })
        .collect()
}

/// Everything a report is assembled from, all computed on the same graph.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub graph: &'a Exposome,
    pub degrees: &'a DegreeProfile,
    pub clustering: &'a ClusteringProfile,
    pub groups: &'a GroupTable,
    pub bridges: &'a [BridgeReport],
    pub cliques: &'a [CliqueFinding],
    pub cliques_truncated: bool,
    pub coverage: &'a [CoverageRow],
    pub tables: Option<&'a Tables>,
    pub manifest: Option<&'a RunManifest>,
}

/// One structured document with the graph summary, metrics, groups,
/// cliques, coverage and the manifest. Node references are dedupe ids.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub summary: Summary,
    pub density: f64,
    /// Density to two decimals.
    pub density_display: String,
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Nodes by decreasing degree.
    pub nodes: Vec<NodeRow>,
    pub clustering: ClusteringSummary,
    pub groups: Vec<GroupRow>,
    pub unshared_exposures: Vec<Code>,
    pub bridges: Vec<BridgeRow>,
    pub cliques: Vec<CliqueRow>,
    pub cliques_truncated: bool,
    pub coverage: Vec<CoverageRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl Report {
    pub fn new(inputs: ReportInputs<'_>) -> Report {
        let g = inputs.graph;
        let id = |pos: usize| g.node(pos).id;
        let density = metrics::density(g);
        let nodes = inputs
            .degrees
            .ranked()
            .into_iter()
            .map(|i| NodeRow {
                node_id: id(i),
                label: g.node(i).key.to_string(),
                weight: g.node(i).weight,
                k: inputs.degrees.per_node[i],
                c: inputs.clustering.per_node[i],
            })
            .collect();
        let groups = inputs
            .groups
            .groups
            .iter()
            .map(|grp| GroupRow {
                exposure: grp.exposure.clone(),
                label: inputs
                    .tables
                    .and_then(|t| t.get(Axis::Exposure).label(&grp.exposure))
                    .map(str::to_string),
                nodes: grp.len(),
                ohp_count: grp.ohp_count,
                members: grp.members.iter().map(|&m| id(m)).collect(),
            })
            .collect();
        let bridges = inputs
            .bridges
            .iter()
            .map(|b| BridgeRow { node_id: id(b.node), groups: b.groups.clone(), k: b.k, c: b.c })
            .collect();
        let cliques = clique_rows(g, inputs.cliques);
        Report {
            summary: Summary::of(g),
            density,
            density_display: format!("{density:.2}"),
            degree_histogram: inputs.degrees.histogram.clone(),
            nodes,
            clustering: metrics::clustering_summary(inputs.degrees, inputs.clustering),
            groups,
            unshared_exposures: inputs.groups.unshared.clone(),
            bridges,
            cliques,
            cliques_truncated: inputs.cliques_truncated,
            coverage: inputs.coverage.to_vec(),
            manifest: inputs.manifest.cloned(),
        }
    }

    /// Runs every analysis on `g` and assembles the report. Clique
    /// enumeration stops after `max_cliques`.
    pub fn analyze(
        g: &Exposome,
        max_cliques: usize,
        coverage: &[CoverageRow],
        tables: Option<&Tables>,
        manifest: Option<&RunManifest>,
    ) -> Report {
        let degrees = metrics::degrees(g);
        let clustering = metrics::clustering(g);
        let table = groups::exposure_groups(g);
        let bridges = groups::bridging_nodes(g, &table.groups, &degrees, &clustering);
        let (cliques, truncated) = match groups::maximal_cliques(g, max_cliques) {
            Ok(c) => (c, false),
            Err(Error::OutputCapExceeded { partial, .. }) => (partial, true),
            Err(other) => unreachable!("clique enumeration only fails on the cap: {other}"),
        };
        Report::new(ReportInputs {
            graph: g,
            degrees: &degrees,
            clustering: &clustering,
            groups: &table,
            bridges: &bridges,
            cliques: &cliques,
            cliques_truncated: truncated,
            coverage,
            tables,
            manifest,
        })
    }
}

/// Structured tree dump: leaves with their observation counts, then every
/// merge with its height.
#[derive(Debug, Clone, Serialize)]
pub struct DendrogramDump<'a> {
    pub leaves: &'a [Leaf],
    pub merges: &'a [Merge],
    pub newick: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<&'a RunManifest>,
}

impl<'a> DendrogramDump<'a> {
    pub fn new(tree: &'a Dendrogram, manifest: Option<&'a RunManifest>) -> Self {
        DendrogramDump { leaves: &tree.leaves, merges: &tree.merges, newick: tree.to_newick(), manifest }
    }
}
