//! Snapshot comparison over time and projection of occupations or sectors
//! onto an exposome.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::codes::{Axis, Code};
use crate::error::{Error, Result};
use crate::graph::{Exposome, ExposomeParams};
use crate::ingest::{dedupe, KeyMode, NodeKey, OhpRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightChange {
    pub key: NodeKey,
    pub before: u64,
    pub after: u64,
}

impl WeightChange {
    pub fn delta(&self) -> u64 {
        self.after - self.before
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewEdge {
    pub a: NodeKey,
    pub b: NodeKey,
    pub shared: Vec<Code>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub t1: i32,
    pub t2: i32,
    /// Nodes of the later snapshot that are absent from the earlier one.
    pub new_nodes: Vec<WeightChange>,
    /// Nodes present in both snapshots whose weight grew.
    pub incremented: Vec<WeightChange>,
    pub new_edges: Vec<NewEdge>,
}

impl DiffReport {
    /// Total weight gained between the snapshots.
    pub fn added_weight(&self) -> u64 {
        self.new_nodes.iter().chain(&self.incremented).map(WeightChange::delta).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.new_nodes.is_empty() && self.incremented.is_empty() && self.new_edges.is_empty()
    }
}

/// Exposome of all records observed up to and including `cutoff`.
pub fn snapshot(records: &[OhpRecord], cutoff: i32, mode: KeyMode, params: ExposomeParams) -> Result<Exposome> {
    let upto: Vec<OhpRecord> = records.iter().filter(|r| r.year <= cutoff).cloned().collect();
    Exposome::build(&dedupe(&upto, mode), params)
}

/// Compares the cumulative exposomes at `t1` and `t2`.
pub fn snapshot_diff(
    records: &[OhpRecord],
    t1: i32,
    t2: i32,
    mode: KeyMode,
    params: ExposomeParams,
) -> Result<DiffReport> {
    if t1 >= t2 {
        return Err(Error::BadCutoffs { t1, t2 });
    }
    let before = snapshot(records, t1, mode, params)?;
    let after = snapshot(records, t2, mode, params)?;

    let before_weights: HashMap<&NodeKey, u64> = before.nodes().iter().map(|n| (&n.key, n.weight)).collect();
    let mut report = DiffReport { t1, t2, ..Default::default() };
    for n in after.nodes() {
        match before_weights.get(&n.key) {
            None => report.new_nodes.push(WeightChange { key: n.key.clone(), before: 0, after: n.weight }),
            Some(&w) if n.weight > w => {
                report.incremented.push(WeightChange { key: n.key.clone(), before: w, after: n.weight })
            }
            Some(_) => {}
        }
    }
    report.new_nodes.sort_by(|a, b| a.key.cmp(&b.key));
    report.incremented.sort_by(|a, b| a.key.cmp(&b.key));

    let key_pair = |g: &Exposome, s: usize, t: usize| {
        let (a, b) = (&g.node(s).key, &g.node(t).key);
        if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) }
    };
    let old_edges: BTreeSet<(NodeKey, NodeKey)> =
        before.edges().map(|e| key_pair(&before, e.source(), e.target())).collect();
    for e in after.edges() {
        let (a, b) = key_pair(&after, e.source(), e.target());
        if !old_edges.contains(&(a.clone(), b.clone())) {
            report.new_edges.push(NewEdge { a, b, shared: after.shared_codes(e).cloned().collect() });
        }
    }
    report.new_edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionOverlay {
    pub axis: Axis,
    pub codes: Vec<Code>,
    /// Graph position → (selected code → matching observations). Nodes with
    /// no match are absent.
    pub counts: BTreeMap<usize, BTreeMap<Code, u64>>,
}

impl ProjectionOverlay {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Selected code with the most matching observations at `node`, ties
    /// going to the earlier code in the selection.
    pub fn dominant(&self, node: usize) -> Option<&Code> {
        let counts = self.counts.get(&node)?;
        let mut best: Option<(&Code, u64)> = None;
        for code in &self.codes {
            let n = counts.get(code).copied().unwrap_or(0);
            if n > 0 && best.is_none_or(|(_, b)| n > b) {
                best = Some((code, n));
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Counts, for every node, the observations that carry each selected
/// occupation or sector code.
pub fn project(g: &Exposome, axis: Axis, codes: &[Code]) -> Result<ProjectionOverlay> {
    if !matches!(axis, Axis::Occupation | Axis::Sector) {
        return Err(Error::UnknownAxis(axis.to_string()));
    }
    let mut selected: Vec<Code> = Vec::new();
    for c in codes {
        if c.axis() != axis {
            return Err(Error::InvalidParams(format!("code {c} is not a {axis} code")));
        }
        if !selected.contains(c) {
            selected.push(c.clone());
        }
    }
    let mut counts = BTreeMap::new();
    for (i, node) in g.nodes().iter().enumerate() {
        let attrs = node.attributes(axis).expect("occupation or sector");
        let per_code: BTreeMap<Code, u64> = selected
            .iter()
            .filter_map(|c| Some((c.clone(), attrs.count(c))).filter(|(_, n)| *n > 0))
            .collect();
        if !per_code.is_empty() {
            counts.insert(i, per_code);
        }
    }
    Ok(ProjectionOverlay { axis, codes: selected, counts })
}
