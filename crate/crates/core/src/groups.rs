//! Exposure groups, maximal cliques, bridging nodes and the group overlap
//! graph.
//!
//! An exposure group is the set of nodes whose corteges contain one given
//! exposure. With `D = 1` every group is a clique of the exposome. Cliques
//! that are not held together by one common exposure are "hybrid": each pair
//! is linked, but by different exposures.

use serde::Serialize;

use crate::codes::Code;
use crate::error::{Error, Result};
use crate::graph::Exposome;
use crate::metrics::{ClusteringProfile, DegreeProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExposureGroup {
    pub exposure: Code,
    /// Graph positions, ascending.
    pub members: Vec<usize>,
    /// Sum of member weights.
    pub ohp_count: u64,
}

impl ExposureGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.binary_search(&node).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupTable {
    /// Sorted by size descending, then exposure code.
    pub groups: Vec<ExposureGroup>,
    /// Exposures carried by exactly one node.
    pub unshared: Vec<Code>,
}

pub fn exposure_groups(g: &Exposome) -> GroupTable {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); g.exposures().len()];
    for i in 0..g.node_count() {
        for &e in g.cortege(i) {
            members[e as usize].push(i);
        }
    }
    let mut groups = Vec::new();
    let mut unshared = Vec::new();
    for (e, m) in members.into_iter().enumerate() {
        let code = g.exposure(e as u32).clone();
        match m.len() {
            0 => {}
            1 => unshared.push(code),
            _ => groups.push(ExposureGroup {
                ohp_count: m.iter().map(|&i| g.node(i).weight).sum(),
                exposure: code,
                members: m,
            }),
        }
    }
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.exposure.cmp(&b.exposure)));
    GroupTable { groups, unshared }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CliqueKind {
    Single,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub a: usize,
    pub b: usize,
    pub shared: Vec<Code>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witnesses {
    /// Exposures common to every member.
    Single { common: Vec<Code> },
    /// No exposure is common to all members; the exposures linking each pair.
    Hybrid { pairs: Vec<PairWitness> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueFinding {
    /// Graph positions, ascending.
    pub members: Vec<usize>,
    pub witnesses: Witnesses,
}

impl CliqueFinding {
    pub fn kind(&self) -> CliqueKind {
        match self.witnesses {
            Witnesses::Single { .. } => CliqueKind::Single,
            Witnesses::Hybrid { .. } => CliqueKind::Hybrid,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn classify(g: &Exposome, members: Vec<usize>) -> CliqueFinding {
    let mut common: Vec<u32> = g.cortege(members[0]).to_vec();
    for &m in &members[1..] {
        let other = g.cortege(m);
        common.retain(|e| other.binary_search(e).is_ok());
    }
    let witnesses = if common.is_empty() {
        let mut pairs = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let shared = g
                    .find_edge(a, b)
                    .map(|e| g.shared_codes(e).cloned().collect())
                    .unwrap_or_default();
                pairs.push(PairWitness { a, b, shared });
            }
        }
        Witnesses::Hybrid { pairs }
    } else {
        Witnesses::Single {
            common: common.iter().map(|&e| g.exposure(e).clone()).collect(),
        }
    };
    CliqueFinding { members, witnesses }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

struct CliqueSearch<'a> {
    g: &'a Exposome,
    cap: usize,
    found: Vec<Vec<usize>>,
    truncated: bool,
}

impl CliqueSearch<'_> {
    // Bron–Kerbosch with Tomita pivoting; `p` and `x` are sorted.
    fn expand(&mut self, r: &mut Vec<u32>, mut p: Vec<u32>, mut x: Vec<u32>) {
        if self.truncated {
            return;
        }
        if p.is_empty() {
            if x.is_empty() && r.len() >= 2 {
                if self.found.len() == self.cap {
                    self.truncated = true;
                    return;
                }
                let mut clique: Vec<usize> = r.iter().map(|&v| v as usize).collect();
                clique.sort_unstable();
                self.found.push(clique);
            }
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| (intersect_sorted(&p, self.g.neighbors(u as usize)).len(), std::cmp::Reverse(u)))
            .expect("p is non-empty");
        let pivot_nbrs = self.g.neighbors(pivot as usize);
        let candidates: Vec<u32> = p.iter().copied().filter(|v| pivot_nbrs.binary_search(v).is_err()).collect();
        for v in candidates {
            let nbrs = self.g.neighbors(v as usize);
            r.push(v);
            self.expand(r, intersect_sorted(&p, nbrs), intersect_sorted(&x, nbrs));
            r.pop();
            if self.truncated {
                return;
            }
            p.retain(|&w| w != v);
            let at = x.partition_point(|&w| w < v);
            x.insert(at, v);
        }
    }
}

/// Enumerates every maximal clique with at least two members, ordered by size
/// descending and then by member list. If more than `max_output` cliques
/// exist, enumeration stops and the cliques found so far come back inside
/// [`Error::OutputCapExceeded`].
pub fn maximal_cliques(g: &Exposome, max_output: usize) -> Result<Vec<CliqueFinding>> {
    let mut search = CliqueSearch { g, cap: max_output, found: Vec::new(), truncated: false };
    let all: Vec<u32> = (0..g.node_count() as u32).collect();
    search.expand(&mut Vec::new(), all, Vec::new());
    let mut found = search.found;
    found.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let cliques: Vec<CliqueFinding> = found.into_iter().map(|m| classify(g, m)).collect();
    if search.truncated {
        Err(Error::OutputCapExceeded { cap: max_output, partial: cliques })
    } else {
        Ok(cliques)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeReport {
    pub node: usize,
    pub groups: Vec<Code>,
    pub k: usize,
    pub c: f64,
}

/// Nodes that belong to two or more exposure groups, most memberships first.
pub fn bridging_nodes(
    g: &Exposome,
    groups: &[ExposureGroup],
    degrees: &DegreeProfile,
    clustering: &ClusteringProfile,
) -> Vec<BridgeReport> {
    let mut memberships: Vec<Vec<Code>> = vec![Vec::new(); g.node_count()];
    for group in groups {
        for &m in &group.members {
            memberships[m].push(group.exposure.clone());
        }
    }
    let mut out: Vec<BridgeReport> = memberships
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.len() >= 2)
        .map(|(node, mut groups)| {
            groups.sort();
            BridgeReport { node, groups, k: degrees.per_node[node], c: clustering.per_node[node] }
        })
        .collect();
    out.sort_by(|a, b| b.groups.len().cmp(&a.groups.len()).then(a.node.cmp(&b.node)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapEdge {
    /// Indices into [`GroupOverlap::groups`].
    pub a: usize,
    pub b: usize,
    pub shared_nodes: usize,
}

/// The exposome reduced to its exposure groups: one vertex per group, linked
/// when two groups share member nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupOverlap {
    pub groups: Vec<Code>,
    pub edges: Vec<OverlapEdge>,
}

impl GroupOverlap {
    /// Connected components as sorted lists of group indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.groups.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().push(i);
        }
        comps.into_values().collect()
    }
}

pub fn group_overlap(groups: &[ExposureGroup]) -> GroupOverlap {
    let mut edges = Vec::new();
    for (i, a) in groups.iter().enumerate() {
        for (j, b) in groups.iter().enumerate().skip(i + 1) {
            let shared = a.members.iter().filter(|m| b.contains(**m)).count();
            if shared > 0 {
                edges.push(OverlapEdge { a: i, b: j, shared_nodes: shared });
            }
        }
    }
    GroupOverlap {
        groups: groups.iter().map(|g| g.exposure.clone()).collect(),
        edges,
    }
}
