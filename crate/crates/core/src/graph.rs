//! The exposome graph: weighted nodes linked when they share exposures.
//!
//! Two nodes `i` and `j` are linked when both carry at least `eta`
//! observations and their exposure sets share at least `d` codes. Nodes
//! below `eta` are dropped from the graph altogether, so `W` and `V` only
//! count survivors.
//!
//! Construction goes through an inverted index from exposure to the nodes
//! carrying it. For every node we scan the posting lists of its exposures and
//! count hits per later node, so the work is proportional to the sum of
//! squared posting-list lengths rather than to `V²`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::codes::Code;
use crate::error::{Error, Result};
use crate::ingest::{Node, MAX_EXPOSURES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ExposomeParams {
    /// Minimum number of shared exposures for a link.
    pub d: usize,
    /// Minimum node weight.
    pub eta: u64,
}

impl Default for ExposomeParams {
    fn default() -> Self {
        ExposomeParams { d: 1, eta: 1 }
    }
}

impl ExposomeParams {
    pub fn new(d: usize, eta: u64) -> Result<Self> {
        let p = ExposomeParams { d, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_EXPOSURES {
            return Err(Error::InvalidParams(format!("D must be in 1..={MAX_EXPOSURES}, got {}", self.d)));
        }
        if self.eta == 0 {
            return Err(Error::InvalidParams("eta must be at least 1".into()));
        }
        Ok(())
    }

    /// True if every node and link admitted under `self` is also admitted
    /// under `looser`.
    pub fn is_tighter_than(&self, looser: &ExposomeParams) -> bool {
        self.d >= looser.d && self.eta >= looser.eta
    }
}

/// Number of exposures shared by two nodes, or zero when either node falls
/// below the weight threshold. Inputs must be sorted and duplicate-free.
pub fn connection_strength<T: Ord>(a: &[T], b: &[T], weight_a: u64, weight_b: u64, eta: u64) -> usize {
    if weight_a < eta || weight_b < eta {
        return 0;
    }
    intersection_len(a, b)
}

fn intersection_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn intersection<T: Ord + Copy>(a: &[T], b: &[T]) -> SmallVec<[T; 2]> {
    let mut out = SmallVec::new();
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

/// An undirected link between two graph nodes, identified by their position
/// in [`Exposome::nodes`], with `source < target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    source: u32,
    target: u32,
    strength: u8,
}

impl Edge {
    pub fn source(&self) -> usize {
        self.source as usize
    }

    pub fn target(&self) -> usize {
        self.target as usize
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.source as usize, self.target as usize)
    }

    /// Number of shared exposures.
    pub fn strength(&self) -> usize {
        self.strength as usize
    }
}

/// The `{W, V, L, D, eta}` graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Exposome {
    params: ExposomeParams,
    nodes: Vec<Node>,
    exposures: Vec<Code>,
    corteges: Vec<Vec<u32>>,
    edge_count: usize,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
}

struct Dictionary {
    exposures: Vec<Code>,
    corteges: Vec<Vec<u32>>,
}

fn dictionary(nodes: &[Node]) -> Dictionary {
    let mut exposures: Vec<Code> = nodes.iter().flat_map(|n| n.exposures().iter().cloned()).collect();
    exposures.sort_unstable();
    exposures.dedup();
    let index: HashMap<&Code, u32> = exposures.iter().enumerate().map(|(i, c)| (c, i as u32)).collect();
    let corteges = nodes
        .iter()
        .map(|n| {
            let mut ids: Vec<u32> = n.exposures().iter().map(|c| index[c]).collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();
    Dictionary { exposures, corteges }
}

struct Scratch {
    hits: Vec<u8>,
    touched: Vec<u32>,
}

impl Exposome {
    /// Builds the graph from deduplicated nodes. Nodes below `params.eta`
    /// are left out.
    pub fn build(nodes: &[Node], params: ExposomeParams) -> Result<Exposome> {
        params.validate()?;
        let survivors: Vec<Node> = nodes.iter().filter(|n| n.weight >= params.eta).cloned().collect();
        Exposome::index(survivors, params)
    }

    /// Like [`Exposome::build`], taking ownership of the nodes instead of
    /// cloning the survivors.
    pub fn from_nodes(mut nodes: Vec<Node>, params: ExposomeParams) -> Result<Exposome> {
        params.validate()?;
        nodes.retain(|n| n.weight >= params.eta);
        nodes.shrink_to_fit();
        Exposome::index(nodes, params)
    }

    fn index(survivors: Vec<Node>, params: ExposomeParams) -> Result<Exposome> {
        let Dictionary { exposures, corteges } = dictionary(&survivors);

        let mut postings: Vec<Vec<u32>> = vec![Vec::new(); exposures.len()];
        for (i, cortege) in corteges.iter().enumerate() {
            for &e in cortege {
                postings[e as usize].push(i as u32);
            }
        }

        let v = survivors.len();
        let d = params.d;
        // neighbors above each node, ascending
        let upper: Vec<Vec<u32>> = (0..v)
            .into_par_iter()
            .map_init(
                || Scratch { hits: vec![0; v], touched: Vec::new() },
                |scratch, i| {
                    for &e in &corteges[i] {
                        let list = &postings[e as usize];
                        let start = list.partition_point(|&j| j <= i as u32);
                        for &j in &list[start..] {
                            let h = &mut scratch.hits[j as usize];
                            if *h == 0 {
                                scratch.touched.push(j);
                            }
                            *h += 1;
                        }
                    }
                    let mut out = Vec::new();
                    for &j in &scratch.touched {
                        if std::mem::take(&mut scratch.hits[j as usize]) as usize >= d {
                            out.push(j);
                        }
                    }
                    scratch.touched.clear();
                    out.sort_unstable();
                    out.shrink_to_fit();
                    out
                },
            )
            .collect();
        drop(postings);

        Ok(Exposome::assemble(params, survivors, exposures, corteges, upper))
    }

    fn assemble(
        params: ExposomeParams,
        nodes: Vec<Node>,
        exposures: Vec<Code>,
        corteges: Vec<Vec<u32>>,
        upper: Vec<Vec<u32>>,
    ) -> Exposome {
        let v = nodes.len();
        let mut degree = vec![0usize; v];
        let mut edge_count = 0;
        for (i, targets) in upper.iter().enumerate() {
            degree[i] += targets.len();
            for &t in targets {
                degree[t as usize] += 1;
            }
            edge_count += targets.len();
        }
        let mut offsets = Vec::with_capacity(v + 1);
        offsets.push(0);
        for k in &degree {
            offsets.push(offsets.last().unwrap() + k);
        }
        drop(degree);
        let mut fill = offsets[..v].to_vec();
        let mut adjacency = vec![0u32; offsets[v]];
        // sources arrive in ascending order, so every row comes out sorted:
        // lower neighbors first, then the node's own ascending upper list
        for (i, targets) in upper.into_iter().enumerate() {
            for t in targets {
                adjacency[fill[i]] = t;
                fill[i] += 1;
                adjacency[fill[t as usize]] = i as u32;
                fill[t as usize] += 1;
            }
        }
        Exposome { params, nodes, exposures, corteges, edge_count, offsets, adjacency }
    }

    /// Re-derives the graph under tighter parameters without rescanning the
    /// index: the result equals [`Exposome::build`] on the original nodes.
    pub fn rebuild(&self, params: ExposomeParams) -> Result<Exposome> {
        params.validate()?;
        if !params.is_tighter_than(&self.params) {
            return Err(Error::ParamLoosened {
                built_d: self.params.d,
                built_eta: self.params.eta,
                d: params.d,
                eta: params.eta,
            });
        }
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.weight >= params.eta {
                remap[i] = nodes.len() as u32;
                nodes.push(n.clone());
            }
        }
        let Dictionary { exposures, corteges } = dictionary(&nodes);
        let mut upper = vec![Vec::new(); nodes.len()];
        for e in self.edges() {
            let (s, t) = (remap[e.source as usize], remap[e.target as usize]);
            if e.strength() >= params.d && s != u32::MAX && t != u32::MAX {
                upper[s as usize].push(t);
            }
        }
        Ok(Exposome::assemble(params, nodes, exposures, corteges, upper))
    }

    /// Reassembles a graph from explicit links, checking every invariant.
    /// Each link is `(source, target, shared exposures)` over positions in
    /// `nodes`.
    pub fn from_parts(params: ExposomeParams, nodes: Vec<Node>, links: Vec<(usize, usize, Vec<Code>)>) -> Result<Exposome> {
        params.validate()?;
        let invalid = |msg: String| Err(Error::InvalidGraph(msg));
        if let Some(n) = nodes.iter().find(|n| n.weight < params.eta) {
            return invalid(format!("node {} has weight {} below eta {}", n.id, n.weight, params.eta));
        }
        let Dictionary { exposures, corteges } = dictionary(&nodes);
        let mut upper = vec![Vec::new(); nodes.len()];
        for (a, b, shared) in links {
            let (s, t) = (a.min(b), a.max(b));
            if s == t || t >= nodes.len() {
                return invalid(format!("bad endpoints ({a}, {b})"));
            }
            let expected = intersection(&corteges[s], &corteges[t]);
            let mut given: Vec<&Code> = shared.iter().collect();
            given.sort_unstable();
            given.dedup();
            let matches = given.len() == expected.len()
                && given.iter().zip(&expected).all(|(c, &id)| **c == exposures[id as usize]);
            if !matches {
                return invalid(format!("edge ({s}, {t}) shared exposures do not match the node corteges"));
            }
            if expected.len() < params.d {
                return invalid(format!("edge ({s}, {t}) strength {} below D {}", expected.len(), params.d));
            }
            upper[s].push(t as u32);
        }
        for targets in &mut upper {
            targets.sort_unstable();
            if targets.windows(2).any(|w| w[0] == w[1]) {
                return invalid("duplicate edge".into());
            }
        }
        Ok(Exposome::assemble(params, nodes, exposures, corteges, upper))
    }

    pub fn params(&self) -> ExposomeParams {
        self.params
    }

    /// Total number of observations, `W`.
    pub fn total_weight(&self) -> u64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// `V`
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `L`
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, ix: usize) -> &Node {
        &self.nodes[ix]
    }

    /// Edges ordered by `(source, target)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.nodes.len()).flat_map(move |i| {
            let row = self.neighbors(i);
            let start = row.partition_point(|&j| j <= i as u32);
            row[start..].iter().map(move |&j| self.edge_unchecked(i, j as usize))
        })
    }

    fn edge_unchecked(&self, s: usize, t: usize) -> Edge {
        Edge {
            source: s as u32,
            target: t as u32,
            strength: intersection_len(&self.corteges[s], &self.corteges[t]) as u8,
        }
    }

    /// Sorted neighbors of node `ix`.
    pub fn neighbors(&self, ix: usize) -> &[u32] {
        &self.adjacency[self.offsets[ix]..self.offsets[ix + 1]]
    }

    pub fn degree(&self, ix: usize) -> usize {
        self.offsets[ix + 1] - self.offsets[ix]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// All exposure codes carried by the graph's nodes, sorted.
    pub fn exposures(&self) -> &[Code] {
        &self.exposures
    }

    pub fn exposure(&self, id: u32) -> &Code {
        &self.exposures[id as usize]
    }

    /// Exposure ids of node `ix`, ascending.
    pub fn cortege(&self, ix: usize) -> &[u32] {
        &self.corteges[ix]
    }

    /// Exposure ids shared by the edge's endpoints, ascending.
    pub fn shared_ids(&self, edge: Edge) -> SmallVec<[u32; 2]> {
        intersection(&self.corteges[edge.source()], &self.corteges[edge.target()])
    }

    pub fn shared_codes(&self, edge: Edge) -> impl Iterator<Item = &Code> + '_ {
        self.shared_ids(edge).into_iter().map(move |s| &self.exposures[s as usize])
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<Edge> {
        if a == b || !self.is_adjacent(a, b) {
            return None;
        }
        Some(self.edge_unchecked(a.min(b), a.max(b)))
    }

    /// Position of the node with dedupe id `id`.
    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, |n| n.id).ok().or_else(|| self.nodes.iter().position(|n| n.id == id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{parse_code, Axis};
    use crate::ingest::{Multiset, NodeKey};

    fn node(id: usize, exposures: &[&str], weight: u64) -> Node {
        let mut ex: Vec<Code> = exposures.iter().map(|e| parse_code(Axis::Exposure, e, '.').unwrap()).collect();
        ex.sort();
        let occ = parse_code(Axis::Occupation, "O", '.').unwrap();
        let sec = parse_code(Axis::Sector, "S", '.').unwrap();
        let mut occupations = Multiset::new();
        occupations.insert_n(occ, weight);
        let mut sectors = Multiset::new();
        sectors.insert_n(sec, weight);
        let mut years = Multiset::new();
        years.insert_n(2004, weight);
        Node {
            id,
            key: NodeKey {
                disease: parse_code(Axis::Disease, "C82", '.').unwrap(),
                exposures: ex,
                strict_extra: None,
            },
            weight,
            years,
            occupations,
            sectors,
        }
    }

    #[test]
    fn strength_examples() {
        assert_eq!(connection_strength(&["X"], &["X"], 1, 1, 1), 1);
        assert_eq!(connection_strength(&["X", "Y"], &["Z"], 9, 9, 1), 0);
        assert_eq!(connection_strength(&["A", "B", "C"], &["B", "C", "D"], 5, 9, 10), 0);
        assert_eq!(connection_strength(&["A", "B", "C"], &["B", "C", "D"], 12, 10, 10), 2);
    }

    #[test]
    fn empty_build() {
        let g = Exposome::build(&[], ExposomeParams::default()).unwrap();
        assert_eq!((g.total_weight(), g.node_count(), g.edge_count()), (0, 0, 0));
    }

    #[test]
    fn simple_build() {
        let nodes = vec![node(0, &["A"], 1), node(1, &["A"], 1), node(2, &["B"], 1)];
        let g = Exposome::build(&nodes, ExposomeParams::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges().next().unwrap().endpoints(), (0, 1));
        assert!(g.is_adjacent(1, 0));
        assert!(!g.is_adjacent(0, 2));
        let shared: Vec<_> = g.shared_codes(g.edges().next().unwrap()).map(|c| c.raw()).collect();
        assert_eq!(shared, ["A"]);
    }

    #[test]
    fn eta_filter_removes_nodes() {
        let nodes = vec![node(0, &["A", "B"], 12), node(1, &["A", "B", "C"], 3), node(2, &["B", "C"], 10)];
        let g = Exposome::build(&nodes, ExposomeParams::new(1, 10).unwrap()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.total_weight(), 22);
        assert_eq!(g.nodes().iter().map(|n| n.id).collect::<Vec<_>>(), [0, 2]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.position_of(2), Some(1));
        assert_eq!(g.position_of(1), None);
    }

    #[test]
    fn rebuild_matches_build_and_refuses_loosening() {
        let nodes = vec![
            node(0, &["A", "B"], 1),
            node(1, &["A", "B", "C"], 2),
            node(2, &["B", "C"], 2),
            node(3, &["C"], 1),
        ];
        let base = Exposome::build(&nodes, ExposomeParams::default()).unwrap();
        assert_eq!(base.rebuild(ExposomeParams::default()).unwrap(), base);
        for (d, eta) in [(2, 1), (1, 2), (2, 2), (3, 1)] {
            let p = ExposomeParams::new(d, eta).unwrap();
            assert_eq!(base.rebuild(p).unwrap(), Exposome::build(&nodes, p).unwrap());
        }
        let d2 = base.rebuild(ExposomeParams::new(2, 1).unwrap()).unwrap();
        assert!(d2.edges().all(|e| e.strength() >= 2));
        assert!(matches!(d2.rebuild(ExposomeParams::default()), Err(Error::ParamLoosened { .. })));
        assert!(matches!(
            d2.rebuild(ExposomeParams { d: 3, eta: 0 }),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(ExposomeParams::new(0, 1).is_err());
        assert!(ExposomeParams::new(6, 1).is_err());
        assert!(ExposomeParams::new(1, 0).is_err());
        assert!(ExposomeParams::new(5, 100).is_ok());
    }

    #[test]
    fn from_parts_checks_invariants() {
        let nodes = vec![node(0, &["A", "B"], 1), node(1, &["A"], 1), node(2, &["B"], 1)];
        let a = parse_code(Axis::Exposure, "A", '.').unwrap();
        let b = parse_code(Axis::Exposure, "B", '.').unwrap();
        let p = ExposomeParams::default();
        let built = Exposome::build(&nodes, p).unwrap();
        let parts = Exposome::from_parts(p, nodes.clone(), vec![(2, 0, vec![b.clone()]), (0, 1, vec![a.clone()])]).unwrap();
        assert_eq!(parts, built);
        assert!(Exposome::from_parts(p, nodes.clone(), vec![(0, 1, vec![b.clone()])]).is_err());
        assert!(Exposome::from_parts(p, nodes.clone(), vec![(1, 1, vec![a.clone()])]).is_err());
        assert!(Exposome::from_parts(p, nodes.clone(), vec![(0, 1, vec![a.clone()]), (1, 0, vec![a])]).is_err());
    }
}
