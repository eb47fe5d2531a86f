//! Density, degree distribution and local clustering coefficients.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::Exposome;

/// `2L / V(V-1)`, zero for graphs with fewer than two nodes.
pub fn density(g: &Exposome) -> f64 {
    density_of(g.node_count(), g.edge_count())
}

pub fn density_of(nodes: usize, edges: usize) -> f64 {
    if nodes < 2 {
        return 0.0;
    }
    let v = nodes as f64;
    2.0 * edges as f64 / (v * (v - 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    /// Degree of each node, by graph position.
    pub per_node: Vec<usize>,
    /// Number of nodes per degree.
    pub histogram: BTreeMap<usize, usize>,
}

impl DegreeProfile {
    pub fn max(&self) -> usize {
        self.per_node.iter().copied().max().unwrap_or(0)
    }

    /// Node positions sorted by decreasing degree, ties by position.
    pub fn ranked(&self) -> Vec<usize> {
        let mut ix: Vec<usize> = (0..self.per_node.len()).collect();
        ix.sort_by(|&a, &b| self.per_node[b].cmp(&self.per_node[a]).then(a.cmp(&b)));
        ix
    }
}

pub fn degrees(g: &Exposome) -> DegreeProfile {
    let per_node: Vec<usize> = (0..g.node_count()).map(|i| g.degree(i)).collect();
    let mut histogram = BTreeMap::new();
    for &k in &per_node {
        *histogram.entry(k).or_insert(0) += 1;
    }
    DegreeProfile { per_node, histogram }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringProfile {
    /// Coefficient of each node, by graph position.
    pub per_node: Vec<f64>,
}

/// Local clustering coefficient of every node. Nodes of degree 0 or 1
/// get 0.
pub fn clustering(g: &Exposome) -> ClusteringProfile {
    let v = g.node_count();
    let mut mark = vec![false; v];
    let mut per_node = Vec::with_capacity(v);
    for i in 0..v {
        let nbrs = g.neighbors(i);
        let k = nbrs.len();
        if k < 2 {
            per_node.push(0.0);
            continue;
        }
        for &u in nbrs {
            mark[u as usize] = true;
        }
        let mut links = 0usize;
        for &u in nbrs {
            // count each neighbor pair once, from its smaller end
            links += g.neighbors(u as usize).iter().filter(|&&w| w > u && mark[w as usize]).count();
        }
        for &u in nbrs {
            mark[u as usize] = false;
        }
        per_node.push(2.0 * links as f64 / (k * (k - 1)) as f64);
    }
    ClusteringProfile { per_node }
}

/// Counts used when summarising a clustering profile in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringSummary {
    pub nodes: usize,
    pub zero: usize,
    pub one: usize,
    pub min_over_degree_2: Option<f64>,
    pub max_over_degree_2: Option<f64>,
}

pub fn clustering_summary(degrees: &DegreeProfile, clustering: &ClusteringProfile) -> ClusteringSummary {
    let eligible: Vec<f64> = clustering
        .per_node
        .iter()
        .zip(&degrees.per_node)
        .filter(|(_, &k)| k >= 2)
        .map(|(&c, _)| c)
        .collect();
    ClusteringSummary {
        nodes: clustering.per_node.len(),
        zero: clustering.per_node.iter().filter(|&&c| c == 0.0).count(),
        one: clustering.per_node.iter().filter(|&&c| c == 1.0).count(),
        min_over_degree_2: eligible.iter().copied().reduce(f64::min),
        max_over_degree_2: eligible.iter().copied().reduce(f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::graph_from_corteges;

    #[test]
    fn density_values() {
        assert!((density_of(195, 3715) - 0.196_405).abs() < 1e-6);
        assert_eq!(format!("{:.2}", density_of(195, 3715)), "0.20");
        assert_eq!(density_of(4, 6), 1.0);
        assert_eq!(density_of(1, 0), 0.0);
        assert_eq!(density_of(0, 0), 0.0);
    }

    #[test]
    fn complete_graph() {
        let g = graph_from_corteges(&[&["A"] as &[&str]; 6]);
        assert_eq!(density(&g), 1.0);
        let k = degrees(&g);
        assert!(k.per_node.iter().all(|&d| d == 5));
        assert_eq!(k.histogram, BTreeMap::from([(5, 6)]));
        assert!(clustering(&g).per_node.iter().all(|&c| c == 1.0));
    }

    #[test]
    fn star() {
        let g = graph_from_corteges(&[&["A", "B", "C", "D", "E"], &["A"], &["B"], &["C"], &["D"], &["E"]]);
        let k = degrees(&g);
        assert_eq!(k.per_node, vec![5, 1, 1, 1, 1, 1]);
        assert_eq!(k.ranked()[0], 0);
        let c = clustering(&g);
        assert!(c.per_node.iter().all(|&c| c == 0.0));
        let s = clustering_summary(&k, &c);
        assert_eq!((s.zero, s.one), (6, 0));
        assert_eq!(s.max_over_degree_2, Some(0.0));
    }

    #[test]
    fn triangle_with_tail() {
        // 0-1-2 triangle via A, plus 3 hanging off 2 via B
        let g = graph_from_corteges(&[&["A"], &["A"], &["A", "B"], &["B"]]);
        let c = clustering(&g);
        assert_eq!(c.per_node[0], 1.0);
        assert_eq!(c.per_node[1], 1.0);
        assert!((c.per_node[2] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.per_node[3], 0.0);
        let total: usize = degrees(&g).histogram.iter().map(|(k, n)| k * n).sum();
        assert_eq!(total, 2 * g.edge_count());
    }
}
