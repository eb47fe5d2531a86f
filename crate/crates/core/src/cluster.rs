//! Average-linkage (UPGMA) clustering of exposure groups.

use std::fmt::Write as _;

use serde::Serialize;

use crate::groups::ExposureGroup;

/// Jaccard distance between the member sets of two groups.
pub fn group_distance(a: &ExposureGroup, b: &ExposureGroup) -> f64 {
    let shared = a.members.iter().filter(|m| b.contains(**m)).count();
    let union = a.members.len() + b.members.len() - shared;
    if union == 0 {
        return 0.0;
    }
    1.0 - shared as f64 / union as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Linkage {
    #[default]
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leaf {
    pub label: String,
    pub ohp_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    Leaf(usize),
    Merge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub left: Cluster,
    pub right: Cluster,
    pub height: f64,
    /// Number of leaves under this merge.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    /// Sorted by label.
    pub leaves: Vec<Leaf>,
    /// In agglomeration order; heights are non-decreasing.
    pub merges: Vec<Merge>,
}

struct Active {
    id: Cluster,
    // smallest leaf index, used for tie-breaking and left/right order
    first: usize,
    leaves: Vec<usize>,
}

pub fn dendrogram(groups: &[ExposureGroup], linkage: Linkage) -> Dendrogram {
    dendrogram_with(groups, linkage, group_distance)
}

/// UPGMA under an arbitrary dissimilarity. Among equally close pairs, the
/// pair whose smallest labels sort first is merged first.
pub fn dendrogram_with<F>(groups: &[ExposureGroup], linkage: Linkage, distance: F) -> Dendrogram
where
    F: Fn(&ExposureGroup, &ExposureGroup) -> f64,
{
    let Linkage::Average = linkage;
    let mut sorted: Vec<&ExposureGroup> = groups.iter().collect();
    sorted.sort_by(|a, b| a.exposure.raw().cmp(b.exposure.raw()).then_with(|| a.members.cmp(&b.members)));
    let n = sorted.len();
    let leaves = sorted
        .iter()
        .map(|g| Leaf { label: g.exposure.raw().to_string(), ohp_count: g.ohp_count })
        .collect();

    // pairwise leaf distance sums between active clusters
    let mut sums = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = distance(sorted[i], sorted[j]);
            sums[i][j] = d;
            sums[j][i] = d;
        }
    }
    // `slot` indexes rows of `sums`; a merged cluster reuses the slot of its left child
    let mut active: Vec<(usize, Active)> = (0..n)
        .map(|i| (i, Active { id: Cluster::Leaf(i), first: i, leaves: vec![i] }))
        .collect();
    let mut merges: Vec<Merge> = Vec::with_capacity(n.saturating_sub(1));
    let mut last_height = 0.0f64;

    while active.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                let (sx, ax) = &active[x];
                let (sy, ay) = &active[y];
                let d = sums[*sx][*sy] / (ax.leaves.len() * ay.leaves.len()) as f64;
                let key = (ax.first.min(ay.first), ax.first.max(ay.first));
                let better = match best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < bd || (d == bd && key < bkey),
                };
                if better {
                    best = Some((d, key, x, y));
                }
            }
        }
        let (d, _, x, y) = best.expect("at least two active clusters");
        let (sy, ay) = active.remove(y);
        let (sx, ax) = active.remove(x);
        let (left, right) = if ax.first < ay.first { (ax, ay) } else { (ay, ax) };
        // rounding can put a Lance-Williams average a hair under its inputs
        let height = d.max(last_height);
        last_height = height;
        for (sk, _) in &active {
            let s = sums[sx][*sk] + sums[sy][*sk];
            sums[sx][*sk] = s;
            sums[*sk][sx] = s;
        }
        let mut merged_leaves = left.leaves;
        merged_leaves.extend(right.leaves);
        merged_leaves.sort_unstable();
        merges.push(Merge {
            left: left.id,
            right: right.id,
            height,
            size: merged_leaves.len(),
        });
        let merged = Active {
            id: Cluster::Merge(merges.len() - 1),
            first: merged_leaves[0],
            leaves: merged_leaves,
        };
        active.push((sx, merged));
    }

    Dendrogram { leaves, merges }
}

impl Dendrogram {
    pub fn root(&self) -> Option<Cluster> {
        match (self.leaves.len(), self.merges.len()) {
            (0, _) => None,
            (_, 0) => Some(Cluster::Leaf(0)),
            (_, m) => Some(Cluster::Merge(m - 1)),
        }
    }

    pub fn height(&self, c: Cluster) -> f64 {
        match c {
            Cluster::Leaf(_) => 0.0,
            Cluster::Merge(i) => self.merges[i].height,
        }
    }

    /// Leaf indices under `c`, ascending.
    pub fn leaves_under(&self, c: Cluster) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![c];
        while let Some(c) = stack.pop() {
            match c {
                Cluster::Leaf(i) => out.push(i),
                Cluster::Merge(i) => {
                    stack.push(self.merges[i].left);
                    stack.push(self.merges[i].right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Flat clusters obtained by applying only the merges strictly below
    /// `threshold`; each cluster is a sorted list of leaf indices.
    pub fn cut_below(&self, threshold: f64) -> Vec<Vec<usize>> {
        let mut is_top = vec![true; self.merges.len()];
        let mut leaf_covered = vec![false; self.leaves.len()];
        let mut out = Vec::new();
        for m in &self.merges {
            if m.height >= threshold {
                continue;
            }
            for child in [m.left, m.right] {
                match child {
                    Cluster::Merge(j) => is_top[j] = false,
                    Cluster::Leaf(l) => leaf_covered[l] = true,
                }
            }
        }
        for (i, m) in self.merges.iter().enumerate() {
            if m.height < threshold && is_top[i] {
                let leaves = self.leaves_under(Cluster::Merge(i));
                for &l in &leaves {
                    leaf_covered[l] = true;
                }
                out.push(leaves);
            }
        }
        for (l, covered) in leaf_covered.iter().enumerate() {
            if !covered {
                out.push(vec![l]);
            }
        }
        out.sort();
        out
    }

    /// Newick text with branch lengths equal to height differences.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        if let Some(root) = self.root() {
            self.write_newick(&mut out, root, None);
        }
        out.push(';');
        out
    }

    fn write_newick(&self, out: &mut String, c: Cluster, parent_height: Option<f64>) {
        match c {
            Cluster::Leaf(i) => out.push_str(&newick_label(&self.leaves[i].label)),
            Cluster::Merge(i) => {
                let m = &self.merges[i];
                out.push('(');
                self.write_newick(out, m.left, Some(m.height));
                out.push(',');
                self.write_newick(out, m.right, Some(m.height));
                out.push(')');
            }
        }
        if let Some(ph) = parent_height {
            let _ = write!(out, ":{}", ph - self.height(c));
        }
    }
}

fn newick_label(label: &str) -> String {
    let plain = !label.is_empty()
        && !label
            .chars()
            .any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{parse_code, Axis};

    fn group(label: &str, members: &[usize]) -> ExposureGroup {
        ExposureGroup {
            exposure: parse_code(Axis::Exposure, label, '.').unwrap(),
            members: members.to_vec(),
            ohp_count: members.len() as u64,
        }
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(group_distance(&group("A", &[1, 2]), &group("B", &[1, 2])), 0.0);
        assert_eq!(group_distance(&group("A", &[1, 2]), &group("B", &[3])), 1.0);
        assert_eq!(group_distance(&group("A", &[1, 2, 3]), &group("B", &[2, 3, 4])), 0.5);
    }

    #[test]
    fn single_group_is_a_leaf() {
        let d = dendrogram(&[group("A", &[1, 2])], Linkage::Average);
        assert!(d.merges.is_empty());
        assert_eq!(d.root(), Some(Cluster::Leaf(0)));
        assert_eq!(d.to_newick(), "A;");
        let empty = dendrogram(&[], Linkage::Average);
        assert_eq!(empty.root(), None);
        assert_eq!(empty.to_newick(), ";");
    }

    #[test]
    fn nearest_pair_first() {
        let groups = [group("C", &[1, 2, 3]), group("A", &[10, 11]), group("B", &[2, 3, 4])];
        let d = dendrogram(&groups, Linkage::Average);
        assert_eq!(d.leaves.iter().map(|l| l.label.as_str()).collect::<Vec<_>>(), ["A", "B", "C"]);
        assert_eq!(d.merges[0].left, Cluster::Leaf(1));
        assert_eq!(d.merges[0].right, Cluster::Leaf(2));
        assert_eq!(d.merges[0].height, 0.5);
        assert_eq!(d.merges[1].height, 1.0);
        assert_eq!(d.to_newick(), "(A:1,(B:0.5,C:0.5):0.5);");
    }

    #[test]
    fn ties_break_by_label() {
        let groups = [group("D", &[4]), group("B", &[2]), group("C", &[3]), group("A", &[1])];
        let d = dendrogram(&groups, Linkage::Average);
        assert_eq!(d.merges[0].left, Cluster::Leaf(0));
        assert_eq!(d.merges[0].right, Cluster::Leaf(1));
        assert_eq!(d.merges[1].left, Cluster::Merge(0));
        assert_eq!(d.merges[1].right, Cluster::Leaf(2));
    }

    #[test]
    fn cut_and_labels() {
        let groups = [group("A", &[1, 2]), group("B", &[2, 3]), group("C", &[7]), group("D E", &[8, 9])];
        let d = dendrogram(&groups, Linkage::Average);
        assert_eq!(d.cut_below(1.0), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(d.cut_below(0.0), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(d.to_newick().contains("'D E'"));
        assert_eq!(d.leaves_under(d.root().unwrap()), vec![0, 1, 2, 3]);
    }
}
