//! Rooted, leaf-labelled phylogenetic trees with branch lengths, and their
//! dissimilarity maps.

mod newick;
mod ultrametric;

pub use newick::{parse_newick, serialize_newick};
pub use ultrametric::{
    default_leaf_names, index_pair, leaves_for_len, num_pairs, pair_index, three_point_check,
    ultrametric_to_tree, DissimilarityMap,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: Option<String>,
    /// Length of the edge to the parent (for the root: an optional stem).
    pub length: f64,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// Arena-backed rooted tree. Node 0 is not necessarily the root.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    root: usize,
}

impl PhyloTree {
    /// A tree holding only its root.
    pub fn with_root(name: Option<String>, length: f64) -> Self {
        PhyloTree {
            nodes: vec![Node {
                name,
                length,
                children: Vec::new(),
                parent: None,
            }],
            root: 0,
        }
    }

    /// Appends a child under `parent` and returns its index.
    pub fn add_child(&mut self, parent: usize, name: Option<String>, length: f64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            name,
            length,
            children: Vec::new(),
            parent: Some(parent),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Leaf node ids in depth-first order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if self.is_leaf(v) {
                out.push(v);
            } else {
                stack.extend(self.nodes[v].children.iter().rev());
            }
        }
        out
    }

    /// Leaf labels sorted lexicographically (the coordinate order of
    /// dissimilarity vectors).
    pub fn leaf_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .leaves()
            .into_iter()
            .map(|v| self.nodes[v].name.clone().unwrap_or_default())
            .collect();
        names.sort();
        names
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves().len()
    }

    /// Checks labels and branch lengths.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for v in self.leaves() {
            let name = self.nodes[v].name.as_deref().unwrap_or("");
            if name.is_empty() {
                return Err(Error::InvalidParameter("leaf without a label".into()));
            }
            if !seen.insert(name) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate leaf label '{name}'"
                )));
            }
        }
        for n in &self.nodes {
            if !(n.length >= 0.0 && n.length.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "branch length {} is negative or non-finite",
                    n.length
                )));
            }
        }
        Ok(())
    }

    /// Distance from the root to every node, excluding the root's own stem.
    pub fn depths(&self) -> Vec<f64> {
        let mut depth = vec![0.0; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for &c in &self.nodes[v].children {
                depth[c] = depth[v] + self.nodes[c].length;
                stack.push(c);
            }
        }
        depth
    }

    fn ancestors(&self, mut v: usize) -> Vec<usize> {
        let mut out = vec![v];
        while let Some(p) = self.nodes[v].parent {
            out.push(p);
            v = p;
        }
        out
    }

    /// Smallest leaf label below each node.
    fn min_labels(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.nodes.len()];
        for v in self.postorder() {
            out[v] = if self.is_leaf(v) {
                self.nodes[v].name.clone().unwrap_or_default()
            } else {
                self.nodes[v]
                    .children
                    .iter()
                    .map(|&c| out[c].clone())
                    .min()
                    .unwrap_or_default()
            };
        }
        out
    }

    pub(crate) fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                order.push(v);
            } else {
                stack.push((v, true));
                for &c in self.nodes[v].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Children of `v` ordered by their smallest leaf label.
    pub(crate) fn sorted_children(&self, v: usize, min_labels: &[String]) -> Vec<usize> {
        let mut ch = self.nodes[v].children.clone();
        ch.sort_by(|a, b| min_labels[*a].cmp(&min_labels[*b]));
        ch
    }
}

/// Path-length dissimilarity map over the sorted leaf labels.
pub fn cophenetic(t: &PhyloTree) -> Result<DissimilarityMap> {
    let leaves = t.leaves();
    if leaves.len() < 2 {
        return Err(Error::InvalidParameter(
            "cophenetic map needs at least 2 leaves".into(),
        ));
    }
    let mut named: Vec<(String, usize)> = leaves
        .iter()
        .map(|&v| (t.node(v).name.clone().unwrap_or_default(), v))
        .collect();
    named.sort();
    let depth = t.depths();
    let paths: Vec<Vec<usize>> = named.iter().map(|(_, v)| t.ancestors(*v)).collect();
    let n = named.len();
    let mut values = Vec::with_capacity(num_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            let lca = paths[i]
                .iter()
                .find(|a| paths[j].contains(a))
                .copied()
                .expect("leaves share the root");
            values.push(depth[named[i].1] + depth[named[j].1] - 2.0 * depth[lca]);
        }
    }
    DissimilarityMap::new(named.into_iter().map(|(s, _)| s).collect(), values)
}

/// Whether all root-to-leaf path lengths agree within `tol`, and the height.
pub fn is_equidistant(t: &PhyloTree, tol: f64) -> (bool, f64) {
    let depth = t.depths();
    let leaf_depths: Vec<f64> = t.leaves().into_iter().map(|v| depth[v]).collect();
    let hi = leaf_depths
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = leaf_depths.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo <= tol, hi)
}

/// Canonical nesting string of leaf-label sets. Ignores branch lengths and
/// child order; unary nodes are transparent.
pub fn topology_id(t: &PhyloTree) -> String {
    let min_labels = t.min_labels();
    let mut ids = vec![String::new(); t.nodes.len()];
    for v in t.postorder() {
        ids[v] = if t.is_leaf(v) {
            t.node(v).name.clone().unwrap_or_default()
        } else {
            let ch = t.sorted_children(v, &min_labels);
            if ch.len() == 1 {
                std::mem::take(&mut ids[ch[0]])
            } else {
                let parts: Vec<String> = ch.iter().map(|&c| std::mem::take(&mut ids[c])).collect();
                format!("({})", parts.join(","))
            }
        };
    }
    std::mem::take(&mut ids[t.root])
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG3_LEFT: &str = "(((a:0.6,b:0.6):0.3,c:0.9):0.1,d:1);";
    pub(crate) const FIG3_RIGHT: &str = "((a:0.1,b:0.1):0.9,(c:0.5,d:0.5):0.5);";

    fn assert_vec(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn cophenetic_of_equidistant_examples() {
        let left = parse_newick(FIG3_LEFT).unwrap();
        assert_vec(
            cophenetic(&left).unwrap().values(),
            &[1.2, 1.8, 2.0, 1.8, 2.0, 2.0],
        );
        let right = parse_newick(FIG3_RIGHT).unwrap();
        assert_vec(
            cophenetic(&right).unwrap().values(),
            &[0.2, 2.0, 2.0, 2.0, 2.0, 1.0],
        );
        let cherry = parse_newick("(a:1,b:1);").unwrap();
        assert_vec(cophenetic(&cherry).unwrap().values(), &[2.0]);
    }

    #[test]
    fn balanced_parse_example() {
        let t = parse_newick("((a:0.6,b:0.6):0.4,(c:0.9,d:0.9):0.1);").unwrap();
        let (eq, h) = is_equidistant(&t, 1e-12);
        assert!(eq);
        assert!((h - 1.0).abs() < 1e-12);
        assert_vec(
            cophenetic(&t).unwrap().values(),
            &[1.2, 2.0, 2.0, 2.0, 2.0, 1.8],
        );
    }

    #[test]
    fn equidistance() {
        for s in [FIG3_LEFT, FIG3_RIGHT] {
            let (eq, h) = is_equidistant(&parse_newick(s).unwrap(), 1e-9);
            assert!(eq);
            assert!((h - 1.0).abs() < 1e-12);
        }
        assert!(!is_equidistant(&parse_newick("(a:1,b:2);").unwrap(), 1e-9).0);
        let single = parse_newick("(a:1.5);").unwrap();
        assert_eq!(is_equidistant(&single, 1e-9), (true, 1.5));
    }

    #[test]
    fn topology_ignores_lengths_and_order() {
        let a = parse_newick("((a:1,b:1):1,c:2);").unwrap();
        let b = parse_newick("(c:5,(b:0.5,a:0.5):4.5);").unwrap();
        let c = parse_newick("((a:1,c:1):1,b:2);").unwrap();
        assert_eq!(topology_id(&a), topology_id(&b));
        assert_ne!(topology_id(&a), topology_id(&c));
        assert_eq!(topology_id(&a), "((a,b),c)");
    }

    #[test]
    fn figure_trees_have_different_topologies() {
        let l = parse_newick(FIG3_LEFT).unwrap();
        let r = parse_newick(FIG3_RIGHT).unwrap();
        assert_ne!(topology_id(&l), topology_id(&r));
        let l2 = parse_newick("(((a:0.3,b:0.3):0.4,c:0.7):0.3,d:1);").unwrap();
        assert_eq!(topology_id(&l), topology_id(&l2));
    }

    #[test]
    fn validation() {
        let mut t = PhyloTree::with_root(None, 0.0);
        t.add_child(0, Some("a".into()), 1.0);
        t.add_child(0, Some("a".into()), 1.0);
        assert!(t.validate().is_err());
    }
}
