use serde::{Deserialize, Serialize};

use super::PhyloTree;
use crate::error::{Error, Result};
use crate::tropical::TropicalPoint;

/// `C(n, 2)`.
pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the leaf pair `(i, j)`, `i < j < n` (0-based), in the
/// lexicographic order `(0,1), (0,2), …, (n-2,n-1)`.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if !(i < j && j < n) {
        return Err(Error::InvalidParameter(format!(
            "pair ({i}, {j}) out of range for {n} leaves"
        )));
    }
    Ok(i * (2 * n - i - 1) / 2 + (j - i - 1))
}

/// Inverse of [`pair_index`].
pub fn index_pair(index: usize, n: usize) -> Result<(usize, usize)> {
    if index >= num_pairs(n) {
        return Err(Error::InvalidParameter(format!(
            "index {index} out of range for {n} leaves"
        )));
    }
    let mut start = 0;
    for i in 0..n - 1 {
        let row = n - i - 1;
        if index < start + row {
            return Ok((i, i + 1 + index - start));
        }
        start += row;
    }
    unreachable!("index checked against num_pairs")
}

/// Leaf count `n` with `C(n, 2) == len`, if any.
pub fn leaves_for_len(len: usize) -> Option<usize> {
    (2..)
        .take_while(|n| num_pairs(*n) <= len)
        .find(|n| num_pairs(*n) == len)
}

/// Pairwise dissimilarities over labelled leaves, stored as the upper
/// triangle in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMap {
    leaf_names: Vec<String>,
    values: Vec<f64>,
}

impl DissimilarityMap {
    pub fn new(leaf_names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = leaf_names.len();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "a dissimilarity map needs at least 2 leaves".into(),
            ));
        }
        if leaf_names.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "leaf names must be unique and sorted lexicographically".into(),
            ));
        }
        if values.len() != num_pairs(n) {
            return Err(Error::DimensionMismatch {
                expected: num_pairs(n),
                found: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "entry {k} is negative or non-finite ({})",
                values[k]
            )));
        }
        Ok(DissimilarityMap { leaf_names, values })
    }

    /// Leaves named `a, b, c, …` (or `t01, t02, …` past 26).
    pub fn with_default_names(values: Vec<f64>) -> Result<Self> {
        let n = leaves_for_len(values.len()).ok_or_else(|| {
            Error::InvalidParameter(format!("{} is not a binomial C(N,2)", values.len()))
        })?;
        Self::new(default_leaf_names(n), values)
    }

    pub fn n_leaves(&self) -> usize {
        self.leaf_names.len()
    }

    pub fn leaf_names(&self) -> &[String] {
        &self.leaf_names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `w(i, j)` for 0-based leaves; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[pair_index(a, b, self.n_leaves()).expect("leaf in range")]
    }

    pub fn to_point(&self) -> Result<TropicalPoint> {
        TropicalPoint::new(self.values.clone())
    }

    /// Triangle inequality on every triple.
    pub fn is_metric(&self, tol: f64) -> bool {
        let n = self.n_leaves();
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.get(i, j) <= self.get(i, k) + self.get(k, j) + tol))
        })
    }
}

pub fn default_leaf_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    } else {
        let width = n.to_string().len();
        (1..=n).map(|i| format!("t{i:0width$}")).collect()
    }
}

/// For every triple of leaves the largest of the three pairwise values is
/// attained at least twice (within `tol`). Operates on the raw vector, so it
/// is invariant under adding a constant to every entry.
pub fn three_point_check(values: &[f64], tol: f64) -> Result<bool> {
    let n = leaves_for_len(values.len()).ok_or_else(|| {
        Error::InvalidParameter(format!("{} is not a binomial C(N,2)", values.len()))
    })?;
    let at = |i: usize, j: usize| values[i * (2 * n - i - 1) / 2 + (j - i - 1)];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut t = [at(i, j), at(i, k), at(j, k)];
                t.sort_by(f64::total_cmp);
                if t[2] - t[1] > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rebuilds the unique equidistant tree realising an ultrametric.
///
/// Single-linkage agglomeration: the two closest clusters merge under a new
/// node at height `u/2`. Ties go to the pair with the smallest leaf labels.
pub fn ultrametric_to_tree(u: &DissimilarityMap, tol: f64) -> Result<PhyloTree> {
    if !three_point_check(u.values(), tol)? {
        return Err(Error::NotUltrametric("three-point condition fails".into()));
    }
    let n = u.n_leaves();
    // Build bottom-up in a scratch arena, then re-root into a PhyloTree.
    struct Scratch {
        name: Option<String>,
        height: f64,
        children: Vec<usize>,
    }
    let mut arena: Vec<Scratch> = u
        .leaf_names()
        .iter()
        .map(|s| Scratch {
            name: Some(s.clone()),
            height: 0.0,
            children: Vec::new(),
        })
        .collect();
    // Active clusters: (arena node, smallest leaf index).
    let mut active: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| u.get(i, j)).collect())
        .collect();

    while active.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                let d = dist[a][b];
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((a, b, d));
                }
            }
        }
        let (a, b, d) = best.expect("two active clusters");
        let height = (d / 2.0)
            .max(arena[active[a].0].height)
            .max(arena[active[b].0].height);
        let node = arena.len();
        arena.push(Scratch {
            name: None,
            height,
            children: vec![active[a].0, active[b].0],
        });
        let min_leaf = active[a].1.min(active[b].1);

        let merged: Vec<f64> = (0..active.len())
            .map(|k| dist[a][k].min(dist[b][k]))
            .collect();
        // b > a: remove b first
        active.remove(b);
        dist.remove(b);
        for row in dist.iter_mut() {
            row.remove(b);
        }
        let mut merged = merged;
        merged.remove(b);
        active[a] = (node, min_leaf);
        for k in 0..active.len() {
            dist[a][k] = merged[k];
            dist[k][a] = merged[k];
        }
        dist[a][a] = 0.0;
        // keep clusters ordered by smallest leaf index for the tie-break
        let mut order: Vec<usize> = (0..active.len()).collect();
        order.sort_by_key(|&k| active[k].1);
        let new_active = order.iter().map(|&k| active[k]).collect();
        let new_dist = order
            .iter()
            .map(|&r| order.iter().map(|&c| dist[r][c]).collect())
            .collect();
        active = new_active;
        dist = new_dist;
    }

    let root_scratch = active[0].0;
    let mut tree = PhyloTree::with_root(arena[root_scratch].name.clone(), 0.0);
    let mut stack = vec![(root_scratch, tree.root())];
    while let Some((s, t)) = stack.pop() {
        let h = arena[s].height;
        for &c in &arena[s].children {
            let len = (h - arena[c].height).max(0.0);
            let id = tree.add_child(t, arena[c].name.clone(), len);
            stack.push((c, id));
        }
    }
    Ok(tree)
}
