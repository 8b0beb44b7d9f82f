//! Random equidistant trees (and hence random ultrametrics).
//!
//! The random stream is ChaCha8 seeded through `seed_from_u64`, which is a
//! documented, platform-independent algorithm, so a seed reproduces the same
//! trees everywhere.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{cophenetic, default_leaf_names, topology_id, DissimilarityMap, PhyloTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_leaves: usize,
    pub height: f64,
    pub seed: u64,
    pub count: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_leaves < 3 {
            return Err(Error::InvalidParameter(
                "n_leaves must be at least 3".into(),
            ));
        }
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(Error::InvalidParameter("height must be positive".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Ranked merge order: step `k` joins the clusters at positions `(i, j)`,
/// `i < j`, of the current lineage list. The merged lineage takes position
/// `i` and position `j` is removed.
pub type MergeHistory = Vec<(usize, usize)>;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_history<R: Rng>(n: usize, rng: &mut R) -> MergeHistory {
    (0..n - 1)
        .map(|k| {
            let live = n - k;
            let i = rng.gen_range(0..live);
            let mut j = rng.gen_range(0..live - 1);
            if j >= i {
                j += 1;
            }
            (i.min(j), i.max(j))
        })
        .collect()
}

/// `n - 1` sorted uniform merge times on `(0, height)`, rescaled so the last
/// one is exactly `height`.
fn merge_times<R: Rng>(n: usize, height: f64, rng: &mut R) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>() * height).collect();
    t.sort_by(f64::total_cmp);
    let top = t[n - 2];
    if top > 0.0 {
        for x in t.iter_mut() {
            *x *= height / top;
        }
    }
    t[n - 2] = height;
    t
}

/// Builds an equidistant tree from a merge history and merge times.
pub fn build_tree(names: &[String], history: &[(usize, usize)], times: &[f64]) -> PhyloTree {
    // Scratch nodes: (name, height, children).
    let mut nodes: Vec<(Option<String>, f64, Vec<usize>)> = names
        .iter()
        .map(|s| (Some(s.clone()), 0.0, Vec::new()))
        .collect();
    let mut lineages: Vec<usize> = (0..names.len()).collect();
    for (&(i, j), &t) in history.iter().zip(times) {
        let id = nodes.len();
        nodes.push((None, t, vec![lineages[i], lineages[j]]));
        lineages[i] = id;
        lineages.remove(j);
    }
    let root = lineages[0];
    let mut tree = PhyloTree::with_root(None, 0.0);
    let mut stack = vec![(root, tree.root())];
    while let Some((s, t)) = stack.pop() {
        let h = nodes[s].1;
        for c in nodes[s].2.clone() {
            let id = tree.add_child(t, nodes[c].0.clone(), h - nodes[c].1);
            stack.push((c, id));
        }
    }
    tree
}

/// Random equidistant trees of height exactly `cfg.height`.
///
/// Each tree draws its merge order (a uniformly random pair of live lineages
/// per step) and then its merge times.
pub fn simulate_equidistant(cfg: &SimConfig) -> Result<Vec<PhyloTree>> {
    cfg.validate()?;
    let names = default_leaf_names(cfg.n_leaves);
    let mut rng = rng_for(cfg.seed);
    Ok((0..cfg.count)
        .map(|_| {
            let history = random_history(cfg.n_leaves, &mut rng);
            let times = merge_times(cfg.n_leaves, cfg.height, &mut rng);
            build_tree(&names, &history, &times)
        })
        .collect())
}

/// Trees sharing one ranked topology, with fresh merge times per tree.
pub fn simulate_with_history(
    cfg: &SimConfig,
    history: &[(usize, usize)],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<PhyloTree>> {
    cfg.validate()?;
    if history.len() != cfg.n_leaves - 1 {
        return Err(Error::InvalidParameter(
            "merge history length must be n_leaves - 1".into(),
        ));
    }
    let names = default_leaf_names(cfg.n_leaves);
    Ok((0..cfg.count)
        .map(|_| {
            let times = merge_times(cfg.n_leaves, cfg.height, rng);
            build_tree(&names, history, &times)
        })
        .collect())
}

/// Cophenetic vectors of simulated trees.
pub fn simulate_ultrametrics(cfg: &SimConfig) -> Result<Vec<DissimilarityMap>> {
    simulate_equidistant(cfg)?.iter().map(cophenetic).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledUltrametrics {
    pub points: Vec<DissimilarityMap>,
    /// 0 for class A, 1 for class B.
    pub labels: Vec<u8>,
}

/// Two-class ultrametric sample.
///
/// Each class follows one ranked topology: class A the first topology drawn
/// from `cfg_a.seed`, class B the first topology drawn from `cfg_b.seed` that
/// differs from class A's (only enforced when `separation > 0`). Merge times
/// are then drawn per tree, and class B heights are scaled by
/// `1 + separation`.
pub fn make_two_class_sample(
    cfg_a: &SimConfig,
    cfg_b: &SimConfig,
    separation: f64,
) -> Result<LabeledUltrametrics> {
    cfg_a.validate()?;
    cfg_b.validate()?;
    if cfg_a.n_leaves != cfg_b.n_leaves {
        return Err(Error::InvalidParameter(format!(
            "leaf counts differ: {} vs {}",
            cfg_a.n_leaves, cfg_b.n_leaves
        )));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::InvalidParameter(
            "separation must be nonnegative".into(),
        ));
    }
    let n = cfg_a.n_leaves;
    let names = default_leaf_names(n);

    let mut rng_a = rng_for(cfg_a.seed);
    let hist_a = random_history(n, &mut rng_a);
    let topo_a = topology_id(&build_tree(
        &names,
        &hist_a,
        &merge_times(n, 1.0, &mut rng_for(0)),
    ));

    let mut rng_b = rng_for(cfg_b.seed);
    let mut hist_b = random_history(n, &mut rng_b);
    if separation > 0.0 {
        let mut tries = 0;
        while topology_id(&build_tree(
            &names,
            &hist_b,
            &merge_times(n, 1.0, &mut rng_for(0)),
        )) == topo_a
        {
            tries += 1;
            if tries > 10_000 {
                return Err(Error::Solver("could not draw a distinct topology".into()));
            }
            hist_b = random_history(n, &mut rng_b);
        }
    }

    let trees_a = simulate_with_history(cfg_a, &hist_a, &mut rng_a)?;
    let cfg_b_scaled = SimConfig {
        height: cfg_b.height * (1.0 + separation),
        ..cfg_b.clone()
    };
    let trees_b = simulate_with_history(&cfg_b_scaled, &hist_b, &mut rng_b)?;

    let mut points = Vec::with_capacity(trees_a.len() + trees_b.len());
    let mut labels = Vec::with_capacity(points.capacity());
    for t in &trees_a {
        points.push(cophenetic(t)?);
        labels.push(0);
    }
    for t in &trees_b {
        points.push(cophenetic(t)?);
        labels.push(1);
    }
    Ok(LabeledUltrametrics { points, labels })
}

/// Shuffles indices deterministically; used to interleave classes.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_for(seed));
    idx
}
