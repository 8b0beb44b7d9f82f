//! Tropical principal polytopes with vertices drawn from the sample.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::rng_for;
use crate::error::{Error, Result};
use crate::tree::three_point_check;
use crate::tropical::{project_onto_polytope, trop_distance_raw, TropicalPoint, TropicalPolytope};

const IMPROVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub polytope: TropicalPolytope,
    /// Sample indices of the vertices, in polytope order.
    pub vertex_indices: Vec<usize>,
    pub objective: f64,
    /// Projection of every sample point.
    pub assignment: Vec<TropicalPoint>,
    /// Objective after initialization and after each accepted exchange.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaConfig {
    /// Seeded random starts in addition to the greedy one.
    pub restarts: usize,
}

impl Default for PcaConfig {
    fn default() -> Self {
        PcaConfig { restarts: 16 }
    }
}

/// `Σ_i d_tr(u_i, π(u_i))` with `π` the projection onto the polytope.
pub fn pca_objective(polytope: &TropicalPolytope, sample: &[TropicalPoint]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if polytope.is_empty() {
        return Err(Error::Empty("polytope"));
    }
    let mut total = 0.0;
    for u in sample {
        let pi = project_onto_polytope(u, polytope)?;
        total += trop_distance_raw(u.coords(), pi.coords());
    }
    Ok(total)
}

/// Objective of the polytope spanned by `sample[subset]`.
fn subset_objective(sample: &[TropicalPoint], subset: &[usize]) -> f64 {
    let e = sample[0].dim();
    let mut total = 0.0;
    let mut proj = vec![0.0; e];
    for u in sample {
        let u = u.coords();
        proj.iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        for &l in subset {
            let d = sample[l].coords();
            let lam = u
                .iter()
                .zip(d)
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min);
            for (p, c) in proj.iter_mut().zip(d) {
                *p = p.max(lam + c);
            }
        }
        total += trop_distance_raw(u, &proj);
    }
    total
}

fn greedy_start(sample: &[TropicalPoint], s: usize) -> Vec<usize> {
    let n = sample.len();
    if s == 1 {
        return vec![0];
    }
    let dist = |i: usize, j: usize| trop_distance_raw(sample[i].coords(), sample[j].coords());
    let (mut bi, mut bj, mut bd) = (0, 1, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            if dist(i, j) > bd {
                (bi, bj, bd) = (i, j, dist(i, j));
            }
        }
    }
    let mut chosen = vec![bi, bj];
    while chosen.len() < s {
        let next = (0..n)
            .filter(|k| !chosen.contains(k))
            .map(|k| {
                (
                    k,
                    chosen
                        .iter()
                        .map(|&c| dist(k, c))
                        .fold(f64::INFINITY, f64::min),
                )
            })
            .fold(None::<(usize, f64)>, |best, (k, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((k, d)),
            })
            .expect("candidates remain")
            .0;
        chosen.push(next);
    }
    chosen
}

struct Run {
    subset: Vec<usize>,
    objective: f64,
    trace: Vec<f64>,
}

fn exchange_search(sample: &[TropicalPoint], mut subset: Vec<usize>) -> Run {
    let n = sample.len();
    let mut objective = subset_objective(sample, &subset);
    let mut trace = vec![objective];
    loop {
        let mut improved = false;
        for pos in 0..subset.len() {
            for cand in 0..n {
                if subset.contains(&cand) {
                    continue;
                }
                let old = subset[pos];
                subset[pos] = cand;
                let obj = subset_objective(sample, &subset);
                if obj < objective - IMPROVE_TOL {
                    objective = obj;
                    trace.push(obj);
                    improved = true;
                } else {
                    subset[pos] = old;
                }
            }
        }
        if !improved {
            return Run {
                subset,
                objective,
                trace,
            };
        }
    }
}

/// Vertex-exchange local search for an `s`-vertex principal polytope.
pub fn fit_principal_polytope(sample: &[TropicalPoint], s: usize, seed: u64) -> Result<PcaModel> {
    fit_principal_polytope_with(sample, s, seed, &PcaConfig::default())
}

pub fn fit_principal_polytope_with(
    sample: &[TropicalPoint],
    s: usize,
    seed: u64,
    config: &PcaConfig,
) -> Result<PcaModel> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::Empty("sample"));
    }
    for u in sample {
        sample[0].check_dim(u)?;
    }
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "s = {s} must lie in 1..={n}"
        )));
    }
    let mut best = exchange_search(sample, greedy_start(sample, s));
    let mut rng = rng_for(seed);
    for _ in 0..config.restarts {
        let start = sample_indices(&mut rng, n, s).into_vec();
        let run = exchange_search(sample, start);
        if run.objective < best.objective - IMPROVE_TOL {
            best = run;
        }
    }
    let polytope = TropicalPolytope::new(best.subset.iter().map(|&i| sample[i].clone()).collect())?;
    let assignment = sample
        .iter()
        .map(|u| project_onto_polytope(u, &polytope))
        .collect::<Result<Vec<_>>>()?;
    Ok(PcaModel {
        polytope,
        vertex_indices: best.subset,
        objective: best.objective,
        assignment,
        trace: best.trace,
    })
}

/// Best objective over every `s`-subset of the sample.
pub fn exhaustive_principal_polytope(
    sample: &[TropicalPoint],
    s: usize,
) -> Result<(Vec<usize>, f64)> {
    let n = sample.len();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "s = {s} must lie in 1..={n}"
        )));
    }
    let mut idx: Vec<usize> = (0..s).collect();
    let mut best = (idx.clone(), subset_objective(sample, &idx));
    loop {
        let Some(k) = (0..s).rev().find(|&k| idx[k] < n - s + k) else {
            return Ok(best);
        };
        idx[k] += 1;
        for m in k + 1..s {
            idx[m] = idx[m - 1] + 1;
        }
        let obj = subset_objective(sample, &idx);
        if obj < best.1 {
            best = (idx.clone(), obj);
        }
    }
}

/// Plane coordinates `(λ_2 - λ_1, λ_3 - λ_1)` of each point's projection
/// weights on a 3-vertex model.
pub fn pca_coordinates(model: &PcaModel, sample: &[TropicalPoint]) -> Result<Vec<(f64, f64)>> {
    if model.polytope.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "plane coordinates need 3 vertices, model has {}",
            model.polytope.len()
        )));
    }
    sample
        .iter()
        .map(|u| {
            model.polytope.vertices()[0].check_dim(u)?;
            let lam = model.polytope.projection_weights(u.coords());
            Ok((lam[1] - lam[0], lam[2] - lam[0]))
        })
        .collect()
}

/// Samples random tropical combinations of ultrametric vertices and checks
/// that each stays ultrametric.
pub fn check_ultrametric_cells(
    polytope: &TropicalPolytope,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    for (k, v) in polytope.vertices().iter().enumerate() {
        if !three_point_check(v.coords(), 1e-9)? {
            return Err(Error::NotUltrametric(format!(
                "vertex {k} fails the three-point condition"
            )));
        }
    }
    let spread = polytope
        .vertices()
        .iter()
        .flat_map(|v| v.coords().iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    let r = (spread.1 - spread.0).max(1.0) * 2.0;
    let mut rng = rng_for(seed);
    for _ in 0..trials {
        let lam: Vec<f64> = (0..polytope.len()).map(|_| rng.gen_range(-r..=r)).collect();
        if !three_point_check(&polytope.combine_raw(&lam), 1e-9)? {
            return Ok(false);
        }
    }
    Ok(true)
}
