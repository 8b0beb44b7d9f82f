use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::datagen::rng_for;
use crate::error::{Error, Result};
use crate::location::fermat_weber;
use crate::tropical::{
    canonicalize, project_onto_polytope, trop_distance_raw, TropicalPoint, TropicalPolytope,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaCandidate {
    pub polytope: TropicalPolytope,
    pub mu1: TropicalPoint,
    pub mu2: TropicalPoint,
    pub s1: f64,
    pub s2: f64,
    /// `d_tr(mu1, mu2) - s1 - s2`.
    pub objective: f64,
    pub experimental: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    /// Intervals per weight axis of the lattice of combinations.
    pub grid: usize,
    /// Maximum number of perturbation sweeps.
    pub sweeps: usize,
    /// Initial perturbation as a fraction of the data range.
    pub perturbation: f64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            grid: 40,
            sweeps: 30,
            perturbation: 0.1,
        }
    }
}

/// Weight lattice with `λ_1 = 0` and `grid` intervals on every other axis.
fn lattice(w: &TropicalPolytope, grid: usize) -> Vec<Vec<f64>> {
    let verts = w.vertices();
    let d1 = verts[0].coords();
    let ranges: Vec<(f64, f64)> = verts[1..]
        .iter()
        .map(|d| {
            let diff: Vec<f64> = d1.iter().zip(d.coords()).map(|(a, b)| a - b).collect();
            let lo = diff.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = diff.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let pad = ranges.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let axes: Vec<Vec<f64>> = ranges
        .iter()
        .map(|(lo, hi)| {
            let (lo, hi) = (lo - pad, hi + pad);
            (0..=grid)
                .map(|k| lo + (hi - lo) * k as f64 / grid as f64)
                .collect()
        })
        .collect();
    let mut out = vec![vec![0.0]];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(*x);
                    p
                })
            })
            .collect();
    }
    out
}

fn constrained_fw(candidates: &[Vec<f64>], projected: &[TropicalPoint]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, z) in candidates.iter().enumerate() {
        let v: f64 = projected
            .iter()
            .map(|p| trop_distance_raw(z, p.coords()))
            .sum();
        if v < best.1 {
            best = (k, v);
        }
    }
    best
}

/// Evaluates the LDA criterion for the polytope `w`.
///
/// Each class is projected onto `w`; the constrained Fermat-Weber point of
/// each projected class is searched over a lattice of `(grid + 1)^(s-1)`
/// combinations of `w`'s vertices.
pub fn lda_objective(
    w: &TropicalPolytope,
    s1: &[TropicalPoint],
    s2: &[TropicalPoint],
    grid: usize,
) -> Result<LdaCandidate> {
    if w.is_empty() {
        return Err(Error::Empty("polytope"));
    }
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Empty("class sample"));
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be at least 1".into()));
    }
    let project = |s: &[TropicalPoint]| -> Result<Vec<TropicalPoint>> {
        s.iter().map(|u| project_onto_polytope(u, w)).collect()
    };
    let (p1, p2) = (project(s1)?, project(s2)?);
    let candidates: Vec<Vec<f64>> = lattice(w, grid).iter().map(|l| w.combine_raw(l)).collect();
    let (k1, v1) = constrained_fw(&candidates, &p1);
    let (k2, v2) = constrained_fw(&candidates, &p2);
    let mu1 = canonicalize(candidates[k1].clone())?;
    let mu2 = canonicalize(candidates[k2].clone())?;
    let objective = trop_distance_raw(mu1.coords(), mu2.coords()) - v1 - v2;
    Ok(LdaCandidate {
        polytope: w.clone(),
        mu1,
        mu2,
        s1: v1,
        s2: v2,
        objective,
        experimental: true,
    })
}

/// Local search over two-vertex polytopes, started at the classes'
/// Fermat-Weber points and moved one coordinate at a time.
pub fn fit_lda(
    s1: &[TropicalPoint],
    s2: &[TropicalPoint],
    seed: u64,
    config: &LdaConfig,
) -> Result<LdaCandidate> {
    let v1 = fermat_weber(s1)?.point;
    let v2 = fermat_weber(s2)?.point;
    v1.check_dim(&v2)?;
    let e = v1.dim();
    let (lo, hi) = s1
        .iter()
        .chain(s2)
        .flat_map(|p| p.coords().iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    let range = (hi - lo).max(1e-12);
    let mut step = config.perturbation * range;
    let mut verts = [v1.into_inner(), v2.into_inner()];
    let eval = |verts: &[Vec<f64>; 2]| -> Result<LdaCandidate> {
        let w = TropicalPolytope::new(vec![
            canonicalize(verts[0].clone())?,
            canonicalize(verts[1].clone())?,
        ])?;
        lda_objective(&w, s1, s2, config.grid)
    };
    let mut best = eval(&verts)?;
    let mut moves: Vec<(usize, usize, f64)> = (0..2)
        .flat_map(|v| (1..e).flat_map(move |k| [(v, k, 1.0), (v, k, -1.0)]))
        .collect();
    let mut rng = rng_for(seed);
    for _ in 0..config.sweeps {
        moves.shuffle(&mut rng);
        let mut improved = false;
        for &(v, k, sign) in &moves {
            let mut trial = verts.clone();
            trial[v][k] += sign * step;
            let cand = eval(&trial)?;
            if cand.objective > best.objective + 1e-12 {
                best = cand;
                verts = trial;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-3 * config.perturbation * range {
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> TropicalPoint {
        TropicalPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_classes() {
        let s = vec![
            p(&[0.0, 1.0, 2.0]),
            p(&[0.0, -1.0, 0.5]),
            p(&[0.0, 0.0, 3.0]),
        ];
        let w = TropicalPolytope::new(vec![s[0].clone(), s[1].clone()]).unwrap();
        let c = lda_objective(&w, &s, &s, 20).unwrap();
        assert_eq!(trop_distance_raw(c.mu1.coords(), c.mu2.coords()), 0.0);
        assert!(c.objective <= 0.0);
        assert!(c.experimental);
    }

    #[test]
    fn singletons_inside() {
        let u = p(&[0.0, 1.0, 2.0]);
        let v = p(&[0.0, -1.0, 0.5]);
        let w = TropicalPolytope::new(vec![u.clone(), v.clone()]).unwrap();
        let c = lda_objective(&w, std::slice::from_ref(&u), std::slice::from_ref(&v), 10).unwrap();
        assert!(c.s1.abs() < 1e-12 && c.s2.abs() < 1e-12);
        assert!((c.objective - trop_distance_raw(u.coords(), v.coords())).abs() < 1e-12);
    }

    #[test]
    fn refinement_does_not_worsen_inner_minima() {
        let w = TropicalPolytope::new(vec![p(&[0.0, 2.0, 1.0]), p(&[0.0, -1.0, 3.0])]).unwrap();
        let s1 = vec![p(&[0.0, 1.3, 0.2]), p(&[0.0, 0.7, 2.2])];
        let s2 = vec![p(&[0.0, -0.4, 2.9]), p(&[0.0, 0.1, 1.1])];
        for g in [3, 5, 8] {
            let a = lda_objective(&w, &s1, &s2, g).unwrap();
            let b = lda_objective(&w, &s1, &s2, 2 * g).unwrap();
            assert!(b.s1 <= a.s1 + 1e-12 && b.s2 <= a.s2 + 1e-12);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let s1 = vec![p(&[0.0, 5.0, 0.0]), p(&[0.0, 5.5, 0.3])];
        let s2 = vec![p(&[0.0, 0.0, 5.0]), p(&[0.0, 0.2, 5.4])];
        let cfg = LdaConfig {
            grid: 10,
            sweeps: 5,
            perturbation: 0.1,
        };
        let a = fit_lda(&s1, &s2, 4, &cfg).unwrap();
        let b = fit_lda(&s1, &s2, 4, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.objective > 0.0);
    }
}
