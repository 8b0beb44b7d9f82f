//! Tropical Fermat-Weber points and Fréchet means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{
    minimize_convex, solve_lp, ConvexConfig, LinearProgram, Relation, Sense, Status,
};
use crate::tree::{leaves_for_len, num_pairs, three_point_check};
use crate::tropical::{canonicalize, trop_distance_raw, TropicalPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "FW_LP")]
    FwLp,
    #[serde(rename = "FRECHET_DESCENT")]
    FrechetDescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub status: String,
    /// Certified optimality gap, when the method provides one.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationResult {
    pub point: TropicalPoint,
    pub objective: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
    /// Representative as returned by the solver, before canonicalization.
    pub raw: Vec<f64>,
}

fn check_sample(z: Option<&TropicalPoint>, sample: &[TropicalPoint]) -> Result<usize> {
    let first = sample.first().ok_or(Error::Empty("sample"))?;
    let dim = z.map_or(first.dim(), |z| z.dim());
    for v in sample {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(dim)
}

/// `Σ_i d_tr(z, v_i)`.
pub fn fw_objective(z: &TropicalPoint, sample: &[TropicalPoint]) -> Result<f64> {
    check_sample(Some(z), sample)?;
    Ok(sample
        .iter()
        .map(|v| trop_distance_raw(z.coords(), v.coords()))
        .sum())
}

/// `Σ_i d_tr(z, v_i)²`.
pub fn frechet_objective(z: &TropicalPoint, sample: &[TropicalPoint]) -> Result<f64> {
    check_sample(Some(z), sample)?;
    Ok(sample
        .iter()
        .map(|v| trop_distance_raw(z.coords(), v.coords()).powi(2))
        .sum())
}

/// Builds the Fermat-Weber LP.
///
/// Variables are `y_1..y_e` (free) followed by `d_1..d_s` (nonnegative).
/// Each sample point contributes `y_j - y_k - d_i <= v_j - v_k` for every
/// ordered pair `j != k`; together the two orientations of a pair bound
/// `y_j - y_k - v_j + v_k` to `[-d_i, d_i]`.
pub fn fermat_weber_lp(sample: &[TropicalPoint]) -> Result<LinearProgram> {
    let e = check_sample(None, sample)?;
    let s = sample.len();
    let mut objective = vec![0.0; e + s];
    for c in &mut objective[e..] {
        *c = 1.0;
    }
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for i in 0..s {
        lp.set_bounds(e + i, Some(0.0), None);
    }
    for (i, v) in sample.iter().enumerate() {
        let v = v.coords();
        for j in 0..e {
            for k in 0..e {
                if j == k {
                    continue;
                }
                let mut row = vec![0.0; e + s];
                row[j] = 1.0;
                row[k] = -1.0;
                row[e + i] = -1.0;
                lp.add_constraint(row, Relation::Le, v[j] - v[k]);
            }
        }
    }
    Ok(lp)
}

/// One tropical Fermat-Weber point (a vertex of the optimal face of the LP).
pub fn fermat_weber(sample: &[TropicalPoint]) -> Result<LocationResult> {
    let e = check_sample(None, sample)?;
    let lp = fermat_weber_lp(sample)?;
    let sol = solve_lp(&lp)?;
    match sol.status {
        Status::Optimal => {}
        other => {
            return Err(Error::Solver(format!("Fermat-Weber LP ended as {other:?}")));
        }
    }
    let raw = sol.x[..e].to_vec();
    let point = canonicalize(raw.clone())?;
    let objective = fw_objective(&point, sample)?;
    Ok(LocationResult {
        point,
        objective,
        method: Method::FwLp,
        diagnostics: Diagnostics {
            iterations: sol.pivots,
            status: "optimal".into(),
            gap: Some((objective - sol.objective_value).abs()),
        },
        raw,
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Value and subgradient of the Fréchet objective in the free coordinates
/// `u` of `z = (0, u)`.
fn frechet_oracle(u: &[f64], sample: &[TropicalPoint]) -> (f64, Vec<f64>) {
    let e = u.len() + 1;
    let mut z = Vec::with_capacity(e);
    z.push(0.0);
    z.extend_from_slice(u);
    let mut value = 0.0;
    let mut grad = vec![0.0; e];
    for v in sample {
        let (mut hi, mut lo) = (0, 0);
        let diff: Vec<f64> = z.iter().zip(v.coords()).map(|(a, b)| a - b).collect();
        for k in 1..e {
            if diff[k] > diff[hi] {
                hi = k;
            }
            if diff[k] < diff[lo] {
                lo = k;
            }
        }
        let d = diff[hi] - diff[lo];
        value += d * d;
        grad[hi] += 2.0 * d;
        grad[lo] -= 2.0 * d;
    }
    (value, grad[1..].to_vec())
}

/// Tropical Fréchet mean by convex minimization from several deterministic
/// starts (every sample point and the coordinatewise median).
pub fn frechet_mean(sample: &[TropicalPoint]) -> Result<LocationResult> {
    frechet_mean_with(sample, &ConvexConfig::default())
}

/// [`frechet_mean`] with explicit tolerance and iteration limits. The
/// configured radius is raised when needed to enclose a minimizer.
pub fn frechet_mean_with(
    sample: &[TropicalPoint],
    config: &ConvexConfig,
) -> Result<LocationResult> {
    let e = check_sample(None, sample)?;
    let mut starts: Vec<Vec<f64>> = sample.iter().map(|v| v.coords()[1..].to_vec()).collect();
    starts.push(
        (1..e)
            .map(|k| median(sample.iter().map(|v| v.coords()[k]).collect()))
            .collect(),
    );
    starts.dedup();

    // Any minimizer z* has d_tr(z*, v_i) <= sqrt(f(start)) for every i.
    let mut radius: f64 = config.radius;
    for st in &starts {
        let mut z = vec![0.0];
        z.extend_from_slice(st);
        let f0 = frechet_oracle(st, sample).0;
        let near = sample
            .iter()
            .map(|v| trop_distance_raw(&z, v.coords()))
            .fold(f64::INFINITY, f64::min);
        radius = radius.max(((e - 1) as f64).sqrt() * (f0.sqrt() + near) + 1.0);
    }
    let cfg = ConvexConfig {
        radius,
        ..config.clone()
    };
    let res = minimize_convex(|u| frechet_oracle(u, sample), e - 1, &starts, &cfg)?;
    let mut raw = vec![0.0];
    raw.extend_from_slice(&res.argmin);
    let point = canonicalize(raw.clone())?;
    let objective = frechet_objective(&point, sample)?;
    Ok(LocationResult {
        point,
        objective,
        method: Method::FrechetDescent,
        diagnostics: Diagnostics {
            iterations: res.iterations,
            status: if res.gap <= cfg.tol {
                "converged".into()
            } else {
                "iteration limit".into()
            },
            gap: Some(res.gap),
        },
        raw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    /// Three-point check on the solver's representative.
    pub raw: bool,
    /// Three-point check on the representative shifted to minimum 0.
    pub shifted: bool,
}

/// Three-point checks on both representatives of a location result.
pub fn closure_report(result: &LocationResult, n_leaves: usize, tol: f64) -> Result<ClosureReport> {
    let len = result.raw.len();
    if leaves_for_len(len) != Some(n_leaves) {
        return Err(Error::DimensionMismatch {
            expected: num_pairs(n_leaves),
            found: len,
        });
    }
    let lo = result.raw.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = result.raw.iter().map(|x| x - lo).collect();
    Ok(ClosureReport {
        raw: three_point_check(&result.raw, tol)?,
        shifted: three_point_check(&shifted, tol)?,
    })
}

/// Whether the location lies in the space of ultrametrics on `n_leaves`
/// leaves (both representatives must pass).
pub fn check_ultrametric_closure(
    result: &LocationResult,
    n_leaves: usize,
    tol: f64,
) -> Result<bool> {
    let r = closure_report(result, n_leaves, tol)?;
    Ok(r.raw && r.shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> TropicalPoint {
        TropicalPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn objectives() {
        let s = vec![p(&[0.0, 0.0, 0.0]), p(&[0.0, 3.0, 1.0])];
        assert_eq!(fw_objective(&p(&[0.0, 2.0, 0.0]), &s).unwrap(), 3.0);
        assert_eq!(frechet_objective(&p(&[0.0, 0.0, 0.0]), &s).unwrap(), 9.0);
        assert_eq!(fw_objective(&p(&[5.0, 7.0, 5.0]), &s).unwrap(), 3.0);
        assert!(fw_objective(&p(&[0.0, 0.0]), &s).is_err());
        assert!(fw_objective(&p(&[0.0, 0.0, 0.0]), &[]).is_err());
    }

    #[test]
    fn fw_two_points() {
        let s = vec![p(&[0.0, 0.0, 0.0]), p(&[0.0, 3.0, 1.0])];
        let r = fermat_weber(&s).unwrap();
        assert!((r.objective - 3.0).abs() < 1e-9);
        assert_eq!(r.method, Method::FwLp);
    }

    #[test]
    fn fw_single_point() {
        let v = p(&[0.0, 1.5, -2.0, 4.0]);
        let r = fermat_weber(std::slice::from_ref(&v)).unwrap();
        assert!(r.point.approx_eq(&v, 1e-9));
        assert!(r.objective.abs() < 1e-9);
    }

    #[test]
    fn frechet_single_and_duplicates() {
        let v = p(&[0.0, 1.5, -2.0]);
        let r = frechet_mean(&[v.clone(), v.clone(), v.clone()]).unwrap();
        assert!(r.point.approx_eq(&v, 1e-6));
        assert!(r.objective < 1e-8);
    }

    #[test]
    fn frechet_two_points() {
        // the midpoint of the segment halves the distance on both sides
        let s = vec![p(&[0.0, 0.0, 0.0]), p(&[0.0, 3.0, 1.0])];
        let r = frechet_mean(&s).unwrap();
        assert!((r.objective - 4.5).abs() < 1e-6, "{}", r.objective);
    }

    #[test]
    fn closure_of_single_ultrametric() {
        let u = p(&[1.2, 1.8, 2.0, 1.8, 2.0, 2.0]);
        let r = fermat_weber(&[u]).unwrap();
        assert!(check_ultrametric_closure(&r, 4, 1e-6).unwrap());
        assert!(check_ultrametric_closure(&r, 5, 1e-6).is_err());
    }
}
