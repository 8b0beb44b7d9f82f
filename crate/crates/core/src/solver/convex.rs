//! Minimization of convex, possibly nonsmooth functions from a
//! value-plus-subgradient oracle.
//!
//! Uses the central-cut ellipsoid method. Every subgradient `g` at the
//! current center `x` certifies `f(x) - f* <= sqrt(gᵀPg)` as long as the
//! minimizer lies in the ellipsoid `{y : (y-x)ᵀP⁻¹(y-x) <= 1}`, which gives a
//! stopping rule that does not depend on step-size tuning.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexConfig {
    /// Radius of the initial ball around each start; it must contain a minimizer.
    pub radius: f64,
    /// Stop once the certified optimality gap drops below this.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for ConvexConfig {
    fn default() -> Self {
        ConvexConfig {
            radius: 10.0,
            tol: 1e-10,
            max_iters: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// Certified gap at termination for the winning start.
    pub gap: f64,
    pub iterations: usize,
    /// Best-so-far value after each iteration of the winning start.
    pub trace: Vec<f64>,
}

/// Runs the ellipsoid method from every start and keeps the best point.
///
/// `f` returns the value and one subgradient at its argument.
pub fn minimize_convex<F>(
    mut f: F,
    dim: usize,
    starts: &[Vec<f64>],
    config: &ConvexConfig,
) -> Result<ConvexResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if starts.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one start point is required".into(),
        ));
    }
    if !(config.radius > 0.0 && config.radius.is_finite()) {
        return Err(Error::InvalidParameter(
            "radius must be positive and finite".into(),
        ));
    }
    let mut best: Option<ConvexResult> = None;
    for start in starts {
        if start.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: start.len(),
            });
        }
        let run = ellipsoid(&mut f, start, config)?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}

fn ellipsoid<F>(f: &mut F, start: &[f64], config: &ConvexConfig) -> Result<ConvexResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = start.len();
    let nf = n as f64;
    let mut x = start.to_vec();
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        p[i * n + i] = config.radius * config.radius;
    }
    let mut best_x = x.clone();
    let mut best_val = f64::INFINITY;
    let mut trace = Vec::new();
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut pg = vec![0.0; n];

    while iterations < config.max_iters {
        let (val, g) = f(&x);
        if !val.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver(format!(
                "non-finite objective at iteration {iterations}"
            )));
        }
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.len(),
            });
        }
        iterations += 1;
        if val < best_val {
            best_val = val;
            best_x.copy_from_slice(&x);
        }
        trace.push(best_val);

        for i in 0..n {
            pg[i] = (0..n).map(|j| p[i * n + j] * g[j]).sum();
        }
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        if gpg <= 0.0 {
            // zero subgradient: x is a minimizer
            gap = 0.0;
            break;
        }
        let norm = gpg.sqrt();
        gap = gap.min(norm);
        if norm <= config.tol {
            break;
        }
        for v in pg.iter_mut() {
            *v /= norm;
        }
        for i in 0..n {
            x[i] -= pg[i] / (nf + 1.0);
        }
        if n == 1 {
            p[0] *= 0.25;
        } else {
            let scale = nf * nf / (nf * nf - 1.0);
            let w = 2.0 / (nf + 1.0);
            for i in 0..n {
                for j in 0..n {
                    p[i * n + j] = scale * (p[i * n + j] - w * pg[i] * pg[j]);
                }
            }
            for i in 0..n {
                for j in 0..i {
                    let s = 0.5 * (p[i * n + j] + p[j * n + i]);
                    p[i * n + j] = s;
                    p[j * n + i] = s;
                }
            }
        }
    }
    Ok(ConvexResult {
        argmin: best_x,
        value: best_val,
        gap,
        iterations,
        trace,
    })
}
