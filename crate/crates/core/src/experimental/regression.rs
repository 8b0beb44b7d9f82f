use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::rng_for;
use crate::error::{Error, Result};

/// `max(β_0, β_1 + x_1, …, β_e + x_e)`.
pub fn trop_predict(beta: &[f64], x: &[f64]) -> Result<f64> {
    if beta.len() != x.len() + 1 {
        return Err(Error::DimensionMismatch {
            expected: x.len() + 1,
            found: beta.len(),
        });
    }
    Ok(x.iter()
        .zip(&beta[1..])
        .map(|(a, b)| a + b)
        .fold(beta[0], f64::max))
}

fn check_data(data: &[(Vec<f64>, f64)]) -> Result<usize> {
    let (x0, _) = data.first().ok_or(Error::Empty("data"))?;
    let e = x0.len();
    for (x, y) in data {
        if x.len() != e {
            return Err(Error::DimensionMismatch {
                expected: e,
                found: x.len(),
            });
        }
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("data must be finite".into()));
        }
    }
    Ok(e)
}

/// `Σ_i (trop_predict(β, x_i) - y_i)²`.
pub fn regression_objective(beta: &[f64], data: &[(Vec<f64>, f64)]) -> Result<f64> {
    check_data(data)?;
    let mut total = 0.0;
    for (x, y) in data {
        total += (trop_predict(beta, x)? - y).powi(2);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub beta: Vec<f64>,
    pub residual_sum: f64,
    pub sweeps: usize,
    pub experimental: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub starts: usize,
    pub max_sweeps: usize,
    /// Golden-section search stops at this bracket width.
    pub line_tol: f64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            starts: 12,
            max_sweeps: 200,
            line_tol: 1e-10,
        }
    }
}

fn objective(beta: &[f64], data: &[(Vec<f64>, f64)]) -> f64 {
    data.iter()
        .map(|(x, y)| {
            let p = x
                .iter()
                .zip(&beta[1..])
                .map(|(a, b)| a + b)
                .fold(beta[0], f64::max);
            (p - y).powi(2)
        })
        .sum()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes the objective along coordinate `k`. Every other term fixes a
/// floor `m_i` under each prediction, so the objective is a convex quadratic
/// between consecutive breakpoints `m_i - x_ik`; each piece gets its own
/// golden-section search.
fn line_search(
    beta: &[f64],
    k: usize,
    data: &[(Vec<f64>, f64)],
    width: f64,
    tol: f64,
) -> (f64, f64) {
    let shift = |x: &[f64]| if k == 0 { 0.0 } else { x[k - 1] };
    let floors: Vec<(f64, f64, f64)> = data
        .iter()
        .map(|(x, y)| {
            let mut m = if k == 0 { f64::NEG_INFINITY } else { beta[0] };
            for (l, v) in x.iter().enumerate() {
                if l + 1 != k {
                    m = m.max(beta[l + 1] + v);
                }
            }
            (m, shift(x), *y)
        })
        .collect();
    let f = |t: f64| {
        floors
            .iter()
            .map(|&(m, s, y)| (m.max(t + s) - y).powi(2))
            .sum::<f64>()
    };
    let mut cuts: Vec<f64> = floors
        .iter()
        .filter(|c| c.0.is_finite())
        .map(|&(m, s, _)| m - s)
        .collect();
    let lo = cuts.iter().copied().fold(beta[k] - width, f64::min) - width;
    let hi = cuts.iter().copied().fold(beta[k] + width, f64::max) + width;
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut best = (beta[k], f(beta[k]));
    for w in cuts.windows(2) {
        let cand = golden_section(f, w[0], w[1], tol);
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

/// Groups every datum under the term attaining its prediction and refits
/// each term to the mean residual of its group.
fn refit(beta: &[f64], data: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let mut sums = vec![0.0; beta.len()];
    let mut counts = vec![0usize; beta.len()];
    for (x, y) in data {
        let mut arg = 0;
        let mut top = beta[0];
        for (k, v) in x.iter().enumerate() {
            if beta[k + 1] + v > top {
                top = beta[k + 1] + v;
                arg = k + 1;
            }
        }
        sums[arg] += if arg == 0 { *y } else { y - x[arg - 1] };
        counts[arg] += 1;
    }
    beta.iter()
        .enumerate()
        .map(|(k, b)| {
            if counts[k] > 0 {
                sums[k] / counts[k] as f64
            } else {
                *b
            }
        })
        .collect()
}

/// Assigns every datum to a random term and fits each term to its group.
fn random_partition_start<R: Rng>(
    data: &[(Vec<f64>, f64)],
    fallback: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut sums = vec![0.0; fallback.len()];
    let mut counts = vec![0usize; fallback.len()];
    for (x, y) in data {
        let k = rng.gen_range(0..fallback.len());
        sums[k] += if k == 0 { *y } else { y - x[k - 1] };
        counts[k] += 1;
    }
    fallback
        .iter()
        .enumerate()
        .map(|(k, b)| {
            if counts[k] > 0 {
                sums[k] / counts[k] as f64
            } else {
                *b
            }
        })
        .collect()
}

fn descend(
    mut beta: Vec<f64>,
    data: &[(Vec<f64>, f64)],
    width: f64,
    config: &RegressionConfig,
) -> (Vec<f64>, f64, usize) {
    let mut f = objective(&beta, data);
    let mut sweeps = 0;
    while sweeps < config.max_sweeps {
        sweeps += 1;
        let before = f;
        for k in 0..beta.len() {
            let (t, ft) = line_search(&beta, k, data, width, config.line_tol);
            if ft < f {
                beta[k] = t;
                f = ft;
            }
        }
        let cand = refit(&beta, data);
        let fc = objective(&cand, data);
        if fc < f {
            beta = cand;
            f = fc;
        }
        if before - f <= 1e-15 * (1.0 + before) {
            break;
        }
    }
    (beta, f, sweeps)
}

/// Coordinate descent with golden-section line searches from several seeded
/// starts; returns the best model found.
pub fn fit_regression(
    data: &[(Vec<f64>, f64)],
    seed: u64,
    config: &RegressionConfig,
) -> Result<RegressionModel> {
    let e = check_data(data)?;
    let n = data.len() as f64;
    let ys = data.iter().map(|(_, y)| *y);
    let (ylo, yhi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
        (lo.min(y), hi.max(y))
    });
    let (xlo, xhi) = data
        .iter()
        .flat_map(|(x, _)| x.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let spread = (yhi - ylo) + if e > 0 { xhi - xlo } else { 0.0 };
    let width = spread.max(1.0);

    let mut first = vec![data.iter().map(|(_, y)| y).sum::<f64>() / n];
    for k in 0..e {
        first.push(data.iter().map(|(x, y)| y - x[k]).sum::<f64>() / n);
    }
    let mut rng = rng_for(seed);
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    for s in 0..config.starts.max(1) {
        let start: Vec<f64> = if s == 0 {
            first.clone()
        } else {
            random_partition_start(data, &first, &mut rng)
        };
        let run = descend(start, data, width, config);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (beta, _, sweeps) = best.expect("at least one start");
    let residual_sum = regression_objective(&beta, data)?;
    Ok(RegressionModel {
        beta,
        residual_sum,
        sweeps,
        experimental: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prediction() {
        assert_eq!(trop_predict(&[5.0, -1e9], &[3.0]).unwrap(), 5.0);
        assert_eq!(trop_predict(&[0.0, 0.0], &[3.0]).unwrap(), 3.0);
        assert!(trop_predict(&[0.0], &[3.0]).is_err());
    }

    #[test]
    fn objective_basics() {
        let data = vec![(vec![1.0, 2.0], 4.0)];
        assert_eq!(regression_objective(&[0.0, 0.0, 0.0], &data).unwrap(), 4.0);
        assert!(regression_objective(&[0.0, 0.0, 0.0], &[]).is_err());
    }

    #[test]
    fn perfect_fit() {
        let truth = [0.5, 1.0, -0.5];
        let mut rng = rng_for(9);
        let data: Vec<(Vec<f64>, f64)> = (0..40)
            .map(|_| {
                let x = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let y = trop_predict(&truth, &x).unwrap();
                (x, y)
            })
            .collect();
        let m = fit_regression(&data, 1, &RegressionConfig::default()).unwrap();
        assert!(m.residual_sum < 1e-6, "{m:?}");
        assert!(m.experimental);
    }

    #[test]
    fn constant_response() {
        let data: Vec<(Vec<f64>, f64)> = (0..10).map(|i| (vec![i as f64 * 0.1], 3.0)).collect();
        let m = fit_regression(&data, 0, &RegressionConfig::default()).unwrap();
        assert!(m.residual_sum < 1e-8);
        assert!((m.beta[0] - 3.0).abs() < 1e-4);
    }
}
