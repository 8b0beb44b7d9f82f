//! Hard- and soft-margin tropical support vector machines.
//!
//! Training enumerates class-level sector assignments: every point of class
//! P is required to have its largest coordinate of `x + ω` at `iP` and its
//! second largest at `jP`, and likewise `(iQ, jQ)` for class Q. Each
//! assignment is one linear program; the best optimum wins.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::datagen::LabeledUltrametrics;
use crate::error::{Error, Result};
use crate::solver::{solve_lp, LinearProgram, Relation, Sense, Solution, Status};
use crate::tol::TIE_TOL;
use crate::tropical::{canonicalize, TropicalPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub points: Vec<TropicalPoint>,
    /// 0 for class P, 1 for class Q.
    pub labels: Vec<u8>,
}

impl LabeledSample {
    pub fn new(points: Vec<TropicalPoint>, labels: Vec<u8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        if let Some(l) = labels.iter().find(|l| **l > 1) {
            return Err(Error::InvalidParameter(format!("label {l} is not 0 or 1")));
        }
        if let Some(first) = points.first() {
            for p in &points {
                first.check_dim(p)?;
            }
        }
        Ok(LabeledSample { points, labels })
    }

    pub fn from_ultrametrics(data: &LabeledUltrametrics) -> Result<Self> {
        let points = data
            .points
            .iter()
            .map(|u| u.to_point())
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, data.labels.clone())
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.dim())
    }

    fn check_trainable(&self) -> Result<()> {
        if !self.labels.contains(&0) {
            return Err(Error::Empty("class P"));
        }
        if !self.labels.contains(&1) {
            return Err(Error::Empty("class Q"));
        }
        if self.dim() < 3 {
            return Err(Error::InvalidParameter(format!(
                "tropical SVM needs dimension at least 3, got {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Coordinates (0-based) of the largest and second largest entry of `x + ω`
/// for each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectorAssignment {
    #[serde(rename = "iP")]
    pub i_p: usize,
    #[serde(rename = "jP")]
    pub j_p: usize,
    #[serde(rename = "iQ")]
    pub i_q: usize,
    #[serde(rename = "jQ")]
    pub j_q: usize,
}

impl SectorAssignment {
    pub fn is_admissible(&self, e: usize) -> bool {
        self.i_p < e
            && self.j_p < e
            && self.i_q < e
            && self.j_q < e
            && self.i_p != self.j_p
            && self.i_q != self.j_q
            && self.i_p != self.i_q
    }

    fn for_label(&self, label: u8) -> (usize, usize) {
        if label == 0 {
            (self.i_p, self.j_p)
        } else {
            (self.i_q, self.j_q)
        }
    }
}

/// Every admissible assignment in lexicographic order.
pub fn admissible_assignments(e: usize) -> Vec<SectorAssignment> {
    let mut out = Vec::new();
    for i_p in 0..e {
        for j_p in 0..e {
            for i_q in 0..e {
                for j_q in 0..e {
                    let a = SectorAssignment { i_p, j_p, i_q, j_q };
                    if a.is_admissible(e) {
                        out.push(a);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "HARD")]
    Hard,
    #[serde(rename = "SOFT")]
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackSummary {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SlackSummary {
    pub fn total(&self) -> f64 {
        self.alpha + self.beta + self.gamma
    }
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub omega: TropicalPoint,
    pub assignment: SectorAssignment,
    /// Optimal `z`; infinite (serialized as `null`) when the soft program is
    /// unbounded.
    #[serde(with = "finite_or_null")]
    pub margin: f64,
    pub mode: Mode,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack_summary: Option<SlackSummary>,
    /// Soft objective `z - C·Σ slack`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    /// Set when the penalty is too weak to bound the margin.
    #[serde(default)]
    pub degenerate: bool,
}

/// Hard-margin program for one assignment. Variables: `ω_1..ω_e`, `z`.
pub fn hard_margin_lp(sample: &LabeledSample, a: &SectorAssignment) -> LinearProgram {
    let e = sample.dim();
    let zi = e;
    let mut objective = vec![0.0; e + 1];
    objective[zi] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for (xi, &label) in sample.points.iter().zip(&sample.labels) {
        let x = xi.coords();
        let (i, j) = a.for_label(label);
        let mut row = vec![0.0; e + 1];
        row[zi] = 1.0;
        row[j] += 1.0;
        row[i] -= 1.0;
        lp.add_constraint(row, Relation::Le, x[i] - x[j]);
        let mut row = vec![0.0; e + 1];
        row[j] = 1.0;
        row[i] = -1.0;
        lp.add_constraint(row, Relation::Le, x[i] - x[j]);
        for l in (0..e).filter(|l| *l != i && *l != j) {
            let mut row = vec![0.0; e + 1];
            row[l] = 1.0;
            row[j] = -1.0;
            lp.add_constraint(row, Relation::Le, x[j] - x[l]);
        }
    }
    lp
}

/// Soft-margin program for one assignment. Variables: `ω_1..ω_e`, `z`, then
/// per point `α`, `β` and one `γ_l` per remaining coordinate `l`.
pub fn soft_margin_lp(sample: &LabeledSample, a: &SectorAssignment, c: f64) -> LinearProgram {
    let e = sample.dim();
    let zi = e;
    let per_point = e; // α, β and e - 2 γ's
    let nvars = e + 1 + per_point * sample.points.len();
    let mut objective = vec![-c; nvars];
    objective[..e].iter_mut().for_each(|x| *x = 0.0);
    objective[zi] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for v in e + 1..nvars {
        lp.set_bounds(v, Some(0.0), None);
    }
    for (p, (xi, &label)) in sample.points.iter().zip(&sample.labels).enumerate() {
        let x = xi.coords();
        let (i, j) = a.for_label(label);
        let base = e + 1 + per_point * p;
        let mut row = vec![0.0; nvars];
        row[zi] = 1.0;
        row[j] += 1.0;
        row[i] -= 1.0;
        row[base] = -1.0;
        lp.add_constraint(row, Relation::Le, x[i] - x[j]);
        let mut row = vec![0.0; nvars];
        row[j] = 1.0;
        row[i] = -1.0;
        row[base + 1] = -1.0;
        lp.add_constraint(row, Relation::Le, x[i] - x[j]);
        for (g, l) in (0..e).filter(|l| *l != i && *l != j).enumerate() {
            let mut row = vec![0.0; nvars];
            row[l] = 1.0;
            row[j] = -1.0;
            row[base + 2 + g] = -1.0;
            lp.add_constraint(row, Relation::Le, x[j] - x[l]);
        }
    }
    lp
}

/// Solves one program per assignment on all available cores; results keep
/// the assignment order.
fn solve_all<F>(assignments: &[SectorAssignment], build: F) -> Result<Vec<Solution>>
where
    F: Fn(&SectorAssignment) -> LinearProgram + Sync,
{
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(assignments.len().max(1));
    let chunk = assignments.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<Solution>>> = thread::scope(|scope| {
        let handles: Vec<_> = assignments
            .chunks(chunk)
            .map(|part| {
                let build = &build;
                scope.spawn(move || part.iter().map(|a| solve_lp(&build(a))).collect())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(assignments.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Hard-margin tropical SVM. Fails with [`Error::NotSeparable`] when no
/// assignment achieves a positive margin.
pub fn train_hard(sample: &LabeledSample) -> Result<SvmModel> {
    sample.check_trainable()?;
    let e = sample.dim();
    let assignments = admissible_assignments(e);
    let solutions = solve_all(&assignments, |a| hard_margin_lp(sample, a))?;
    let mut best: Option<(usize, f64)> = None;
    for (k, sol) in solutions.iter().enumerate() {
        match sol.status {
            Status::Optimal => {
                let z = sol.x[e];
                if best.is_none_or(|(_, bz)| z > bz + TIE_TOL) {
                    best = Some((k, z));
                }
            }
            Status::Infeasible => {}
            Status::Unbounded => {
                return Err(Error::Solver(format!(
                    "hard-margin program unbounded for assignment {:?}",
                    assignments[k]
                )));
            }
        }
    }
    let (k, z) = best.ok_or(Error::NotSeparable)?;
    if z <= TIE_TOL {
        return Err(Error::NotSeparable);
    }
    Ok(SvmModel {
        omega: canonicalize(solutions[k].x[..e].to_vec())?,
        assignment: assignments[k],
        margin: z,
        mode: Mode::Hard,
        c: None,
        slack_summary: None,
        objective: None,
        degenerate: false,
    })
}

fn slack_summary(sample: &LabeledSample, x: &[f64]) -> SlackSummary {
    let e = sample.dim();
    let mut s = SlackSummary {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };
    for p in 0..sample.points.len() {
        let base = e + 1 + e * p;
        s.alpha += x[base];
        s.beta += x[base + 1];
        s.gamma += x[base + 2..base + e].iter().sum::<f64>();
    }
    s
}

/// Soft-margin tropical SVM with penalty `c >= 0`.
///
/// When the penalty cannot bound the margin (always the case for `c = 0`)
/// the model is flagged degenerate: its margin is infinite and `ω` comes
/// from the program with `z` capped at the data diameter.
pub fn train_soft(sample: &LabeledSample, c: f64) -> Result<SvmModel> {
    sample.check_trainable()?;
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C must be finite and nonnegative, got {c}"
        )));
    }
    let e = sample.dim();
    let assignments = admissible_assignments(e);
    let solutions = solve_all(&assignments, |a| soft_margin_lp(sample, a, c))?;

    if let Some(k) = solutions.iter().position(|s| s.status == Status::Unbounded) {
        let cap = sample
            .points
            .iter()
            .flat_map(|p| p.coords().iter().copied())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        let mut lp = soft_margin_lp(sample, &assignments[k], c);
        lp.set_bounds(e, None, Some(2.0 * (cap.1 - cap.0) + 1.0));
        let sol = solve_lp(&lp)?;
        if !sol.is_optimal() {
            return Err(Error::Solver(format!(
                "capped soft-margin program ended as {:?}",
                sol.status
            )));
        }
        return Ok(SvmModel {
            omega: canonicalize(sol.x[..e].to_vec())?,
            assignment: assignments[k],
            margin: f64::INFINITY,
            mode: Mode::Soft,
            c: Some(c),
            slack_summary: Some(slack_summary(sample, &sol.x)),
            objective: None,
            degenerate: true,
        });
    }

    let mut best: Option<usize> = None;
    for (k, sol) in solutions.iter().enumerate() {
        if sol.is_optimal()
            && best.is_none_or(|b| {
                sol.objective_value > solutions[b].objective_value + TIE_TOL
            })
        {
            best = Some(k);
        }
    }
    let k = best.ok_or_else(|| Error::Solver("no soft-margin program was feasible".into()))?;
    let sol = &solutions[k];
    Ok(SvmModel {
        omega: canonicalize(sol.x[..e].to_vec())?,
        assignment: assignments[k],
        margin: sol.x[e],
        mode: Mode::Soft,
        c: Some(c),
        slack_summary: Some(slack_summary(sample, &sol.x)),
        objective: Some(sol.objective_value),
        degenerate: false,
    })
}

/// Label 0 when `(x+ω)_iP >= (x+ω)_iQ` (ties within 1e-9 go to 0), else 1.
pub fn classify(model: &SvmModel, x: &TropicalPoint) -> Result<u8> {
    model.omega.check_dim(x)?;
    let w = model.omega.coords();
    let v = x.coords();
    let (ip, iq) = (model.assignment.i_p, model.assignment.i_q);
    Ok(if v[ip] + w[ip] >= v[iq] + w[iq] - TIE_TOL {
        0
    } else {
        1
    })
}

/// Fraction of correctly labelled points.
pub fn accuracy(model: &SvmModel, sample: &LabeledSample) -> Result<f64> {
    if sample.points.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let mut hits = 0;
    for (p, &l) in sample.points.iter().zip(&sample.labels) {
        if classify(model, p)? == l {
            hits += 1;
        }
    }
    Ok(hits as f64 / sample.points.len() as f64)
}
