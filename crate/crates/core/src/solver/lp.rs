//! Dense simplex on a condensed (Tucker) tableau.
//!
//! Every program is first rewritten as `max c·p  s.t.  A p ≤ b, p ≥ 0`:
//! bounded variables are shifted, free variables are split into a positive
//! and a negative part, `≥` rows are negated and equalities become a pair of
//! inequalities. The tableau keeps one row per inequality and one column per
//! nonbasic variable, so its size never depends on slack columns. Phase one
//! adds a single auxiliary column; both phases pivot by Bland's rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{FEAS_TOL, PIVOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; `None` means unbounded on that side.
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl LinearProgram {
    /// All variables start free.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![(None, None); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.bounds[var] = (lower, upper);
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::MalformedLp("no variables".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp(
                "non-finite objective coefficient".into(),
            ));
        }
        if self.bounds.len() != n {
            return Err(Error::MalformedLp(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (k, (lo, hi)) in self.bounds.iter().enumerate() {
            let bad = |b: &Option<f64>| b.is_some_and(|x| !x.is_finite());
            if bad(lo) || bad(hi) {
                return Err(Error::MalformedLp(format!(
                    "non-finite bound on variable {k}"
                )));
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                if l > h {
                    return Err(Error::MalformedLp(format!(
                        "empty bound interval on variable {k}"
                    )));
                }
            }
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedLp(format!(
                    "row {r} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::MalformedLp(format!(
                    "row {r} has a non-finite entry"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    /// Variable assignment; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub pivots: usize,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

const MAX_PIVOTS: usize = 1_000_000;

/// How an original variable is recovered from standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + sign * p[col]`
    Single { col: usize, offset: f64, sign: f64 },
    /// `x = p[pos] - p[neg]`
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    /// Row-major `m x n`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    m: usize,
    n: usize,
    maps: Vec<VarMap>,
}

fn to_standard_form(lp: &LinearProgram) -> StandardForm {
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut n = 0;
    // Upper-bound rows generated by doubly bounded variables: (col, width).
    let mut box_rows = Vec::new();
    for &(lo, hi) in &lp.bounds {
        match (lo, hi) {
            (Some(l), Some(h)) => {
                maps.push(VarMap::Single {
                    col: n,
                    offset: l,
                    sign: 1.0,
                });
                box_rows.push((n, h - l));
                n += 1;
            }
            (Some(l), None) => {
                maps.push(VarMap::Single {
                    col: n,
                    offset: l,
                    sign: 1.0,
                });
                n += 1;
            }
            (None, Some(h)) => {
                maps.push(VarMap::Single {
                    col: n,
                    offset: h,
                    sign: -1.0,
                });
                n += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split { pos: n, neg: n + 1 });
                n += 2;
            }
        }
    }

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut push_row = |coeffs: &[f64], rhs: f64, flip: bool| {
        let s = if flip { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n];
        let mut shift = 0.0;
        for (k, &coef) in coeffs.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            match maps[k] {
                VarMap::Single { col, offset, sign } => {
                    row[col] += s * coef * sign;
                    shift += coef * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += s * coef;
                    row[neg] -= s * coef;
                }
            }
        }
        a.extend_from_slice(&row);
        b.push(s * (rhs - shift));
    };
    for con in &lp.constraints {
        match con.relation {
            Relation::Le => push_row(&con.coeffs, con.rhs, false),
            Relation::Ge => push_row(&con.coeffs, con.rhs, true),
            Relation::Eq => {
                push_row(&con.coeffs, con.rhs, false);
                push_row(&con.coeffs, con.rhs, true);
            }
        }
    }
    let mut m = b.len();
    for (col, width) in box_rows {
        let mut row = vec![0.0; n];
        row[col] = 1.0;
        a.extend_from_slice(&row);
        b.push(width);
        m += 1;
    }

    let s = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut c = vec![0.0; n];
    for (k, &coef) in lp.objective.iter().enumerate() {
        match maps[k] {
            VarMap::Single { col, sign, .. } => c[col] += s * coef * sign,
            VarMap::Split { pos, neg } => {
                c[pos] += s * coef;
                c[neg] -= s * coef;
            }
        }
    }
    StandardForm {
        a,
        b,
        c,
        m,
        n,
        maps,
    }
}

/// Condensed tableau: basic row `i` reads `x_{basic[i]} = b_i - Σ_j a_ij x_{nonbasic[j]}`
/// and the objective reads `z = v + Σ_j c_j x_{nonbasic[j]}`.
struct Tableau {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    v: f64,
    m: usize,
    cols: usize,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
    /// Smallest reduced cost that counts as improving.
    cost_tol: f64,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, s: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::Solver("pivot limit exceeded".into()));
        }
        let cols = self.cols;
        let piv = self.at(r, s);
        let inv = 1.0 / piv;
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for (j, x) in row.iter_mut().enumerate() {
                if j != s {
                    *x *= inv;
                }
            }
            row[s] = inv;
        }
        self.b[r] *= inv;
        let pivot_row: Vec<f64> = self.a[r * cols..(r + 1) * cols].to_vec();
        let br = self.b[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * cols + s];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[i * cols..(i + 1) * cols];
            for (j, x) in row.iter_mut().enumerate() {
                if j != s {
                    *x -= f * pivot_row[j];
                }
            }
            row[s] = -f * inv;
            self.b[i] -= f * br;
        }
        let f = self.c[s];
        if f != 0.0 {
            for j in 0..cols {
                if j != s {
                    self.c[j] -= f * pivot_row[j];
                }
            }
            self.c[s] = -f * inv;
            self.v += f * br;
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[s]);
        Ok(())
    }

    /// Ratio test for entering column `s`; ties go to `prefer`, then to the
    /// smallest basic label.
    fn leaving_row(&self, s: usize, prefer: Option<usize>) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, s);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[i].max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                    if (!tie && ratio < br) || (tie && self.tie_break(i, bi, prefer)) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn tie_break(&self, i: usize, incumbent: usize, prefer: Option<usize>) -> bool {
        if let Some(p) = prefer {
            if self.basic[incumbent] == p {
                return false;
            }
            if self.basic[i] == p {
                return true;
            }
        }
        self.basic[i] < self.basic[incumbent]
    }

    /// Primal simplex with Bland's rule from a feasible tableau.
    fn run(&mut self, prefer_leaving: Option<usize>) -> Result<Outcome> {
        loop {
            let mut entering: Option<usize> = None;
            for j in 0..self.cols {
                if self.c[j] > self.cost_tol
                    && entering.is_none_or(|e| self.nonbasic[j] < self.nonbasic[e])
                {
                    entering = Some(j);
                }
            }
            let Some(s) = entering else {
                return Ok(Outcome::Optimal);
            };
            match self.leaving_row(s, prefer_leaving) {
                Some(r) => self.pivot(r, s)?,
                None => return Ok(Outcome::Unbounded),
            }
        }
    }
}

/// Solves `lp` with a deterministic two-phase simplex (Bland's rule).
///
/// Infeasibility and unboundedness are reported through [`Status`]; only a
/// malformed program or an exhausted pivot budget is an error.
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution> {
    lp.validate()?;
    let sf = to_standard_form(lp);
    let (m, n) = (sf.m, sf.n);
    let aux = n + m;

    let needs_phase_one = sf.b.iter().any(|&bi| bi < -FEAS_TOL);
    let cols = if needs_phase_one { n + 1 } else { n };
    let mut a = vec![0.0; m * cols];
    for i in 0..m {
        a[i * cols..i * cols + n].copy_from_slice(&sf.a[i * n..(i + 1) * n]);
        if needs_phase_one {
            a[i * cols + n] = -1.0;
        }
    }
    let mut nonbasic: Vec<usize> = (0..n).collect();
    if needs_phase_one {
        nonbasic.push(aux);
    }
    let mut t = Tableau {
        a,
        b: sf.b.clone(),
        c: vec![0.0; cols],
        v: 0.0,
        m,
        cols,
        basic: (n..n + m).collect(),
        nonbasic,
        pivots: 0,
        cost_tol: PIVOT_TOL,
    };

    if needs_phase_one {
        // maximize -x_aux
        t.c[n] = -1.0;
        let mut r = 0;
        for i in 1..m {
            if t.b[i] < t.b[r] {
                r = i;
            }
        }
        t.pivot(r, n)?;
        t.run(Some(aux))?;
        if t.v < -FEAS_TOL {
            return Ok(Solution {
                status: Status::Infeasible,
                x: Vec::new(),
                objective_value: f64::NAN,
                pivots: t.pivots,
            });
        }
        if let Some(r) = t.basic.iter().position(|&l| l == aux) {
            // Degenerate: aux is basic at level zero; swap it out.
            let mut s = None;
            for j in 0..t.cols {
                let v = t.at(r, j).abs();
                if v > PIVOT_TOL && s.is_none_or(|(_, best)| v > best) {
                    s = Some((j, v));
                }
            }
            match s {
                Some((s, _)) => t.pivot(r, s)?,
                None => {
                    return Err(Error::Solver("auxiliary variable stuck in basis".into()));
                }
            }
        }
        let aux_col = t
            .nonbasic
            .iter()
            .position(|&l| l == aux)
            .expect("aux is nonbasic");
        drop_column(&mut t, aux_col);
        for bi in t.b.iter_mut() {
            if *bi < 0.0 {
                *bi = 0.0;
            }
        }
    }

    // Express the real objective over the current nonbasic variables.
    t.cost_tol = PIVOT_TOL * sf.c.iter().fold(1.0, |m: f64, c| m.max(c.abs()));
    let label_cost = |l: usize| if l < n { sf.c[l] } else { 0.0 };
    t.v = 0.0;
    for j in 0..t.cols {
        t.c[j] = label_cost(t.nonbasic[j]);
    }
    for i in 0..m {
        let cb = label_cost(t.basic[i]);
        if cb == 0.0 {
            continue;
        }
        t.v += cb * t.b[i];
        for j in 0..t.cols {
            t.c[j] -= cb * t.at(i, j);
        }
    }

    if let Outcome::Unbounded = t.run(None)? {
        return Ok(Solution {
            status: Status::Unbounded,
            x: Vec::new(),
            objective_value: match lp.sense {
                Sense::Maximize => f64::INFINITY,
                Sense::Minimize => f64::NEG_INFINITY,
            },
            pivots: t.pivots,
        });
    }

    let mut p = vec![0.0; n];
    for (i, &l) in t.basic.iter().enumerate() {
        if l < n {
            p[l] = t.b[i].max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .maps
        .iter()
        .map(|map| match *map {
            VarMap::Single { col, offset, sign } => offset + sign * p[col],
            VarMap::Split { pos, neg } => p[pos] - p[neg],
        })
        .collect();
    let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Solution {
        status: Status::Optimal,
        x,
        objective_value,
        pivots: t.pivots,
    })
}

fn drop_column(t: &mut Tableau, col: usize) {
    let old = t.cols;
    let mut a = Vec::with_capacity(t.m * (old - 1));
    for i in 0..t.m {
        for j in 0..old {
            if j != col {
                a.push(t.a[i * old + j]);
            }
        }
    }
    t.a = a;
    t.c.remove(col);
    t.nonbasic.remove(col);
    t.cols = old - 1;
}

/// Largest violation of any constraint or bound by `x`.
pub fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for con in &lp.constraints {
        let lhs: f64 = con.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let viol = match con.relation {
            Relation::Le => lhs - con.rhs,
            Relation::Ge => con.rhs - lhs,
            Relation::Eq => (lhs - con.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    for (v, (lo, hi)) in x.iter().zip(&lp.bounds) {
        if let Some(l) = lo {
            worst = worst.max(l - v);
        }
        if let Some(h) = hi {
            worst = worst.max(v - h);
        }
    }
    worst
}
