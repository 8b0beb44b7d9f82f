//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropstat::tree::PhyloTree;
use tropstat::TropicalPoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(v: &[f64]) -> TropicalPoint {
    TropicalPoint::new(v.to_vec()).unwrap()
}

/// `max(v - w) - min(v - w)`, written out directly.
pub fn dtr(v: &[f64], w: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..v.len() {
        hi = hi.max(v[i] - w[i]);
        lo = lo.min(v[i] - w[i]);
    }
    hi - lo
}

/// Points of `R^3` with coordinates on the `step` lattice in `[-span, span]`.
pub fn lattice_sample(r: &mut ChaCha8Rng, n: usize, span: i64, step: f64) -> Vec<TropicalPoint> {
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..3)
                .map(|_| r.gen_range(-span..=span) as f64 * step)
                .collect();
            pt(&v)
        })
        .collect()
}

/// Exhaustive search of `f(0, a, b)` on the `step` lattice covering the
/// canonical bounding box of the sample (padded by `pad` steps).
pub fn grid_min_3d<F: Fn(&[f64]) -> f64>(
    sample: &[TropicalPoint],
    step: f64,
    pad: i64,
    f: F,
) -> (f64, [f64; 3]) {
    let bound = |k: usize| {
        let lo = sample
            .iter()
            .map(|p| p.coords()[k])
            .fold(f64::INFINITY, f64::min);
        let hi = sample
            .iter()
            .map(|p| p.coords()[k])
            .fold(f64::NEG_INFINITY, f64::max);
        (
            (lo / step).floor() as i64 - pad,
            (hi / step).ceil() as i64 + pad,
        )
    };
    let (a0, a1) = bound(1);
    let (b0, b1) = bound(2);
    let mut best = (f64::INFINITY, [0.0; 3]);
    for a in a0..=a1 {
        for b in b0..=b1 {
            let z = [0.0, a as f64 * step, b as f64 * step];
            let v = f(&z);
            if v < best.0 {
                best = (v, z);
            }
        }
    }
    best
}

/// Coarse-to-fine grid minimization of a convex function on the slice
/// `z_0 = 0`.
pub fn refine_min_3d<F: Fn(&[f64]) -> f64>(sample: &[TropicalPoint], f: F) -> f64 {
    let (mut best, mut z) = grid_min_3d(sample, 0.01, 50, &f);
    let mut step = 0.01;
    for _ in 0..3 {
        let fine = step / 10.0;
        let center = z;
        for a in -30..=30 {
            for b in -30..=30 {
                let c = [
                    0.0,
                    center[1] + a as f64 * fine,
                    center[2] + b as f64 * fine,
                ];
                let v = f(&c);
                if v < best {
                    best = v;
                    z = c;
                }
            }
        }
        step = fine;
    }
    best
}

pub fn fw_value(z: &[f64], sample: &[TropicalPoint]) -> f64 {
    sample.iter().map(|v| dtr(z, v.coords())).sum()
}

pub fn frechet_value(z: &[f64], sample: &[TropicalPoint]) -> f64 {
    sample.iter().map(|v| dtr(z, v.coords()).powi(2)).sum()
}

/// Nearest-point map onto a tropical polytope, from its defining formula.
pub fn project(x: &[f64], vertices: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; x.len()];
    for d in vertices {
        let lam = x
            .iter()
            .zip(d)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        for k in 0..x.len() {
            out[k] = out[k].max(lam + d[k]);
        }
    }
    out
}

/// Best restricted principal polytope by trying every `s`-subset.
pub fn exhaustive_pca(sample: &[TropicalPoint], s: usize) -> f64 {
    let n = sample.len();
    let raw: Vec<Vec<f64>> = sample.iter().map(|p| p.coords().to_vec()).collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let verts: Vec<Vec<f64>> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| raw[i].clone())
            .collect();
        let v: f64 = raw.iter().map(|u| dtr(u, &project(u, &verts))).sum();
        best = best.min(v);
    }
    best
}

/// Clusters (leaf sets below internal nodes) of a rooted tree.
pub fn clusters(t: &PhyloTree) -> BTreeSet<BTreeSet<String>> {
    fn below(t: &PhyloTree, v: usize, out: &mut BTreeSet<BTreeSet<String>>) -> BTreeSet<String> {
        let node = t.node(v);
        if node.children.is_empty() {
            return [node.name.clone().unwrap()].into();
        }
        let mut set = BTreeSet::new();
        for &c in &node.children {
            set.extend(below(t, c, out));
        }
        out.insert(set.clone());
        set
    }
    let mut out = BTreeSet::new();
    below(t, t.root(), &mut out);
    out
}

/// Every rooted binary topology on the given leaves, as cluster sets, built
/// by attaching leaves one at a time to every edge (and above the root).
pub fn all_rooted_binary(leaves: &[&str]) -> Vec<BTreeSet<BTreeSet<String>>> {
    #[derive(Clone)]
    enum T {
        Leaf(String),
        Node(Box<T>, Box<T>),
    }
    fn attach(t: &T, leaf: &str) -> Vec<T> {
        let mut out = vec![T::Node(Box::new(t.clone()), Box::new(T::Leaf(leaf.into())))];
        if let T::Node(l, r) = t {
            for nl in attach(l, leaf) {
                out.push(T::Node(Box::new(nl), r.clone()));
            }
            for nr in attach(r, leaf) {
                out.push(T::Node(l.clone(), Box::new(nr)));
            }
        }
        out
    }
    fn collect(t: &T, out: &mut BTreeSet<BTreeSet<String>>) -> BTreeSet<String> {
        match t {
            T::Leaf(s) => [s.clone()].into(),
            T::Node(l, r) => {
                let mut s = collect(l, out);
                s.extend(collect(r, out));
                out.insert(s.clone());
                s
            }
        }
    }
    let mut trees = vec![T::Leaf(leaves[0].into())];
    for leaf in &leaves[1..] {
        trees = trees.iter().flat_map(|t| attach(t, leaf)).collect();
    }
    trees
        .iter()
        .map(|t| {
            let mut c = BTreeSet::new();
            collect(t, &mut c);
            c
        })
        .collect()
}

pub type Q = BigRational;

pub fn q(x: i64) -> Q {
    BigRational::from_integer(BigInt::from(x))
}

/// Exact optimum of `max c·x s.t. A x <= b` (rows include any bounds) by
/// enumerating every basis of `n` tight rows. `None` when infeasible; the
/// feasible region must be bounded.
pub fn vertex_enumeration(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> Option<Q> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<Q> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        if let Some(x) = solve_square(
            &idx.iter().map(|&r| a[r].clone()).collect::<Vec<_>>(),
            &idx.iter().map(|&r| b[r]).collect::<Vec<_>>(),
        ) {
            let feasible = (0..m).all(|r| {
                let lhs: Q = (0..n)
                    .map(|j| q(a[r][j]) * &x[j])
                    .fold(Q::zero(), |s, t| s + t);
                lhs <= q(b[r])
            });
            if feasible {
                let val: Q = (0..n)
                    .map(|j| q(c[j]) * &x[j])
                    .fold(Q::zero(), |s, t| s + t);
                if best.as_ref().is_none_or(|bv| val > *bv) {
                    best = Some(val);
                }
            }
        }
        let Some(k) = (0..n).rev().find(|&k| idx[k] < m - n + k) else {
            return best;
        };
        idx[k] += 1;
        for t in k + 1..n {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn solve_square(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<Q>> {
    let n = b.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| a[i].iter().map(|&v| q(v)).chain([q(b[i])]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap()
}

/// Minimum Fermat-Weber objective over the space of ultrametrics on
/// `n_leaves` leaves, one LP per rooted binary topology cone. Each cone is
/// parametrized by the heights of its clusters, nondecreasing towards the
/// root; pair `(i, j)` takes the height of the smallest cluster holding both.
pub fn fw_optimum_over_ultrametrics(sample: &[TropicalPoint], n_leaves: usize) -> f64 {
    use tropstat::solver::{solve_lp, LinearProgram, Relation, Sense, Status};
    let names: Vec<String> = (0..n_leaves)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut best = f64::INFINITY;
    for topo in all_rooted_binary(&refs) {
        let cl: Vec<Vec<usize>> = topo
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| names.iter().position(|y| y == x).unwrap())
                    .collect()
            })
            .collect();
        let h = cl.len();
        let s = sample.len();
        let mut obj = vec![0.0; h + s];
        obj[h..].iter_mut().for_each(|c| *c = 1.0);
        let mut lp = LinearProgram::new(Sense::Minimize, obj);
        for k in h..h + s {
            lp.set_bounds(k, Some(0.0), None);
        }
        let mut lca = Vec::new();
        for i in 0..n_leaves {
            for j in i + 1..n_leaves {
                lca.push(
                    (0..h)
                        .filter(|&c| cl[c].contains(&i) && cl[c].contains(&j))
                        .min_by_key(|&c| cl[c].len())
                        .unwrap(),
                );
            }
        }
        for a in 0..h {
            for b in 0..h {
                if cl[a].len() < cl[b].len() && cl[a].iter().all(|x| cl[b].contains(x)) {
                    let mut row = vec![0.0; h + s];
                    row[a] = 1.0;
                    row[b] = -1.0;
                    lp.add_constraint(row, Relation::Le, 0.0);
                }
            }
        }
        let e = lca.len();
        for (i, v) in sample.iter().enumerate() {
            let v = v.coords();
            for j in 0..e {
                for k in 0..e {
                    if j == k {
                        continue;
                    }
                    let mut row = vec![0.0; h + s];
                    row[lca[j]] += 1.0;
                    row[lca[k]] -= 1.0;
                    row[h + i] = -1.0;
                    lp.add_constraint(row, Relation::Le, v[j] - v[k]);
                }
            }
        }
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        best = best.min(sol.objective_value);
    }
    best
}

/// Seeded two-class sample on 4 leaves, 10 points per class, class B on a
/// distinct topology and twice as tall.
pub fn svm_fixture() -> tropstat::svm::LabeledSample {
    use tropstat::datagen::{make_two_class_sample, SimConfig};
    let a = SimConfig {
        n_leaves: 4,
        height: 1.0,
        seed: 11,
        count: 10,
    };
    let b = SimConfig {
        n_leaves: 4,
        height: 1.0,
        seed: 12,
        count: 10,
    };
    let data = make_two_class_sample(&a, &b, 1.0).unwrap();
    tropstat::svm::LabeledSample::from_ultrametrics(&data).unwrap()
}

/// Three-point condition over every triple of leaves, with pairs listed in
/// lexicographic order.
pub fn is_ultrametric(values: &[f64], n_leaves: usize, tol: f64) -> bool {
    let mut at = vec![vec![0.0; n_leaves]; n_leaves];
    let mut k = 0;
    for i in 0..n_leaves {
        for j in i + 1..n_leaves {
            at[i][j] = values[k];
            at[j][i] = values[k];
            k += 1;
        }
    }
    for i in 0..n_leaves {
        for j in i + 1..n_leaves {
            for l in j + 1..n_leaves {
                let mut t = [at[i][j], at[i][l], at[j][l]];
                t.sort_by(f64::total_cmp);
                if t[2] - t[1] > tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Largest margin over every class-level sector assignment, one hard-margin
/// program per assignment built from the constraint families directly.
pub fn best_margin_by_enumeration(sample: &tropstat::svm::LabeledSample) -> f64 {
    use tropstat::solver::{solve_lp, LinearProgram, Relation, Sense, Status};
    let e = sample.dim();
    let mut best = f64::NEG_INFINITY;
    for ip in 0..e {
        for jp in 0..e {
            for iq in 0..e {
                for jq in 0..e {
                    if ip == jp || iq == jq || ip == iq {
                        continue;
                    }
                    let mut obj = vec![0.0; e + 1];
                    obj[e] = 1.0;
                    let mut lp = LinearProgram::new(Sense::Maximize, obj);
                    for (x, &lab) in sample.points.iter().zip(&sample.labels) {
                        let x = x.coords();
                        let (i, j) = if lab == 0 { (ip, jp) } else { (iq, jq) };
                        // z <= (x_i + ω_i) - (x_j + ω_j)
                        let mut r = vec![0.0; e + 1];
                        r[e] = 1.0;
                        r[i] -= 1.0;
                        r[j] += 1.0;
                        lp.add_constraint(r, Relation::Le, x[i] - x[j]);
                        // (x_j + ω_j) >= (x_l + ω_l)
                        for l in (0..e).filter(|&l| l != i && l != j) {
                            let mut r = vec![0.0; e + 1];
                            r[l] = 1.0;
                            r[j] = -1.0;
                            lp.add_constraint(r, Relation::Le, x[j] - x[l]);
                        }
                    }
                    let sol = solve_lp(&lp).unwrap();
                    if sol.status == Status::Optimal {
                        best = best.max(sol.objective_value);
                    }
                }
            }
        }
    }
    best
}
