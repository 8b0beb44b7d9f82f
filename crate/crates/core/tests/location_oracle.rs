mod common;

use common::{frechet_value, fw_value, grid_min_3d, lattice_sample, pt, refine_min_3d};
use rand::Rng;
use tropstat::datagen::{simulate_ultrametrics, SimConfig};
use tropstat::location::{
    check_ultrametric_closure, closure_report, fermat_weber, frechet_mean, frechet_objective,
    fw_objective,
};
use tropstat::tropical::trop_distance;
use tropstat::TropicalPoint;

fn ultrametric_sample(n_leaves: usize, seed: u64, count: usize) -> Vec<TropicalPoint> {
    let cfg = SimConfig {
        n_leaves,
        height: 1.0,
        seed,
        count,
    };
    simulate_ultrametrics(&cfg)
        .unwrap()
        .iter()
        .map(|u| u.to_point().unwrap())
        .collect()
}

#[test]
fn fermat_weber_matches_grid_oracle() {
    let mut r = common::rng(11);
    for _ in 0..50 {
        let n = r.gen_range(1..=10);
        let sample = lattice_sample(&mut r, n, 20, 0.1);
        let res = fermat_weber(&sample).unwrap();
        let (grid, _) = grid_min_3d(&sample, 0.01, 20, |z| fw_value(z, &sample));
        assert!(
            (res.objective - grid).abs() <= 1e-3,
            "LP {} vs grid {}",
            res.objective,
            grid
        );
        assert!((fw_objective(&res.point, &sample).unwrap() - res.objective).abs() <= 1e-6);
        for v in &sample {
            assert!(res.objective <= fw_objective(v, &sample).unwrap() + 1e-9);
        }
    }
}

#[test]
fn two_point_fermat_weber_is_the_distance() {
    let mut r = common::rng(3);
    for _ in 0..50 {
        let e = r.gen_range(3..8);
        let u = pt(&(0..e).map(|_| r.gen_range(-5.0..5.0)).collect::<Vec<_>>());
        let v = pt(&(0..e).map(|_| r.gen_range(-5.0..5.0)).collect::<Vec<_>>());
        let res = fermat_weber(&[u.clone(), v.clone()]).unwrap();
        assert!((res.objective - trop_distance(&u, &v).unwrap()).abs() <= 1e-9);
    }
    let s = [pt(&[0.0, 0.0, 0.0]), pt(&[0.0, 3.0, 1.0])];
    assert!((fermat_weber(&s).unwrap().objective - 3.0).abs() <= 1e-12);
}

#[test]
fn fermat_weber_is_shift_equivariant() {
    let mut r = common::rng(8);
    let raw: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..4).map(|_| r.gen_range(-3.0..3.0)).collect())
        .collect();
    let a: Vec<TropicalPoint> = raw.iter().map(|v| pt(v)).collect();
    let b: Vec<TropicalPoint> = raw
        .iter()
        .map(|v| {
            let c = r.gen_range(-100.0..100.0);
            pt(&v.iter().map(|x| x + c).collect::<Vec<_>>())
        })
        .collect();
    let (ra, rb) = (fermat_weber(&a).unwrap(), fermat_weber(&b).unwrap());
    assert!((ra.objective - rb.objective).abs() <= 1e-9);
    assert!(ra.point.approx_eq(&rb.point, 1e-9));
}

#[test]
fn frechet_matches_grid_oracle() {
    let mut r = common::rng(11);
    for _ in 0..50 {
        let n = r.gen_range(1..=10);
        let sample = lattice_sample(&mut r, n, 20, 0.1);
        let res = frechet_mean(&sample).unwrap();
        let grid = refine_min_3d(&sample, |z| frechet_value(z, &sample));
        assert!(
            (res.objective - grid).abs() <= 1e-3,
            "descent {} vs grid {}",
            res.objective,
            grid
        );
        assert!(res.objective <= grid + 1e-6);
        for v in &sample {
            assert!(res.objective <= frechet_objective(v, &sample).unwrap() + 1e-8);
        }
    }
}

#[test]
fn frechet_of_the_segment_example() {
    let s = [pt(&[0.0, 0.0, 0.0]), pt(&[0.0, 3.0, 1.0])];
    let res = frechet_mean(&s).unwrap();
    let grid = refine_min_3d(&s, |z| frechet_value(z, &s));
    assert!((res.objective - grid).abs() <= 1e-3);
}

/// The optimum is always attained inside the space of ultrametrics, but not
/// necessarily at the vertex the simplex method returns.
#[test]
fn fermat_weber_optimum_is_attained_on_ultrametrics() {
    let mut r = common::rng(21);
    let mut vertex_inside = 0;
    for k in 0..100u64 {
        let n_leaves = if k % 2 == 0 { 4 } else { 5 };
        let count = r.gen_range(3..=10);
        let sample = ultrametric_sample(n_leaves, 1000 + k, count);
        let res = fermat_weber(&sample).unwrap();
        let restricted = common::fw_optimum_over_ultrametrics(&sample, n_leaves);
        assert!(
            (restricted - res.objective).abs() <= 1e-7,
            "sample {k}: {restricted} vs {}",
            res.objective
        );
        let report = closure_report(&res, n_leaves, 1e-6).unwrap();
        assert_eq!(report.raw, report.shifted);
        if check_ultrametric_closure(&res, n_leaves, 1e-6).unwrap() {
            vertex_inside += 1;
        }
    }
    println!("simplex vertices passing the three-point check: {vertex_inside}/100");
}

#[test]
fn fermat_weber_vertex_can_leave_the_ultrametrics() {
    // seed 1005, 6 trees on 5 leaves: the optimal vertex breaks the condition
    let sample = ultrametric_sample(5, 1005, 6);
    let res = fermat_weber(&sample).unwrap();
    assert!(!check_ultrametric_closure(&res, 5, 1e-3).unwrap());
    let restricted = common::fw_optimum_over_ultrametrics(&sample, 5);
    assert!((restricted - res.objective).abs() <= 1e-7);
}

#[test]
fn single_ultrametric_is_its_own_fermat_weber_point() {
    let sample = ultrametric_sample(5, 3, 1);
    let res = fermat_weber(&sample).unwrap();
    assert!(res.objective.abs() <= 1e-9);
    assert!(check_ultrametric_closure(&res, 5, 1e-6).unwrap());
}

#[test]
fn frechet_of_ultrametrics_is_reported() {
    let mut inside = 0;
    for k in 0..20u64 {
        let sample = ultrametric_sample(4, 500 + k, 6);
        let res = frechet_mean(&sample).unwrap();
        if check_ultrametric_closure(&res, 4, 1e-6).unwrap() {
            inside += 1;
        }
    }
    println!("Fréchet means passing the three-point check: {inside}/20");
}
