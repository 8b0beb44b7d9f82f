mod common;

use common::{best_margin_by_enumeration, pt, svm_fixture};
use rand::Rng;
use tropstat::svm::{accuracy, classify, train_hard, train_soft, LabeledSample};
use tropstat::tropical::{distance_to_hyperplane, TropicalHyperplane};
use tropstat::Error;

#[test]
fn hard_margin_separates_the_fixture() {
    let s = svm_fixture();
    assert_eq!(s.points.len(), 20);
    let m = train_hard(&s).unwrap();
    assert!(m.margin > 0.0);
    assert_eq!(accuracy(&m, &s).unwrap(), 1.0);
    let h = TropicalHyperplane::new(m.omega.clone());
    let closest = s
        .points
        .iter()
        .map(|x| distance_to_hyperplane(x, &h).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(
        closest >= m.margin - 1e-6,
        "certificate {closest} below margin {}",
        m.margin
    );
}

#[test]
fn margin_is_the_best_over_all_assignments() {
    let s = svm_fixture();
    let m = train_hard(&s).unwrap();
    let best = best_margin_by_enumeration(&s);
    assert!((m.margin - best).abs() <= 1e-9, "{} vs {}", m.margin, best);

    let toy = LabeledSample::new(
        vec![pt(&[0.0, 10.0, 0.0]), pt(&[0.0, 0.0, 10.0])],
        vec![0, 1],
    )
    .unwrap();
    let m = train_hard(&toy).unwrap();
    assert!((m.margin - best_margin_by_enumeration(&toy)).abs() <= 1e-9);
}

#[test]
fn large_penalty_reproduces_hard_margin() {
    let s = svm_fixture();
    let hard = train_hard(&s).unwrap();
    let soft = train_soft(&s, 1e6).unwrap();
    assert!(!soft.degenerate);
    assert!((soft.margin - hard.margin).abs() <= 1e-4);
    assert!(soft.slack_summary.unwrap().total() < 1e-6);
    for x in &s.points {
        assert_eq!(classify(&soft, x).unwrap(), classify(&hard, x).unwrap());
    }
}

#[test]
fn soft_objective_plateaus_at_the_hard_margin() {
    let s = svm_fixture();
    let hard = train_hard(&s).unwrap();
    let objs: Vec<f64> = [1.0, 10.0, 1e3, 1e6]
        .iter()
        .map(|&c| train_soft(&s, c).unwrap().objective.unwrap())
        .collect();
    // a heavier penalty can only lower z - C·Σslack, and the hard solution
    // keeps every value at or above its margin
    for w in objs.windows(2) {
        assert!(w[1] <= w[0] + 1e-9);
    }
    for o in &objs {
        assert!(*o >= hard.margin - 1e-6);
    }
    assert!((objs[3] - hard.margin).abs() <= 1e-4);
}

#[test]
fn one_mislabel_is_absorbed_by_slack() {
    for k in 0..20 {
        let mut s = svm_fixture();
        s.labels[k] = 1 - s.labels[k];
        let m = train_soft(&s, 0.2).unwrap();
        assert!(!m.degenerate);
        assert!(m.margin > 0.0);
        if train_hard(&s).err() == Some(Error::NotSeparable) {
            assert!(m.slack_summary.unwrap().total() > 0.0);
        }
        assert!(accuracy(&m, &s).unwrap() >= 19.0 / 20.0, "mislabel at {k}");
    }
}

#[test]
fn heavy_penalty_with_a_mislabel_collapses_the_margin() {
    let mut s = svm_fixture();
    s.labels[3] = 1 - s.labels[3];
    assert_eq!(train_hard(&s).err(), Some(Error::NotSeparable));
    let m = train_soft(&s, 1e6).unwrap();
    assert!(m.margin.abs() <= 1e-9);
    assert!(m.slack_summary.unwrap().total() <= 1e-9);
}

#[test]
fn training_is_translation_invariant() {
    let s = svm_fixture();
    let mut r = common::rng(4);
    let shifted = LabeledSample::new(
        s.points
            .iter()
            .map(|p| {
                let c = r.gen_range(-50.0..50.0);
                pt(&p.coords().iter().map(|x| x + c).collect::<Vec<_>>())
            })
            .collect(),
        s.labels.clone(),
    )
    .unwrap();
    let a = train_hard(&s).unwrap();
    let b = train_hard(&shifted).unwrap();
    assert!(a.omega.approx_eq(&b.omega, 1e-9));
    assert_eq!(a.assignment, b.assignment);
    for x in &s.points {
        assert_eq!(classify(&a, x).unwrap(), classify(&b, x).unwrap());
    }
}

#[test]
fn model_json_round_trip() {
    let m = train_hard(&svm_fixture()).unwrap();
    let json = serde_json::to_string(&m).unwrap();
    for key in [
        "\"omega\"",
        "\"assignment\"",
        "\"margin\"",
        "\"mode\":\"HARD\"",
        "\"iP\"",
    ] {
        assert!(json.contains(key), "{json}");
    }
    let back: tropstat::svm::SvmModel = serde_json::from_str(&json).unwrap();
    assert_eq!(back, m);
}
