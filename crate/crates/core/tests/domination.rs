use proptest::prelude::*;

use taildom::domination::{
    check_weak_domination, dual_ball_extremes, symmetrized_product, thin_and_scale, DirectionSet, DominationVerdict,
    TGrid,
};
use taildom::special::gaussian_abs_survival;
use taildom::stats::{mean_with_ci, EmpiricalTail};
use taildom::stochastic::{sample_norms, sample_projections, NormTag, RandomVectorModel, ScalarDist};

fn gauss(d: usize) -> RandomVectorModel {
    RandomVectorModel::iid(d, ScalarDist::StandardGaussian, NormTag::SupNorm)
}

fn probe() -> DirectionSet {
    DirectionSet::with_random(8)
}

fn zoo() -> Vec<RandomVectorModel> {
    vec![
        gauss(3),
        RandomVectorModel::iid(2, ScalarDist::Rademacher, NormTag::SupNorm),
        RandomVectorModel::series(vec![vec![1.0, 0.5], vec![-0.3, 2.0], vec![0.0, 1.0]], ScalarDist::ExpPower { p: 1.5 }, NormTag::SupNorm),
        RandomVectorModel::product(gauss(2), 2),
    ]
}

#[test]
fn domination_is_reflexive() {
    for (i, x) in zoo().iter().enumerate() {
        let r = check_weak_domination(x, x, &probe(), &TGrid::default(), 20_000, 0.01, i as u64).unwrap();
        assert_ne!(r.verdict, DominationVerdict::Violated, "model {i}");
    }
}

#[test]
fn shrinking_never_violates() {
    for a in [1.5, 3.0] {
        for x in zoo() {
            let r = check_weak_domination(&x, &x.clone().scaled(a), &probe(), &TGrid::default(), 20_000, 0.01, 3).unwrap();
            assert_ne!(r.verdict, DominationVerdict::Violated);
        }
    }
}

#[test]
fn doubling_is_detected_and_reproduces() {
    let x = gauss(1);
    let y = x.clone().scaled(2.0);
    let dirs = DirectionSet::DualBallExtreme;
    let mut reproduced = 0;
    for trial in 0..20u64 {
        let r = check_weak_domination(&y, &x, &dirs, &TGrid::default(), 10_000, 0.01, trial).unwrap();
        assert_eq!(r.verdict, DominationVerdict::Violated);
        assert!(r.violations().count() > 0);
        let again = check_weak_domination(&y, &x, &dirs, &TGrid::default(), 40_000, 0.01, 1000 + trial).unwrap();
        if again.verdict == DominationVerdict::Violated {
            reproduced += 1;
        }
    }
    assert!(reproduced >= 19);
}

#[test]
fn reported_violation_is_real() {
    let x = gauss(1);
    let r = check_weak_domination(&x.clone().scaled(2.0), &x, &DirectionSet::DualBallExtreme, &TGrid::default(), 10_000, 0.01, 5).unwrap();
    for v in r.violations() {
        // P(|2g| >= t) > P(|g| >= t) for every t > 0
        assert!(gaussian_abs_survival(v.t / 2.0) > gaussian_abs_survival(v.t));
        assert!(v.survival_y.lower > v.survival_x.upper);
    }
}

#[test]
fn thin_and_scale_law() {
    let y = thin_and_scale(&gauss(1), 2.0, 1.0).unwrap();
    let p = sample_projections(&y, &[vec![1.0]], 200_000, 1, 0).unwrap();
    let s = EmpiricalTail::of_abs(&p.values[0], 0.01).unwrap().survival(1.0);
    let exact = 0.5 * gaussian_abs_survival(1.0);
    assert!((exact - 0.3173 / 2.0).abs() < 1e-4);
    assert!(s.lower <= exact && exact <= s.upper);
    assert!(thin_and_scale(&gauss(1), 0.5, 1.0).is_err());
    assert!(thin_and_scale(&gauss(1), 2.0, 0.0).is_err());
}

#[test]
fn two_sided_tails_give_domination_after_thinning() {
    // P(|<u, 2X>| >= t) = P(|<u, X>| >= t / 2): c1 = 1, c2 = 2
    let x = gauss(2);
    let y = x.clone().scaled(2.0);
    let thin = thin_and_scale(&y, 1.0, 2.0).unwrap();
    let r = check_weak_domination(&thin, &x, &probe(), &TGrid::default(), 20_000, 0.01, 8).unwrap();
    assert_eq!(r.verdict, DominationVerdict::Dominated);
    let thin = thin_and_scale(&y, 3.0, 2.0).unwrap();
    let r = check_weak_domination(&thin, &x, &probe(), &TGrid::default(), 20_000, 0.01, 9).unwrap();
    assert_eq!(r.verdict, DominationVerdict::Dominated);
}

#[test]
fn symmetrized_product_halves_mean() {
    let x = gauss(2);
    let m = 200_000;
    let full = mean_with_ci(&sample_norms(&RandomVectorModel::product(x.clone(), 4), m, 1, 0).unwrap(), 0.01).unwrap();
    let half = mean_with_ci(&sample_norms(&symmetrized_product(&x, 4, 0.5).unwrap(), m, 2, 0).unwrap(), 0.01).unwrap();
    assert!((half.mean - 0.5 * full.mean).abs() <= half.half_width + 0.5 * full.half_width);
    assert!(symmetrized_product(&x, 0, 0.5).is_err());
}

#[test]
fn symmetrized_product_under_product() {
    let x = gauss(2);
    let y = symmetrized_product(&x, 4, 0.5).unwrap();
    let r = check_weak_domination(&y, &RandomVectorModel::product(x, 4), &probe(), &TGrid::default(), 20_000, 0.01, 4).unwrap();
    assert_ne!(r.verdict, DominationVerdict::Violated);
}

#[test]
fn few_samples_are_rejected() {
    let x = gauss(1);
    assert!(check_weak_domination(&x, &x, &probe(), &TGrid::default(), 999, 0.01, 0).is_err());
    assert!(check_weak_domination(&x, &x, &probe(), &TGrid::absolute(vec![]), 5000, 0.01, 0).is_err());
    assert!(check_weak_domination(&x, &gauss(2), &probe(), &TGrid::default(), 5000, 0.01, 0).is_err());
    assert!(DirectionSet::Union { sets: vec![] }.resolve(2, &NormTag::SupNorm, 0).is_err());
}

#[test]
fn reports_are_deterministic() {
    let x = zoo()[2].clone();
    let a = check_weak_domination(&x.clone().scaled(0.5), &x, &probe(), &TGrid::default(), 5000, 0.01, 77).unwrap();
    let b = check_weak_domination(&x.clone().scaled(0.5), &x, &probe(), &TGrid::default(), 5000, 0.01, 77).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_directions_are_unit(count in 1usize..40, dim in 1usize..30, seed in any::<u64>()) {
        let dirs = DirectionSet::UnitSphereRandom { count }.resolve(dim, &NormTag::EuclideanNorm, seed).unwrap();
        prop_assert_eq!(dirs.len(), count);
        for d in dirs {
            prop_assert!((NormTag::EuclideanNorm.eval(&d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_extremes_have_dual_norm_one(dim in 1usize..12, blocks in 1usize..4) {
        for norm in [NormTag::SupNorm, NormTag::SumNorm, NormTag::product(NormTag::SupNorm, blocks)] {
            let d = if matches!(norm, NormTag::ProductSup { .. }) { dim * blocks } else { dim };
            if matches!(norm, NormTag::SumNorm) && dim > 10 {
                continue;
            }
            for v in dual_ball_extremes(&norm, d).unwrap() {
                prop_assert!((norm.dual_eval(&v) - 1.0).abs() < 1e-12);
            }
        }
    }
}
