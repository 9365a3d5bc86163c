use proptest::prelude::*;

use taildom::special::gaussian_abs_survival;
use taildom::stats::{dkw_epsilon, mean_with_ci, EmpiricalTail};
use taildom::stochastic::{
    read_batch, sample_norms, sample_projections, sample_scalar, sample_vector, write_batch, NormTag, RandomVectorModel,
    ScalarDist, ScaleFn,
};

fn gauss(d: usize) -> RandomVectorModel {
    RandomVectorModel::iid(d, ScalarDist::StandardGaussian, NormTag::SupNorm)
}

fn zoo() -> Vec<RandomVectorModel> {
    let coeffs = vec![vec![1.0, -0.5, 0.25], vec![0.0, 2.0, 1.0]];
    vec![
        gauss(3),
        RandomVectorModel::iid(3, ScalarDist::Rademacher, NormTag::EuclideanNorm),
        RandomVectorModel::iid(2, ScalarDist::ExpPower { p: 1.5 }, NormTag::SumNorm),
        RandomVectorModel::series(coeffs.clone(), ScalarDist::Rademacher, NormTag::SupNorm),
        RandomVectorModel::series(coeffs, ScalarDist::ExpPower { p: 3.0 }, NormTag::SupNorm),
        RandomVectorModel::mixture(
            ScaleFn::NinePlusGauss,
            RandomVectorModel::iid(3, ScalarDist::UniformSym { halfwidth: 1.0 }, NormTag::SupNorm),
        ),
        RandomVectorModel::product(gauss(2), 3),
        RandomVectorModel::thinned(gauss(3), 0.5, 2.0),
    ]
}

#[test]
fn uniform_second_moment() {
    let v = sample_scalar(&ScalarDist::UniformSym { halfwidth: 1.0 }, 1_000_000, 3, 0).unwrap();
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let r = mean_with_ci(&sq, 0.01).unwrap();
    assert!((r.mean - 1.0 / 3.0).abs() <= 3.0 * r.standard_error);
    assert!(v.iter().all(|x| x.abs() <= 1.0));
}

#[test]
fn laplace_tail_matches_exponential() {
    let v = sample_scalar(&ScalarDist::ExpPower { p: 1.0 }, 1_000_000, 4, 0).unwrap();
    let tail = EmpiricalTail::of_abs(&v, 0.01).unwrap();
    for t in [1.0, 2.0, 3.0] {
        let s = tail.survival(t);
        let exact = (-t).exp();
        assert!(s.lower <= exact && exact <= s.upper, "t={t}: {s:?} vs {exact}");
    }
}

#[test]
fn gaussian_coordinate_tail() {
    let n = sample_norms(&gauss(1), 200_000, 5, 0).unwrap();
    let s = EmpiricalTail::new(n, 0.01).unwrap().survival(1.0);
    let exact = gaussian_abs_survival(1.0);
    assert!((exact - 0.3173).abs() < 1e-4);
    assert!(s.lower <= exact && exact <= s.upper);
}

#[test]
fn gaussian_abs_mean_within_three_se() {
    let v = sample_scalar(&ScalarDist::StandardGaussian, 1_000_000, 6, 0).unwrap();
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let r = mean_with_ci(&abs, 0.01).unwrap();
    assert!((r.mean - (2.0 / std::f64::consts::PI).sqrt()).abs() <= 3.0 * r.standard_error);
}

#[test]
fn example_x_mean_norm_below_eighteen() {
    let x = RandomVectorModel::mixture(
        ScaleFn::NinePlusGauss,
        RandomVectorModel::iid(16, ScalarDist::UniformSym { halfwidth: 1.0 }, NormTag::SupNorm),
    );
    let r = mean_with_ci(&sample_norms(&x, 100_000, 7, 0).unwrap(), 0.01).unwrap();
    let bound = 9.0 * ((2.0 / std::f64::consts::PI).sqrt() + 1.0);
    assert!(r.mean <= bound + r.half_width);
    // E max of 16 uniforms on [-1, 1] is 16/17
    assert!((r.mean - bound * 16.0 / 17.0).abs() <= 4.0 * r.standard_error);
}

#[test]
fn determinism_across_thread_counts() {
    for model in zoo() {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_vector(&model, 3000, 42, 9).unwrap());
        let b = four.install(|| sample_vector(&model, 3000, 42, 9).unwrap());
        assert_eq!(a.data, b.data);
        let dirs = vec![vec![1.0; model.dim]];
        let pa = one.install(|| sample_projections(&model, &dirs, 3000, 42, 9).unwrap());
        let pb = four.install(|| sample_projections(&model, &dirs, 3000, 42, 9).unwrap());
        assert_eq!(pa.values, pb.values);
        assert_eq!(pa.norms, pb.norms);
    }
}

#[test]
fn every_model_is_symmetric() {
    let m = 100_000;
    for (i, model) in zoo().iter().enumerate() {
        let u: Vec<f64> = (0..model.dim).map(|j| 1.0 + j as f64 * 0.5).collect();
        let p = sample_projections(model, &[u], m, 100 + i as u64, 1).unwrap();
        let pos = EmpiricalTail::new(p.values[0].clone(), 0.01).unwrap();
        let neg = EmpiricalTail::new(p.values[0].iter().map(|v| -v).collect(), 0.01).unwrap();
        // two-sample DKW: the CDFs of u.V and -u.V differ by at most 2 eps
        let eps = dkw_epsilon(m, 0.01);
        for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let t = pos.quantile(q);
            let d = (pos.survival(t).estimate - neg.survival(t).estimate).abs();
            assert!(d <= 2.0 * eps, "model {i}, t={t}: {d}");
        }
    }
}

#[test]
fn thinning_scales_survival() {
    let m = 100_000;
    let base = gauss(2);
    let thin = RandomVectorModel::thinned(base.clone(), 0.3, 1.0);
    let u = vec![vec![0.6, 0.8]];
    let pt = sample_projections(&thin, &u, m, 21, 1).unwrap();
    let tail = EmpiricalTail::of_abs(&pt.values[0], 0.01).unwrap();
    for t in [0.5, 1.0, 2.0] {
        // <u, base> is standard Gaussian
        let exact = 0.3 * gaussian_abs_survival(t);
        let s = tail.survival(t);
        assert!(s.lower <= exact && exact <= s.upper, "t={t}");
    }
}

#[test]
fn product_of_one_copy_has_base_law() {
    let base = RandomVectorModel::series(vec![vec![1.0, 2.0], vec![-1.0, 0.5]], ScalarDist::Rademacher, NormTag::SupNorm);
    let a = sample_norms(&base, 50_000, 8, 0).unwrap();
    let b = sample_norms(&RandomVectorModel::product(base, 1), 50_000, 9, 0).unwrap();
    let ta = EmpiricalTail::new(a, 0.01).unwrap();
    let tb = EmpiricalTail::new(b, 0.01).unwrap();
    for t in [0.5, 1.5, 2.5, 3.0] {
        let (sa, sb) = (ta.survival(t), tb.survival(t));
        assert!((sa.estimate - sb.estimate).abs() <= 2.0 * ta.epsilon());
    }
}

#[test]
fn product_without_product_norm_is_rejected() {
    let mut bad = RandomVectorModel::product(gauss(2), 2);
    bad.norm = NormTag::SupNorm;
    assert!(sample_vector(&bad, 10, 0, 0).is_err());
    let bad_dist = RandomVectorModel::iid(2, ScalarDist::UniformSym { halfwidth: -1.0 }, NormTag::SupNorm);
    assert!(sample_vector(&bad_dist, 10, 0, 0).is_err());
}

#[test]
fn batch_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.bin");
    let batch = sample_vector(&zoo()[5], 257, 1, 2).unwrap();
    write_batch(&batch, &path).unwrap();
    let back = read_batch(&path).unwrap();
    assert_eq!(back, batch);
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 56 + 8 * 257 * 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn model_json_roundtrip(i in 0usize..8) {
        let m = zoo()[i].clone();
        let back = RandomVectorModel::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back.id(), m.id());
        prop_assert_eq!(back, m);
    }

    #[test]
    fn sup_norm_bounds_other_norms(v in prop::collection::vec(-10.0f64..10.0, 1..20)) {
        let sup = NormTag::SupNorm.eval(&v);
        let euc = NormTag::EuclideanNorm.eval(&v);
        let sum = NormTag::SumNorm.eval(&v);
        let d = v.len() as f64;
        prop_assert!(sup <= euc + 1e-12 && euc <= sum + 1e-12);
        prop_assert!(sum <= d * sup + 1e-9);
    }

    #[test]
    fn product_norm_is_max_of_blocks(v in prop::collection::vec(-5.0f64..5.0, 12)) {
        let p = NormTag::product(NormTag::EuclideanNorm, 4);
        let expect = v.chunks(3).map(|b| NormTag::EuclideanNorm.eval(b)).fold(0.0, f64::max);
        prop_assert_eq!(p.eval(&v), expect);
    }

    #[test]
    fn scaled_models_scale_samples(a in 0.1f64..5.0, seed in 0u64..1000) {
        let base = zoo()[3].clone();
        let x = sample_norms(&base, 300, seed, 1).unwrap();
        let y = sample_norms(&base.scaled(a), 300, seed, 1).unwrap();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((q - a * p).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }
}
