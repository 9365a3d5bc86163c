//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Lines are written to the raw stdout handle so they appear without
//! `--nocapture`.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use taildom::cli::{execute, run, Experiment, Invocation, RunConfig};
use taildom::counterexample::{
    fourth_moment_uniform_sum, measure_strong_gap, verify_ball_slab_step, verify_example_at, verify_gaussian_sandwich,
    ExampleConfig, L_THRESHOLD,
};
use taildom::domination::{DirectionSet, DominationVerdict};
use taildom::regularity::{check_regularity, constant_audit, coordinate_functionals, hull_distance, MetricModel, HULL_MAX_ITER};
use taildom::stats::paley_zygmund_exact;
use taildom::stochastic::{NormTag, RandomVectorModel, ScalarDist};
use taildom::theorems::{check_comp_mom, check_condition_ii, coordinate_hypotheses, verify_prop1, verify_thm1, Verdict};

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn report(line: &Line) {
    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "criterion {:>2} [{}] {}: {} ({:.1}s)",
        line.id,
        if line.pass { "PASS" } else { "FAIL" },
        line.name,
        line.detail,
        line.secs
    )
    .unwrap();
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, detail) = f();
    let line = Line { id, name, pass, detail, secs: start.elapsed().as_secs_f64() };
    report(&line);
    line
}

/// Tolerances pinned for the criteria.
const AUDIT_ACCURACY: f64 = 1e-6;
const FOURTH_MOMENT_SLACK: f64 = 1e-12;

fn criterion_1() -> (bool, String) {
    let start = Instant::now();
    let a = constant_audit();
    let secs = start.elapsed().as_secs_f64();
    // independent oracle: direct sum to 2e5 plus integral tail bracket of the summand
    let e2 = std::f64::consts::E.powi(2);
    let term = |n: f64| e2 / ((n + 2.0).powi(2) * ((n + 2.0).ln() - 1.0));
    let big_n = 200_000usize;
    let head: f64 = (1..=big_n).rev().map(|n| term(n as f64)).sum();
    // Σ_{n>N} f(n) lies between ∫_{N+1}^∞ f and ∫_N^∞ f, with ∫_a^∞ e²/((x+2)²(ln(x+2)-1)) dx
    // bounded by e²/((a+2)(ln(a+2)-1))
    let tail_hi = e2 / ((big_n as f64 + 2.0) * ((big_n as f64 + 2.0).ln() - 1.0));
    let oracle_lo = e2 + head;
    let oracle_hi = e2 + head + tail_hi;
    let within = a.value >= oracle_lo - AUDIT_ACCURACY && a.value <= oracle_hi + AUDIT_ACCURACY;
    let bracket = (oracle_hi - oracle_lo).max(a.tail_uncertainty);
    let pass = a.value <= 20.0 && within && a.tail_uncertainty <= AUDIT_ACCURACY && secs < 1.0;
    (
        pass,
        format!(
            "constant {:.9} <= 20, oracle bracket [{oracle_lo:.9}, {oracle_hi:.9}] (width {bracket:.1e}), {secs:.3}s",
            a.value
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let cfg = ExampleConfig { m: 200_000, directions: 64, delta: 0.01, seed: 11, ..Default::default() };
    let mut verdicts = Vec::new();
    let mut ok = true;
    for k in [4, 6, 8, 10, 12] {
        let n = 1usize << k;
        let r = verify_example_at(n, &cfg).expect("example run");
        ok &= r.verdict == DominationVerdict::Dominated && r.config.directions == 64;
        verdicts.push(format!("2^{k}: {:?} (max excess {:.4})", r.verdict, r.max_excess));
    }
    (ok, verdicts.join(", "))
}

fn criterion_3() -> (bool, String) {
    let cfg = ExampleConfig { n_grid: (2..=8).map(|k| 1usize << (2 * k)).collect(), seed: 12, ..Default::default() };
    let g = measure_strong_gap(&cfg).expect("gap run");
    let pass =
        g.x_bounded && g.x_flat() && g.slope > 0.0 && g.r_squared >= 0.99 && g.ratio_increasing && g.measured_l <= L_THRESHOLD;
    let max_ex = g.rows.iter().map(|r| r.e_x.mean).fold(0.0, f64::max);
    (
        pass,
        format!(
            "max E|X| {max_ex:.3} (<= 18 + 3 SE at every n), E|X| slope in ln n {:.4} +- {:.4}, slope {:.4}, R^2 {:.5}, measured L {:.3}, ratio increasing {}",
            g.x_slope, g.x_slope_se, g.slope, g.r_squared, g.measured_l, g.ratio_increasing
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let thetas = [0.1, 1.0 / 3.0, 0.5, 0.9];
    let mut violations = 0;
    let mut checks = 0;
    let mut sets = 0;
    while sets < 1000 {
        let len = rng.random_range(1..=300);
        let zero_frac: f64 = rng.random::<f64>() * 0.9;
        let shape = rng.random_range(0..3);
        let v: Vec<f64> = (0..len)
            .map(|_| {
                if rng.random::<f64>() < zero_frac {
                    return 0.0;
                }
                match shape {
                    0 => rng.random::<f64>(),
                    1 => -rng.random::<f64>().ln(),
                    _ => (rng.random::<f64>() * 8.0).exp(),
                }
            })
            .collect();
        if v.iter().all(|z| *z == 0.0) {
            continue;
        }
        sets += 1;
        for &theta in &thetas {
            checks += 1;
            let c = paley_zygmund_exact(&v, theta).unwrap();
            // oracle: recompute both sides from scratch
            let m = v.len() as f64;
            let mean = v.iter().sum::<f64>() / m;
            let second = v.iter().map(|z| z * z).sum::<f64>() / m;
            let lhs = v.iter().filter(|z| **z >= theta * mean).count() as f64 / m;
            let rhs = (1.0 - theta).powi(2) * mean * mean / second;
            if !(c.holds && lhs >= rhs) || c.band != 0.0 {
                violations += 1;
            }
        }
    }
    (violations == 0, format!("{sets} sample sets x {} thetas = {checks} checks, {violations} violations", thetas.len()))
}

fn criterion_5() -> (bool, String) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut min_pz = f64::INFINITY;
    for i in 0..1000 {
        let n = 2 + i % 200;
        let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= len);
        // oracle: the double sum over i != j written out
        let mut cross = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    cross += u[a] * u[a] * u[b] * u[b];
                }
            }
        }
        let oracle = u.iter().map(|v| v.powi(4)).sum::<f64>() / 5.0 + cross / 3.0;
        let value = fourth_moment_uniform_sum(&u);
        assert!((value - oracle).abs() < 1e-13, "closed form disagrees with the double sum");
        worst = worst.max(value);
        let es2 = 1.0 / 3.0;
        min_pz = min_pz.min((4.0 / 9.0) * es2 * es2 / value);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1.0 / 3.0 + FOURTH_MOMENT_SLACK && min_pz >= 4.0 / 27.0 - FOURTH_MOMENT_SLACK && secs < 1.0;
    (pass, format!("max E S^4 = {worst:.12} <= 1/3, min PZ bound {min_pz:.6} >= 4/27, {secs:.3}s"))
}

fn criterion_6() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s_grid = [0.05, 0.1, 0.2, 0.5];
    let mut violations = 0;
    let mut worst_slack = f64::INFINITY;
    for j in 0..32 {
        let n = 2 + rng.random_range(0..63);
        let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= len);
        let r = verify_ball_slab_step(&u, &s_grid, 100_000, 600 + j).unwrap();
        violations += r.violations;
        for row in &r.rows {
            worst_slack = worst_slack.min(row.bound + row.band - row.probability);
        }
    }
    (violations == 0, format!("32 directions x 4 widths, {violations} violations, smallest slack {worst_slack:.4}"))
}

fn criterion_7() -> (bool, String) {
    let start = Instant::now();
    let ts: Vec<f64> = (1..=1000).map(|i| 6.0 * i as f64 / 1000.0).collect();
    let rows = verify_gaussian_sandwich(&ts).unwrap();
    // independent oracle for the exact survival: erfc by direct quadrature of the density
    let quad = |t: f64| {
        let (a, b, k) = (t, t + 40.0, 200_000);
        let h = (b - a) / k as f64;
        let f = |x: f64| (-0.5 * x * x).exp();
        let mut s = f(a) + f(b);
        for i in 1..k {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 * s * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
    };
    let mut oracle_ok = true;
    for &t in &[0.006, 1.0, 3.0, 6.0] {
        let r = verify_gaussian_sandwich(&[t]).unwrap()[0];
        oracle_ok &= (r.exact / quad(t) - 1.0).abs() < 1e-9;
    }
    let secs = start.elapsed().as_secs_f64();
    let violations = rows.iter().filter(|r| !(r.lower <= r.exact * (1.0 + 1e-12) && r.exact <= r.upper * (1.0 + 1e-12))).count();
    (
        violations == 0 && oracle_ok && secs < 1.0,
        format!("{} points on (0, 6], {violations} violations, survival matches quadrature {oracle_ok}, {secs:.3}s", rows.len()),
    )
}

fn l1_projection_distance(p: [f64; 2]) -> f64 {
    // Euclidean projection onto the l1 unit ball by soft thresholding
    let s = p[0].abs() + p[1].abs();
    if s <= 1.0 {
        return 0.0;
    }
    let mut a = [p[0].abs(), p[1].abs()];
    a.sort_by(|x, y| y.total_cmp(x));
    let mut theta = a[0] - 1.0;
    if a[1] > theta {
        theta = (a[0] + a[1] - 1.0) / 2.0;
    }
    let q: Vec<f64> = p.iter().map(|v| v.signum() * (v.abs() - theta).max(0.0)).collect();
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn criterion_8() -> (bool, String) {
    let x = RandomVectorModel::iid(256, ScalarDist::StandardGaussian, NormTag::SupNorm);
    let cert = check_regularity(&x, &coordinate_functionals(256), 3.0, &DirectionSet::DualBallExtreme, 20_000, None, 8).unwrap();
    let max_dist = cert.coverage_results.iter().map(|c| c.distance).fold(0.0, f64::max);
    let cert_ok = cert.passes && cert.measured_k <= 3.0 && cert.coverage_results.len() == 512 && max_dist <= cert.tau;

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let id = MetricModel::identity(2);
    let cases = [[1.0, 0.0], [h, h], [2.0, 0.5], [-1.5, 1.5], [0.3, -0.2], [0.9, -0.6]];
    let mut worst: f64 = 0.0;
    for p in cases {
        let d = hull_distance(&p, &gens, &id, 1e-10, HULL_MAX_ITER).unwrap();
        worst = worst.max((d.distance - l1_projection_distance(p)).abs());
    }
    let aniso = MetricModel::diagonal(&[4.0, 1.0]).unwrap();
    let d = hull_distance(&[0.0, 2.0], &[vec![0.0, 1.0]], &aniso, 1e-10, HULL_MAX_ITER).unwrap();
    worst = worst.max((d.distance - 1.0).abs());
    (
        cert_ok && worst <= 1e-6,
        format!(
            "l^256_inf Gaussian: measured K {:.3}, max coverage distance {max_dist:.2e} <= tau {:.2e}; 2-D hull cases max error {worst:.1e}",
            cert.measured_k, cert.tau
        ),
    )
}

fn random_series(d: usize, k: usize, driver: ScalarDist, seed: u64) -> RandomVectorModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Vec<f64>> =
        (0..d).map(|_| (0..k).map(|_| { let v: f64 = StandardNormal.sample(&mut rng); v / (k as f64).sqrt() }).collect()).collect();
    RandomVectorModel::series(coeffs, driver, NormTag::SupNorm)
}

fn criterion_9() -> (bool, String) {
    let zoo = [
        ("gaussian", RandomVectorModel::iid(16, ScalarDist::StandardGaussian, NormTag::SupNorm)),
        ("rademacher-series", random_series(16, 32, ScalarDist::Rademacher, 91)),
        ("exppower-series", random_series(16, 32, ScalarDist::ExpPower { p: 1.5 }, 92)),
    ];
    let n_grid = [1, 2, 4, 8, 16];
    let m = 20_000;
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, x) in &zoo {
        let functionals = coordinate_functionals(x.dim);
        let probe = check_regularity(x, &functionals, 10.0, &DirectionSet::DualBallExtreme, m, None, 9).unwrap();
        let k = probe.smallest_passing_k().expect("coordinate certificate");
        let cert = check_regularity(x, &functionals, k, &DirectionSet::DualBallExtreme, m, None, 9).unwrap();
        let (hyps, params) = coordinate_hypotheses(x, &n_grid, m, 9).unwrap();
        for (label, y) in [("Y=X", x.clone()), ("Y=X/2", x.clone().scaled(0.5))] {
            let p1 = verify_prop1(x, &y, &cert, m, 9).unwrap();
            let tail = taildom::stats::EmpiricalTail::new(
                taildom::stochastic::sample_norms(&y, m, 9, taildom::stochastic::rng::streams::MODEL_Y).unwrap(),
                0.01,
            )
            .unwrap();
            let t_grid: Vec<f64> = [0.5, 0.9, 0.99, 0.999].iter().map(|q| tail.quantile(*q)).collect();
            let t1 = verify_thm1(x, &y, &params, &hyps, &n_grid, &t_grid, m, 9).unwrap();
            let violated = p1.points.iter().chain(&t1.points).any(|p| p.verdict == Verdict::Fail);
            ok &= p1.verdict == Verdict::Pass && t1.verdict == Verdict::Pass && !violated;
            notes.push(format!("{name} {label}: prop1 {:?} thm1 {:?}", p1.verdict, t1.verdict));
        }
        // derived beta: condition ii at alpha = 1/2 against 1/(4 C_n) from the moment ratio
        let ratios = check_comp_mom(x, &n_grid, m, 9).unwrap();
        let cond = check_condition_ii(x, 0.5, &n_grid, m, 9).unwrap();
        for (r, p) in ratios.iter().zip(&cond.points) {
            let band = p.lhs.value - p.lhs.lower;
            let derived = p.lhs.value >= 1.0 / (4.0 * r.ratio.value) - band;
            ok &= derived && p.at == r.n as f64;
        }
        notes.push(format!("{name}: K {k}, C {:.4}", params.c.unwrap()));
    }
    (ok, notes.join("; "))
}

fn small_config(experiment: Experiment) -> RunConfig {
    let gauss = RandomVectorModel::iid(8, ScalarDist::StandardGaussian, NormTag::SupNorm);
    RunConfig {
        experiment,
        model_x: Some(gauss.clone()),
        model_y: Some(gauss.scaled(0.5)),
        m: 4000,
        delta: 0.01,
        seed: 10,
        n_grid: match experiment {
            Experiment::Example => Some(vec![4, 16]),
            Experiment::Pz | Experiment::Ball => Some(vec![16]),
            _ => Some(vec![1, 2, 4]),
        },
        t_grid: None,
        directions: Some(8),
        k: None,
        alpha: None,
        gap_samples: Some(500),
    }
}

fn criterion_10() -> (bool, String) {
    let experiments = [
        Experiment::Dominate,
        Experiment::Regularity,
        Experiment::Prop1,
        Experiment::Thm1,
        Experiment::Condii,
        Experiment::Compmom,
        Experiment::Example,
        Experiment::Pz,
        Experiment::Ball,
        Experiment::Sandwich,
        Experiment::Audit,
    ];
    let mut identical = 0;
    let mut mismatched = Vec::new();
    for e in experiments {
        let cfg = small_config(e);
        let dirs: Vec<_> = [1usize, 8, 8]
            .iter()
            .map(|&w| {
                let dir = tempfile::tempdir().unwrap();
                run(&Invocation { config: cfg.clone(), out_dir: dir.path().to_path_buf(), workers: w }).unwrap();
                dir
            })
            .collect();
        let mut names: Vec<String> = std::fs::read_dir(dirs[0].path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| !n.ends_with(".run.json"))
            .collect();
        names.sort();
        let same = names.iter().all(|n| {
            let a = std::fs::read(dirs[0].path().join(n)).unwrap();
            dirs[1..].iter().all(|d| std::fs::read(d.path().join(n)).map(|b| b == a).unwrap_or(false))
        });
        if same && !names.is_empty() {
            identical += 1;
        } else {
            mismatched.push(e.name());
        }
    }
    // the in-memory path agrees with the files
    let out = execute(&small_config(Experiment::Sandwich)).unwrap();
    let ok = mismatched.is_empty() && out.summary.contains("0 violations");
    (ok, format!("{identical}/{} experiments byte-identical across workers 1, 8, 8; mismatched {mismatched:?}", experiments.len()))
}

#[test]
fn acceptance_criteria() {
    let lines = vec![
        timed(1, "constant audit", criterion_1),
        timed(2, "example reproduction", criterion_2),
        timed(3, "strong-gap divergence", criterion_3),
        timed(4, "Paley-Zygmund exactness", criterion_4),
        timed(5, "fourth-moment bound", criterion_5),
        timed(6, "Ball slab step", criterion_6),
        timed(7, "Gaussian sandwich", criterion_7),
        timed(8, "regularity certificate", criterion_8),
        timed(9, "self-consistency suite", criterion_9),
        timed(10, "determinism", criterion_10),
    ];
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
