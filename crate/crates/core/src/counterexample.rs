//! The Gaussian/uniform pair in `l^n_inf` that is weakly but not strongly
//! dominated: `Y = Σ g_i e_i` and `X = 9(|g|+1) Σ η_i e_i`, `η_i` uniform on
//! `[-1, 1]` and independent of the scaling Gaussian `g`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domination::{compare, DirectionSet, DominationReport, TGrid, YSide};
use crate::error::{Error, Result};
use crate::special::gaussian_abs_survival;
use crate::stats::{dkw_epsilon, mean_with_ci, paley_zygmund_exact, EmpiricalTail, MomentReport, DEFAULT_DELTA};
use crate::stochastic::rng::{streams, StreamKey};
use crate::stochastic::{sample_norms, sample_projections, NormTag, RandomVectorModel, ScalarDist, ScaleFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExampleConfig {
    pub n_grid: Vec<usize>,
    /// Samples per side for the domination check.
    pub m: usize,
    pub directions: usize,
    pub seed: u64,
    pub delta: f64,
    /// Samples per `n` for the norm means of the strong gap.
    pub gap_samples: usize,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        Self {
            n_grid: (1..=12).map(|k| 1usize << k).collect(),
            m: 200_000,
            directions: 64,
            seed: 0,
            delta: DEFAULT_DELTA,
            gap_samples: 4000,
        }
    }
}

impl ExampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        if let Some(n) = self.n_grid.iter().find(|n| **n < 2) {
            return Err(Error::Config(format!("example dimensions must be >= 2, got {n}")));
        }
        if self.directions == 0 {
            return Err(Error::Config("at least one direction is required".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.gap_samples < 2 {
            return Err(Error::Config("gap_samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// `(Y, X)` in `l^n_inf`.
pub fn build_example_pair(n: usize) -> Result<(RandomVectorModel, RandomVectorModel)> {
    if n < 2 {
        return Err(Error::Parameter(format!("example dimension must be >= 2, got {n}")));
    }
    let y = RandomVectorModel::iid(n, ScalarDist::StandardGaussian, NormTag::SupNorm);
    let x = RandomVectorModel::mixture(
        ScaleFn::NinePlusGauss,
        RandomVectorModel::iid(n, ScalarDist::UniformSym { halfwidth: 1.0 }, NormTag::SupNorm),
    );
    Ok((y, x))
}

/// Thresholds for the example: the default quantile grid of `X`, a fine grid
/// on `(0, 3]` where the small-ball argument applies, and a coarse one above.
pub fn example_t_grid() -> TGrid {
    let mut abs: Vec<f64> = (0..12).map(|i| 0.1 + 0.25 * i as f64).collect();
    abs.extend([3.0, 3.5, 4.0, 5.0, 6.0, 8.0]);
    TGrid::default().with_absolute(abs)
}

/// `P(|<u, Y>| >= t) = P(|g| >= t)` for unit `u`.
fn rotated_gaussian_survival(u: &[f64], t: f64) -> f64 {
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    gaussian_abs_survival(t / len)
}

/// Weak domination of `Y` by `X` at one dimension, with the exact Gaussian
/// survival on the `Y` side.
pub fn verify_example_at(n: usize, cfg: &ExampleConfig) -> Result<DominationReport> {
    let (_, x) = build_example_pair(n)?;
    compare(
        YSide::Exact { id: format!("gaussian-{n}"), survival: &rotated_gaussian_survival },
        &x,
        &DirectionSet::UnitSphereRandom { count: cfg.directions },
        &example_t_grid(),
        cfg.m,
        cfg.delta,
        cfg.seed,
    )
}

/// [`verify_example_at`] for every `n` of the grid.
pub fn verify_example_inequality(cfg: &ExampleConfig) -> Result<Vec<(usize, DominationReport)>> {
    cfg.validate()?;
    cfg.n_grid.iter().map(|&n| Ok((n, verify_example_at(n, cfg)?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabRow {
    pub s: f64,
    /// `P̂(|Σ u_i η_i| <= s)`
    pub probability: f64,
    pub bound: f64,
    pub band: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabReport {
    pub m: usize,
    pub delta: f64,
    pub rows: Vec<SlabRow>,
    pub violations: usize,
}

/// `P(|Σ u_i η_i| <= s) <= √2 s` for a unit vector `u`.
pub fn verify_ball_slab_step(u: &[f64], s_grid: &[f64], m: usize, seed: u64) -> Result<SlabReport> {
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((len - 1.0).abs() <= 1e-9) {
        return Err(Error::Parameter(format!("direction must be a unit vector, has length {len}")));
    }
    if s_grid.is_empty() || s_grid.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Config("s grid must be nonempty and positive".into()));
    }
    let eta = RandomVectorModel::iid(u.len(), ScalarDist::UniformSym { halfwidth: 1.0 }, NormTag::SupNorm);
    let proj = sample_projections(&eta, &[u.to_vec()], m, seed, streams::AUX)?;
    let delta = DEFAULT_DELTA;
    let tail = EmpiricalTail::of_abs(&proj.values[0], delta)?;
    let band = dkw_epsilon(m, delta);
    let rows: Vec<SlabRow> = s_grid
        .iter()
        .map(|&s| {
            let probability = tail.count_at_most(s) as f64 / m as f64;
            let bound = std::f64::consts::SQRT_2 * s;
            SlabRow { s, probability, bound, band, holds: probability <= bound + band }
        })
        .collect();
    let violations = rows.iter().filter(|r| !r.holds).count();
    Ok(SlabReport { m, delta, rows, violations })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub t: f64,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Relative slack allowed on each side of the sandwich.
pub const SANDWICH_SLACK: f64 = 1e-12;

/// `2t exp(-(2t)^2/2)/√(2π) <= P(|g| >= t) <= exp(-t^2/2)`.
pub fn verify_gaussian_sandwich(t_grid: &[f64]) -> Result<Vec<SandwichRow>> {
    if t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Config("t grid must be positive".into()));
    }
    let c = (2.0 * std::f64::consts::PI).sqrt();
    Ok(t_grid
        .iter()
        .map(|&t| {
            let lower = 2.0 * t * (-2.0 * t * t).exp() / c;
            let upper = (-0.5 * t * t).exp();
            let exact = gaussian_abs_survival(t);
            let holds = lower <= exact * (1.0 + SANDWICH_SLACK) && exact <= upper * (1.0 + SANDWICH_SLACK);
            SandwichRow { t, lower, exact, upper, holds }
        })
        .collect())
}

/// `E(Σ u_i η_i)^4 = (1/5) Σ u_i^4 + (1/3) Σ_{i != j} u_i^2 u_j^2` for `η_i`
/// uniform on `[-1, 1]`.
pub fn fourth_moment_uniform_sum(u: &[f64]) -> f64 {
    let s2: f64 = u.iter().map(|v| v * v).sum();
    let s4: f64 = u.iter().map(|v| v.powi(4)).sum();
    s4 / 5.0 + (s2 * s2 - s4) / 3.0
}

/// Paley–Zygmund lower bound `(1 - 1/3)^2 (E S^2)^2 / E S^4` for
/// `P(|S| >= 1/3)`, `S = Σ u_i η_i`.
pub fn paley_zygmund_example_bound(u: &[f64]) -> f64 {
    let s2: f64 = u.iter().map(|v| v * v).sum::<f64>() / 3.0;
    (4.0 / 9.0) * s2 * s2 / fourth_moment_uniform_sum(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PzExampleRow {
    pub direction: usize,
    pub fourth_moment: f64,
    pub pz_bound: f64,
    /// Exact empirical-measure Paley–Zygmund check on `S^2` at `θ = 1/3`.
    pub empirical_holds: bool,
    /// `P̂(|S| >= 1/3)`
    pub probability: f64,
}

/// Fourth moment and Paley–Zygmund step for random unit directions in
/// dimension `n`.
pub fn pz_example(n: usize, directions: usize, m: usize, seed: u64) -> Result<Vec<PzExampleRow>> {
    if n == 0 || directions == 0 {
        return Err(Error::Parameter("need n >= 1 and at least one direction".into()));
    }
    let mut rng = StreamKey::new(seed, streams::DIRECTIONS).column(0);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| crate::domination::random_unit_vector(n, &mut rng)).collect();
    let eta = RandomVectorModel::iid(n, ScalarDist::UniformSym { halfwidth: 1.0 }, NormTag::SupNorm);
    let proj = sample_projections(&eta, &dirs, m, seed, streams::AUX)?;
    dirs.iter()
        .zip(&proj.values)
        .enumerate()
        .map(|(j, (u, s))| {
            let sq: Vec<f64> = s.iter().map(|v| v * v).collect();
            let pz = paley_zygmund_exact(&sq, 1.0 / 3.0)?;
            let probability = s.iter().filter(|v| v.abs() >= 1.0 / 3.0).count() as f64 / m as f64;
            Ok(PzExampleRow {
                direction: j,
                fourth_moment: fourth_moment_uniform_sum(u),
                pz_bound: paley_zygmund_example_bound(u),
                empirical_holds: pz.holds,
                probability,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub e_y: MomentReport,
    pub e_x: MomentReport,
    pub ratio: f64,
    pub median_y: f64,
    pub median_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    /// Least squares of `Ê‖Y‖` on `√(ln n)`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `max_n √(ln n) / Ê‖Y‖`.
    pub measured_l: f64,
    /// Least-squares slope of `Ê‖X‖` on `ln n` over `n >= 256`, with its
    /// standard error from the per-point standard errors.
    pub x_slope: f64,
    pub x_slope_se: f64,
    pub x_bounded: bool,
    pub ratio_increasing: bool,
}

/// The bound `E‖X‖ <= 18` is checked against `Ê‖X‖ - 3 SE`.
pub const X_MEAN_BOUND: f64 = 18.0;
/// Acceptance threshold for the measured `L` in `E‖Y‖ >= √(ln n)/L`.
pub const L_THRESHOLD: f64 = 3.0;
/// Smallest `n` in the flatness fit of `Ê‖X‖`.
pub const X_FLAT_FROM: usize = 256;

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

pub fn measure_strong_gap(cfg: &ExampleConfig) -> Result<GapReport> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let (y, x) = build_example_pair(n)?;
        let ny = sample_norms(&y, cfg.gap_samples, cfg.seed, streams::MODEL_Y)?;
        let nx = sample_norms(&x, cfg.gap_samples, cfg.seed, streams::MODEL_X)?;
        let e_y = mean_with_ci(&ny, cfg.delta)?;
        let e_x = mean_with_ci(&nx, cfg.delta)?;
        let median_y = EmpiricalTail::new(ny, cfg.delta)?.quantile(0.5);
        let median_x = EmpiricalTail::new(nx, cfg.delta)?.quantile(0.5);
        rows.push(GapRow { n, ratio: e_y.mean / e_x.mean, e_y, e_x, median_y, median_x });
    }
    let sq: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln().sqrt()).collect();
    let ey: Vec<f64> = rows.iter().map(|r| r.e_y.mean).collect();
    let (slope, intercept, r_squared) =
        if rows.len() >= 2 { least_squares(&sq, &ey) } else { (f64::NAN, f64::NAN, f64::NAN) };
    let measured_l = sq.iter().zip(&ey).map(|(s, e)| s / e).fold(0.0, f64::max);

    let flat: Vec<&GapRow> = rows.iter().filter(|r| r.n >= X_FLAT_FROM).collect();
    let (x_slope, x_slope_se) = if flat.len() >= 2 {
        let ln: Vec<f64> = flat.iter().map(|r| (r.n as f64).ln()).collect();
        let ex: Vec<f64> = flat.iter().map(|r| r.e_x.mean).collect();
        let (b, _, _) = least_squares(&ln, &ex);
        let mean_ln = ln.iter().sum::<f64>() / ln.len() as f64;
        let sxx: f64 = ln.iter().map(|v| (v - mean_ln).powi(2)).sum();
        let var: f64 = flat.iter().zip(&ln).map(|(r, v)| (v - mean_ln).powi(2) * r.e_x.standard_error.powi(2)).sum();
        (b, var.sqrt() / sxx)
    } else {
        (f64::NAN, f64::NAN)
    };
    let x_bounded = rows.iter().all(|r| r.e_x.mean <= X_MEAN_BOUND + 3.0 * r.e_x.standard_error);
    let ratio_increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    Ok(GapReport { rows, slope, intercept, r_squared, measured_l, x_slope, x_slope_se, x_bounded, ratio_increasing })
}

impl GapReport {
    /// `E‖X‖` bounded, `Ê‖Y‖` growing like `√(ln n)` with `R² >= 0.99`,
    /// measured `L <= 3`, ratio increasing.
    pub fn passes(&self) -> bool {
        self.x_bounded
            && self.slope > 0.0
            && self.r_squared >= 0.99
            && self.measured_l <= L_THRESHOLD
            && self.ratio_increasing
    }

    /// `Ê‖X‖` has no detectable trend in `ln n` beyond three standard errors.
    pub fn x_flat(&self) -> bool {
        self.x_slope.abs() <= 3.0 * self.x_slope_se
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_csv_to(csv::Writer::from_path(path)?)
    }

    pub fn write_csv_to<W: std::io::Write>(&self, mut w: csv::Writer<W>) -> Result<()> {
        w.write_record([
            "n", "e_y", "e_y_lower", "e_y_upper", "se_y", "e_x", "e_x_lower", "e_x_upper", "se_x", "ratio", "median_y",
            "median_x",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.e_y.mean.to_string(),
                r.e_y.lower().to_string(),
                r.e_y.upper().to_string(),
                r.e_y.standard_error.to_string(),
                r.e_x.mean.to_string(),
                r.e_x.lower().to_string(),
                r.e_x.upper().to_string(),
                r.e_x.standard_error.to_string(),
                r.ratio.to_string(),
                r.median_y.to_string(),
                r.median_x.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_shapes() {
        let (y, x) = build_example_pair(2).unwrap();
        assert_eq!((y.dim, x.dim), (2, 2));
        assert_eq!(y.norm, NormTag::SupNorm);
        assert_eq!(x.norm, NormTag::SupNorm);
        assert!(build_example_pair(1).is_err());
    }

    #[test]
    fn sandwich_values() {
        let r = verify_gaussian_sandwich(&[1.0, 3.0]).unwrap();
        assert!((r[0].exact - 0.317_310_507_862_914_1).abs() < 1e-14);
        assert!((r[0].upper - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!((r[0].lower - 0.107_981_933_026_376_1).abs() < 1e-15);
        assert!((r[1].upper - 0.011_108_996_538_242_306).abs() < 1e-15);
        assert!((r[1].lower / 3.645_529_709_893_972e-8 - 1.0).abs() < 1e-13);
        assert!(r.iter().all(|r| r.holds));
    }

    #[test]
    fn fourth_moment_axis_and_diagonal() {
        assert!((fourth_moment_uniform_sum(&[1.0, 0.0]) - 0.2).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // (1/5)(1/2) + (1/3)(2 * 1/4)
        assert!((fourth_moment_uniform_sum(&[h, h]) - (0.1 + 1.0 / 6.0)).abs() < 1e-15);
        assert!((paley_zygmund_example_bound(&[1.0]) - (4.0 / 9.0) * (1.0 / 9.0) / 0.2).abs() < 1e-15);
    }

    #[test]
    fn least_squares_exact_line() {
        let (b, a, r2) = least_squares(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((b - 2.0).abs() < 1e-14 && (a - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        let bad = ExampleConfig { n_grid: vec![1, 4], ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        assert!(ExampleConfig::default().validate().is_ok());
    }
}
