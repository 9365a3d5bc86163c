//! K-regularity certificates.
//!
//! A certificate supplies a sequence of functionals `x_1*, x_2*, ..` and a
//! constant `K`. Two things are checked on samples of `X`:
//!
//! * the log-indexed moments `‖x_n*(X)‖_{ln(n+2)} <= K E‖X‖`;
//! * coverage of the dual unit ball: test points of `B_{F*}` lie within `τ`
//!   of `conv{±x_n*}` in the `L²(X)` pseudometric `d_X`.
//!
//! The coverage distance is a projection onto a symmetric convex hull, solved
//! by away-step Frank–Wolfe over the `l1` ball of coefficients with fully
//! corrective minor cycles.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domination::DirectionSet;
use crate::error::{Error, Result};
use crate::special::exp_integral_e1;
use crate::stats::{log_indexed_norm, mean_with_ci, MomentReport, DEFAULT_DELTA};
use crate::stochastic::rng::streams;
use crate::stochastic::{sample_projections, sample_vector, RandomVectorModel};

/// Second-moment matrix `Σ = E X X^T` defining
/// `d_X(x*, y*) = ((x* - y*)^T Σ (x* - y*))^(1/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetric")]
pub struct MetricModel {
    pub dim: usize,
    /// Row-major, symmetric positive semidefinite.
    pub covariance: Vec<f64>,
    /// Row-major `R` with `Σ = R^T R`.
    #[serde(skip)]
    factor: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMetric {
    dim: usize,
    covariance: Vec<f64>,
}

impl TryFrom<RawMetric> for MetricModel {
    type Error = Error;

    fn try_from(raw: RawMetric) -> Result<Self> {
        MetricModel::from_matrix(raw.dim, &raw.covariance)
    }
}

impl MetricModel {
    /// Symmetrizes `matrix` and clips negative eigenvalues.
    pub fn from_matrix(dim: usize, matrix: &[f64]) -> Result<Self> {
        if matrix.len() != dim * dim || dim == 0 {
            return Err(Error::Shape(format!("{} entries do not form a {dim} x {dim} matrix", matrix.len())));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite covariance entry".into()));
        }
        let sym = DMatrix::from_fn(dim, dim, |i, j| 0.5 * (matrix[i * dim + j] + matrix[j * dim + i]));
        let eig = SymmetricEigen::new(sym.clone());
        let clipped = eig.eigenvalues.map(|l| l.max(0.0));
        let q = &eig.eigenvectors;
        let covariance_m = if eig.eigenvalues.iter().all(|l| *l >= 0.0) {
            sym
        } else {
            q * DMatrix::from_diagonal(&clipped) * q.transpose()
        };
        let r = DMatrix::from_diagonal(&clipped.map(f64::sqrt)) * q.transpose();
        let to_row_major = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        };
        Ok(Self { dim, covariance: to_row_major(&covariance_m), factor: to_row_major(&r) })
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self::from_matrix(dim, &m).expect("identity is valid")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = vec![0.0; d * d];
        for (i, v) in diag.iter().enumerate() {
            m[i * d + i] = *v;
        }
        Self::from_matrix(d, &m)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.covariance[i * self.dim + i]).sum()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in self.covariance.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `v^T Σ v`, clamped at zero.
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        let mut sv = vec![0.0; self.dim];
        self.apply(v, &mut sv);
        sv.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().max(0.0)
    }

    /// `d_X(x, y) = ‖R (x - y)‖_2`.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.factor
            .chunks_exact(self.dim)
            .map(|row| {
                let v: f64 = row.iter().zip(&diff).map(|(a, b)| a * b).sum();
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Empirical second-moment matrix from `m` samples of `model`.
pub fn empirical_metric(model: &RandomVectorModel, m: usize, seed: u64) -> Result<MetricModel> {
    let d = model.dim;
    if m < d {
        return Err(Error::Parameter(format!("need at least {d} samples to estimate a {d} x {d} metric, got {m}")));
    }
    let batch = sample_vector(model, m, seed, streams::METRIC)?;
    let view = ArrayView2::from_shape((m, d), &batch.data).expect("batch shape");
    let gram = view.t().dot(&view) / m as f64;
    MetricModel::from_matrix(d, gram.as_slice().expect("standard layout"))
}

/// The metric `d_X` of `model`: exact `E X X^T` for series models, empirical
/// otherwise.
pub fn estimate_metric(model: &RandomVectorModel, m: usize, seed: u64) -> Result<MetricModel> {
    model.validate()?;
    if model.is_series() {
        MetricModel::from_matrix(model.dim, &model.second_moment_matrix())
    } else {
        empirical_metric(model, m, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullDistance {
    pub distance: f64,
    /// Certified lower bound on the optimal distance (from the duality gap).
    pub lower_bound: f64,
    /// `λ` with `Σ|λ_i| <= 1` realizing `distance`.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `min_{Σ|λ_i| <= 1} d_X(point, Σ λ_i g_i)` by away-step Frank–Wolfe.
///
/// The iterate is kept as a convex combination of the atoms `±g_i`; after
/// every step the weights are re-optimized over the active atoms (Wolfe minor
/// cycles), which settles nearly collinear generators quickly. Stops when
/// `distance - lower_bound <= tol`, where the lower bound is
/// `sqrt(f - gap)` with `gap` the Frank–Wolfe duality gap of the squared
/// distance `f`. If `max_iter` is reached first the best iterate is returned
/// with `converged = false`.
pub fn hull_distance(
    point: &[f64],
    generators: &[Vec<f64>],
    metric: &MetricModel,
    tol: f64,
    max_iter: usize,
) -> Result<HullDistance> {
    let d = metric.dim;
    if generators.is_empty() {
        return Err(Error::Parameter("no generators".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if point.len() != d || generators.iter().any(|g| g.len() != d) {
        return Err(Error::Shape(format!("point and generators must have dimension {d}")));
    }
    let n = generators.len();
    // atom 2i is +g_i, atom 2i+1 is -g_i
    let sign = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut alpha = vec![0.0; 2 * n];
    alpha[0] = 0.5;
    alpha[1] = 0.5;
    let mut active: Vec<usize> = vec![0, 1];
    let mut x = vec![0.0; d];
    let mut r = vec![0.0; d];
    let mut w = vec![0.0; d];
    let mut sd = vec![0.0; d];
    let mut c = vec![0.0; n];

    let lambda_of = |alpha: &[f64]| -> Vec<f64> { (0..n).map(|i| alpha[2 * i] - alpha[2 * i + 1]).collect() };

    let mut iterations = 0;
    let (mut f, mut gap);
    loop {
        for k in 0..d {
            r[k] = point[k] - x[k];
        }
        metric.apply(&r, &mut w);
        f = r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        for (ci, g) in c.iter_mut().zip(generators) {
            *ci = g.iter().zip(&w).map(|(a, b)| a * b).sum();
        }
        // <λ, c> through the active atoms
        let lc: f64 = active.iter().map(|&j| alpha[j] * sign(j) * c[j / 2]).sum();
        let (i_fw, c_fw) = c.iter().enumerate().fold((0, 0.0f64), |best, (i, v)| {
            if v.abs() > best.1.abs() {
                (i, *v)
            } else {
                best
            }
        });
        gap = (2.0 * (c_fw.abs() - lc)).max(0.0);
        let dist = f.sqrt();
        let lower = (f - gap).max(0.0).sqrt();
        if dist - lower <= tol || f == 0.0 {
            return Ok(HullDistance {
                distance: dist,
                lower_bound: lower,
                coefficients: lambda_of(&alpha),
                iterations,
                converged: true,
            });
        }
        if iterations >= max_iter {
            return Ok(HullDistance {
                distance: dist,
                lower_bound: lower,
                coefficients: lambda_of(&alpha),
                iterations,
                converged: false,
            });
        }
        iterations += 1;

        let fw_atom = 2 * i_fw + usize::from(c_fw < 0.0);
        let (away_atom, away_score) = active
            .iter()
            .map(|&j| (j, sign(j) * c[j / 2]))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        let away_gap = 2.0 * (lc - away_score);

        let use_fw = gap >= away_gap || away_atom == usize::MAX;
        let (dir, gamma_max): (Vec<f64>, f64) = if use_fw {
            let s = sign(fw_atom);
            let g = &generators[fw_atom / 2];
            ((0..d).map(|k| s * g[k] - x[k]).collect(), 1.0)
        } else {
            let s = sign(away_atom);
            let g = &generators[away_atom / 2];
            let a = alpha[away_atom];
            let gm = if a >= 1.0 { f64::INFINITY } else { a / (1.0 - a) };
            ((0..d).map(|k| x[k] - s * g[k]).collect(), gm)
        };
        metric.apply(&dir, &mut sd);
        let curvature: f64 = dir.iter().zip(&sd).map(|(a, b)| a * b).sum();
        let slope: f64 = w.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if curvature <= 0.0 || slope <= 0.0 {
            // no descent along the chosen direction: numerically optimal
            return Ok(HullDistance {
                distance: f.sqrt(),
                lower_bound: (f - gap).max(0.0).sqrt(),
                coefficients: lambda_of(&alpha),
                iterations,
                converged: gap <= tol * tol,
            });
        }
        let gamma = (slope / curvature).min(gamma_max);

        if use_fw {
            for &j in &active {
                alpha[j] *= 1.0 - gamma;
            }
            alpha[fw_atom] += gamma;
            if !active.contains(&fw_atom) {
                active.push(fw_atom);
            }
        } else {
            for &j in &active {
                alpha[j] *= 1.0 + gamma;
            }
            alpha[away_atom] -= gamma;
            if gamma >= gamma_max {
                alpha[away_atom] = 0.0;
            }
        }
        active.retain(|&j| {
            if alpha[j] <= 1e-15 {
                alpha[j] = 0.0;
                false
            } else {
                true
            }
        });
        fully_correct(point, generators, metric, &mut alpha, &mut active);
        // recompute x from the weights to avoid drift
        x.iter_mut().for_each(|v| *v = 0.0);
        for &j in &active {
            let s = sign(j) * alpha[j];
            for (xk, gk) in x.iter_mut().zip(&generators[j / 2]) {
                *xk += s * gk;
            }
        }
    }
}

/// Wolfe minor cycles: move `alpha` toward the minimizer of the squared
/// distance over the affine hull of the active atoms, stopping at the simplex
/// boundary and dropping atoms that reach zero weight.
fn fully_correct(point: &[f64], generators: &[Vec<f64>], metric: &MetricModel, alpha: &mut [f64], active: &mut Vec<usize>) {
    let d = metric.dim;
    let atom = |j: usize| -> Vec<f64> {
        let s = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        generators[j / 2].iter().map(|v| s * v).collect()
    };
    let mut sp = vec![0.0; d];
    metric.apply(point, &mut sp);
    for _ in 0..2 * generators.len() + 2 {
        let k = active.len();
        if k < 2 {
            return;
        }
        let atoms: Vec<Vec<f64>> = active.iter().map(|&j| atom(j)).collect();
        let sa: Vec<Vec<f64>> = atoms
            .iter()
            .map(|a| {
                let mut out = vec![0.0; d];
                metric.apply(a, &mut out);
                out
            })
            .collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        // [G 1; 1^T 0] [beta; mu] = [h; 1]
        let kkt = DMatrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
            (true, true) => dot(&atoms[r], &sa[c]),
            (true, false) | (false, true) => 1.0,
            (false, false) => 0.0,
        });
        let rhs = nalgebra::DVector::from_fn(k + 1, |r, _| if r < k { dot(&atoms[r], &sp) } else { 1.0 });
        let scale = kkt.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let Ok(sol) = kkt.svd(true, true).solve(&rhs, 1e-12 * scale) else {
            return;
        };
        let beta: Vec<f64> = (0..k).map(|i| sol[i]).collect();
        if beta.iter().any(|b| !b.is_finite()) {
            return;
        }
        let objective = |w: &[f64]| {
            let mut r = point.to_vec();
            for (wi, a) in w.iter().zip(&atoms) {
                for (rk, ak) in r.iter_mut().zip(a) {
                    *rk -= wi * ak;
                }
            }
            metric.quadratic(&r)
        };
        let current: Vec<f64> = active.iter().map(|&j| alpha[j]).collect();
        if objective(&beta) >= objective(&current) {
            return;
        }
        if beta.iter().all(|b| *b > 1e-15) {
            for (&j, b) in active.iter().zip(&beta) {
                alpha[j] = *b;
            }
            return;
        }
        let theta = current
            .iter()
            .zip(&beta)
            .filter(|(_, b)| **b <= 1e-15)
            .map(|(a, b)| a / (a - b))
            .fold(1.0f64, f64::min);
        for (i, &j) in active.iter().enumerate() {
            alpha[j] = current[i] + theta * (beta[i] - current[i]);
        }
        active.retain(|&j| {
            if alpha[j] <= 1e-15 {
                alpha[j] = 0.0;
                false
            } else {
                true
            }
        });
        let total: f64 = active.iter().map(|&j| alpha[j]).sum();
        for &j in active.iter() {
            alpha[j] /= total;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// 1-based functional index.
    pub n: usize,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageCheck {
    pub point: usize,
    pub distance: f64,
    pub lower_bound: f64,
    pub pass: bool,
    /// Solver did not certify the distance on either side of `tau`.
    pub inconclusive: bool,
    #[serde(skip)]
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub model_id: String,
    pub functionals: Vec<Vec<f64>>,
    pub k: f64,
    pub expected_norm: MomentReport,
    /// `max_n ‖x_n*(X)‖_{ln(n+2)} / Ê‖X‖`, the smallest `K` the moment
    /// condition accepts.
    pub measured_k: f64,
    pub tau: f64,
    pub moment_results: Vec<MomentCheck>,
    pub coverage_results: Vec<CoverageCheck>,
    pub passes: bool,
    pub inconclusive: bool,
}

pub const K_GRID: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0];

impl RegularityCertificate {
    pub fn moments_pass(&self) -> bool {
        self.moment_results.iter().all(|c| c.pass)
    }

    pub fn coverage_passes(&self) -> bool {
        self.coverage_results.iter().all(|c| c.pass)
    }

    /// Smallest `K` in [`K_GRID`] for which this certificate would pass.
    pub fn smallest_passing_k(&self) -> Option<f64> {
        if !self.coverage_passes() {
            return None;
        }
        K_GRID.iter().copied().find(|k| *k >= self.measured_k)
    }

    /// Hull witnesses, one row per `(test point, generator)` with a nonzero
    /// coefficient.
    pub fn write_witness_csv(&self, path: &Path) -> Result<()> {
        self.write_witness_csv_to(csv::Writer::from_path(path)?)
    }

    pub fn write_witness_csv_to<W: std::io::Write>(&self, mut w: csv::Writer<W>) -> Result<()> {
        w.write_record(["point", "generator", "coefficient"])?;
        for c in &self.coverage_results {
            for (i, l) in c.coefficients.iter().enumerate().filter(|(_, l)| **l != 0.0) {
                w.write_record([c.point.to_string(), i.to_string(), l.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `e_1, .., e_dim`.
pub fn coordinate_functionals(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect()
}

/// Default coverage tolerance `1e-3 sqrt(tr Σ) / dim`.
pub fn default_tau(metric: &MetricModel) -> f64 {
    1e-3 * metric.trace().sqrt() / metric.dim as f64
}

pub const HULL_MAX_ITER: usize = 20_000;

#[allow(clippy::too_many_arguments)]
pub fn check_regularity(
    model: &RandomVectorModel,
    functionals: &[Vec<f64>],
    k: f64,
    test_points: &DirectionSet,
    m: usize,
    tau: Option<f64>,
    seed: u64,
) -> Result<RegularityCertificate> {
    model.validate()?;
    if functionals.is_empty() {
        return Err(Error::Parameter("no functionals".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("K must be positive, got {k}")));
    }
    let proj = sample_projections(model, functionals, m, seed, streams::MODEL_X)?;
    let expected_norm = mean_with_ci(&proj.norms, DEFAULT_DELTA)?;
    let bound = k * expected_norm.mean;
    let moment_results = proj
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let value = log_indexed_norm(v, i + 1)?;
            Ok(MomentCheck { n: i + 1, value, bound, pass: value <= bound })
        })
        .collect::<Result<Vec<_>>>()?;
    let measured_k = moment_results.iter().map(|c| c.value).fold(0.0, f64::max) / expected_norm.mean;

    let metric = estimate_metric(model, m, seed)?;
    let tau = tau.unwrap_or_else(|| default_tau(&metric));
    let points: Vec<Vec<f64>> = test_points
        .resolve(model.dim, &model.norm, seed)?
        .into_iter()
        .map(|p| {
            let dn = model.norm.dual_eval(&p);
            if dn > 1.0 {
                p.into_iter().map(|v| v / dn).collect()
            } else {
                p
            }
        })
        .collect();
    let coverage_results = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let h = hull_distance(p, functionals, &metric, 0.1 * tau, HULL_MAX_ITER)?;
            let pass = h.distance <= tau;
            Ok(CoverageCheck {
                point: i,
                distance: h.distance,
                lower_bound: h.lower_bound,
                pass,
                inconclusive: !h.converged && !pass && h.lower_bound <= tau,
                coefficients: h.coefficients,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passes = moment_results.iter().all(|c| c.pass) && coverage_results.iter().all(|c| c.pass);
    let inconclusive = coverage_results.iter().any(|c| c.inconclusive);
    Ok(RegularityCertificate {
        model_id: model.id(),
        functionals: functionals.to_vec(),
        k,
        expected_norm,
        measured_k,
        tau,
        moment_results,
        coverage_results,
        passes,
        inconclusive,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantAudit {
    /// `e² + Σ_{n>=1} ∫_{e²}^∞ t^{-ln(n+2)} dt`
    pub value: f64,
    pub terms_summed: usize,
    /// Half-width of the bracket on the analytic tail.
    pub tail_uncertainty: f64,
}

/// Evaluates the constant bounding `E sup_n |x_n*(Y)| / (K E‖X‖)`.
///
/// Term `n` is `∫_{e²}^∞ t^{-p} dt = e^{2(1-p)} / (p - 1) = e² (n+2)^{-2} /
/// (ln(n+2) - 1)`. The terms decrease, so the remainder after `N` terms lies
/// between `∫_{N+1}^∞` and `∫_N^∞` of the same expression, and
/// `∫_a^∞ e² (x+2)^{-2} / (ln(x+2) - 1) dx = e E1(ln(a+2) - 1)`.
pub fn constant_audit() -> ConstantAudit {
    const N: usize = 1_000_000;
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let term = |n: usize| {
        let x = (n + 2) as f64;
        e2 / (x * x * (x.ln() - 1.0))
    };
    // smallest terms first
    let partial: f64 = (1..=N).rev().map(term).sum();
    let tail_hi = std::f64::consts::E * exp_integral_e1(((N + 2) as f64).ln() - 1.0);
    let tail_lo = std::f64::consts::E * exp_integral_e1(((N + 3) as f64).ln() - 1.0);
    ConstantAudit {
        value: e2 + partial + 0.5 * (tail_hi + tail_lo),
        terms_summed: N,
        tail_uncertainty: 0.5 * (tail_hi - tail_lo),
    }
}

/// The audited constant alone.
pub fn constant_audit_prop1() -> f64 {
    constant_audit().value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{NormTag, ScalarDist};

    #[test]
    fn generator_point_has_zero_distance() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let h = hull_distance(&[1.0, 0.0], &gens, &MetricModel::identity(2), 1e-9, 1000).unwrap();
        assert!(h.distance < 1e-9 && h.converged);
        let h = hull_distance(&[0.0, -1.0], &gens, &MetricModel::identity(2), 1e-9, 1000).unwrap();
        assert!(h.distance < 1e-9);
        assert!((h.coefficients[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn anisotropic_single_generator() {
        let metric = MetricModel::diagonal(&[4.0, 1.0]).unwrap();
        let h = hull_distance(&[0.0, 2.0], &[vec![0.0, 1.0]], &metric, 1e-10, 1000).unwrap();
        assert!((h.distance - 1.0).abs() < 1e-9);
        assert!((h.coefficients[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_point_is_not_covered() {
        let h = hull_distance(&[0.0, 1.0], &[vec![1.0, 0.0]], &MetricModel::identity(2), 1e-10, 1000).unwrap();
        assert!((h.distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hull_errors() {
        let id = MetricModel::identity(2);
        assert!(hull_distance(&[1.0, 0.0], &[], &id, 1e-6, 10).is_err());
        assert!(hull_distance(&[1.0, 0.0], &[vec![1.0]], &id, 1e-6, 10).is_err());
        assert!(hull_distance(&[1.0, 0.0], &[vec![1.0, 0.0]], &id, 0.0, 10).is_err());
    }

    #[test]
    fn non_convergence_is_flagged() {
        let gens: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).cos(), (i as f64).sin(), 0.3]).collect();
        let h = hull_distance(&[0.1, 0.05, 0.02], &gens, &MetricModel::identity(3), 1e-14, 0).unwrap();
        assert!(!h.converged);
        assert!(h.distance.is_finite());
    }

    #[test]
    fn clipped_metric_is_psd() {
        let m = MetricModel::from_matrix(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        // eigenvalues 3 and -1; the -1 direction is clipped
        assert!(m.quadratic(&[1.0, -1.0]).abs() < 1e-12);
        assert!((m.quadratic(&[1.0, 1.0]) - 6.0).abs() < 1e-12);
        assert!((m.distance(&[1.0, 1.0], &[0.0, 0.0]) - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn metric_scaling_one_dim() {
        let m = RandomVectorModel::iid(1, ScalarDist::StandardGaussian, NormTag::SupNorm).scaled(2.0);
        let metric = estimate_metric(&m, 200_000, 3).unwrap();
        // Var(g^2) = 2, so Var(4 g^2) = 32 and the SE of the mean is sqrt(32 / m)
        let se = (32.0f64 / 200_000.0).sqrt();
        assert!((metric.covariance[0] - 4.0).abs() < 3.0 * se);
    }

    #[test]
    fn empirical_metric_needs_enough_samples() {
        let m = RandomVectorModel::iid(4, ScalarDist::StandardGaussian, NormTag::SupNorm);
        assert!(matches!(empirical_metric(&m, 3, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn constant_audit_first_term() {
        let e2 = std::f64::consts::E.powi(2);
        let p = 3f64.ln();
        let first = e2 / 9.0 / (p - 1.0);
        assert!((first - (2.0 * (1.0 - p)).exp() / (p - 1.0)).abs() < 1e-12);
        let a = constant_audit();
        assert!(a.value > e2 + first && a.value <= 20.0);
        assert!(a.tail_uncertainty < 1e-9);
    }
}
