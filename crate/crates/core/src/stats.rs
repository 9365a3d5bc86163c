//! Distribution-free empirical estimates shared by all verifiers.
//!
//! Survival functions carry Dvoretzky–Kiefer–Wolfowitz bands, means carry
//! normal-approximation intervals, and high log-indexed moments are computed
//! in log space.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 0.01;

/// DKW half-width `sqrt(ln(2/delta) / (2m))`.
pub fn dkw_epsilon(m: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * m as f64)).sqrt()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("confidence parameter must lie in (0, 1), got {delta}")))
    }
}

/// A probability estimate with its confidence band, clipped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl TailEstimate {
    pub fn exact(p: f64) -> Self {
        Self { estimate: p, lower: p, upper: p }
    }

    pub fn with_band(estimate: f64, eps: f64) -> Self {
        Self { estimate, lower: (estimate - eps).max(0.0), upper: (estimate + eps).min(1.0) }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Sorted scalar samples answering `P(V >= t)` queries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalTail {
    sorted_values: Vec<f64>,
    delta: f64,
}

impl EmpiricalTail {
    pub fn new(mut values: Vec<f64>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        if values.is_empty() {
            return Err(Error::Parameter("empirical tail needs at least one sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parameter("NaN sample".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted_values: values, delta })
    }

    /// Tail of `|v|`.
    pub fn of_abs(values: &[f64], delta: f64) -> Result<Self> {
        Self::new(values.iter().map(|v| v.abs()).collect(), delta)
    }

    pub fn m(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn epsilon(&self) -> f64 {
        dkw_epsilon(self.m(), self.delta)
    }

    /// Number of samples strictly below `t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.sorted_values.partition_point(|v| *v < t)
    }

    pub fn count_at_most(&self, t: f64) -> usize {
        self.sorted_values.partition_point(|v| *v <= t)
    }

    pub fn survival(&self, t: f64) -> TailEstimate {
        let above = self.m() - self.count_below(t);
        TailEstimate::with_band(above as f64 / self.m() as f64, self.epsilon())
    }

    /// Lower empirical quantile: the smallest sample with at least `q m`
    /// samples at or below it.
    pub fn quantile(&self, q: f64) -> f64 {
        let m = self.m();
        let idx = ((q * m as f64).ceil() as usize).clamp(1, m) - 1;
        self.sorted_values[idx]
    }

    pub fn max(&self) -> f64 {
        *self.sorted_values.last().expect("nonempty")
    }

    /// Plug-in law of the maximum of `n` independent draws from this
    /// empirical distribution.
    pub fn max_law(&self, n: usize) -> MaxLaw<'_> {
        MaxLaw { tail: self, n }
    }
}

/// `empirical_survival`: estimate with DKW band.
pub fn empirical_survival(tail: &EmpiricalTail, t: f64) -> TailEstimate {
    tail.survival(t)
}

/// Law of `max_{i<=n} V_i` when the `V_i` are iid from an empirical measure.
///
/// With `v_(1) <= .. <= v_(m)`, `P(max >= v_(k)) = 1 - ((k-1)/m)^n`, and by
/// Abel summation `E g(max) = g(v_(1)) + Σ_{k>=2} (g(v_(k)) - g(v_(k-1)))
/// P(max >= v_(k))`.
pub struct MaxLaw<'a> {
    tail: &'a EmpiricalTail,
    n: usize,
}

impl MaxLaw<'_> {
    fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        let v = &self.tail.sorted_values;
        let m = v.len() as f64;
        let n = self.n as f64;
        let mut acc = g(v[0]);
        for k in 1..v.len() {
            let step = g(v[k]) - g(v[k - 1]);
            if step != 0.0 {
                acc += step * (1.0 - (k as f64 / m).powf(n));
            }
        }
        acc
    }

    pub fn mean(&self) -> f64 {
        self.expect(|v| v)
    }

    pub fn second_moment(&self) -> f64 {
        self.expect(|v| v * v)
    }

    /// `P(max >= a) = 1 - F(a-)^n`. The band is the image of the DKW band
    /// on `F` under this monotone map.
    pub fn survival(&self, a: f64) -> TailEstimate {
        let m = self.tail.m() as f64;
        let n = self.n as f64;
        let below = self.tail.count_below(a) as f64 / m;
        let eps = self.tail.epsilon();
        TailEstimate {
            estimate: 1.0 - below.powf(n),
            lower: 1.0 - (below + eps).min(1.0).powf(n),
            upper: 1.0 - (below - eps).max(0.0).powf(n),
        }
    }
}

/// `(mean |v|^p)^(1/p)` with `p = ln(n + 2)`, evaluated through log-sum-exp.
pub fn log_indexed_norm(samples: &[f64], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("functional index n starts at 1".into()));
    }
    let p = ((n + 2) as f64).ln();
    p_norm(samples, p)
}

/// `(mean |v|^p)^(1/p)` for `p > 0`, overflow-safe.
pub fn p_norm(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Parameter("no samples".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("moment order must be positive, got {p}")));
    }
    let logs: Vec<f64> = samples.iter().filter(|v| **v != 0.0).map(|v| p * v.abs().ln()).collect();
    if logs.is_empty() {
        return Ok(0.0);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    let log_mean = lse - (samples.len() as f64).ln();
    Ok((log_mean / p).exp())
}

/// `mean |v|^p`.
pub fn abs_moment(samples: &[f64], p: f64) -> Result<f64> {
    Ok(p_norm(samples, p)?.powf(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaleyZygmundCheck {
    pub theta: f64,
    /// Empirical `P(Z >= theta E Z)`.
    pub lhs: f64,
    /// `(1 - theta)^2 (E Z)^2 / E Z^2` under the empirical measure.
    pub rhs: f64,
    pub band: f64,
    pub holds: bool,
}

fn paley_zygmund_inner(samples: &[f64], theta: f64, band: f64) -> Result<PaleyZygmundCheck> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    if samples.is_empty() {
        return Err(Error::Parameter("no samples".into()));
    }
    if samples.iter().any(|z| !(*z >= 0.0)) {
        return Err(Error::Parameter("Paley-Zygmund needs nonnegative samples".into()));
    }
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    if mean == 0.0 {
        return Err(Error::Degenerate("E Z = 0".into()));
    }
    let second = samples.iter().map(|z| z * z).sum::<f64>() / m;
    let threshold = theta * mean;
    let lhs = samples.iter().filter(|z| **z >= threshold).count() as f64 / m;
    let rhs = (1.0 - theta).powi(2) * mean * mean / second;
    Ok(PaleyZygmundCheck { theta, lhs, rhs, band, holds: lhs >= rhs - band })
}

/// Paley–Zygmund comparison with a DKW allowance on the probability side.
pub fn paley_zygmund_check(samples: &[f64], theta: f64, delta: f64) -> Result<PaleyZygmundCheck> {
    check_delta(delta)?;
    paley_zygmund_inner(samples, theta, dkw_epsilon(samples.len(), delta))
}

/// The inequality for the empirical measure itself: no allowance at all.
pub fn paley_zygmund_exact(samples: &[f64], theta: f64) -> Result<PaleyZygmundCheck> {
    paley_zygmund_inner(samples, theta, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub m: usize,
    pub mean: f64,
    pub second_moment: f64,
    pub std_dev: f64,
    pub standard_error: f64,
    /// Normal-approximation half-width at level `1 - delta`.
    pub half_width: f64,
    pub delta: f64,
}

impl MomentReport {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

/// Two-sided standard normal quantile `z_{1 - delta/2}`.
pub fn normal_quantile(delta: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - delta / 2.0)
}

pub fn mean_with_ci(samples: &[f64], delta: f64) -> Result<MomentReport> {
    check_delta(delta)?;
    if samples.is_empty() {
        return Err(Error::Parameter("no samples".into()));
    }
    let m = samples.len();
    let mf = m as f64;
    // shifted sums: exact zero variance for constant input
    let shift = samples[0];
    let (s1, s2) = samples.iter().fold((0.0, 0.0), |(a, b), v| {
        let d = v - shift;
        (a + d, b + d * d)
    });
    let mean = shift + s1 / mf;
    let second_moment = samples.iter().map(|v| v * v).sum::<f64>() / mf;
    let var = if m > 1 { ((s2 - s1 * s1 / mf) / (mf - 1.0)).max(0.0) } else { 0.0 };
    let std_dev = var.sqrt();
    let standard_error = std_dev / mf.sqrt();
    Ok(MomentReport {
        m,
        mean,
        second_moment,
        std_dev,
        standard_error,
        half_width: normal_quantile(delta) * standard_error,
        delta,
    })
}
