//! Empirical weak tail domination `Y ≺ω X`.
//!
//! For each functional `u` of a finite direction set and each threshold `t`
//! of a grid, the survival functions `P(|<u,Y>| >= t)` and `P(|<u,X>| >= t)`
//! are estimated with DKW bands, Bonferroni-split over all comparisons.

use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{EmpiricalTail, TailEstimate};
use crate::stochastic::rng::{streams, StreamKey};
use crate::stochastic::{sample_projections, NormTag, RandomVectorModel};

/// Finite families of linear functionals on `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DirectionSet {
    /// Normalized Gaussian vectors.
    UnitSphereRandom { count: usize },
    /// Extreme points of the dual unit ball of the model norm.
    DualBallExtreme,
    /// Random `±1` vectors.
    SignVectors { count: usize },
    Explicit { functionals: Vec<Vec<f64>> },
    Union { sets: Vec<DirectionSet> },
}

impl DirectionSet {
    /// Dual-ball extreme points plus 64 random unit directions.
    pub fn default_probe() -> Self {
        Self::with_random(64)
    }

    pub fn with_random(count: usize) -> Self {
        DirectionSet::Union { sets: vec![DirectionSet::DualBallExtreme, DirectionSet::UnitSphereRandom { count }] }
    }

    /// Materializes the functionals. Random members are drawn from
    /// `(seed, DIRECTIONS)`, one keyed column per direction.
    pub fn resolve(&self, dim: usize, norm: &NormTag, seed: u64) -> Result<Vec<Vec<f64>>> {
        let key = StreamKey::new(seed, streams::DIRECTIONS);
        let mut next = 0u64;
        let mut out = Vec::new();
        self.resolve_into(dim, norm, &key, &mut next, &mut out)?;
        if out.is_empty() {
            return Err(Error::Config("direction set is empty".into()));
        }
        Ok(out)
    }

    fn resolve_into(
        &self,
        dim: usize,
        norm: &NormTag,
        key: &StreamKey,
        next: &mut u64,
        out: &mut Vec<Vec<f64>>,
    ) -> Result<()> {
        match self {
            DirectionSet::UnitSphereRandom { count } => {
                for _ in 0..*count {
                    let mut rng = key.column(*next);
                    *next += 1;
                    out.push(random_unit_vector(dim, &mut rng));
                }
            }
            DirectionSet::SignVectors { count } => {
                use rand::Rng;
                for _ in 0..*count {
                    let mut rng = key.column(*next);
                    *next += 1;
                    out.push((0..dim).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect());
                }
            }
            DirectionSet::DualBallExtreme => out.extend(dual_ball_extremes(norm, dim)?),
            DirectionSet::Explicit { functionals } => {
                if let Some(bad) = functionals.iter().find(|f| f.len() != dim) {
                    return Err(Error::Shape(format!("functional of length {} for dimension {dim}", bad.len())));
                }
                out.extend(functionals.iter().cloned());
            }
            DirectionSet::Union { sets } => {
                for s in sets {
                    s.resolve_into(dim, norm, key, next, out)?;
                }
            }
        }
        Ok(())
    }
}

pub fn random_unit_vector<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Extreme points of the unit ball of the dual norm.
pub fn dual_ball_extremes(norm: &NormTag, dim: usize) -> Result<Vec<Vec<f64>>> {
    norm.check_dim(dim)?;
    let signed_basis = |d: usize| {
        let mut v = Vec::with_capacity(2 * d);
        for i in 0..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = s;
                v.push(e);
            }
        }
        v
    };
    match norm {
        NormTag::SupNorm => Ok(signed_basis(dim)),
        NormTag::SumNorm => {
            if dim > 12 {
                return Err(Error::Config(format!("2^{dim} sign vectors is too many dual extreme points")));
            }
            Ok((0..1u32 << dim)
                .map(|mask| (0..dim).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect())
        }
        NormTag::EuclideanNorm => {
            Err(Error::Config("the Euclidean dual ball has no finite set of extreme points".into()))
        }
        NormTag::ProductSup { inner, copies } => {
            let block = dim / copies;
            let inner_ext = dual_ball_extremes(inner, block)?;
            let mut out = Vec::with_capacity(copies * inner_ext.len());
            for c in 0..*copies {
                for e in &inner_ext {
                    let mut v = vec![0.0; dim];
                    v[c * block..(c + 1) * block].copy_from_slice(e);
                    out.push(v);
                }
            }
            Ok(out)
        }
    }
}

/// Threshold grid: quantiles of the `|<u,X>|` samples of each direction plus
/// fixed absolute thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub quantiles: Vec<f64>,
    pub absolute: Vec<f64>,
}

impl Default for TGrid {
    fn default() -> Self {
        Self { quantiles: vec![0.5, 0.75, 0.9, 0.95, 0.99, 0.999], absolute: Vec::new() }
    }
}

impl TGrid {
    pub fn absolute(ts: Vec<f64>) -> Self {
        Self { quantiles: Vec::new(), absolute: ts }
    }

    pub fn with_absolute(mut self, ts: Vec<f64>) -> Self {
        self.absolute = ts;
        self
    }

    pub fn len(&self) -> usize {
        self.quantiles.len() + self.absolute.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Config("threshold grid is empty".into()));
        }
        if self.quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(Error::Config("grid quantiles must lie in (0, 1)".into()));
        }
        if self.absolute.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::Config("absolute thresholds must be positive".into()));
        }
        if self.absolute.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("absolute thresholds must be increasing".into()));
        }
        Ok(())
    }

    fn thresholds(&self, x_tail: &EmpiricalTail) -> Vec<f64> {
        let mut ts: Vec<f64> = self.quantiles.iter().map(|q| x_tail.quantile(*q)).filter(|t| *t > 0.0).collect();
        ts.extend(&self.absolute);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominationVerdict {
    Dominated,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationRecord {
    pub direction: usize,
    pub t: f64,
    pub survival_y: TailEstimate,
    pub survival_x: TailEstimate,
    /// `estimate_x - estimate_y`; negative where `Y` looks heavier.
    pub margin: f64,
    /// Lower band of `Y` strictly above the upper band of `X`.
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationConfigEcho {
    pub model_y: String,
    pub model_x: String,
    pub m: usize,
    pub delta: f64,
    pub delta_per_comparison: f64,
    pub seed: u64,
    pub directions: usize,
    pub grid: TGrid,
    pub exact_y: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub verdict: DominationVerdict,
    /// Largest `estimate_y - estimate_x` over all comparisons.
    pub max_excess: f64,
    /// Allowed excess for a `Dominated` verdict: the sum of the two band
    /// half-widths.
    pub tolerance: f64,
    pub config: DominationConfigEcho,
    pub records: Vec<DominationRecord>,
}

impl DominationReport {
    pub fn violations(&self) -> impl Iterator<Item = &DominationRecord> {
        self.records.iter().filter(|r| r.violated)
    }

    /// One row per `(direction, t)`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        self.write_csv_to(&mut w, None)?;
        w.flush()?;
        Ok(())
    }

    /// Rows with an optional leading `n` column.
    pub fn write_csv_to<W: std::io::Write>(&self, w: &mut csv::Writer<W>, n: Option<usize>) -> Result<()> {
        for r in &self.records {
            w.serialize(CsvRow {
                n,
                direction: r.direction,
                t: r.t,
                survival_y: r.survival_y.estimate,
                survival_y_lower: r.survival_y.lower,
                survival_y_upper: r.survival_y.upper,
                survival_x: r.survival_x.estimate,
                survival_x_lower: r.survival_x.lower,
                survival_x_upper: r.survival_x.upper,
                margin: r.margin,
                violated: r.violated,
            })?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    direction: usize,
    t: f64,
    survival_y: f64,
    survival_y_lower: f64,
    survival_y_upper: f64,
    survival_x: f64,
    survival_x_lower: f64,
    survival_x_upper: f64,
    margin: f64,
    violated: bool,
}

/// Where the `Y` side of a comparison comes from.
pub enum YSide<'a> {
    Sampled(&'a RandomVectorModel),
    /// Exact survival `(direction, t) -> P(|<u,Y>| >= t)`.
    Exact { id: String, survival: &'a (dyn Fn(&[f64], f64) -> f64 + Sync) },
}

pub const MIN_SAMPLES: usize = 1000;

pub fn check_weak_domination(
    model_y: &RandomVectorModel,
    model_x: &RandomVectorModel,
    dirs: &DirectionSet,
    grid: &TGrid,
    m: usize,
    delta: f64,
    seed: u64,
) -> Result<DominationReport> {
    compare(YSide::Sampled(model_y), model_x, dirs, grid, m, delta, seed)
}

/// General form of [`check_weak_domination`], allowing an exact `Y` tail.
pub fn compare(
    y: YSide<'_>,
    model_x: &RandomVectorModel,
    dirs: &DirectionSet,
    grid: &TGrid,
    m: usize,
    delta: f64,
    seed: u64,
) -> Result<DominationReport> {
    model_x.validate()?;
    grid.validate()?;
    if m < MIN_SAMPLES {
        return Err(Error::Config(format!("at least {MIN_SAMPLES} samples per side are required, got {m}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    if let YSide::Sampled(model_y) = &y {
        model_y.validate()?;
        if model_y.dim != model_x.dim {
            return Err(Error::Shape(format!("dimensions differ: {} vs {}", model_y.dim, model_x.dim)));
        }
    }
    let directions = dirs.resolve(model_x.dim, &model_x.norm, seed)?;
    let comparisons = directions.len() * grid.len();
    let delta_each = delta / comparisons as f64;

    let x_proj = sample_projections(model_x, &directions, m, seed, streams::MODEL_X)?;
    let y_proj = match &y {
        YSide::Sampled(model_y) => Some(sample_projections(model_y, &directions, m, seed, streams::MODEL_Y)?),
        YSide::Exact { .. } => None,
    };

    let per_direction: Vec<Result<Vec<DominationRecord>>> = (0..directions.len())
        .into_par_iter()
        .map(|j| {
            let x_tail = EmpiricalTail::of_abs(&x_proj.values[j], delta_each)?;
            let y_tail = match &y_proj {
                Some(p) => Some(EmpiricalTail::of_abs(&p.values[j], delta_each)?),
                None => None,
            };
            let records = grid
                .thresholds(&x_tail)
                .into_iter()
                .map(|t| {
                    let survival_x = x_tail.survival(t);
                    let survival_y = match (&y_tail, &y) {
                        (Some(tail), _) => tail.survival(t),
                        (None, YSide::Exact { survival, .. }) => TailEstimate::exact(survival(&directions[j], t)),
                        (None, YSide::Sampled(_)) => unreachable!(),
                    };
                    DominationRecord {
                        direction: j,
                        t,
                        survival_y,
                        survival_x,
                        margin: survival_x.estimate - survival_y.estimate,
                        violated: survival_y.lower > survival_x.upper,
                    }
                })
                .collect();
            Ok(records)
        })
        .collect();
    let mut records = Vec::new();
    for r in per_direction {
        records.extend(r?);
    }

    let eps_x = crate::stats::dkw_epsilon(m, delta_each);
    let tolerance = if y_proj.is_some() { 2.0 * eps_x } else { eps_x };
    let max_excess = records.iter().map(|r| -r.margin).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if records.iter().any(|r| r.violated) {
        DominationVerdict::Violated
    } else if max_excess <= tolerance {
        DominationVerdict::Dominated
    } else {
        DominationVerdict::Inconclusive
    };
    let model_y_id = match &y {
        YSide::Sampled(model_y) => model_y.id(),
        YSide::Exact { id, .. } => id.clone(),
    };
    Ok(DominationReport {
        verdict,
        max_excess,
        tolerance,
        config: DominationConfigEcho {
            model_y: model_y_id,
            model_x: model_x.id(),
            m,
            delta,
            delta_per_comparison: delta_each,
            seed,
            directions: directions.len(),
            grid: grid.clone(),
            exact_y: y_proj.is_none(),
        },
        records,
    })
}

/// `eta Y / c2` with `P(eta = 1) = 1 / c1`: the law that is weakly dominated
/// by `X` whenever `P(|x*(Y)| >= t) <= c1 P(|x*(X)| >= t / c2)`.
pub fn thin_and_scale(model: &RandomVectorModel, c1: f64, c2: f64) -> Result<RandomVectorModel> {
    if !(c1 >= 1.0 && c1.is_finite()) {
        return Err(Error::Parameter(format!("c1 must be >= 1, got {c1}")));
    }
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::Parameter(format!("c2 must be positive, got {c2}")));
    }
    let m = RandomVectorModel::thinned(model.clone(), 1.0 / c1, 1.0 / c2);
    m.validate()?;
    Ok(m)
}

/// `eta (Y_1, .., Y_copies)` in `l^copies_inf(F)` with one shared Bernoulli
/// factor `eta`, `P(eta = 1) = keep_prob`.
pub fn symmetrized_product(model: &RandomVectorModel, copies: usize, keep_prob: f64) -> Result<RandomVectorModel> {
    if copies == 0 {
        return Err(Error::Parameter("copies must be at least 1".into()));
    }
    let m = RandomVectorModel::thinned(RandomVectorModel::product(model.clone(), copies), keep_prob, 1.0);
    m.validate()?;
    Ok(m)
}
