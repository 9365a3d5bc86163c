//! Declarative random vector models.
//!
//! A [`RandomVectorModel`] describes a symmetric law on `R^dim` together with
//! the norm that turns it into a Banach-space valued vector. Models are plain
//! data: they serialize to JSON and their identity is a hash of that JSON.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Symmetric scalar laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScalarDist {
    StandardGaussian,
    Rademacher,
    /// Uniform on `[-halfwidth, halfwidth]`.
    UniformSym { halfwidth: f64 },
    /// Density proportional to `exp(-|t|^p)`, `p >= 1`.
    ExpPower { p: f64 },
}

impl ScalarDist {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarDist::StandardGaussian | ScalarDist::Rademacher => Ok(()),
            ScalarDist::UniformSym { halfwidth } => {
                if halfwidth.is_finite() && halfwidth > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("UniformSym halfwidth must be positive, got {halfwidth}")))
                }
            }
            ScalarDist::ExpPower { p } => {
                if p.is_finite() && p >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("ExpPower exponent must be finite and >= 1, got {p}")))
                }
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ScalarDist::StandardGaussian | ScalarDist::Rademacher => 1.0,
            ScalarDist::UniformSym { halfwidth } => halfwidth * halfwidth / 3.0,
            // E|T|^2 = Gamma(3/p) / Gamma(1/p)
            ScalarDist::ExpPower { p } => {
                use statrs::function::gamma::ln_gamma;
                (ln_gamma(3.0 / p) - ln_gamma(1.0 / p)).exp()
            }
        }
    }

    /// One draw. The caller is responsible for having validated `self`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ScalarDist::StandardGaussian => StandardNormal.sample(rng),
            ScalarDist::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            ScalarDist::UniformSym { halfwidth } => halfwidth * (2.0 * rng.random::<f64>() - 1.0),
            ScalarDist::ExpPower { p } => sample_exp_power(p, rng),
        }
    }
}

/// Exact sampler for the density `exp(-|t|^p) / (2 Gamma(1 + 1/p))`.
///
/// For `p` in `[1, 2]` this is acceptance-rejection from a Laplace envelope:
/// `t - t^p <= c` with `c = t* - t*^p`, `t* = p^(-1/(p-1))`, so
/// `exp(-t^p) <= e^c exp(-t)`. Beyond `p = 2` the envelope becomes wasteful and
/// `|T| = G^(1/p)` with `G ~ Gamma(1/p, 1)` is used instead.
fn sample_exp_power<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    if p == 1.0 {
        let e: f64 = Exp1.sample(rng);
        return sign * e;
    }
    if p <= 2.0 {
        let t_star = p.powf(-1.0 / (p - 1.0));
        let c = t_star - t_star.powf(p);
        loop {
            let e: f64 = Exp1.sample(rng);
            let log_accept = -(e.powf(p) - e + c);
            let u: f64 = rng.random();
            if u.ln() < log_accept {
                return sign * e;
            }
        }
    }
    let g: f64 = Gamma::new(1.0 / p, 1.0).expect("shape checked by validate").sample(rng);
    sign * g.powf(1.0 / p)
}

/// Norms on `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum NormTag {
    SupNorm,
    EuclideanNorm,
    SumNorm,
    /// `l^copies_inf(F)`: the vector is `copies` equal blocks and the norm is
    /// the largest inner norm over the blocks.
    ProductSup { inner: Box<NormTag>, copies: usize },
}

impl NormTag {
    pub fn product(inner: NormTag, copies: usize) -> Self {
        NormTag::ProductSup { inner: Box::new(inner), copies }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            NormTag::SupNorm | NormTag::EuclideanNorm | NormTag::SumNorm => {
                if dim == 0 {
                    Err(Error::Shape("norm applied to an empty vector".into()))
                } else {
                    Ok(())
                }
            }
            NormTag::ProductSup { inner, copies } => {
                if *copies == 0 || !dim.is_multiple_of(*copies) {
                    return Err(Error::Shape(format!("dimension {dim} is not {copies} equal blocks")));
                }
                inner.check_dim(dim / copies)
            }
        }
    }

    /// Norm of one vector. Assumes `check_dim(v.len())` succeeded.
    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            NormTag::SupNorm => v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())),
            NormTag::EuclideanNorm => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormTag::SumNorm => v.iter().map(|x| x.abs()).sum(),
            NormTag::ProductSup { inner, copies } => {
                let block = v.len() / copies;
                v.chunks_exact(block).map(|b| inner.eval(b)).fold(0.0, f64::max)
            }
        }
    }

    /// Norm of a linear functional with respect to the dual of `self`.
    pub fn dual_eval(&self, v: &[f64]) -> f64 {
        match self {
            NormTag::SupNorm => v.iter().map(|x| x.abs()).sum(),
            NormTag::EuclideanNorm => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormTag::SumNorm => v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())),
            NormTag::ProductSup { inner, copies } => {
                let block = v.len() / copies;
                v.chunks_exact(block).map(|b| inner.dual_eval(b)).sum()
            }
        }
    }
}

/// Closed set of random scale factors for [`ModelSpec::MixtureScaled`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleFn {
    /// `9 (|g| + 1)` with `g` a fresh standard Gaussian.
    NinePlusGauss,
}

impl ScaleFn {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ScaleFn::NinePlusGauss => {
                let g: f64 = StandardNormal.sample(rng);
                9.0 * (g.abs() + 1.0)
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match self {
            // 81 E(|g| + 1)^2 = 81 (2 + 2 sqrt(2/pi))
            ScaleFn::NinePlusGauss => 81.0 * (2.0 + 2.0 * (2.0 / std::f64::consts::PI).sqrt()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelSpec {
    IidCoords {
        dist: ScalarDist,
    },
    /// `V xi` with `V` a `dim x k` matrix (stored as `dim` rows) and `xi` iid.
    SeriesWithCoeffs {
        coeff_matrix: Vec<Vec<f64>>,
        driver: ScalarDist,
    },
    MixtureScaled {
        scale_fn: ScaleFn,
        base: Box<RandomVectorModel>,
    },
    Product {
        base: Box<RandomVectorModel>,
        copies: usize,
    },
    /// `eta * scale * base` with `P(eta = 1) = keep_prob`, `eta` in `{0, 1}`.
    Thinned {
        base: Box<RandomVectorModel>,
        keep_prob: f64,
        scale: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomVectorModel {
    pub dim: usize,
    pub norm: NormTag,
    pub spec: ModelSpec,
}

impl RandomVectorModel {
    pub fn iid(dim: usize, dist: ScalarDist, norm: NormTag) -> Self {
        Self { dim, norm, spec: ModelSpec::IidCoords { dist } }
    }

    pub fn series(coeff_matrix: Vec<Vec<f64>>, driver: ScalarDist, norm: NormTag) -> Self {
        Self { dim: coeff_matrix.len(), norm, spec: ModelSpec::SeriesWithCoeffs { coeff_matrix, driver } }
    }

    pub fn mixture(scale_fn: ScaleFn, base: RandomVectorModel) -> Self {
        Self { dim: base.dim, norm: base.norm.clone(), spec: ModelSpec::MixtureScaled { scale_fn, base: Box::new(base) } }
    }

    /// `copies` independent copies, concatenated, under the product sup norm.
    pub fn product(base: RandomVectorModel, copies: usize) -> Self {
        Self {
            dim: base.dim * copies,
            norm: NormTag::product(base.norm.clone(), copies),
            spec: ModelSpec::Product { base: Box::new(base), copies },
        }
    }

    pub fn thinned(base: RandomVectorModel, keep_prob: f64, scale: f64) -> Self {
        Self { dim: base.dim, norm: base.norm.clone(), spec: ModelSpec::Thinned { base: Box::new(base), keep_prob, scale } }
    }

    /// The law of `a V`. Samples are exactly `a` times the samples of `self`.
    pub fn scaled(self, a: f64) -> Self {
        Self::thinned(self, 1.0, a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Model("dimension must be at least 1".into()));
        }
        self.norm.check_dim(self.dim).map_err(|e| Error::Model(e.to_string()))?;
        let same_norm = |base: &RandomVectorModel| -> Result<()> {
            base.validate()?;
            if base.dim != self.dim || base.norm != self.norm {
                return Err(Error::Model("wrapper must keep the dimension and norm of its base".into()));
            }
            Ok(())
        };
        match &self.spec {
            ModelSpec::IidCoords { dist } => dist.validate(),
            ModelSpec::SeriesWithCoeffs { coeff_matrix, driver } => {
                driver.validate()?;
                if coeff_matrix.len() != self.dim {
                    return Err(Error::Model(format!(
                        "coefficient matrix has {} rows for dimension {}",
                        coeff_matrix.len(),
                        self.dim
                    )));
                }
                let k = coeff_matrix[0].len();
                if k == 0 || coeff_matrix.iter().any(|row| row.len() != k) {
                    return Err(Error::Model("coefficient matrix rows must be nonempty and of equal length".into()));
                }
                if coeff_matrix.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::Model("non-finite coefficient".into()));
                }
                Ok(())
            }
            ModelSpec::MixtureScaled { base, .. } => same_norm(base),
            ModelSpec::Thinned { base, keep_prob, scale } => {
                if !(*keep_prob > 0.0 && *keep_prob <= 1.0) {
                    return Err(Error::Model(format!("keep_prob must lie in (0, 1], got {keep_prob}")));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Model(format!("scale must be positive, got {scale}")));
                }
                same_norm(base)
            }
            ModelSpec::Product { base, copies } => {
                base.validate()?;
                if *copies == 0 {
                    return Err(Error::Model("Product needs at least one copy".into()));
                }
                if self.dim != base.dim * copies {
                    return Err(Error::Model(format!(
                        "Product of {copies} copies of dimension {} cannot have dimension {}",
                        base.dim, self.dim
                    )));
                }
                match &self.norm {
                    NormTag::ProductSup { inner, copies: c } if *c == *copies && **inner == base.norm => Ok(()),
                    _ => Err(Error::Model("Product must carry the ProductSup norm over its base norm".into())),
                }
            }
        }
    }

    /// Draws one vector into `out` (`out.len() == self.dim`).
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        match &self.spec {
            ModelSpec::IidCoords { dist } => {
                for v in out.iter_mut() {
                    *v = dist.sample(rng);
                }
            }
            ModelSpec::SeriesWithCoeffs { coeff_matrix, driver } => {
                let xi: Vec<f64> = (0..coeff_matrix[0].len()).map(|_| driver.sample(rng)).collect();
                for (v, row) in out.iter_mut().zip(coeff_matrix) {
                    *v = row.iter().zip(&xi).map(|(a, b)| a * b).sum();
                }
            }
            ModelSpec::MixtureScaled { scale_fn, base } => {
                let s = scale_fn.sample(rng);
                base.fill(rng, out);
                out.iter_mut().for_each(|v| *v *= s);
            }
            ModelSpec::Product { base, .. } => {
                for block in out.chunks_exact_mut(base.dim) {
                    base.fill(rng, block);
                }
            }
            ModelSpec::Thinned { base, keep_prob, scale } => {
                // no Bernoulli draw when nothing is thinned, so scaled models
                // reuse the exact random numbers of their base
                let keep = *keep_prob >= 1.0 || rng.random::<f64>() < *keep_prob;
                base.fill(rng, out);
                let factor = if keep { *scale } else { 0.0 };
                out.iter_mut().for_each(|v| *v *= factor);
            }
        }
    }

    /// Exact second-moment matrix `E V V^T`, row-major `dim x dim`.
    pub fn second_moment_matrix(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        match &self.spec {
            ModelSpec::IidCoords { dist } => {
                let var = dist.variance();
                for i in 0..d {
                    out[i * d + i] = var;
                }
            }
            ModelSpec::SeriesWithCoeffs { coeff_matrix, driver } => {
                let var = driver.variance();
                for i in 0..d {
                    for j in 0..d {
                        let dot: f64 = coeff_matrix[i].iter().zip(&coeff_matrix[j]).map(|(a, b)| a * b).sum();
                        out[i * d + j] = var * dot;
                    }
                }
            }
            ModelSpec::MixtureScaled { scale_fn, base } => {
                let s2 = scale_fn.second_moment();
                out = base.second_moment_matrix().into_iter().map(|v| v * s2).collect();
            }
            ModelSpec::Thinned { base, keep_prob, scale } => {
                let f = keep_prob * scale * scale;
                out = base.second_moment_matrix().into_iter().map(|v| v * f).collect();
            }
            ModelSpec::Product { base, copies } => {
                let inner = base.second_moment_matrix();
                let b = base.dim;
                for c in 0..*copies {
                    for i in 0..b {
                        for j in 0..b {
                            out[(c * b + i) * d + c * b + j] = inner[i * b + j];
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_series(&self) -> bool {
        matches!(self.spec, ModelSpec::SeriesWithCoeffs { .. })
    }

    /// Stable identifier: hex prefix of the SHA-256 of the model JSON.
    pub fn id(&self) -> String {
        let json = serde_json::to_vec(self).expect("models always serialize");
        let digest = Sha256::digest(&json);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }
}
