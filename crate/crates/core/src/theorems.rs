//! End-to-end numerical checks of the regularity-to-strong-domination results.
//!
//! * [`verify_prop1`]: `E‖Y‖ <= 20 K E‖X‖` for `K`-regular `X` and `Y ≺ω X`.
//! * [`verify_thm1`]: `P(‖Y‖ >= t) <= (2/β) P(‖X‖ >= α t / (80 K))` under the
//!   product-regularity hypothesis and the small-ball hypothesis on maxima.
//! * [`check_condition_ii`], [`check_comp_mom`]: the two hypotheses on maxima
//!   of independent copies, estimated under the plug-in (empirical) law.
//!
//! Hypotheses are checked empirically before the conclusion is compared, and
//! every report is labelled conditional on those empirical checks. Only a
//! finite grid of `n` can ever be checked.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domination::{check_weak_domination, dual_ball_extremes, DirectionSet, DominationVerdict, TGrid};
use crate::error::{Error, Result};
use crate::regularity::{check_regularity, constant_audit_prop1, coordinate_functionals, RegularityCertificate, K_GRID};
use crate::stats::{mean_with_ci, normal_quantile, paley_zygmund_exact, EmpiricalTail, TailEstimate, DEFAULT_DELTA};
use crate::stochastic::rng::streams;
use crate::stochastic::{sample_norms, sample_projections, RandomVectorModel};

/// Constants of the strong-domination theorem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Moment-comparison constant `E max‖X_i‖² <= C (E max‖X_i‖)²`.
    pub c: Option<f64>,
    pub c1: f64,
    pub c2: f64,
}

impl TheoremParams {
    pub fn new(k: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { k, alpha, beta, c: None, c1: 1.0, c2: 1.0 };
        p.validate()?;
        Ok(p)
    }

    /// Paley–Zygmund: moment comparison with constant `c` gives `α = 1/2`
    /// and `β = 1/(4c)`.
    pub fn from_moment_ratio(k: f64, c: f64) -> Result<Self> {
        if !(c >= 1.0) {
            return Err(Error::Parameter(format!("moment ratio C must be >= 1, got {c}")));
        }
        let p = Self { k, alpha: 0.5, beta: 1.0 / (4.0 * c), c: Some(c), c1: 1.0, c2: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.alpha > 0.0 && self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Parameter(format!(
                "need K > 0, alpha > 0, beta in (0, 1]; got K={}, alpha={}, beta={}",
                self.k, self.alpha, self.beta
            )));
        }
        if !(self.c1 >= 1.0 && self.c2 >= 1.0) {
            return Err(Error::Parameter("C1 and C2 must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// A value with a confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn exact(v: f64) -> Self {
        Self { value: v, lower: v, upper: v }
    }

    pub fn around(value: f64, half_width: f64) -> Self {
        Self { value, lower: value - half_width, upper: value + half_width }
    }

    pub fn scale(self, a: f64) -> Self {
        Self { value: a * self.value, lower: a * self.lower, upper: a * self.upper }
    }

    fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

impl From<TailEstimate> for Interval {
    fn from(t: TailEstimate) -> Self {
        Self { value: t.estimate, lower: t.lower, upper: t.upper }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    /// The grid coordinate: `t` for tail checks, `n` for checks over maxima.
    pub at: f64,
    pub lhs: Interval,
    pub rhs: Interval,
    pub verdict: Verdict,
}

/// One inequality from the chain of a proof, evaluated numerically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: String,
    pub at: f64,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl StepRecord {
    fn at_most(step: &str, at: f64, value: f64, bound: f64) -> Self {
        Self { step: step.into(), at, value, bound, holds: value <= bound }
    }

    fn at_least(step: &str, at: f64, value: f64, bound: f64) -> Self {
        Self { step: step.into(), at, value, bound, holds: value >= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub claim: String,
    pub verdict: Verdict,
    /// The hypotheses were only checked empirically.
    pub conditional: bool,
    pub points: Vec<CheckPoint>,
    pub steps: Vec<StepRecord>,
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(claim: &str) -> Self {
        Self {
            claim: claim.into(),
            verdict: Verdict::Inconclusive,
            conditional: false,
            points: Vec::new(),
            steps: Vec::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn settle(&mut self) {
        self.verdict = if self.points.iter().any(|p| p.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.points.iter().any(|p| p.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
    }

    /// One row per check point, then one row per proof step.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_csv_to(csv::Writer::from_path(path)?)
    }

    pub fn write_csv_to<W: std::io::Write>(&self, mut w: csv::Writer<W>) -> Result<()> {
        w.write_record(["kind", "label", "at", "lhs", "lhs_lower", "lhs_upper", "rhs", "rhs_lower", "rhs_upper", "verdict"])?;
        for p in &self.points {
            w.write_record([
                "point".to_string(),
                self.claim.clone(),
                p.at.to_string(),
                p.lhs.value.to_string(),
                p.lhs.lower.to_string(),
                p.lhs.upper.to_string(),
                p.rhs.value.to_string(),
                p.rhs.lower.to_string(),
                p.rhs.upper.to_string(),
                format!("{:?}", p.verdict),
            ])?;
        }
        for s in &self.steps {
            w.write_record([
                "step".to_string(),
                s.step.clone(),
                s.at.to_string(),
                s.value.to_string(),
                String::new(),
                String::new(),
                s.bound.to_string(),
                String::new(),
                String::new(),
                if s.holds { "Pass" } else { "Fail" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Dual-ball extremes plus random directions when the norm has finitely many
/// extremes, random directions only otherwise.
fn probe_directions(model: &RandomVectorModel) -> DirectionSet {
    if dual_ball_extremes(&model.norm, model.dim).is_ok() {
        DirectionSet::default_probe()
    } else {
        DirectionSet::UnitSphereRandom { count: 64 }
    }
}

fn require_domination(model_y: &RandomVectorModel, model_x: &RandomVectorModel, m: usize, seed: u64) -> Result<DominationVerdict> {
    let report = check_weak_domination(
        model_y,
        model_x,
        &probe_directions(model_x),
        &TGrid::default(),
        m.max(crate::domination::MIN_SAMPLES),
        DEFAULT_DELTA,
        seed,
    )?;
    if report.verdict == DominationVerdict::Violated {
        return Err(Error::Contract("Y is not weakly dominated by X: the domination check found a violation".into()));
    }
    Ok(report.verdict)
}

fn require_certificate(cert: &RegularityCertificate, model: &RandomVectorModel) -> Result<()> {
    if cert.model_id != model.id() {
        return Err(Error::Contract(format!(
            "certificate belongs to model {} but X is model {}",
            cert.model_id,
            model.id()
        )));
    }
    if !cert.passes {
        return Err(Error::Contract(format!("certificate for model {} does not pass at K = {}", cert.model_id, cert.k)));
    }
    Ok(())
}

/// `E‖Y‖ <= 20 K E‖X‖`.
pub fn verify_prop1(
    model_x: &RandomVectorModel,
    model_y: &RandomVectorModel,
    cert: &RegularityCertificate,
    m: usize,
    seed: u64,
) -> Result<TheoremReport> {
    model_x.validate()?;
    model_y.validate()?;
    if model_x.dim != model_y.dim || model_x.norm != model_y.norm {
        return Err(Error::Contract("X and Y must live in the same normed space".into()));
    }
    require_certificate(cert, model_x)?;
    let dom = require_domination(model_y, model_x, m, seed)?;

    let k = cert.k;
    let mut report = TheoremReport::new("E|Y| <= 20 K E|X|");
    report.conditional = true;
    report.notes.push(format!("weak domination checked empirically: {dom:?}"));
    report.notes.push("regularity checked on a finite functional family and finitely many dual-ball points".into());

    let nx = sample_norms(model_x, m, seed, streams::MODEL_X)?;
    let py = sample_projections(model_y, &cert.functionals, m, seed, streams::MODEL_Y)?;
    let ex = mean_with_ci(&nx, DEFAULT_DELTA)?;
    let ey = mean_with_ci(&py.norms, DEFAULT_DELTA)?;
    let lhs = Interval::around(ey.mean, ey.half_width);
    let rhs = Interval::around(ex.mean, ex.half_width).scale(20.0 * k);
    let verdict = if lhs.value <= rhs.value + lhs.half_width() + rhs.half_width() { Verdict::Pass } else { Verdict::Fail };
    report.points.push(CheckPoint { at: 0.0, lhs, rhs, verdict });

    // E‖Y‖ <= E sup_n |x_n*(Y)|
    let sups: Vec<f64> =
        (0..m).map(|i| py.values.iter().map(|v| v[i].abs()).fold(0.0, f64::max)).collect();
    let esup = mean_with_ci(&sups, DEFAULT_DELTA)?;
    report.steps.push(StepRecord::at_least(
        "E sup_n |x_n*(Y)| >= E|Y| - band",
        0.0,
        esup.mean,
        ey.mean - ey.half_width - esup.half_width,
    ));
    // union bound and Markov: P(sup_n |x_n*(Y)| >= s K E‖X‖) <= Σ_n s^{-ln(n+2)}
    let e2 = std::f64::consts::E.powi(2);
    let sup_tail = EmpiricalTail::new(sups, DEFAULT_DELTA)?;
    for s in [e2, 2.0 * e2, 4.0 * e2] {
        let t = s * k * ex.mean;
        let bound: f64 = (1..=cert.functionals.len()).map(|n| s.powf(-((n + 2) as f64).ln())).sum();
        let p = sup_tail.survival(t);
        report.steps.push(StepRecord::at_most("P(sup_n |x_n*(Y)| >= s K E|X|) <= sum_n s^-ln(n+2)", s, p.lower, bound));
    }
    let audit = constant_audit_prop1();
    report.steps.push(StepRecord::at_most("e^2 + sum_n int_{e^2}^inf t^-ln(n+2) dt <= 20", 0.0, audit, 20.0));

    report.summary.insert("K".into(), k);
    report.summary.insert("E_X".into(), ex.mean);
    report.summary.insert("E_Y".into(), ey.mean);
    report.summary.insert("ratio".into(), ey.mean / ex.mean);
    report.summary.insert("bound_ratio".into(), 20.0 * k);
    report.settle();
    Ok(report)
}

/// Evidence for the hypotheses of [`verify_thm1`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm1Hypotheses {
    /// `(n, certificate for Product(X, n))`.
    pub certificates: Vec<(usize, RegularityCertificate)>,
    /// A [`check_condition_ii`] report.
    pub condition_ii: TheoremReport,
}

/// Builds the hypotheses of [`verify_thm1`] for a model whose norm has a
/// finite dual extreme set, using coordinate functionals on every product
/// `(X_1, .., X_n)`. Returns the evidence together with `K` (largest
/// smallest-passing `K` over the grid), `α = 1/2` and `β = 1/(4C)`.
pub fn coordinate_hypotheses(
    model_x: &RandomVectorModel,
    n_grid: &[usize],
    m: usize,
    seed: u64,
) -> Result<(Thm1Hypotheses, TheoremParams)> {
    check_n_grid(n_grid)?;
    let mut certificates = Vec::with_capacity(n_grid.len());
    let mut k_needed: f64 = 0.0;
    for &n in n_grid {
        let product = RandomVectorModel::product(model_x.clone(), n);
        let functionals = coordinate_functionals(product.dim);
        let probe = check_regularity(&product, &functionals, *K_GRID.last().unwrap(), &DirectionSet::DualBallExtreme, m, None, seed)?;
        let k = probe.smallest_passing_k().ok_or_else(|| {
            Error::Contract(format!("coordinate functionals do not certify regularity of {n} copies"))
        })?;
        k_needed = k_needed.max(k);
        certificates.push((n, probe));
    }
    // re-issue every certificate at the common K
    for (_, cert) in certificates.iter_mut() {
        cert.k = k_needed;
        let bound = k_needed * cert.expected_norm.mean;
        for c in cert.moment_results.iter_mut() {
            c.bound = bound;
            c.pass = c.value <= bound;
        }
        cert.passes = cert.moments_pass() && cert.coverage_passes();
    }
    let ratios = check_comp_mom(model_x, n_grid, m, seed)?;
    let c = ratios.iter().map(|r| r.ratio.value).fold(1.0, f64::max);
    let params = TheoremParams::from_moment_ratio(k_needed, c)?;
    let condition_ii = check_condition_ii(model_x, params.alpha, n_grid, m, seed)?;
    Ok((Thm1Hypotheses { certificates, condition_ii }, params))
}

fn check_n_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::Config("n grid is empty".into()));
    }
    if n_grid.contains(&0) {
        return Err(Error::Config("n grid entries must be >= 1".into()));
    }
    Ok(())
}

/// Points with `P̂(‖Y‖ >= t) < MIN_EXCEEDANCES / m` are not estimable.
pub const MIN_EXCEEDANCES: f64 = 10.0;

#[allow(clippy::too_many_arguments)]
pub fn verify_thm1(
    model_x: &RandomVectorModel,
    model_y: &RandomVectorModel,
    params: &TheoremParams,
    hypotheses: &Thm1Hypotheses,
    n_grid: &[usize],
    t_grid: &[f64],
    m: usize,
    seed: u64,
) -> Result<TheoremReport> {
    params.validate()?;
    check_n_grid(n_grid)?;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Config("t grid must be nonempty and positive".into()));
    }
    model_x.validate()?;
    model_y.validate()?;
    if model_x.dim != model_y.dim || model_x.norm != model_y.norm {
        return Err(Error::Contract("X and Y must live in the same normed space".into()));
    }
    for &n in n_grid {
        let product = RandomVectorModel::product(model_x.clone(), n);
        let cert = hypotheses
            .certificates
            .iter()
            .find(|(cn, _)| *cn == n)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Contract(format!("no regularity certificate for {n} copies")))?;
        require_certificate(cert, &product)?;
        if cert.k > params.k {
            return Err(Error::Contract(format!("certificate for {n} copies needs K = {} > {}", cert.k, params.k)));
        }
        let beta_n = hypotheses
            .condition_ii
            .points
            .iter()
            .find(|p| p.at == n as f64)
            .ok_or_else(|| Error::Contract(format!("condition ii was not checked at n = {n}")))?;
        if beta_n.lhs.value < params.beta {
            return Err(Error::Contract(format!(
                "condition ii fails at n = {n}: estimated beta {} < {}",
                beta_n.lhs.value, params.beta
            )));
        }
    }
    if hypotheses.condition_ii.summary.get("alpha").copied() != Some(params.alpha) {
        return Err(Error::Contract("condition ii was checked at a different alpha".into()));
    }
    let dom = require_domination(model_y, model_x, m, seed)?;

    let mut report = TheoremReport::new("P(|Y| >= t) <= (2/beta) P(|X| >= alpha t / (80 K))");
    report.conditional = true;
    report.notes.push(format!("weak domination checked empirically: {dom:?}"));
    report.notes.push(format!(
        "hypotheses i) and ii) checked for n in {n_grid:?} only; the statement requires every n"
    ));

    let delta_each = DEFAULT_DELTA / (2 * t_grid.len()) as f64;
    let ny = sample_norms(model_y, m, seed, streams::MODEL_Y)?;
    let nx = sample_norms(model_x, m, seed, streams::MODEL_X)?;
    let tail_y = EmpiricalTail::new(ny, delta_each)?;
    let tail_x = EmpiricalTail::new(nx, delta_each)?;
    let multiplier = 2.0 / params.beta;
    let shrink = params.alpha / (80.0 * params.k);

    for &t in t_grid {
        let py = tail_y.survival(t);
        let px = tail_x.survival(shrink * t);
        let lhs = Interval::from(py);
        let rhs = Interval::from(px).scale(multiplier);
        let verdict = if py.estimate * (m as f64) < MIN_EXCEEDANCES {
            Verdict::Inconclusive
        } else if lhs.value <= rhs.value + lhs.half_width() + rhs.half_width() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        report.points.push(CheckPoint { at: t, lhs, rhs, verdict });
        if verdict == Verdict::Inconclusive {
            continue;
        }
        // the auxiliary n with 1/n <= P(‖Y‖ >= t) <= 2/n
        let p = py.estimate;
        let n = ((1.0 / p).ceil() as usize).max(2);
        let nf = n as f64;
        report.steps.push(StepRecord::at_least("P(|Y| >= t) >= 1/n", t, p, 1.0 / nf));
        report.steps.push(StepRecord::at_most("P(|Y| >= t) <= 2/n", t, p, 2.0 / nf));
        report.steps.push(StepRecord::at_least("1 - (1 - 1/n)^n >= 1/2", t, 1.0 - (1.0 - 1.0 / nf).powf(nf), 0.5));
        let emax_y = tail_y.max_law(n).mean();
        report.steps.push(StepRecord::at_least("E max_{i<=n} |Y_i| >= t/2", t, emax_y, 0.5 * t));
        let emax_x = tail_x.max_law(n).mean();
        report.steps.push(StepRecord::at_most("t/4 <= 20 K E max_{i<=n} |X_i|", t, 0.25 * t, 20.0 * params.k * emax_x));
        report.steps.push(StepRecord::at_least(
            "n P(|X| >= alpha t / (80 K)) >= beta",
            t,
            nf * px.estimate,
            params.beta,
        ));
    }
    report.summary.insert("K".into(), params.k);
    report.summary.insert("alpha".into(), params.alpha);
    report.summary.insert("beta".into(), params.beta);
    report.settle();
    Ok(report)
}

/// `P(max_{i<=n} ‖X_i‖ >= α E max_{i<=n} ‖X_i‖)` for each `n`, under the
/// plug-in law of the maximum. Points carry `β̂_n` (with the DKW image band)
/// on the left and `1/(4 Ĉ_n)` on the right; the latter is a lower bound for
/// `β̂_n` at `α = 1/2` by Paley–Zygmund on the plug-in law.
pub fn check_condition_ii(model: &RandomVectorModel, alpha: f64, n_grid: &[usize], m: usize, seed: u64) -> Result<TheoremReport> {
    check_n_grid(n_grid)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let norms = sample_norms(model, m, seed, streams::MODEL_X)?;
    let tail = EmpiricalTail::new(norms, DEFAULT_DELTA / n_grid.len() as f64)?;
    let mut report = TheoremReport::new("P(max_{i<=n} |X_i| >= alpha E max_{i<=n} |X_i|) >= beta");
    report.conditional = true;
    let mut beta_min = f64::INFINITY;
    let mut beta_min_lower = f64::INFINITY;
    for &n in n_grid {
        let law = tail.max_law(n);
        let mean = law.mean();
        let beta = law.survival(alpha * mean);
        let ratio = law.second_moment() / (mean * mean);
        let pz = if alpha == 0.5 { 1.0 / (4.0 * ratio) } else { (1.0 - alpha).powi(2) / ratio };
        let verdict = if beta.estimate > 0.0 { Verdict::Pass } else { Verdict::Fail };
        report.points.push(CheckPoint { at: n as f64, lhs: beta.into(), rhs: Interval::exact(pz), verdict });
        report.steps.push(StepRecord::at_least("beta_n >= (1 - alpha)^2 / C_n (Paley-Zygmund)", n as f64, beta.estimate, pz));
        beta_min = beta_min.min(beta.estimate);
        beta_min_lower = beta_min_lower.min(beta.lower);
    }
    report.summary.insert("alpha".into(), alpha);
    report.summary.insert("beta_min".into(), beta_min);
    report.summary.insert("beta_min_lower".into(), beta_min_lower);
    report.notes.push("maxima of n copies use the plug-in law of the empirical norm distribution".into());
    report.settle();
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompMomPoint {
    pub n: usize,
    /// `E max‖X_i‖² / (E max‖X_i‖)²`.
    pub ratio: Interval,
}

/// Batches used for the spread of the moment ratio.
const RATIO_BATCHES: usize = 20;

/// Ratio `E max_{i<=n} ‖X_i‖² / (E max_{i<=n} ‖X_i‖)²` per `n` under the
/// plug-in law. The band is a normal interval from the spread of the same
/// ratio over 20 disjoint sample batches.
pub fn check_comp_mom(model: &RandomVectorModel, n_grid: &[usize], m: usize, seed: u64) -> Result<Vec<CompMomPoint>> {
    check_n_grid(n_grid)?;
    let norms = sample_norms(model, m, seed, streams::MODEL_X)?;
    let tail = EmpiricalTail::new(norms.clone(), DEFAULT_DELTA)?;
    let batch_len = m / RATIO_BATCHES;
    let batches: Vec<EmpiricalTail> = if batch_len >= 2 {
        norms.chunks_exact(batch_len).map(|c| EmpiricalTail::new(c.to_vec(), DEFAULT_DELTA)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let ratio_of = |t: &EmpiricalTail, n: usize| {
        let law = t.max_law(n);
        let mean = law.mean();
        if mean == 0.0 {
            1.0
        } else {
            law.second_moment() / (mean * mean)
        }
    };
    let z = normal_quantile(DEFAULT_DELTA);
    n_grid
        .iter()
        .map(|&n| {
            let ratio = ratio_of(&tail, n);
            let half = if batches.len() >= 2 {
                let rs: Vec<f64> = batches.iter().map(|b| ratio_of(b, n)).collect();
                let r = mean_with_ci(&rs, DEFAULT_DELTA)?;
                z * r.standard_error
            } else {
                0.0
            };
            Ok(CompMomPoint { n, ratio: Interval::around(ratio, half) })
        })
        .collect()
}

/// Paley–Zygmund on the plug-in law of the maximum at `α = 1/2`, exact on
/// the empirical measure: returns `(β̂_n, 1/(4 Ĉ_n))`.
pub fn derived_beta(norms: &[f64], n: usize) -> Result<(f64, f64)> {
    let tail = EmpiricalTail::new(norms.to_vec(), DEFAULT_DELTA)?;
    let law = tail.max_law(n);
    let mean = law.mean();
    if mean == 0.0 {
        return Err(Error::Degenerate("all norms are zero".into()));
    }
    let c = law.second_moment() / (mean * mean);
    Ok((law.survival(0.5 * mean).estimate, 1.0 / (4.0 * c)))
}

/// Paley–Zygmund for `Z = |S|²` under the empirical measure; kept here so the
/// theorem layer can report the exact (band-free) property alongside.
pub fn paley_zygmund_on_squares(values: &[f64], theta: f64) -> Result<crate::stats::PaleyZygmundCheck> {
    let z: Vec<f64> = values.iter().map(|v| v * v).collect();
    paley_zygmund_exact(&z, theta)
}
