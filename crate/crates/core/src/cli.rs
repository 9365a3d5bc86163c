//! Experiment driver behind the `taildom` binary.
//!
//! Precedence of settings: defaults, then command-line flags, then the config
//! file. Every report body embeds the resolved config and the crate version;
//! the run timestamp, worker count and output directory go to a separate
//! `<experiment>.run.json` sidecar so report bodies are reproducible.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::counterexample::{
    measure_strong_gap, pz_example, verify_ball_slab_step, verify_example_inequality, verify_gaussian_sandwich,
    ExampleConfig,
};
use crate::domination::{check_weak_domination, dual_ball_extremes, random_unit_vector, DirectionSet, DominationVerdict, TGrid};
use crate::error::{Error, Result};
use crate::regularity::{check_regularity, constant_audit, coordinate_functionals, K_GRID};
use crate::stats::{paley_zygmund_exact, EmpiricalTail, DEFAULT_DELTA};
use crate::stochastic::rng::{streams, StreamKey};
use crate::stochastic::{sample_norms, RandomVectorModel};
use crate::theorems::{check_comp_mom, check_condition_ii, coordinate_hypotheses, verify_prop1, verify_thm1, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Dominate,
    Regularity,
    Prop1,
    Thm1,
    Condii,
    Compmom,
    Example,
    Pz,
    Ball,
    Sandwich,
    Audit,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Dominate => "dominate",
            Experiment::Regularity => "regularity",
            Experiment::Prop1 => "prop1",
            Experiment::Thm1 => "thm1",
            Experiment::Condii => "condii",
            Experiment::Compmom => "compmom",
            Experiment::Example => "example",
            Experiment::Pz => "pz",
            Experiment::Ball => "ball",
            Experiment::Sandwich => "sandwich",
            Experiment::Audit => "audit",
        }
    }

    fn default_samples(&self) -> usize {
        match self {
            Experiment::Example => 200_000,
            _ => 100_000,
        }
    }
}

/// A model given inline or as a path to a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(RandomVectorModel),
}

impl ModelSource {
    fn load(&self) -> Result<RandomVectorModel> {
        let model = match self {
            ModelSource::Inline(m) => m.clone(),
            ModelSource::Path(p) => RandomVectorModel::from_json(&fs::read_to_string(p)?)?,
        };
        model.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(model)
    }
}

/// Fully resolved settings of one run, as embedded in its reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub model_x: Option<RandomVectorModel>,
    pub model_y: Option<RandomVectorModel>,
    pub m: usize,
    pub delta: f64,
    pub seed: u64,
    pub n_grid: Option<Vec<usize>>,
    pub t_grid: Option<Vec<f64>>,
    pub directions: Option<usize>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub gap_samples: Option<usize>,
}

/// The config file: every field optional, unknown fields rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub model_x: Option<ModelSource>,
    pub model_y: Option<ModelSource>,
    #[serde(alias = "samples")]
    pub m: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub n_grid: Option<Vec<usize>>,
    pub t_grid: Option<Vec<f64>>,
    pub directions: Option<usize>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub gap_samples: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Parser)]
#[command(name = "taildom", version, about = "Weak and strong tail domination experiments")]
pub struct Args {
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    /// JSON config file; its fields override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Resolved config plus the settings that do not affect report bodies.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub workers: usize,
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn resolve(args: &Args) -> Result<Invocation> {
    let file = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    resolve_with(file, args)
}

/// Merges a parsed config file over the flags.
pub fn resolve_with(file: ConfigFile, args: &Args) -> Result<Invocation> {
    let experiment = file
        .experiment
        .or(args.experiment)
        .ok_or_else(|| Error::Config("no experiment given (use --experiment or the config file)".into()))?;
    let load = |s: &Option<ModelSource>| s.as_ref().map(|s| s.load()).transpose();
    let config = RunConfig {
        experiment,
        model_x: load(&file.model_x)?,
        model_y: load(&file.model_y)?,
        m: file.m.or(args.samples).unwrap_or_else(|| experiment.default_samples()),
        delta: file.delta.or(args.delta).unwrap_or(DEFAULT_DELTA),
        seed: file.seed.or(args.seed).unwrap_or(0),
        n_grid: file.n_grid,
        t_grid: file.t_grid,
        directions: file.directions,
        k: file.k,
        alpha: file.alpha,
        gap_samples: file.gap_samples,
    };
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {}", config.delta)));
    }
    if config.m == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    Ok(Invocation {
        config,
        out_dir: file.out_dir.or_else(|| args.out_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
        workers: file.workers.or(args.workers).unwrap_or(0),
    })
}

/// Overall outcome, mapped to the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }

    fn combine(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Fail, _) | (_, Outcome::Fail) => Outcome::Fail,
            (Outcome::Inconclusive, _) | (_, Outcome::Inconclusive) => Outcome::Inconclusive,
            _ => Outcome::Pass,
        }
    }

    fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

impl From<Verdict> for Outcome {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Outcome::Pass,
            Verdict::Fail => Outcome::Fail,
            Verdict::Inconclusive => Outcome::Inconclusive,
        }
    }
}

impl From<DominationVerdict> for Outcome {
    fn from(v: DominationVerdict) -> Self {
        match v {
            DominationVerdict::Dominated => Outcome::Pass,
            DominationVerdict::Violated => Outcome::Fail,
            DominationVerdict::Inconclusive => Outcome::Inconclusive,
        }
    }
}

/// In-memory result of one experiment.
pub struct RunOutput {
    pub outcome: Outcome,
    pub summary: String,
    pub report: serde_json::Value,
    /// `(file name, CSV body)`
    pub csv: Vec<(String, String)>,
}

fn require(model: &Option<RandomVectorModel>, name: &str) -> Result<RandomVectorModel> {
    model.clone().ok_or_else(|| Error::Config(format!("experiment needs {name}")))
}

fn csv_body(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_string(write: impl FnOnce(csv::Writer<&mut Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(csv::Writer::from_writer(&mut buf))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn probe_for(model: &RandomVectorModel, directions: Option<usize>) -> DirectionSet {
    let finite = dual_ball_extremes(&model.norm, model.dim).is_ok();
    match (finite, directions) {
        (true, Some(c)) => DirectionSet::with_random(c),
        (true, None) => DirectionSet::default_probe(),
        (false, c) => DirectionSet::UnitSphereRandom { count: c.unwrap_or(64) },
    }
}

fn test_points_for(model: &RandomVectorModel) -> DirectionSet {
    if dual_ball_extremes(&model.norm, model.dim).is_ok() {
        DirectionSet::DualBallExtreme
    } else {
        DirectionSet::UnitSphereRandom { count: 64 }
    }
}

const DEFAULT_N_GRID: [usize; 5] = [1, 2, 4, 8, 16];

/// Runs one experiment without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::Dominate => {
            let x = require(&cfg.model_x, "model_x")?;
            let y = require(&cfg.model_y, "model_y")?;
            let grid = match &cfg.t_grid {
                Some(ts) => TGrid::default().with_absolute(ts.clone()),
                None => TGrid::default(),
            };
            let r = check_weak_domination(&y, &x, &probe_for(&x, cfg.directions), &grid, cfg.m, cfg.delta, cfg.seed)?;
            let csv = csv_string(|mut w| {
                r.write_csv_to(&mut w, None)?;
                w.flush()?;
                Ok(())
            })?;
            Ok(RunOutput {
                outcome: r.verdict.into(),
                summary: format!("{:?}: max excess {:.6} (tolerance {:.6})", r.verdict, r.max_excess, r.tolerance),
                report: json!({
                    "verdict": r.verdict,
                    "max_excess": r.max_excess,
                    "tolerance": r.tolerance,
                    "config": r.config,
                    "violations": r.violations().count(),
                }),
                csv: vec![("dominate.csv".into(), csv)],
            })
        }
        Experiment::Regularity => {
            let x = require(&cfg.model_x, "model_x")?;
            let functionals = coordinate_functionals(x.dim);
            let k = cfg.k.unwrap_or(*K_GRID.last().unwrap());
            let cert = check_regularity(&x, &functionals, k, &test_points_for(&x), cfg.m, None, cfg.seed)?;
            let outcome = if cert.passes {
                Outcome::Pass
            } else if cert.inconclusive {
                Outcome::Inconclusive
            } else {
                Outcome::Fail
            };
            let smallest = cert.smallest_passing_k();
            let csv = csv_body(
                &["n", "value", "bound", "pass"],
                cert.moment_results.iter().map(|c| vec![c.n.to_string(), c.value.to_string(), c.bound.to_string(), c.pass.to_string()]),
            )?;
            let witness = csv_string(|w| cert.write_witness_csv_to(w))?;
            Ok(RunOutput {
                outcome,
                summary: format!("K = {k}: passes {} (measured K {:.4}, smallest grid K {smallest:?})", cert.passes, cert.measured_k),
                report: json!({ "smallest_passing_k": smallest, "certificate": cert }),
                csv: vec![("regularity.csv".into(), csv), ("regularity_witness.csv".into(), witness)],
            })
        }
        Experiment::Prop1 => {
            let x = require(&cfg.model_x, "model_x")?;
            let y = cfg.model_y.clone().unwrap_or_else(|| x.clone());
            let functionals = coordinate_functionals(x.dim);
            let mut cert = check_regularity(&x, &functionals, *K_GRID.last().unwrap(), &test_points_for(&x), cfg.m, None, cfg.seed)?;
            if let Some(k) = cfg.k.or_else(|| cert.smallest_passing_k()) {
                cert = check_regularity(&x, &functionals, k, &test_points_for(&x), cfg.m, None, cfg.seed)?;
            }
            let r = verify_prop1(&x, &y, &cert, cfg.m, cfg.seed)?;
            let csv = csv_string(|w| r.write_csv_to(w))?;
            Ok(RunOutput {
                outcome: r.verdict.into(),
                summary: format!("{:?}: E|Y|/E|X| = {:.4} vs 20K = {}", r.verdict, r.summary["ratio"], r.summary["bound_ratio"]),
                report: to_value(&r)?,
                csv: vec![("prop1.csv".into(), csv)],
            })
        }
        Experiment::Thm1 => {
            let x = require(&cfg.model_x, "model_x")?;
            let y = cfg.model_y.clone().unwrap_or_else(|| x.clone());
            let n_grid = cfg.n_grid.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
            let (hyps, mut params) = coordinate_hypotheses(&x, &n_grid, cfg.m, cfg.seed)?;
            if let Some(k) = cfg.k {
                params.k = params.k.max(k);
            }
            let t_grid = match &cfg.t_grid {
                Some(t) => t.clone(),
                None => {
                    let tail = EmpiricalTail::new(sample_norms(&y, cfg.m, cfg.seed, streams::MODEL_Y)?, cfg.delta)?;
                    let mut ts: Vec<f64> = [0.5, 0.75, 0.9, 0.95, 0.99, 0.999].iter().map(|q| tail.quantile(*q)).filter(|t| *t > 0.0).collect();
                    ts.dedup();
                    ts
                }
            };
            let r = verify_thm1(&x, &y, &params, &hyps, &n_grid, &t_grid, cfg.m, cfg.seed)?;
            let csv = csv_string(|w| r.write_csv_to(w))?;
            Ok(RunOutput {
                outcome: r.verdict.into(),
                summary: format!("{:?} with K = {}, alpha = {}, beta = {:.6}", r.verdict, params.k, params.alpha, params.beta),
                report: json!({ "params": params, "report": r, "condition_ii": hyps.condition_ii }),
                csv: vec![("thm1.csv".into(), csv)],
            })
        }
        Experiment::Condii => {
            let x = require(&cfg.model_x, "model_x")?;
            let n_grid = cfg.n_grid.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
            let r = check_condition_ii(&x, cfg.alpha.unwrap_or(0.5), &n_grid, cfg.m, cfg.seed)?;
            let csv = csv_string(|w| r.write_csv_to(w))?;
            let outcome = if r.steps.iter().all(|s| s.holds) { Outcome::from(r.verdict) } else { Outcome::Fail };
            Ok(RunOutput {
                outcome,
                summary: format!("beta_min = {:.6}", r.summary["beta_min"]),
                report: to_value(&r)?,
                csv: vec![("condii.csv".into(), csv)],
            })
        }
        Experiment::Compmom => {
            let x = require(&cfg.model_x, "model_x")?;
            let n_grid = cfg.n_grid.clone().unwrap_or_else(|| DEFAULT_N_GRID.to_vec());
            let pts = check_comp_mom(&x, &n_grid, cfg.m, cfg.seed)?;
            let c = pts.iter().map(|p| p.ratio.value).fold(1.0, f64::max);
            let csv = csv_body(
                &["n", "ratio", "lower", "upper"],
                pts.iter().map(|p| vec![p.n.to_string(), p.ratio.value.to_string(), p.ratio.lower.to_string(), p.ratio.upper.to_string()]),
            )?;
            Ok(RunOutput {
                outcome: Outcome::from_bool(c.is_finite()),
                summary: format!("C = {c:.6}"),
                report: json!({ "c": c, "points": pts }),
                csv: vec![("compmom.csv".into(), csv)],
            })
        }
        Experiment::Example => {
            let mut ex = ExampleConfig { m: cfg.m, seed: cfg.seed, delta: cfg.delta, ..Default::default() };
            if let Some(g) = &cfg.n_grid {
                ex.n_grid = g.clone();
            }
            if let Some(d) = cfg.directions {
                ex.directions = d;
            }
            if let Some(g) = cfg.gap_samples {
                ex.gap_samples = g;
            }
            ex.validate()?;
            let dom = verify_example_inequality(&ex)?;
            let gap = measure_strong_gap(&ex)?;
            let mut outcome = Outcome::from_bool(gap.passes());
            let mut verdicts = BTreeMap::new();
            for (n, r) in &dom {
                outcome = outcome.combine(r.verdict.into());
                verdicts.insert(n.to_string(), r.verdict);
            }
            let dom_csv = csv_string(|mut w| {
                for (n, r) in &dom {
                    r.write_csv_to(&mut w, Some(*n))?;
                }
                w.flush()?;
                Ok(())
            })?;
            let gap_csv = csv_string(|w| gap.write_csv_to(w))?;
            Ok(RunOutput {
                outcome,
                summary: format!(
                    "domination {:?}; gap slope {:.4}, R^2 {:.5}, L {:.4}, E|X| bounded {}",
                    verdicts.values().collect::<Vec<_>>(),
                    gap.slope,
                    gap.r_squared,
                    gap.measured_l,
                    gap.x_bounded
                ),
                report: json!({
                    "domination": verdicts,
                    "max_excess": dom.iter().map(|(n, r)| (n.to_string(), r.max_excess)).collect::<BTreeMap<_, _>>(),
                    "gap": gap,
                    "gap_passes": gap.passes(),
                    "x_flat": gap.x_flat(),
                }),
                csv: vec![("example_domination.csv".into(), dom_csv), ("example_gap.csv".into(), gap_csv)],
            })
        }
        Experiment::Pz => {
            let sets = 1000;
            let thetas = [0.1, 1.0 / 3.0, 0.5, 0.9];
            let mut rng = StreamKey::new(cfg.seed, streams::AUX).column(0);
            let mut violations = 0usize;
            for _ in 0..sets {
                let len = rng.random_range(1..=200);
                let zero_frac: f64 = rng.random();
                let v: Vec<f64> = (0..len)
                    .map(|_| if rng.random::<f64>() < zero_frac { 0.0 } else { -rng.random::<f64>().ln() * rng.random_range(0.1..10.0) })
                    .collect();
                if v.iter().all(|z| *z == 0.0) {
                    continue;
                }
                for &theta in &thetas {
                    if !paley_zygmund_exact(&v, theta)?.holds {
                        violations += 1;
                    }
                }
            }
            let dim = cfg.n_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(64);
            let rows = pz_example(dim, cfg.directions.unwrap_or(32), cfg.m, cfg.seed)?;
            let max_fourth = rows.iter().map(|r| r.fourth_moment).fold(0.0, f64::max);
            let ok = violations == 0
                && rows.iter().all(|r| r.empirical_holds && r.fourth_moment <= 1.0 / 3.0 + 1e-12 && r.pz_bound >= 4.0 / 27.0 - 1e-12);
            let csv = csv_body(
                &["direction", "fourth_moment", "pz_bound", "empirical_holds", "probability"],
                rows.iter().map(|r| {
                    vec![
                        r.direction.to_string(),
                        r.fourth_moment.to_string(),
                        r.pz_bound.to_string(),
                        r.empirical_holds.to_string(),
                        r.probability.to_string(),
                    ]
                }),
            )?;
            Ok(RunOutput {
                outcome: Outcome::from_bool(ok),
                summary: format!("{violations} empirical-measure violations; max fourth moment {max_fourth:.6}"),
                report: json!({ "sets": sets, "thetas": thetas, "violations": violations, "max_fourth_moment": max_fourth, "directions": rows }),
                csv: vec![("pz.csv".into(), csv)],
            })
        }
        Experiment::Ball => {
            let dim = cfg.n_grid.as_ref().and_then(|g| g.first().copied()).unwrap_or(64);
            let s_grid = cfg.t_grid.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.5]);
            let mut rng = StreamKey::new(cfg.seed, streams::DIRECTIONS).column(0);
            let mut rows = Vec::new();
            let mut violations = 0;
            for j in 0..cfg.directions.unwrap_or(32) {
                let u = random_unit_vector(dim, &mut rng);
                let r = verify_ball_slab_step(&u, &s_grid, cfg.m, cfg.seed.wrapping_add(j as u64))?;
                violations += r.violations;
                for row in r.rows {
                    rows.push(vec![
                        j.to_string(),
                        row.s.to_string(),
                        row.probability.to_string(),
                        row.bound.to_string(),
                        row.band.to_string(),
                        row.holds.to_string(),
                    ]);
                }
            }
            let csv = csv_body(&["direction", "s", "probability", "bound", "band", "holds"], rows)?;
            Ok(RunOutput {
                outcome: Outcome::from_bool(violations == 0),
                summary: format!("{violations} violations"),
                report: json!({ "dim": dim, "s_grid": s_grid, "violations": violations }),
                csv: vec![("ball.csv".into(), csv)],
            })
        }
        Experiment::Sandwich => {
            let ts = cfg.t_grid.clone().unwrap_or_else(|| (1..=1000).map(|i| 6.0 * i as f64 / 1000.0).collect());
            let rows = verify_gaussian_sandwich(&ts)?;
            let violations = rows.iter().filter(|r| !r.holds).count();
            let csv = csv_body(
                &["t", "lower", "exact", "upper", "holds"],
                rows.iter().map(|r| vec![r.t.to_string(), r.lower.to_string(), r.exact.to_string(), r.upper.to_string(), r.holds.to_string()]),
            )?;
            Ok(RunOutput {
                outcome: Outcome::from_bool(violations == 0),
                summary: format!("{violations} violations over {} points", rows.len()),
                report: json!({ "points": rows.len(), "violations": violations }),
                csv: vec![("sandwich.csv".into(), csv)],
            })
        }
        Experiment::Audit => {
            let a = constant_audit();
            Ok(RunOutput {
                outcome: Outcome::from_bool(a.value + a.tail_uncertainty <= 20.0),
                summary: format!("constant = {:.9} (<= 20: {})", a.value, a.value <= 20.0),
                report: to_value(&a)?,
                csv: vec![("audit.csv".into(), csv_body(&["value", "terms_summed", "tail_uncertainty"], [vec![
                    a.value.to_string(),
                    a.terms_summed.to_string(),
                    a.tail_uncertainty.to_string(),
                ]])?)],
            })
        }
    }
}

/// The JSON report of a run: version, resolved config, outcome, details.
pub fn report_body(cfg: &RunConfig, out: &RunOutput) -> serde_json::Value {
    json!({
        "version": VERSION,
        "config": cfg,
        "outcome": out.outcome,
        "summary": out.summary,
        "report": out.report,
    })
}

/// Runs the experiment and writes `<experiment>.json`, its CSV files and the
/// `<experiment>.run.json` sidecar into the output directory.
pub fn run(inv: &Invocation) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(inv.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", inv.workers)))?;
    let out = pool.install(|| execute(&inv.config))?;
    fs::create_dir_all(&inv.out_dir)?;
    let name = inv.config.experiment.name();
    let body = report_body(&inv.config, &out);
    fs::write(inv.out_dir.join(format!("{name}.json")), serde_json::to_string_pretty(&body)? + "\n")?;
    for (file, text) in &out.csv {
        fs::write(inv.out_dir.join(file), text)?;
    }
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let sidecar = json!({
        "timestamp_unix": started,
        "workers": pool.current_num_threads(),
        "out_dir": inv.out_dir,
    });
    fs::write(inv.out_dir.join(format!("{name}.run.json")), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(out)
}

/// Entry point of the binary; returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let inv = match resolve(&args) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("taildom: {e}");
            return 3;
        }
    };
    match run(&inv) {
        Ok(out) => {
            println!("{}: {:?}: {}", inv.config.experiment.name(), out.outcome, out.summary);
            out.outcome.exit_code()
        }
        Err(Error::Contract(msg)) => {
            eprintln!("taildom: hypotheses not met: {msg}");
            Outcome::Inconclusive.exit_code()
        }
        Err(e) => {
            eprintln!("taildom: {e}");
            3
        }
    }
}
