//! Command-line interface over the geometry engine and the verification
//! harness, emitting JSON or CSV records for downstream tables.
//!
//! Exit codes: 0 all good, 1 computational or verification failure, 2 usage
//! error. CSV output is byte-deterministic for a fixed configuration.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::families::generalized_gaussian::{self as gg, GeneralizedGaussian};
use crate::families::orthant_gaussian::{self as og, OrthantGaussian};
use crate::geometry::{
    alpha_connection, curvature_tensor, fisher_metric, gaussian_curvature, one_connection,
    skewness_tensor,
};
use crate::manifold::{ExpectationEngine, ParameterPoint, StatisticalFamily};
use crate::numerics::diff::StepPolicy;
use crate::numerics::rng::RandomStream;
use crate::verify::{self, FamilyFilter, Perturbation, PerturbedConstant, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Metric,
    Connection,
    Curvature,
    Sweep,
    Verify,
    FlatRoots,
    Sample,
}

impl Command {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "metric" => Command::Metric,
            "connection" => Command::Connection,
            "curvature" => Command::Curvature,
            "sweep" => Command::Sweep,
            "verify" => Command::Verify,
            "flat-roots" => Command::FlatRoots,
            "sample" => Command::Sample,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyChoice {
    GeneralizedGaussian,
    OrthantGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Closed,
    Quadrature,
    MonteCarlo,
}

impl EngineChoice {
    fn label(&self) -> &'static str {
        match self {
            EngineChoice::Closed => "closed",
            EngineChoice::Quadrature => "quad",
            EngineChoice::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub family: Option<FamilyChoice>,
    pub betas: Vec<u32>,
    pub dim: Option<usize>,
    pub chart: Option<String>,
    pub mus: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub lambda: Option<Vec<f64>>,
    pub theta: Option<Vec<f64>>,
    pub lambda_grid: Option<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub engine: EngineChoice,
    pub nodes: usize,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub output: OutputFormat,
    pub out_path: Option<String>,
    pub perturb: Option<Perturbation>,
}

/// A usage problem; rendered to stderr with exit status 2.
#[derive(Debug, Clone)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn usage<T>(msg: impl Into<String>) -> std::result::Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

/// "v", "a,b,c" or "start:stop:step" (inclusive endpoints).
fn parse_values(raw: &str, flag: &str) -> std::result::Result<Vec<f64>, UsageError> {
    if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return usage(format!("{flag}: range must be start:stop:step, got '{raw}'"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| UsageError(format!("{flag}: bad number in range '{raw}'")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return usage(format!("{flag}: need stop >= start and step > 0 in '{raw}'"));
        }
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let v = start + k as f64 * step;
            if v > stop + step / 2.0 {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        raw.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| UsageError(format!("{flag}: bad number '{p}'")))
            })
            .collect()
    }
}

/// Parse and validate the full argument list (without the program name).
pub fn parse_args(argv: &[String]) -> std::result::Result<RunConfig, UsageError> {
    let Some(cmd_str) = argv.first() else {
        return usage(
            "missing command: expected one of metric | connection | curvature | sweep | verify | flat-roots | sample",
        );
    };
    let Some(command) = Command::parse(cmd_str) else {
        return usage(format!("unknown command '{cmd_str}'"));
    };

    let mut cfg = RunConfig {
        command,
        family: None,
        betas: Vec::new(),
        dim: None,
        chart: None,
        mus: Vec::new(),
        sigmas: Vec::new(),
        lambda: None,
        theta: None,
        lambda_grid: None,
        alphas: Vec::new(),
        engine: EngineChoice::Quadrature,
        nodes: crate::manifold::DEFAULT_QUADRATURE_NODES,
        samples: None,
        seed: None,
        tol: None,
        output: OutputFormat::Json,
        out_path: None,
        perturb: None,
    };

    let mut it = argv[1..].iter();
    let mut grid_mu: Option<Vec<f64>> = None;
    let mut grid_sigma: Option<Vec<f64>> = None;
    let mut grid_alpha: Option<Vec<f64>> = None;
    while let Some(flag) = it.next() {
        let mut value = || -> std::result::Result<&String, UsageError> {
            it.next().ok_or_else(|| UsageError(format!("{flag} expects a value")))
        };
        match flag.as_str() {
            "--family" => {
                cfg.family = Some(match value()?.as_str() {
                    "gg" => FamilyChoice::GeneralizedGaussian,
                    "m2" => FamilyChoice::OrthantGaussian,
                    other => return usage(format!("--family must be gg or m2, got '{other}'")),
                })
            }
            "--beta" => {
                for v in parse_values(value()?, "--beta")? {
                    if v.fract() != 0.0 || v < 2.0 || (v as u32) % 2 != 0 {
                        return usage("beta must be even and >= 2");
                    }
                    cfg.betas.push(v as u32);
                }
            }
            "--p" => {
                let raw = value()?;
                let p: usize =
                    raw.parse().map_err(|_| UsageError(format!("--p: bad integer '{raw}'")))?;
                if p == 0 {
                    return usage("--p must be at least 1");
                }
                cfg.dim = Some(p);
            }
            "--chart" => cfg.chart = Some(value()?.clone()),
            "--mu" => cfg.mus = parse_values(value()?, "--mu")?,
            "--sigma" => cfg.sigmas = parse_values(value()?, "--sigma")?,
            "--lambda" => cfg.lambda = Some(parse_values(value()?, "--lambda")?),
            "--theta" => cfg.theta = Some(parse_values(value()?, "--theta")?),
            "--alpha" => cfg.alphas = parse_values(value()?, "--alpha")?,
            "--grid-mu" => grid_mu = Some(parse_values(value()?, "--grid-mu")?),
            "--grid-sigma" => grid_sigma = Some(parse_values(value()?, "--grid-sigma")?),
            "--grid-alpha" => grid_alpha = Some(parse_values(value()?, "--grid-alpha")?),
            "--grid-lambda" => cfg.lambda_grid = Some(parse_values(value()?, "--grid-lambda")?),
            "--engine" => {
                cfg.engine = match value()?.as_str() {
                    "closed" => EngineChoice::Closed,
                    "quad" => EngineChoice::Quadrature,
                    "mc" => EngineChoice::MonteCarlo,
                    other => {
                        return usage(format!("--engine must be closed, quad or mc, got '{other}'"))
                    }
                }
            }
            "--nodes" => {
                let raw = value()?;
                cfg.nodes =
                    raw.parse().map_err(|_| UsageError(format!("--nodes: bad integer '{raw}'")))?;
                if cfg.nodes < 3 {
                    return usage("--nodes must be at least 3");
                }
            }
            "--samples" => {
                let raw = value()?;
                let n: usize = raw
                    .parse()
                    .map_err(|_| UsageError(format!("--samples: bad integer '{raw}'")))?;
                if n == 0 {
                    return usage("--samples must be positive");
                }
                cfg.samples = Some(n);
            }
            "--seed" => {
                let raw = value()?;
                cfg.seed =
                    Some(raw.parse().map_err(|_| UsageError(format!("--seed: bad integer '{raw}'")))?);
            }
            "--tol" => {
                let raw = value()?;
                let t: f64 =
                    raw.parse().map_err(|_| UsageError(format!("--tol: bad number '{raw}'")))?;
                if !(t > 0.0) {
                    return usage("--tol must be positive");
                }
                cfg.tol = Some(t);
            }
            "--output" => {
                cfg.output = match value()?.as_str() {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => return usage(format!("--output must be json or csv, got '{other}'")),
                }
            }
            "--out" => cfg.out_path = Some(value()?.clone()),
            "--perturb" => {
                let raw = value()?;
                let Some((name, delta)) = raw.split_once(':') else {
                    return usage(format!("--perturb expects constant:delta, got '{raw}'"));
                };
                let Some(constant) = PerturbedConstant::parse(name) else {
                    return usage(format!("--perturb: unknown constant '{name}'"));
                };
                let delta: f64 = delta
                    .parse()
                    .map_err(|_| UsageError(format!("--perturb: bad delta in '{raw}'")))?;
                cfg.perturb = Some(Perturbation { constant, delta });
            }
            other => return usage(format!("unknown flag '{other}'")),
        }
    }

    if let Some(g) = grid_mu {
        if !cfg.mus.is_empty() {
            return usage("--mu and --grid-mu are mutually exclusive");
        }
        cfg.mus = g;
    }
    if let Some(g) = grid_sigma {
        if !cfg.sigmas.is_empty() {
            return usage("--sigma and --grid-sigma are mutually exclusive");
        }
        cfg.sigmas = g;
    }
    if let Some(g) = grid_alpha {
        if !cfg.alphas.is_empty() {
            return usage("--alpha and --grid-alpha are mutually exclusive");
        }
        cfg.alphas = g;
    }
    if cfg.lambda.is_some() && cfg.lambda_grid.is_some() {
        return usage("--lambda and --grid-lambda are mutually exclusive");
    }
    if let Some(s) = cfg.sigmas.iter().find(|&&s| !(s > 0.0)) {
        return usage(format!("sigma must be positive, got {s}"));
    }

    validate_for_command(&cfg)?;
    Ok(cfg)
}

fn validate_for_command(cfg: &RunConfig) -> std::result::Result<(), UsageError> {
    let needs_family =
        matches!(cfg.command, Command::Metric | Command::Connection | Command::Curvature | Command::Sample);
    if needs_family && cfg.family.is_none() {
        return usage("--family is required for this command");
    }
    if cfg.engine == EngineChoice::MonteCarlo && (cfg.samples.is_none() || cfg.seed.is_none()) {
        return usage("--engine mc requires --samples and --seed");
    }
    match cfg.command {
        Command::Sample => {
            if cfg.samples.is_none() || cfg.seed.is_none() {
                return usage("sample requires --samples and --seed");
            }
        }
        Command::Sweep => {
            if cfg.betas.is_empty() {
                return usage("sweep requires --beta (a value, list or range)");
            }
            if cfg.alphas.is_empty() {
                return usage("sweep requires --alpha (a value, list or range)");
            }
        }
        Command::FlatRoots => {
            if cfg.betas.is_empty() {
                return usage("flat-roots requires --beta");
            }
        }
        _ => {}
    }
    if cfg.family == Some(FamilyChoice::GeneralizedGaussian)
        && needs_family
        && cfg.betas.is_empty()
    {
        return usage("--family gg requires --beta");
    }
    if cfg.family == Some(FamilyChoice::OrthantGaussian) && needs_family {
        let dim_known = cfg.dim.is_some()
            || cfg.lambda.as_ref().map(|l| !l.is_empty()).unwrap_or(false)
            || cfg.theta.as_ref().map(|t| !t.is_empty()).unwrap_or(false);
        if !dim_known {
            return usage("--family m2 requires --p (or an explicit --lambda/--theta vector)");
        }
    }
    Ok(())
}

/// One output row.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub family: String,
    pub chart: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub alpha: Option<f64>,
    pub engine: String,
    pub quantity: String,
    pub indices: Vec<usize>,
    pub value: Option<f64>,
    pub reference_value: Option<f64>,
    pub abs_err: Option<f64>,
}

impl OutputRecord {
    fn new(family: &str, chart: &str, quantity: &str, engine: EngineChoice) -> Self {
        OutputRecord {
            family: family.into(),
            chart: chart.into(),
            params: BTreeMap::new(),
            alpha: None,
            engine: engine.label().into(),
            quantity: quantity.into(),
            indices: Vec::new(),
            value: None,
            reference_value: None,
            abs_err: None,
        }
    }

    fn param_f(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.into(), serde_json::json!(v));
        self
    }

    fn param_i(mut self, name: &str, v: u64) -> Self {
        self.params.insert(name.into(), serde_json::json!(v));
        self
    }

    fn with_reference(mut self, reference: f64) -> Self {
        self.reference_value = Some(reference);
        self.abs_err = self.value.map(|v| (v - reference).abs());
        self
    }
}

/// 17 significant digits: lossless for f64 round-trips.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                i.to_string()
            } else {
                fmt17(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        other => other.to_string(),
    }
}

/// Serialize records to the configured format.
pub fn emit(
    records: &[OutputRecord],
    format: OutputFormat,
    meta_seed: Option<u64>,
    meta_nodes: usize,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(
                out,
                "family,chart,params,alpha,engine,quantity,indices,value,reference_value,abs_err"
            )?;
            for r in records {
                let params = r
                    .params
                    .iter()
                    .map(|(k, v)| format!("{k}={}", csv_value(v)))
                    .collect::<Vec<_>>()
                    .join(";");
                let indices =
                    r.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";");
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.family,
                    r.chart,
                    params,
                    r.alpha.map(fmt17).unwrap_or_default(),
                    r.engine,
                    r.quantity,
                    indices,
                    r.value.map(fmt17).unwrap_or_else(|| "NaN".into()),
                    r.reference_value.map(fmt17).unwrap_or_default(),
                    r.abs_err.map(fmt17).unwrap_or_default(),
                )?;
            }
        }
        OutputFormat::Json => {
            let timestamp =
                std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let doc = serde_json::json!({
                "meta": {
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": meta_seed,
                    "nodes": meta_nodes,
                    "timestamp": timestamp,
                },
                "records": records,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
    }
    Ok(())
}

fn engine_for(cfg: &RunConfig) -> Result<ExpectationEngine> {
    match cfg.engine {
        EngineChoice::MonteCarlo => Ok(ExpectationEngine::monte_carlo(
            cfg.samples.unwrap_or(1_000_000),
            RandomStream::new(cfg.seed.unwrap_or(0), 0),
        )),
        _ => ExpectationEngine::quadrature_with_nodes(cfg.nodes),
    }
}

/// Expand the configured parameter points for the chosen family.
fn gg_points(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let mus = if cfg.mus.is_empty() { vec![0.0] } else { cfg.mus.clone() };
    let sigmas = if cfg.sigmas.is_empty() { vec![1.0] } else { cfg.sigmas.clone() };
    let mut out = Vec::new();
    for &m in &mus {
        for &s in &sigmas {
            out.push((m, s));
        }
    }
    out
}

fn m2_points(cfg: &RunConfig, fam: &OrthantGaussian) -> Result<Vec<ParameterPoint>> {
    let p = fam.dim();
    let chart = cfg.chart.as_deref().unwrap_or(if cfg.theta.is_some() {
        og::CHART_NATURAL
    } else {
        og::CHART_PRECISION
    });
    let chart = fam.resolve_chart(chart)?;
    let mut points = Vec::new();
    if let Some(theta) = &cfg.theta {
        let pt = fam.natural_point(theta.clone());
        points.push(fam.convert_point(&pt, chart)?);
    } else if let Some(lambda) = &cfg.lambda {
        let pt = fam.precision_point(lambda.clone());
        points.push(fam.convert_point(&pt, chart)?);
    } else {
        let axis = cfg.lambda_grid.clone().unwrap_or_else(|| vec![1.0]);
        let mut idx = vec![0usize; p];
        loop {
            let lambda: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let pt = fam.precision_point(lambda);
            points.push(fam.convert_point(&pt, chart)?);
            let mut done = true;
            for d in idx.iter_mut().rev() {
                *d += 1;
                if *d < axis.len() {
                    done = false;
                    break;
                }
                *d = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(points)
}

fn m2_family(cfg: &RunConfig) -> Result<OrthantGaussian> {
    let dim = cfg
        .dim
        .or(cfg.lambda.as_ref().map(|l| l.len()))
        .or(cfg.theta.as_ref().map(|t| t.len()))
        .unwrap_or(1);
    if let Some(l) = &cfg.lambda {
        if l.len() != dim {
            return Err(crate::Error::DimensionMismatch { expected: dim, got: l.len() });
        }
    }
    if let Some(t) = &cfg.theta {
        if t.len() != dim {
            return Err(crate::Error::DimensionMismatch { expected: dim, got: t.len() });
        }
    }
    OrthantGaussian::new(dim)
}

fn m2_record(fam: &OrthantGaussian, pt: &ParameterPoint, quantity: &str, engine: EngineChoice) -> OutputRecord {
    let mut rec = OutputRecord::new(fam.name(), pt.chart, quantity, engine);
    for (i, &c) in pt.coords.iter().enumerate() {
        let name = if pt.chart == og::CHART_NATURAL { "theta" } else { "lambda" };
        rec = rec.param_f(&format!("{name}{}", i + 1), c);
    }
    rec
}

fn run_metric(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<()> {
    let engine = engine_for(cfg)?;
    match cfg.family.unwrap() {
        FamilyChoice::GeneralizedGaussian => {
            for &beta in &cfg.betas {
                let fam = GeneralizedGaussian::new(beta)?;
                for (mu, sigma) in gg_points(cfg) {
                    let closed = gg::metric_closed(sigma, beta)?;
                    let numeric = if cfg.engine == EngineChoice::Closed {
                        None
                    } else {
                        Some(fisher_metric(&fam, &fam.point(mu, sigma), &engine)?)
                    };
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut rec =
                                OutputRecord::new(fam.name(), gg::CHART_LOCATION_SCALE, "g", cfg.engine)
                                    .param_i("beta", beta as u64)
                                    .param_f("mu", mu)
                                    .param_f("sigma", sigma);
                            rec.indices = vec![i + 1, j + 1];
                            match &numeric {
                                Some(g) => {
                                    rec.value = Some(g.get(i, j));
                                    rec = rec.with_reference(closed.get(i, j));
                                }
                                None => rec.value = Some(closed.get(i, j)),
                            }
                            records.push(rec);
                        }
                    }
                }
            }
        }
        FamilyChoice::OrthantGaussian => {
            let fam = m2_family(cfg)?;
            for pt in m2_points(cfg, &fam)? {
                let closed = og::metric_closed(&fam, &pt)?;
                let numeric = if cfg.engine == EngineChoice::Closed {
                    None
                } else {
                    Some(fisher_metric(&fam, &pt, &engine)?)
                };
                for i in 0..fam.dim() {
                    for j in 0..fam.dim() {
                        let mut rec = m2_record(&fam, &pt, "g", cfg.engine);
                        rec.indices = vec![i + 1, j + 1];
                        match &numeric {
                            Some(g) => {
                                rec.value = Some(g.get(i, j));
                                rec = rec.with_reference(closed.get(i, j));
                            }
                            None => rec.value = Some(closed.get(i, j)),
                        }
                        records.push(rec);
                    }
                }
            }
        }
    }
    Ok(())
}

fn push_tensor3(
    records: &mut Vec<OutputRecord>,
    base: impl Fn() -> OutputRecord,
    p: usize,
    numeric: Option<&crate::geometry::Tensor3>,
    closed: &crate::geometry::Tensor3,
    alpha: Option<f64>,
) {
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                let mut rec = base();
                rec.alpha = alpha;
                rec.indices = vec![i + 1, j + 1, k + 1];
                match numeric {
                    Some(t) => {
                        rec.value = Some(t.get(i, j, k));
                        rec = rec.with_reference(closed.get(i, j, k));
                    }
                    None => rec.value = Some(closed.get(i, j, k)),
                }
                records.push(rec);
            }
        }
    }
}

fn run_connection(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<()> {
    let engine = engine_for(cfg)?;
    match cfg.family.unwrap() {
        FamilyChoice::GeneralizedGaussian => {
            for &beta in &cfg.betas {
                let fam = GeneralizedGaussian::new(beta)?;
                for (mu, sigma) in gg_points(cfg) {
                    let pt = fam.point(mu, sigma);
                    let closed_t = gg::skewness_closed(sigma, beta)?;
                    let closed_1 = gg::one_connection_closed(sigma, beta)?;
                    let (num_t, num_1) = if cfg.engine == EngineChoice::Closed {
                        (None, None)
                    } else {
                        (
                            Some(skewness_tensor(&fam, &pt, &engine)?),
                            Some(one_connection(&fam, &pt, &engine)?),
                        )
                    };
                    let base = |q: &str| {
                        OutputRecord::new(fam.name(), gg::CHART_LOCATION_SCALE, q, cfg.engine)
                            .param_i("beta", beta as u64)
                            .param_f("mu", mu)
                            .param_f("sigma", sigma)
                    };
                    push_tensor3(records, || base("T"), 2, num_t.as_ref(), &closed_t, None);
                    push_tensor3(records, || base("gamma1"), 2, num_1.as_ref(), &closed_1, None);
                    for &alpha in &cfg.alphas {
                        let closed_a = gg::alpha_connection_closed(sigma, beta, alpha)?;
                        let num_a = match (&num_t, &num_1) {
                            (Some(t), Some(g1)) => Some(alpha_connection(g1, t, alpha)?),
                            _ => None,
                        };
                        push_tensor3(
                            records,
                            || base("gamma_alpha"),
                            2,
                            num_a.as_ref(),
                            &closed_a,
                            Some(alpha),
                        );
                    }
                }
            }
        }
        FamilyChoice::OrthantGaussian => {
            let fam = m2_family(cfg)?;
            for pt in m2_points(cfg, &fam)? {
                let p = fam.dim();
                // closed forms: T_iii = -1/c³, one-connection identically zero
                let mut closed_t =
                    crate::geometry::Tensor3::zeros(p, crate::geometry::SymmetryClass::FullySymmetric);
                for (i, &c) in pt.coords.iter().enumerate() {
                    closed_t.set(i, i, i, -1.0 / (c * c * c));
                }
                let closed_1 =
                    crate::geometry::Tensor3::zeros(p, crate::geometry::SymmetryClass::SymmetricFirstPair);
                let (num_t, num_1) = if cfg.engine == EngineChoice::Closed {
                    (None, None)
                } else {
                    (
                        Some(skewness_tensor(&fam, &pt, &engine)?),
                        Some(one_connection(&fam, &pt, &engine)?),
                    )
                };
                push_tensor3(records, || m2_record(&fam, &pt, "T", cfg.engine), p, num_t.as_ref(), &closed_t, None);
                push_tensor3(records, || m2_record(&fam, &pt, "gamma1", cfg.engine), p, num_1.as_ref(), &closed_1, None);
                for &alpha in &cfg.alphas {
                    let closed_a = og::alpha_connection_closed(&fam, &pt, alpha)?;
                    let num_a = match (&num_t, &num_1) {
                        (Some(t), Some(g1)) => Some(alpha_connection(g1, t, alpha)?),
                        _ => None,
                    };
                    push_tensor3(
                        records,
                        || m2_record(&fam, &pt, "gamma_alpha", cfg.engine),
                        p,
                        num_a.as_ref(),
                        &closed_a,
                        Some(alpha),
                    );
                }
            }
        }
    }
    Ok(())
}

fn run_curvature(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<()> {
    let engine = engine_for(cfg)?;
    let policy = StepPolicy::first_order();
    let alphas = if cfg.alphas.is_empty() { vec![0.0] } else { cfg.alphas.clone() };
    match cfg.family.unwrap() {
        FamilyChoice::GeneralizedGaussian => {
            for &beta in &cfg.betas {
                let fam = GeneralizedGaussian::new(beta)?;
                for (mu, sigma) in gg_points(cfg) {
                    let pt = fam.point(mu, sigma);
                    for &alpha in &alphas {
                        let closed = gg::curvature_closed(sigma, beta, alpha)?;
                        let base = |q: &str| {
                            OutputRecord::new(fam.name(), gg::CHART_LOCATION_SCALE, q, cfg.engine)
                                .param_i("beta", beta as u64)
                                .param_f("mu", mu)
                                .param_f("sigma", sigma)
                        };
                        let numeric = if cfg.engine == EngineChoice::Closed {
                            None
                        } else {
                            Some(curvature_tensor(&fam, &pt, alpha, &engine, &policy)?)
                        };
                        for i in 0..2 {
                            for h in 0..2 {
                                for j in 0..2 {
                                    for k in 0..2 {
                                        let mut rec = base("R");
                                        rec.alpha = Some(alpha);
                                        rec.indices = vec![i + 1, h + 1, j + 1, k + 1];
                                        match &numeric {
                                            Some(r) => {
                                                rec.value = Some(r.get(i, h, j, k));
                                                rec = rec.with_reference(closed.get(i, h, j, k));
                                            }
                                            None => rec.value = Some(closed.get(i, h, j, k)),
                                        }
                                        records.push(rec);
                                    }
                                }
                            }
                        }
                        let mut rec = base("K");
                        rec.alpha = Some(alpha);
                        let k_closed = gg::gaussian_curvature_closed(beta, alpha)?;
                        match &numeric {
                            Some(r) => {
                                let g = fisher_metric(&fam, &pt, &engine)?;
                                rec.value = Some(gaussian_curvature(r, &g)?);
                                rec = rec.with_reference(k_closed);
                            }
                            None => rec.value = Some(k_closed),
                        }
                        records.push(rec);
                    }
                }
            }
        }
        FamilyChoice::OrthantGaussian => {
            let fam = m2_family(cfg)?;
            for pt in m2_points(cfg, &fam)? {
                let p = fam.dim();
                for &alpha in &alphas {
                    let numeric = if cfg.engine == EngineChoice::Closed {
                        None
                    } else {
                        Some(curvature_tensor(&fam, &pt, alpha, &engine, &policy)?)
                    };
                    for i in 0..p {
                        for h in 0..p {
                            for j in 0..p {
                                for k in 0..p {
                                    let mut rec = m2_record(&fam, &pt, "R", cfg.engine);
                                    rec.alpha = Some(alpha);
                                    rec.indices = vec![i + 1, h + 1, j + 1, k + 1];
                                    match &numeric {
                                        Some(r) => {
                                            rec.value = Some(r.get(i, h, j, k));
                                            // flat family: reference identically zero
                                            rec = rec.with_reference(0.0);
                                        }
                                        None => rec.value = Some(0.0),
                                    }
                                    records.push(rec);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_sweep(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<bool> {
    let engine = engine_for(cfg)?;
    let policy = StepPolicy::first_order();
    let mut any_failed = false;
    for &beta in &cfg.betas {
        for &alpha in &cfg.alphas {
            let k_closed = gg::gaussian_curvature_closed(beta, alpha)?;
            let mut rec = OutputRecord::new("generalized-gaussian", gg::CHART_LOCATION_SCALE, "K", cfg.engine)
                .param_i("beta", beta as u64);
            rec.alpha = Some(alpha);
            if cfg.engine == EngineChoice::Closed {
                rec.value = Some(k_closed);
            } else {
                let fam = GeneralizedGaussian::new(beta)?;
                let pt = fam.point(0.0, 1.0);
                let numeric = curvature_tensor(&fam, &pt, alpha, &engine, &policy)
                    .and_then(|r| Ok(gaussian_curvature(&r, &fisher_metric(&fam, &pt, &engine)?)?));
                match numeric {
                    Ok(k) => {
                        rec.value = Some(k);
                        rec = rec.with_reference(k_closed);
                    }
                    Err(_) => {
                        // in-band failure marker; the run continues
                        rec.value = None;
                        rec.reference_value = Some(k_closed);
                        any_failed = true;
                    }
                }
            }
            records.push(rec);
        }
    }
    Ok(any_failed)
}

fn run_flat_roots(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<()> {
    let engine = engine_for(cfg)?;
    let policy = StepPolicy::first_order();
    for &beta in &cfg.betas {
        let closed_roots = gg::gaussian_curvature_roots(beta)?;
        let numeric_roots: Option<[f64; 2]> = if cfg.engine == EngineChoice::Closed {
            None
        } else {
            let fam = GeneralizedGaussian::new(beta)?;
            let k_num = |alpha: f64| -> f64 {
                let pt = fam.point(0.0, 1.0);
                let r = curvature_tensor(&fam, &pt, alpha, &engine, &policy).unwrap();
                let g = fisher_metric(&fam, &pt, &engine).unwrap();
                gaussian_curvature(&r, &g).unwrap()
            };
            Some([gg::bisect(&k_num, -1.3, -0.7)?, gg::bisect(&k_num, 0.05, 1.2)?])
        };
        for (i, &root) in closed_roots.iter().enumerate() {
            let mut rec = OutputRecord::new(
                "generalized-gaussian",
                gg::CHART_LOCATION_SCALE,
                "alpha-root",
                cfg.engine,
            )
            .param_i("beta", beta as u64);
            rec.indices = vec![i + 1];
            match numeric_roots {
                Some(roots) => {
                    rec.value = Some(roots[i]);
                    rec = rec.with_reference(root);
                }
                None => rec.value = Some(root),
            }
            records.push(rec);
        }
    }
    Ok(())
}

fn run_sample(cfg: &RunConfig, records: &mut Vec<OutputRecord>) -> Result<()> {
    let n = cfg.samples.unwrap();
    let stream = RandomStream::new(cfg.seed.unwrap(), 0);
    match cfg.family.unwrap() {
        FamilyChoice::GeneralizedGaussian => {
            for &beta in &cfg.betas {
                let fam = GeneralizedGaussian::new(beta)?;
                for (mu, sigma) in gg_points(cfg) {
                    let batch = fam.draw_samples(&fam.point(mu, sigma), n, &stream)?;
                    for (d, row) in batch.rows().enumerate() {
                        let mut rec = OutputRecord::new(
                            fam.name(),
                            gg::CHART_LOCATION_SCALE,
                            "sample",
                            EngineChoice::MonteCarlo,
                        )
                        .param_i("beta", beta as u64)
                        .param_f("mu", mu)
                        .param_f("sigma", sigma);
                        rec.indices = vec![d + 1, 1];
                        rec.value = Some(row[0]);
                        records.push(rec);
                    }
                }
            }
        }
        FamilyChoice::OrthantGaussian => {
            let fam = m2_family(cfg)?;
            for pt in m2_points(cfg, &fam)? {
                let batch = fam.draw_samples(&pt, n, &stream)?;
                for (d, row) in batch.rows().enumerate() {
                    for (c, &x) in row.iter().enumerate() {
                        let mut rec = m2_record(&fam, &pt, "sample", EngineChoice::MonteCarlo);
                        rec.indices = vec![d + 1, c + 1];
                        rec.value = Some(x);
                        records.push(rec);
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let mut opts = VerifyOptions::default();
    if let Some(f) = cfg.family {
        opts.family = Some(match f {
            FamilyChoice::GeneralizedGaussian => FamilyFilter::GeneralizedGaussian,
            FamilyChoice::OrthantGaussian => FamilyFilter::OrthantGaussian,
        });
    }
    if !cfg.betas.is_empty() {
        opts.betas = cfg.betas.clone();
    }
    if let Some(p) = cfg.dim {
        opts.dims = vec![p];
    }
    if !cfg.alphas.is_empty() {
        opts.alphas = cfg.alphas.clone();
    }
    opts.tol_override = cfg.tol;
    opts.nodes = cfg.nodes;
    if let Some(s) = cfg.samples {
        opts.mc_samples = s;
    }
    if let Some(s) = cfg.seed {
        opts.seed = s;
    }
    opts.perturbation = cfg.perturb;
    let report = verify::run(opts)?;
    report.render(out)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAILURE })
}

/// Execute a parsed configuration, writing records/reports to `out`.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    if cfg.command == Command::Verify {
        return run_verify(cfg, out);
    }
    let mut records = Vec::new();
    let mut status = EXIT_OK;
    match cfg.command {
        Command::Metric => run_metric(cfg, &mut records)?,
        Command::Connection => run_connection(cfg, &mut records)?,
        Command::Curvature => run_curvature(cfg, &mut records)?,
        Command::Sweep => {
            if run_sweep(cfg, &mut records)? {
                status = EXIT_FAILURE;
            }
        }
        Command::FlatRoots => run_flat_roots(cfg, &mut records)?,
        Command::Sample => run_sample(cfg, &mut records)?,
        Command::Verify => unreachable!(),
    }
    emit(&records, cfg.output, cfg.seed, cfg.nodes, out)?;
    Ok(status)
}

/// Entry point used by the binary: parse, run, map errors to exit codes.
#[allow(clippy::ptr_arg)]
pub fn run_main(argv: &[String]) -> i32 {
    let cfg = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &cfg.out_path {
        Some(path) => {
            let file = match std::fs::File::create(path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: cannot write {path}: {e}");
                    return EXIT_FAILURE;
                }
            };
            let mut w = std::io::BufWriter::new(file);
            execute(&cfg, &mut w)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            execute(&cfg, &mut w)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn parses_a_curvature_run() {
        let cfg = parse_args(&args(
            "curvature --family gg --beta 4 --mu 0 --sigma 1 --alpha 0",
        ))
        .unwrap();
        assert_eq!(cfg.command, Command::Curvature);
        assert_eq!(cfg.betas, vec![4]);
        assert_eq!(cfg.engine, EngineChoice::Quadrature);
        assert_eq!(cfg.nodes, 400);
        assert_eq!(cfg.output, OutputFormat::Json);
    }

    #[test]
    fn rejects_odd_beta() {
        let err = parse_args(&args("metric --family gg --beta 3 --mu 0 --sigma 1")).unwrap_err();
        assert!(err.0.contains("beta must be even"), "{}", err.0);
    }

    #[test]
    fn monte_carlo_needs_samples_and_seed() {
        let err = parse_args(&args("sample --family m2 --p 2 --engine mc")).unwrap_err();
        assert!(err.0.contains("--samples"), "{}", err.0);
        assert!(parse_args(&args(
            "sample --family m2 --p 2 --engine mc --samples 10 --seed 1"
        ))
        .is_ok());
    }

    #[test]
    fn rejects_unknown_flags_and_commands() {
        assert!(parse_args(&args("metric --family gg --beta 2 --frobnicate 1")).is_err());
        assert!(parse_args(&args("explode")).is_err());
        assert!(parse_args(&[]).is_err());
    }

    #[test]
    fn grid_ranges_include_both_endpoints() {
        let v = parse_values("0:2:0.5", "--x").unwrap();
        assert_eq!(v, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        // endpoint within half a step is kept
        let v = parse_values("0:0.9999999:0.25", "--x").unwrap();
        assert_eq!(v.len(), 5);
        assert!(parse_values("2:1:0.5", "--x").is_err());
    }

    #[test]
    fn grid_and_point_flags_are_exclusive() {
        assert!(parse_args(&args(
            "metric --family gg --beta 2 --mu 0 --grid-mu 0:1:0.5"
        ))
        .is_err());
    }

    #[test]
    fn csv_empty_record_list_is_header_only() {
        let mut buf = Vec::new();
        emit(&[], OutputFormat::Csv, None, 400, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "family,chart,params,alpha,engine,quantity,indices,value,reference_value,abs_err\n"
        );
    }

    #[test]
    fn json_schema_for_a_single_k_record() {
        let mut rec = OutputRecord::new("generalized-gaussian", "location-scale", "K", EngineChoice::Closed)
            .param_i("beta", 4);
        rec.alpha = Some(0.0);
        rec.value = Some(-0.25);
        let mut buf = Vec::new();
        emit(&[rec], OutputFormat::Json, Some(7), 400, &mut buf).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["records"].as_array().unwrap().len(), 1);
        assert_eq!(doc["records"][0]["quantity"], "K");
        assert_eq!(doc["records"][0]["indices"].as_array().unwrap().len(), 0);
        assert_eq!(doc["meta"]["seed"], 7);
        assert_eq!(doc["meta"]["nodes"], 400);
        assert!(doc["meta"]["timestamp"].is_u64());
        assert_eq!(doc["records"][0]["value"].as_f64().unwrap(), -0.25);
    }

    #[test]
    fn seventeen_digit_rendering_round_trips() {
        for v in [0.1 + 0.2, -1.0 / 3.0, 2.0_f64.powi(-40), 6.02e23, -0.0] {
            let s = fmt17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn execute_closed_sweep_gives_anchor_column() {
        let cfg = parse_args(&args("sweep --beta 2,4,6 --alpha 0 --engine closed --output csv"))
            .unwrap();
        let mut buf = Vec::new();
        let status = execute(&cfg, &mut buf).unwrap();
        assert_eq!(status, EXIT_OK);
        let text = String::from_utf8(buf).unwrap();
        let values: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
            .collect();
        assert!((values[0] + 0.5).abs() < 1e-12);
        assert!((values[1] + 0.25).abs() < 1e-12);
        assert!((values[2] + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_flat_cells_from_corrected_closed_form() {
        // beta = 4: K vanishes at alpha = 1/3 but not at alpha = 1;
        // beta = 2, alpha = -1 is the mixture-flat Gaussian case
        let cfg = parse_args(&args(
            "sweep --beta 4 --alpha 0.33333333333333331,1 --engine closed --output csv",
        ))
        .unwrap();
        let mut buf = Vec::new();
        execute(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let values: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(7).unwrap().parse().unwrap())
            .collect();
        assert!(values[0].abs() < 1e-12);
        assert!((values[1] - 1.0).abs() < 1e-12);

        let cfg =
            parse_args(&args("sweep --beta 2 --alpha -1 --engine closed --output csv")).unwrap();
        let mut buf = Vec::new();
        execute(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: f64 = text.lines().nth(1).unwrap().split(',').nth(7).unwrap().parse().unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn csv_output_is_byte_deterministic() {
        let cfg = parse_args(&args(
            "connection --family gg --beta 4 --mu 0.3 --sigma 1.2 --alpha 0.5 --output csv",
        ))
        .unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        execute(&cfg, &mut a).unwrap();
        execute(&cfg, &mut b).unwrap();
        assert_eq!(a, b);
        let cfg = parse_args(&args(
            "sample --family gg --beta 2 --samples 64 --seed 9 --output csv",
        ))
        .unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        execute(&cfg, &mut a).unwrap();
        execute(&cfg, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
