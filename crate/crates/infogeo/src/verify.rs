//! The closed-form-vs-numeric verification harness.
//!
//! Every invariant the library promises is bundled here as a named check:
//! the coefficient ledger against the quadrature engine, both Fisher-metric
//! routes, connection consistency, curvature against closed forms, curvature
//! constancy, orthant-family flatness, the dual-curvature identity, sampler
//! moments and Monte-Carlo/quadrature cross-agreement.
//!
//! The harness is deliberately mutation-sensitive: all closed-form reference
//! values flow through one constants bundle, and a [`Perturbation`] can
//! offset any single constant to prove the comparisons actually bite.

use std::io::Write;

use crate::error::Result;
use crate::families::generalized_gaussian::{self as gg, GeneralizedGaussian};
use crate::families::orthant_gaussian::{self as og, OrthantGaussian};
use crate::geometry::{
    alpha_connection, curvature_tensor, fisher_metric, gaussian_curvature, is_alpha_flat,
    levi_civita, one_connection, score_covariance, skewness_tensor, MetricTensor, Tensor3,
    Tensor4,
};
use crate::manifold::{score, ExpectationEngine, ParameterPoint, StatisticalFamily};
use crate::numerics::diff::StepPolicy;
use crate::numerics::rng::RandomStream;

/// Which closed-form constant a perturbation offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum PerturbedConstant {
    C11,
    C22,
    C112,
    C121,
    C222,
    C1_112,
    C1_121,
    C1_222,
    M2Metric,
    M2Connection,
}

impl PerturbedConstant {
    pub const ALL: [PerturbedConstant; 10] = [
        PerturbedConstant::C11,
        PerturbedConstant::C22,
        PerturbedConstant::C112,
        PerturbedConstant::C121,
        PerturbedConstant::C222,
        PerturbedConstant::C1_112,
        PerturbedConstant::C1_121,
        PerturbedConstant::C1_222,
        PerturbedConstant::M2Metric,
        PerturbedConstant::M2Connection,
    ];

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "c11" => PerturbedConstant::C11,
            "c22" => PerturbedConstant::C22,
            "c112" => PerturbedConstant::C112,
            "c121" => PerturbedConstant::C121,
            "c222" => PerturbedConstant::C222,
            "c1-112" | "c1_112" => PerturbedConstant::C1_112,
            "c1-121" | "c1_121" => PerturbedConstant::C1_121,
            "c1-222" | "c1_222" => PerturbedConstant::C1_222,
            "m2-metric" => PerturbedConstant::M2Metric,
            "m2-connection" => PerturbedConstant::M2Connection,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PerturbedConstant::C11 => "c11",
            PerturbedConstant::C22 => "c22",
            PerturbedConstant::C112 => "c112",
            PerturbedConstant::C121 => "c121",
            PerturbedConstant::C222 => "c222",
            PerturbedConstant::C1_112 => "c1-112",
            PerturbedConstant::C1_121 => "c1-121",
            PerturbedConstant::C1_222 => "c1-222",
            PerturbedConstant::M2Metric => "m2-metric",
            PerturbedConstant::M2Connection => "m2-connection",
        }
    }
}

/// Additive offset of one closed-form constant, for harness-integrity tests.
#[derive(Debug, Clone, Copy)]
pub struct Perturbation {
    pub constant: PerturbedConstant,
    pub delta: f64,
}

/// The closed-form reference constants every comparison reads from.
#[derive(Debug, Clone, Copy)]
struct Constants {
    gg: gg::ConnectionConstants,
    /// coefficient of 1/c² in the orthant-family metric (½ unperturbed)
    m2_metric_coeff: f64,
    /// coefficient of (1−α)/c³ in the orthant-family connection (½ unperturbed)
    m2_conn_coeff: f64,
}

impl Constants {
    fn new(beta: u32, perturbation: Option<Perturbation>) -> Result<Self> {
        let mut c = Constants {
            gg: gg::connection_constants(beta)?,
            m2_metric_coeff: 0.5,
            m2_conn_coeff: 0.5,
        };
        if let Some(p) = perturbation {
            match p.constant {
                PerturbedConstant::C11 => c.gg.c11 += p.delta,
                PerturbedConstant::C22 => c.gg.c22 += p.delta,
                PerturbedConstant::C112 => c.gg.c112 += p.delta,
                PerturbedConstant::C121 => c.gg.c121 += p.delta,
                PerturbedConstant::C222 => c.gg.c222 += p.delta,
                PerturbedConstant::C1_112 => c.gg.c1_112 += p.delta,
                PerturbedConstant::C1_121 => c.gg.c1_121 += p.delta,
                PerturbedConstant::C1_222 => c.gg.c1_222 += p.delta,
                PerturbedConstant::M2Metric => c.m2_metric_coeff += p.delta,
                PerturbedConstant::M2Connection => c.m2_conn_coeff += p.delta,
            }
        }
        Ok(c)
    }

    fn metric_diag(&self, sigma: f64) -> [f64; 2] {
        [self.gg.c11 / (sigma * sigma), self.gg.c22 / (sigma * sigma)]
    }

    fn skewness(&self, sigma: f64, i: usize, j: usize, k: usize) -> f64 {
        let s3 = sigma.powi(3);
        match (i, j, k) {
            (0, 0, 1) => self.gg.c112 / s3,
            // T₁₂₁ = T₂₁₁ carry their own ledger constant (equal to c112)
            (0, 1, 0) | (1, 0, 0) => self.gg.c121 / s3,
            (1, 1, 1) => self.gg.c222 / s3,
            _ => 0.0,
        }
    }

    fn one_connection(&self, sigma: f64, i: usize, j: usize, k: usize) -> f64 {
        let s3 = sigma.powi(3);
        match (i, j, k) {
            (0, 0, 1) => self.gg.c1_112 / s3,
            (0, 1, 0) | (1, 0, 0) => self.gg.c1_121 / s3,
            (1, 1, 1) => self.gg.c1_222 / s3,
            _ => 0.0,
        }
    }

    fn curvature(&self, sigma: f64, alpha: f64, i: usize, h: usize, j: usize, k: usize) -> f64 {
        let w = (1.0 - alpha) / 2.0;
        let a = self.gg.c1_112 + w * self.gg.c112;
        let b = self.gg.c1_121 + w * self.gg.c121;
        let s4 = sigma.powi(4);
        let r1212 = -(1.0 + alpha) * a / s4;
        let r1221 = -(1.0 - alpha) * b / s4;
        match (i, h, j, k) {
            (0, 1, 0, 1) => r1212,
            (1, 0, 0, 1) => -r1212,
            (0, 1, 1, 0) => r1221,
            (1, 0, 1, 0) => -r1221,
            _ => 0.0,
        }
    }

    fn gaussian_curvature(&self, alpha: f64) -> f64 {
        self.curvature(1.0, alpha, 0, 1, 0, 1) / (self.gg.c11 * self.gg.c22)
    }
}

/// Family filter for a narrowed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyFilter {
    GeneralizedGaussian,
    OrthantGaussian,
}

/// Scope and knobs of one verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub family: Option<FamilyFilter>,
    pub betas: Vec<u32>,
    pub dims: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Replaces every check tolerance when set.
    pub tol_override: Option<f64>,
    pub nodes: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub perturbation: Option<Perturbation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            family: None,
            betas: vec![2, 4, 6],
            dims: vec![1, 2, 3],
            alphas: vec![-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0],
            tol_override: None,
            nodes: crate::manifold::DEFAULT_QUADRATURE_NODES,
            mc_samples: 1_000_000,
            seed: 20240817,
            perturbation: None,
        }
    }
}

/// Result of a single named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub detail: String,
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

/// One verification run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for c in &self.checks {
            writeln!(
                out,
                "{} {:<28} worst {:>12.3e}  tol {:>9.1e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.worst,
                c.tol,
                c.detail
            )?;
        }
        let done = self.checks.iter().filter(|c| c.pass).count();
        writeln!(out, "{done}/{} checks passed", self.checks.len())
    }
}

struct Ctx {
    opts: VerifyOptions,
    engine: ExpectationEngine,
    policy: StepPolicy,
    checks: Vec<CheckResult>,
}

impl Ctx {
    fn tol(&self, base: f64) -> f64 {
        self.opts.tol_override.unwrap_or(base)
    }

    fn push(&mut self, name: &'static str, worst: f64, tol: f64, detail: String) {
        self.checks.push(CheckResult { name, detail, worst, tol, pass: worst <= tol });
    }

    fn run_gg(&self) -> bool {
        self.opts.family != Some(FamilyFilter::OrthantGaussian)
    }

    fn run_m2(&self) -> bool {
        self.opts.family != Some(FamilyFilter::GeneralizedGaussian)
    }
}

/// Run the whole suite (or the scope narrowed in `opts`).
pub fn run(opts: VerifyOptions) -> Result<VerifyReport> {
    let engine = ExpectationEngine::quadrature_with_nodes(opts.nodes)?;
    let policy = StepPolicy::first_order();
    let mut ctx = Ctx { opts, engine, policy, checks: Vec::new() };

    if ctx.run_gg() {
        check_gg_metric(&mut ctx)?;
        check_gg_tensor_ledger(&mut ctx)?;
        check_gamma_identities(&mut ctx)?;
        check_gg_curvature(&mut ctx)?;
        check_k_constancy(&mut ctx)?;
        check_k_anchors(&mut ctx)?;
        check_flat_root_recovery(&mut ctx)?;
        check_dual_identity(&mut ctx)?;
    }
    if ctx.run_m2() {
        check_m2_metric_and_connection(&mut ctx)?;
        check_m2_flatness(&mut ctx)?;
        check_m2_marginals(&mut ctx)?;
    }
    check_metric_routes(&mut ctx)?;
    check_score_identity(&mut ctx)?;
    check_lc_consistency(&mut ctx)?;
    check_symmetry_classes(&mut ctx)?;
    check_normalization(&mut ctx)?;
    check_mc_agreement(&mut ctx)?;
    check_sampler_moments(&mut ctx)?;

    Ok(VerifyReport { checks: ctx.checks })
}

fn gg_grid() -> Vec<(f64, f64)> {
    vec![(-1.0, 0.5), (0.0, 1.0), (1.0, 2.0), (0.3, 1.4)]
}

fn check_gg_metric(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-6);
    let tol_off = ctx.tol(1e-8);
    let mut worst_rel = 0.0f64;
    let mut worst_off = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        let consts = Constants::new(beta, ctx.opts.perturbation)?;
        let fam = GeneralizedGaussian::new(beta)?;
        for &(mu, sigma) in &gg_grid() {
            let g = fisher_metric(&fam, &fam.point(mu, sigma), &ctx.engine)?;
            let want = consts.metric_diag(sigma);
            worst_rel = worst_rel.max(((g.get(0, 0) - want[0]) / want[0]).abs());
            worst_rel = worst_rel.max(((g.get(1, 1) - want[1]) / want[1]).abs());
            worst_off = worst_off.max(g.get(0, 1).abs());
        }
    }
    ctx.push("gg-metric-closed-form", worst_rel, tol, "relative, diagonal entries".into());
    ctx.push("gg-metric-off-diagonal", worst_off, tol_off, "absolute".into());
    Ok(())
}

fn check_gg_tensor_ledger(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-6);
    let tol_zero = ctx.tol(1e-8);
    let mut worst = 0.0f64;
    let mut worst_zero = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        let consts = Constants::new(beta, ctx.opts.perturbation)?;
        let fam = GeneralizedGaussian::new(beta)?;
        for &(mu, sigma) in &[(0.0, 1.0), (0.5, 2.0)] {
            let pt = fam.point(mu, sigma);
            let t = skewness_tensor(&fam, &pt, &ctx.engine)?;
            let g1 = one_connection(&fam, &pt, &ctx.engine)?;
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let wt = consts.skewness(sigma, i, j, k);
                        let w1 = consts.one_connection(sigma, i, j, k);
                        if wt == 0.0 {
                            worst_zero = worst_zero.max(t.get(i, j, k).abs());
                        } else {
                            worst = worst.max((t.get(i, j, k) - wt).abs());
                        }
                        if w1 == 0.0 {
                            worst_zero = worst_zero.max(g1.get(i, j, k).abs());
                        } else {
                            worst = worst.max((g1.get(i, j, k) - w1).abs());
                        }
                    }
                }
            }
        }
    }
    ctx.push("gg-tensor-ledger", worst, tol, "T and one-connection coefficients".into());
    ctx.push("gg-tensor-declared-zeros", worst_zero, tol_zero, "absolute".into());
    Ok(())
}

fn check_gamma_identities(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-10);
    let mut worst = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        // constructors re-verify the gamma recurrences internally
        let c = gg::connection_constants(beta)?;
        for &alpha in &ctx.opts.alphas {
            let ff = gg::first_factor(beta, alpha)?;
            worst = worst.max((ff - (c.c1_112 + (1.0 - alpha) / 2.0 * c.c112)).abs());
            let sf = gg::second_factor(beta, alpha)?;
            worst = worst.max((sf - (c.c1_121 + (1.0 - alpha) / 2.0 * c.c121)).abs());
        }
    }
    ctx.push("gamma-recurrence-identities", worst, tol, "closed form vs ledger route".into());
    Ok(())
}

fn check_gg_curvature(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(2e-3);
    let mut worst = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        let consts = Constants::new(beta, ctx.opts.perturbation)?;
        let fam = GeneralizedGaussian::new(beta)?;
        for alpha in ctx.opts.alphas.clone() {
            for &(mu, sigma) in &[(0.0, 1.0), (0.5, 1.5)] {
                let r =
                    curvature_tensor(&fam, &fam.point(mu, sigma), alpha, &ctx.engine, &ctx.policy)?;
                for i in 0..2 {
                    for h in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                let want = consts.curvature(sigma, alpha, i, h, j, k);
                                worst = worst.max((r.get(i, h, j, k) - want).abs());
                            }
                        }
                    }
                }
            }
        }
    }
    ctx.push("gg-curvature-closed-form", worst, tol, "all tensor components, absolute".into());
    Ok(())
}

fn check_k_constancy(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-3);
    let mut worst = 0.0f64;
    let mus = [-1.0, -0.25, 0.5, 1.0];
    let sigmas = [0.5, 1.0, 1.5, 2.0];
    for beta in ctx.opts.betas.clone() {
        let fam = GeneralizedGaussian::new(beta)?;
        for alpha in ctx.opts.alphas.clone() {
            let mut ks = Vec::with_capacity(16);
            for &mu in &mus {
                for &sigma in &sigmas {
                    let pt = fam.point(mu, sigma);
                    let r = curvature_tensor(&fam, &pt, alpha, &ctx.engine, &ctx.policy)?;
                    let g = fisher_metric(&fam, &pt, &ctx.engine)?;
                    ks.push(gaussian_curvature(&r, &g)?);
                }
            }
            let mean: f64 = ks.iter().sum::<f64>() / ks.len() as f64;
            let sd =
                (ks.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / ks.len() as f64).sqrt();
            worst = worst.max(sd);
        }
    }
    ctx.push("gg-curvature-constancy", worst, tol, "K std-dev over the 4x4 grid".into());
    Ok(())
}

fn check_k_anchors(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(2e-3);
    let mut worst = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        let consts = Constants::new(beta, ctx.opts.perturbation)?;
        let fam = GeneralizedGaussian::new(beta)?;
        let pt = fam.point(0.0, 1.0);
        let r = curvature_tensor(&fam, &pt, 0.0, &ctx.engine, &ctx.policy)?;
        let g = fisher_metric(&fam, &pt, &ctx.engine)?;
        let k = gaussian_curvature(&r, &g)?;
        worst = worst.max((k + 1.0 / beta as f64).abs());
        worst = worst.max((k - consts.gaussian_curvature(0.0)).abs());
    }
    ctx.push("gg-curvature-anchors", worst, tol, "numeric K at alpha 0 vs -1/beta".into());
    Ok(())
}

fn check_flat_root_recovery(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(5e-3);
    let mut worst = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        if beta == 2 {
            continue; // roots sit at the bracket ends for β = 2
        }
        let fam = GeneralizedGaussian::new(beta)?;
        let k_num = |alpha: f64| -> f64 {
            let pt = fam.point(0.0, 1.0);
            let r = curvature_tensor(&fam, &pt, alpha, &ctx.engine, &ctx.policy).unwrap();
            let g = fisher_metric(&fam, &pt, &ctx.engine).unwrap();
            gaussian_curvature(&r, &g).unwrap()
        };
        let r1 = gg::bisect(k_num, -1.3, -0.7)?;
        let r2 = gg::bisect(k_num, 0.05, 1.2)?;
        worst = worst.max((r1 + 1.0).abs());
        worst = worst.max((r2 - 1.0 / (beta as f64 - 1.0)).abs());
    }
    ctx.push("gg-flat-root-recovery", worst, tol, "bisection on numeric K(alpha)".into());
    Ok(())
}

fn check_dual_identity(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(5e-4);
    let mut worst = 0.0f64;
    for beta in ctx.opts.betas.clone() {
        let fam = GeneralizedGaussian::new(beta)?;
        for alpha in [0.5, 1.0] {
            for &(mu, sigma) in &[(0.0, 1.0), (0.5, 1.5)] {
                let pt = fam.point(mu, sigma);
                let rp = curvature_tensor(&fam, &pt, alpha, &ctx.engine, &ctx.policy)?;
                let rm = curvature_tensor(&fam, &pt, -alpha, &ctx.engine, &ctx.policy)?;
                for i in 0..2 {
                    for h in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                worst =
                                    worst.max((rp.get(i, h, j, k) + rm.get(i, h, k, j)).abs());
                            }
                        }
                    }
                }
            }
        }
    }
    ctx.push("dual-curvature-identity", worst, tol, "R(a)_ihjk = -R(-a)_ihkj".into());
    Ok(())
}

fn check_m2_metric_and_connection(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-6);
    let consts = Constants::new(2, ctx.opts.perturbation)?;
    let mut worst_metric = 0.0f64;
    let mut worst_conn = 0.0f64;
    for p in ctx.opts.dims.clone() {
        let fam = OrthantGaussian::new(p)?;
        let lambdas: Vec<f64> = (0..p).map(|i| 0.6 + 0.5 * i as f64).collect();
        let prec = fam.precision_point(lambdas);
        let natural = fam.convert_point(&prec, og::CHART_NATURAL)?;
        for pt in [prec, natural] {
            let g = fisher_metric(&fam, &pt, &ctx.engine)?;
            for i in 0..p {
                for j in 0..p {
                    let c = pt.coords[i];
                    let want = if i == j { consts.m2_metric_coeff / (c * c) } else { 0.0 };
                    worst_metric = worst_metric.max((g.get(i, j) - want).abs());
                }
            }
            let alpha = ctx.opts.alphas.first().copied().unwrap_or(0.0);
            let t = skewness_tensor(&fam, &pt, &ctx.engine)?;
            let g1 = one_connection(&fam, &pt, &ctx.engine)?;
            let ga = alpha_connection(&g1, &t, alpha)?;
            for i in 0..p {
                for j in 0..p {
                    for k in 0..p {
                        let c = pt.coords[i];
                        let want = if i == j && j == k {
                            -(1.0 - alpha) * consts.m2_conn_coeff / (c * c * c)
                        } else {
                            0.0
                        };
                        worst_conn = worst_conn.max((ga.get(i, j, k) - want).abs());
                    }
                }
            }
        }
    }
    ctx.push("m2-metric-closed-form", worst_metric, tol, "both charts, absolute".into());
    ctx.push("m2-connection-closed-form", worst_conn, tol, "both charts, absolute".into());
    Ok(())
}

fn check_m2_flatness(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-5);
    let mut worst = 0.0f64;
    let axis = [0.5, 1.25, 2.0];
    for p in ctx.opts.dims.clone() {
        let fam = OrthantGaussian::new(p)?;
        let mut grid = Vec::new();
        let mut idx = vec![0usize; p];
        loop {
            let lambda: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            grid.push(fam.natural_point(lambda.iter().map(|&l| -l / 2.0).collect()));
            grid.push(fam.precision_point(lambda));
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
        for alpha in ctx.opts.alphas.clone() {
            let v = is_alpha_flat(&fam, alpha, &grid, tol, &ctx.engine, &ctx.policy)?;
            worst = worst.max(v.max_abs);
        }
    }
    ctx.push(
        "m2-flatness",
        worst,
        tol,
        format!("max |R| over lambda in [0.5,2]^p, both charts, alphas {:?}", ctx.opts.alphas),
    );
    Ok(())
}

fn check_m2_marginals(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-6);
    let mut worst = 0.0f64;
    for p in ctx.opts.dims.clone() {
        let fam = OrthantGaussian::new(p)?;
        let lambdas: Vec<f64> = (0..p).map(|i| 1.0 + 3.0 * i as f64 / p as f64).collect();
        let pt = fam.precision_point(lambdas);
        for axis in 0..p {
            let rep = og::marginal_check(&fam, &pt, axis, &ctx.engine)?;
            for c in &rep.checks {
                worst = worst.max((c.value - c.expected).abs());
            }
        }
    }
    ctx.push("m2-gaussian-marginals", worst, tol, "first four moments per axis".into());
    Ok(())
}

fn check_metric_routes(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-6);
    let mut worst = 0.0f64;
    if ctx.run_gg() {
        for beta in ctx.opts.betas.clone() {
            let fam = GeneralizedGaussian::new(beta)?;
            for &(mu, sigma) in &gg_grid() {
                let pt = fam.point(mu, sigma);
                let a = fisher_metric(&fam, &pt, &ctx.engine)?;
                let b = score_covariance(&fam, &pt, &ctx.engine)?;
                worst = worst.max(metric_diff(&a, &b));
            }
        }
    }
    if ctx.run_m2() {
        for p in ctx.opts.dims.clone() {
            let fam = OrthantGaussian::new(p)?;
            let pt = fam.precision_point((0..p).map(|i| 0.7 + 0.4 * i as f64).collect());
            let a = fisher_metric(&fam, &pt, &ctx.engine)?;
            let b = score_covariance(&fam, &pt, &ctx.engine)?;
            worst = worst.max(metric_diff(&a, &b));
        }
    }
    ctx.push("bartlett-identity", worst, tol, "-E[hessian] vs E[score x score]".into());
    Ok(())
}

fn metric_diff(a: &MetricTensor, b: &MetricTensor) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
        }
    }
    worst
}

fn check_score_identity(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-7);
    let mut worst = 0.0f64;
    let mut cases: Vec<(Box<dyn StatisticalFamily>, ParameterPoint)> = Vec::new();
    if ctx.run_gg() {
        for beta in ctx.opts.betas.clone() {
            let fam = GeneralizedGaussian::new(beta)?;
            let pt = fam.point(0.4, 1.3);
            cases.push((Box::new(fam), pt));
        }
    }
    if ctx.run_m2() {
        for p in ctx.opts.dims.clone() {
            let fam = OrthantGaussian::new(p)?;
            let pt = fam.precision_point((0..p).map(|i| 0.5 + 0.7 * i as f64).collect());
            cases.push((Box::new(fam), pt));
        }
    }
    for (fam, pt) in &cases {
        for i in 0..fam.param_dim() {
            let v =
                ctx.engine.expect(fam.as_ref(), pt, &|x| score(fam.as_ref(), pt, x).map(|s| s[i]))?;
            worst = worst.max(v.abs());
        }
    }
    ctx.push("score-identity", worst, tol, "E[score] = 0".into());
    Ok(())
}

fn check_lc_consistency(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(5e-5);
    let mut worst = 0.0f64;
    let mut cases: Vec<(Box<dyn StatisticalFamily>, ParameterPoint)> = Vec::new();
    if ctx.run_gg() {
        for beta in ctx.opts.betas.clone() {
            let fam = GeneralizedGaussian::new(beta)?;
            let pt = fam.point(0.2, 1.1);
            cases.push((Box::new(fam), pt));
        }
    }
    if ctx.run_m2() {
        for p in ctx.opts.dims.clone() {
            let fam = OrthantGaussian::new(p)?;
            let pt = fam.natural_point((0..p).map(|i| -0.4 - 0.3 * i as f64).collect());
            cases.push((Box::new(fam), pt));
        }
    }
    for (fam, pt) in &cases {
        let lc = levi_civita(fam.as_ref(), pt, &ctx.engine, &ctx.policy)?;
        let g1 = one_connection(fam.as_ref(), pt, &ctx.engine)?;
        let t = skewness_tensor(fam.as_ref(), pt, &ctx.engine)?;
        let a0 = alpha_connection(&g1, &t, 0.0)?;
        let p = fam.param_dim();
        for i in 0..p {
            for j in 0..p {
                for k in 0..p {
                    worst = worst.max((lc.get(i, j, k) - a0.get(i, j, k)).abs());
                }
            }
        }
    }
    ctx.push("levi-civita-vs-alpha-zero", worst, tol, "componentwise".into());
    Ok(())
}

fn check_symmetry_classes(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-8);
    let mut tensors: Vec<(Tensor3, Tensor3, Tensor4)> = Vec::new();
    if ctx.run_gg() {
        let fam = GeneralizedGaussian::new(4)?;
        let pt = fam.point(0.3, 1.2);
        tensors.push((
            skewness_tensor(&fam, &pt, &ctx.engine)?,
            one_connection(&fam, &pt, &ctx.engine)?,
            curvature_tensor(&fam, &pt, 0.5, &ctx.engine, &ctx.policy)?,
        ));
    }
    if ctx.run_m2() {
        let fam = OrthantGaussian::new(2)?;
        let pt = fam.precision_point(vec![0.9, 1.6]);
        tensors.push((
            skewness_tensor(&fam, &pt, &ctx.engine)?,
            one_connection(&fam, &pt, &ctx.engine)?,
            curvature_tensor(&fam, &pt, 0.5, &ctx.engine, &ctx.policy)?,
        ));
    }
    let mut worst = 0.0f64;
    for (t, g1, r) in &tensors {
        worst = worst.max(t.symmetry_error());
        worst = worst.max(g1.symmetry_error());
        worst = worst.max(r.antisymmetry_error());
    }
    ctx.push("tensor-symmetry-classes", worst, tol, "T, one-connection, R".into());
    Ok(())
}

fn check_normalization(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(1e-8);
    let mut worst = 0.0f64;
    if ctx.run_gg() {
        for beta in ctx.opts.betas.clone() {
            let fam = GeneralizedGaussian::new(beta)?;
            for &(mu, sigma) in &gg_grid() {
                let v = ctx.engine.expect(&fam, &fam.point(mu, sigma), &|_| Ok(1.0))?;
                worst = worst.max((v - 1.0).abs());
            }
        }
    }
    if ctx.run_m2() {
        for p in ctx.opts.dims.clone() {
            let fam = OrthantGaussian::new(p)?;
            for base in [0.5, 1.0, 2.0] {
                let pt = fam.precision_point((0..p).map(|i| base + 0.2 * i as f64).collect());
                let v = ctx.engine.expect(&fam, &pt, &|_| Ok(1.0))?;
                worst = worst.max((v - 1.0).abs());
            }
        }
    }
    ctx.push("density-normalization", worst, tol, "E[1] = 1 over parameter grids".into());
    Ok(())
}

fn check_mc_agreement(ctx: &mut Ctx) -> Result<()> {
    // measured in standard errors
    let tol = ctx.tol(4.0);
    let mut worst = 0.0f64;
    let stream = RandomStream::new(ctx.opts.seed, 100);
    if ctx.run_gg() {
        let fam = GeneralizedGaussian::new(4)?;
        let pt = fam.point(0.0, 1.0);
        let mc = ExpectationEngine::monte_carlo(ctx.opts.mc_samples, stream);
        for moment in [2i32, 4] {
            let e = mc.expect_detailed(&fam, &pt, &|x| Ok(x[0].powi(moment)))?;
            let q = ctx.engine.expect(&fam, &pt, &|x| Ok(x[0].powi(moment)))?;
            worst = worst.max((e.value - q).abs() / e.std_error.unwrap().max(1e-300));
        }
    }
    if ctx.run_m2() {
        let fam = OrthantGaussian::new(2)?;
        let pt = fam.precision_point(vec![1.0, 2.5]);
        let mc = ExpectationEngine::monte_carlo(ctx.opts.mc_samples, stream.with_stream(101));
        let e = mc.expect_detailed(&fam, &pt, &|x| Ok(x[0] * x[0] * x[1] * x[1]))?;
        let q = ctx.engine.expect(&fam, &pt, &|x| Ok(x[0] * x[0] * x[1] * x[1]))?;
        worst = worst.max((e.value - q).abs() / e.std_error.unwrap().max(1e-300));
    }
    ctx.push("mc-quadrature-agreement", worst, tol, "deviation in standard errors".into());
    Ok(())
}

fn check_sampler_moments(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol(4.0);
    let mut worst = 0.0f64;
    let n = ctx.opts.mc_samples;
    if ctx.run_gg() {
        for beta in ctx.opts.betas.clone() {
            let fam = GeneralizedGaussian::new(beta)?;
            let pt = fam.point(0.0, 1.0);
            let batch = fam.draw_samples(&pt, n, &RandomStream::new(ctx.opts.seed, 7))?;
            let m2: f64 = batch.rows().map(|r| r[0] * r[0]).sum::<f64>() / n as f64;
            let m3: f64 = batch.rows().map(|r| r[0].powi(3)).sum::<f64>() / n as f64;
            let m4: f64 = batch.rows().map(|r| r[0].powi(4)).sum::<f64>() / n as f64;
            let m6: f64 = batch.rows().map(|r| r[0].powi(6)).sum::<f64>() / n as f64;
            let se2 = ((m4 - m2 * m2).max(0.0) / n as f64).sqrt();
            let se3 = (m6.max(0.0) / n as f64).sqrt();
            worst = worst.max((m2 - gg::moment(2, beta, 1.0)?).abs() / se2.max(1e-300));
            worst = worst.max(m3.abs() / se3.max(1e-300));
        }
    }
    if ctx.run_m2() {
        let fam = OrthantGaussian::new(2)?;
        let pt = fam.precision_point(vec![1.0, 1.0]);
        let batch = fam.draw_samples(&pt, n, &RandomStream::new(ctx.opts.seed, 8))?;
        let m2: f64 = batch.rows().map(|r| r[0] * r[0]).sum::<f64>() / n as f64;
        let m4: f64 = batch.rows().map(|r| r[0].powi(4)).sum::<f64>() / n as f64;
        let se = ((m4 - m2 * m2).max(0.0) / n as f64).sqrt();
        worst = worst.max((m2 - 1.0).abs() / se.max(1e-300));
        let frac = batch.rows().filter(|r| r[0] < 0.0 && r[1] < 0.0).count() as f64 / n as f64;
        worst = worst.max((frac - 0.5).abs() / (0.25f64 / n as f64).sqrt());
    }
    ctx.push("sampler-moments", worst, tol, "deviation in standard errors".into());
    Ok(())
}
