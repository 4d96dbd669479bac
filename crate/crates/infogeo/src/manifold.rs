//! Parametric statistical families and interchangeable expectation engines.
//!
//! A [`StatisticalFamily`] exposes a log-density over its sample support,
//! optionally with analytic score/Hessian, in one or more named coordinate
//! charts. Everything the geometry layer needs is an expectation of functions
//! of the score and Hessian, evaluated through an [`ExpectationEngine`]:
//! deterministic quadrature or seeded Monte Carlo.

use crate::error::{Error, Result};
use crate::numerics::diff::{central_difference, mixed_central_difference, StepPolicy};
use crate::numerics::linalg::Matrix;
use crate::numerics::quadrature::QuadratureRule;
use crate::numerics::rng::RandomStream;

/// Sample-space support of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// ℝ^dim (dim independent line axes).
    Line { dim: usize },
    /// (0, ∞), one-dimensional.
    HalfLine,
    /// Ω_dim = {x ∈ ℝ^dim : ∏ xᵢ > 0}.
    OrthantPair { dim: usize },
}

impl Support {
    pub fn sample_dim(&self) -> usize {
        match *self {
            Support::Line { dim } | Support::OrthantPair { dim } => dim,
            Support::HalfLine => 1,
        }
    }
}

/// A coordinate vector in one of the family's named charts.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    pub chart: &'static str,
    pub coords: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(chart: &'static str, coords: Vec<f64>) -> Self {
        ParameterPoint { chart, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Per-sample-axis location/scale hints for quadrature node placement.
#[derive(Debug, Clone, Copy)]
pub struct AxisHint {
    pub center: f64,
    pub scale: f64,
}

impl Default for AxisHint {
    fn default() -> Self {
        AxisHint { center: 0.0, scale: 1.0 }
    }
}

/// Samples drawn from a family, row-major with `dim` columns.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    dim: usize,
    data: Vec<f64>,
}

impl SampleBatch {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len() % dim == 0);
        SampleBatch { dim, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// A parametric family of densities, the object every geometry operation
/// consumes.
pub trait StatisticalFamily {
    fn name(&self) -> &str;

    /// Number of manifold coordinates p.
    fn param_dim(&self) -> usize;

    fn support(&self) -> Support;

    /// Named charts; the first is the default.
    fn charts(&self) -> &'static [&'static str];

    fn default_chart(&self) -> &'static str {
        self.charts()[0]
    }

    /// Open-interval constraints per coordinate in the given chart.
    fn param_domain(&self, chart: &str) -> Result<Vec<(f64, f64)>>;

    /// Re-express a point in another chart of the same family.
    fn convert_point(&self, point: &ParameterPoint, chart: &str) -> Result<ParameterPoint>;

    /// log p(x; θ). Errors when x is outside the support or θ invalid.
    fn log_density(&self, point: &ParameterPoint, x: &[f64]) -> Result<f64>;

    /// Analytic ∂ᵢ log p when available.
    fn analytic_score(&self, _point: &ParameterPoint, _x: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }

    /// Analytic ∂ᵢ∂ⱼ log p when available.
    fn analytic_hessian(&self, _point: &ParameterPoint, _x: &[f64]) -> Option<Result<Matrix>> {
        None
    }

    /// Node-placement hints per sample axis (defaults to unit scale at 0).
    fn integration_hints(&self, _point: &ParameterPoint) -> Vec<AxisHint> {
        vec![AxisHint::default(); self.support().sample_dim()]
    }

    /// Draw `count` samples, deterministically in the stream.
    fn draw_samples(
        &self,
        point: &ParameterPoint,
        count: usize,
        stream: &RandomStream,
    ) -> Result<SampleBatch>;

    fn resolve_chart(&self, name: &str) -> Result<&'static str> {
        self.charts()
            .iter()
            .copied()
            .find(|c| *c == name)
            .ok_or_else(|| Error::InvalidChart { chart: name.into(), family: self.name().into() })
    }

    fn validate_point(&self, point: &ParameterPoint) -> Result<()> {
        let domain = self.param_domain(point.chart)?;
        if point.coords.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                got: point.coords.len(),
            });
        }
        for (i, (&c, &(lo, hi))) in point.coords.iter().zip(&domain).enumerate() {
            if !c.is_finite() || c <= lo || c >= hi {
                return Err(Error::Domain(format!(
                    "coordinate {i} = {c} outside the open interval ({lo}, {hi}) of chart '{}'",
                    point.chart
                )));
            }
        }
        Ok(())
    }
}

/// ∂ᵢ log p as a vector; analytic when the family provides it, otherwise
/// first-order central differences in θ.
pub fn score(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    x: &[f64],
) -> Result<Vec<f64>> {
    family.validate_point(point)?;
    score_unvalidated(family, point, x)
}

pub(crate) fn score_unvalidated(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    x: &[f64],
) -> Result<Vec<f64>> {
    if let Some(s) = family.analytic_score(point, x) {
        return s;
    }
    let bounds = family.param_domain(point.chart)?;
    let policy = StepPolicy::first_order();
    let mut out = Vec::with_capacity(point.dim());
    for axis in 0..point.dim() {
        let mut f = |coords: &[f64]| {
            family.log_density(&ParameterPoint::new(point.chart, coords.to_vec()), x)
        };
        out.push(central_difference(&mut f, &point.coords, axis, &policy, Some(&bounds))?);
    }
    Ok(out)
}

/// Symmetric matrix of ∂ᵢ∂ⱼ log p; analytic when available, otherwise
/// second-order and mixed central differences.
pub fn log_density_hessian(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    x: &[f64],
) -> Result<Matrix> {
    family.validate_point(point)?;
    hessian_unvalidated(family, point, x)
}

pub(crate) fn hessian_unvalidated(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    x: &[f64],
) -> Result<Matrix> {
    if let Some(h) = family.analytic_hessian(point, x) {
        return h;
    }
    let bounds = family.param_domain(point.chart)?;
    let policy = StepPolicy::second_order();
    let p = point.dim();
    let mut h = Matrix::zeros(p);
    for i in 0..p {
        let mut f = |coords: &[f64]| {
            family.log_density(&ParameterPoint::new(point.chart, coords.to_vec()), x)
        };
        let dii = central_difference(&mut f, &point.coords, i, &policy, Some(&bounds))?;
        h.set(i, i, dii);
        for j in (i + 1)..p {
            let mut f = |coords: &[f64]| {
                family.log_density(&ParameterPoint::new(point.chart, coords.to_vec()), x)
            };
            let dij =
                mixed_central_difference(&mut f, &point.coords, i, j, &policy, Some(&bounds))?;
            h.set(i, j, dij);
            h.set(j, i, dij);
        }
    }
    Ok(h)
}

/// Expectation value with an optional Monte-Carlo standard error.
#[derive(Debug, Clone, Copy)]
pub struct Expectation {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Deterministic quadrature engine configuration.
#[derive(Debug, Clone)]
pub struct QuadratureEngine {
    nodes_1d: usize,
    nodes_per_axis: usize,
    line_rule: QuadratureRule,
    half_rule: QuadratureRule,
    axis_line_rule: QuadratureRule,
    axis_half_rule: QuadratureRule,
}

pub const DEFAULT_QUADRATURE_NODES: usize = 400;
const DEFAULT_AXIS_NODES: usize = 24;

impl QuadratureEngine {
    pub fn with_nodes(nodes_1d: usize) -> Result<Self> {
        let nodes_per_axis = nodes_1d.min(DEFAULT_AXIS_NODES).max(8);
        Ok(QuadratureEngine {
            nodes_1d,
            nodes_per_axis,
            line_rule: QuadratureRule::sinh_sinh(nodes_1d),
            half_rule: QuadratureRule::exp_sinh(nodes_1d),
            axis_line_rule: QuadratureRule::gauss_line(nodes_per_axis)?,
            axis_half_rule: QuadratureRule::gauss_half_line(nodes_per_axis)?,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes_1d
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }
}

/// Seeded Monte-Carlo engine configuration.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEngine {
    pub samples: usize,
    pub stream: RandomStream,
}

/// Strategy for evaluating E[g(X)] under a family's density.
#[derive(Debug, Clone)]
pub enum ExpectationEngine {
    Quadrature(QuadratureEngine),
    MonteCarlo(MonteCarloEngine),
}

impl ExpectationEngine {
    pub fn quadrature() -> Result<Self> {
        Ok(ExpectationEngine::Quadrature(QuadratureEngine::with_nodes(DEFAULT_QUADRATURE_NODES)?))
    }

    pub fn quadrature_with_nodes(nodes: usize) -> Result<Self> {
        Ok(ExpectationEngine::Quadrature(QuadratureEngine::with_nodes(nodes)?))
    }

    pub fn monte_carlo(samples: usize, stream: RandomStream) -> Self {
        ExpectationEngine::MonteCarlo(MonteCarloEngine { samples, stream })
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, ExpectationEngine::MonteCarlo(_))
    }

    /// E_θ[g(X)].
    pub fn expect(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        g: &dyn Fn(&[f64]) -> Result<f64>,
    ) -> Result<f64> {
        let out = self.expect_vector(family, point, 1, &|x, out| {
            out[0] = g(x)?;
            Ok(())
        })?;
        Ok(out[0])
    }

    /// Like [`expect`](Self::expect) but reports the Monte-Carlo standard
    /// error when one exists.
    pub fn expect_detailed(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        g: &dyn Fn(&[f64]) -> Result<f64>,
    ) -> Result<Expectation> {
        family.validate_point(point)?;
        match self {
            ExpectationEngine::MonteCarlo(mc) => {
                let batch = family.draw_samples(point, mc.samples, &mc.stream)?;
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for row in batch.rows() {
                    let v = g(row)?;
                    sum += v;
                    sumsq += v * v;
                }
                let n = batch.len() as f64;
                let mean = sum / n;
                let var = (sumsq / n - mean * mean).max(0.0);
                Ok(Expectation { value: mean, std_error: Some((var / n).sqrt()) })
            }
            ExpectationEngine::Quadrature(_) => {
                let value = self.expect(family, point, g)?;
                Ok(Expectation { value, std_error: None })
            }
        }
    }

    /// E_θ of several integrands in one sweep: `fill(x, out)` writes the
    /// integrand values at a sample into `out`. One density evaluation per
    /// node serves every component, which is what makes tensor assembly
    /// affordable in higher dimensions.
    pub fn expect_vector(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        out_len: usize,
        fill: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
    ) -> Result<Vec<f64>> {
        family.validate_point(point)?;
        match self {
            ExpectationEngine::MonteCarlo(mc) => {
                let batch = family.draw_samples(point, mc.samples, &mc.stream)?;
                let mut acc = vec![0.0; out_len];
                let mut buf = vec![0.0; out_len];
                for row in batch.rows() {
                    fill(row, &mut buf)?;
                    for (a, v) in acc.iter_mut().zip(&buf) {
                        *a += v;
                    }
                }
                let n = batch.len() as f64;
                for a in &mut acc {
                    *a /= n;
                }
                Ok(acc)
            }
            ExpectationEngine::Quadrature(q) => q.expect_vector(family, point, out_len, fill),
        }
    }
}

impl QuadratureEngine {
    fn expect_vector(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        out_len: usize,
        fill: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
    ) -> Result<Vec<f64>> {
        let hints = family.integration_hints(point);
        match family.support() {
            Support::Line { dim: 1 } => {
                self.expect_1d(family, point, out_len, fill, &self.line_rule, hints[0], false)
            }
            Support::HalfLine | Support::OrthantPair { dim: 1 } => {
                self.expect_1d(family, point, out_len, fill, &self.half_rule, hints[0], true)
            }
            Support::Line { dim } => {
                self.expect_tensor(family, point, out_len, fill, dim, &hints, false)
            }
            Support::OrthantPair { dim } => {
                self.expect_tensor(family, point, out_len, fill, dim, &hints, true)
            }
        }
    }

    fn expect_1d(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        out_len: usize,
        fill: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
        rule: &QuadratureRule,
        hint: AxisHint,
        half: bool,
    ) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; out_len];
        let mut buf = vec![0.0; out_len];
        for (&u, &w) in rule.unit_points().iter().zip(rule.weights()) {
            let x = hint.center + hint.scale * u;
            if half && x <= 0.0 {
                continue;
            }
            let d = family.log_density(point, &[x])?.exp();
            if d == 0.0 {
                continue;
            }
            fill(&[x], &mut buf)?;
            for (a, &v) in acc.iter_mut().zip(buf.iter()) {
                if !v.is_finite() {
                    return Err(Error::EvaluationFailure {
                        abscissa: x,
                        detail: format!("integrand returned {v}"),
                    });
                }
                *a += w * v * d;
            }
        }
        for a in &mut acc {
            *a *= hint.scale;
        }
        Ok(acc)
    }

    /// Tensor-product quadrature with per-axis Gauss rules: over ℝ^dim for
    /// line supports; over Ω_dim for orthant supports, decomposed into
    /// positive-orthant sweeps per valid sign pattern. Integrands invariant
    /// under coordinate pair flips (every score/Hessian product is) take the
    /// single-orthant fast path with the 2^{dim-1} orthant weight.
    #[allow(clippy::too_many_arguments)]
    fn expect_tensor(
        &self,
        family: &dyn StatisticalFamily,
        point: &ParameterPoint,
        out_len: usize,
        fill: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
        dim: usize,
        hints: &[AxisHint],
        orthant: bool,
    ) -> Result<Vec<f64>> {
        let rule = if orthant { &self.axis_half_rule } else { &self.axis_line_rule };
        let n = rule.node_count();
        let patterns: Vec<Vec<f64>> = if !orthant {
            vec![vec![1.0; dim]]
        } else if pair_flip_invariant(fill, out_len, dim, hints)? {
            vec![vec![1.0; dim]]
        } else {
            valid_sign_patterns(dim)
        };
        let pattern_weight =
            if orthant { (1u64 << (dim - 1)) as f64 / patterns.len() as f64 } else { 1.0 };

        let mut acc = vec![0.0; out_len];
        let mut buf = vec![0.0; out_len];
        let mut idx = vec![0usize; dim];
        let mut xbase = vec![0.0; dim];
        let mut xs = vec![0.0; dim];
        loop {
            let mut w = pattern_weight;
            for a in 0..dim {
                xbase[a] = hints[a].center + hints[a].scale * rule.unit_points()[idx[a]];
                w *= rule.weights()[idx[a]] * hints[a].scale;
            }
            let d = family.log_density(point, &xbase)?.exp();
            if d > 0.0 {
                for s in &patterns {
                    for a in 0..dim {
                        xs[a] = s[a] * xbase[a];
                    }
                    fill(&xs, &mut buf)?;
                    for (a, &v) in acc.iter_mut().zip(buf.iter()) {
                        if !v.is_finite() {
                            return Err(Error::EvaluationFailure {
                                abscissa: xs[0],
                                detail: "non-finite integrand in tensor-product quadrature".into(),
                            });
                        }
                        *a += w * v * d;
                    }
                }
            }
            if !advance(&mut idx, n) {
                break;
            }
        }
        Ok(acc)
    }
}

fn advance(idx: &mut [usize], n: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

/// All sign vectors with positive product (even number of minuses).
fn valid_sign_patterns(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for mask in 0u64..(1 << dim) {
        if (mask.count_ones() % 2) == 0 {
            out.push((0..dim).map(|a| if mask >> a & 1 == 1 { -1.0 } else { 1.0 }).collect());
        }
    }
    out
}

/// Probe the integrand vector against all coordinate pair flips at two
/// interior points.
fn pair_flip_invariant(
    fill: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
    out_len: usize,
    dim: usize,
    hints: &[AxisHint],
) -> Result<bool> {
    if dim == 1 {
        return Ok(true);
    }
    let mut v0 = vec![0.0; out_len];
    let mut v1 = vec![0.0; out_len];
    for mult in [0.83, 1.41] {
        let base: Vec<f64> = hints.iter().map(|h| h.scale * mult).collect();
        fill(&base, &mut v0)?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let mut flipped = base.clone();
                flipped[i] = -flipped[i];
                flipped[j] = -flipped[j];
                fill(&flipped, &mut v1)?;
                for (a, b) in v0.iter().zip(&v1) {
                    if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
