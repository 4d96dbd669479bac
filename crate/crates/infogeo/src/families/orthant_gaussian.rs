//! A p-dimensional exponential family of non-Gaussian densities with Gaussian
//! marginals: f(x; λ) = 2·∏ √(λᵢ/2π)·e^{−λᵢxᵢ²/2} on the orthant-pair region
//! Ω_p = {∏ xᵢ > 0}. In natural coordinates θᵢ = −λᵢ/2 the potential is
//! ψ(θ) = −½Σ log(−θᵢ); its Hessian is the Fisher metric and its third
//! derivative the α-connection, both diagonal, which makes the family α-flat
//! for every α.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{MetricTensor, SymmetryClass, Tensor3};
use crate::manifold::{AxisHint, ExpectationEngine, ParameterPoint, SampleBatch, StatisticalFamily, Support};
use crate::numerics::linalg::Matrix;
use crate::numerics::rng::RandomStream;

/// Chart of the precisions λᵢ > 0.
pub const CHART_PRECISION: &str = "precision";
/// Chart of the natural coordinates θᵢ = −λᵢ/2 < 0.
pub const CHART_NATURAL: &str = "natural";

const HALF_LOG_TWO_PI: f64 = 0.9189385332046727;

#[derive(Debug, Clone, Copy)]
pub struct OrthantGaussian {
    dim: usize,
}

impl OrthantGaussian {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(OrthantGaussian { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision_point(&self, lambda: Vec<f64>) -> ParameterPoint {
        ParameterPoint::new(CHART_PRECISION, lambda)
    }

    pub fn natural_point(&self, theta: Vec<f64>) -> ParameterPoint {
        ParameterPoint::new(CHART_NATURAL, theta)
    }

    /// Precisions of a point regardless of its chart.
    pub fn lambdas(&self, point: &ParameterPoint) -> Result<Vec<f64>> {
        match point.chart {
            CHART_PRECISION => Ok(point.coords.clone()),
            CHART_NATURAL => Ok(point.coords.iter().map(|&t| -2.0 * t).collect()),
            other => Err(Error::InvalidChart { chart: other.into(), family: self.name().into() }),
        }
    }

    fn in_support(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().product::<f64>() > 0.0
    }
}

impl StatisticalFamily for OrthantGaussian {
    fn name(&self) -> &str {
        "orthant-gaussian"
    }

    fn param_dim(&self) -> usize {
        self.dim
    }

    fn support(&self) -> Support {
        Support::OrthantPair { dim: self.dim }
    }

    fn charts(&self) -> &'static [&'static str] {
        &[CHART_PRECISION, CHART_NATURAL]
    }

    fn param_domain(&self, chart: &str) -> Result<Vec<(f64, f64)>> {
        match chart {
            CHART_PRECISION => Ok(vec![(0.0, f64::INFINITY); self.dim]),
            CHART_NATURAL => Ok(vec![(f64::NEG_INFINITY, 0.0); self.dim]),
            other => Err(Error::InvalidChart { chart: other.into(), family: self.name().into() }),
        }
    }

    fn convert_point(&self, point: &ParameterPoint, chart: &str) -> Result<ParameterPoint> {
        self.validate_point(point)?;
        match (point.chart, chart) {
            (a, b) if a == b => Ok(point.clone()),
            (CHART_PRECISION, CHART_NATURAL) => Ok(ParameterPoint::new(
                CHART_NATURAL,
                point.coords.iter().map(|&l| -l / 2.0).collect(),
            )),
            (CHART_NATURAL, CHART_PRECISION) => Ok(ParameterPoint::new(
                CHART_PRECISION,
                point.coords.iter().map(|&t| -2.0 * t).collect(),
            )),
            (_, other) => {
                Err(Error::InvalidChart { chart: other.into(), family: self.name().into() })
            }
        }
    }

    fn log_density(&self, point: &ParameterPoint, x: &[f64]) -> Result<f64> {
        self.validate_point(point)?;
        if !self.in_support(x) {
            return Err(Error::Support(format!(
                "sample {x:?} lies outside the positive-product region"
            )));
        }
        let lambda = self.lambdas(point)?;
        let mut l = std::f64::consts::LN_2;
        for (xi, li) in x.iter().zip(&lambda) {
            l += 0.5 * li.ln() - HALF_LOG_TWO_PI - li * xi * xi / 2.0;
        }
        Ok(l)
    }

    fn analytic_score(&self, point: &ParameterPoint, x: &[f64]) -> Option<Result<Vec<f64>>> {
        match point.chart {
            CHART_PRECISION => Some(Ok(point
                .coords
                .iter()
                .zip(x)
                .map(|(&l, &xi)| 1.0 / (2.0 * l) - xi * xi / 2.0)
                .collect())),
            CHART_NATURAL => Some(Ok(point
                .coords
                .iter()
                .zip(x)
                .map(|(&t, &xi)| xi * xi + 1.0 / (2.0 * t))
                .collect())),
            _ => None,
        }
    }

    fn analytic_hessian(&self, point: &ParameterPoint, _x: &[f64]) -> Option<Result<Matrix>> {
        // constant in x in both charts: −1/(2cᵢ²) on the diagonal
        let d: Vec<f64> = point.coords.iter().map(|&c| -1.0 / (2.0 * c * c)).collect();
        Some(Ok(Matrix::diagonal(&d)))
    }

    fn integration_hints(&self, point: &ParameterPoint) -> Vec<AxisHint> {
        match self.lambdas(point) {
            Ok(lambda) => lambda
                .iter()
                .map(|&l| AxisHint { center: 0.0, scale: 1.0 / l.sqrt() })
                .collect(),
            Err(_) => vec![AxisHint::default(); self.dim],
        }
    }

    /// |xᵢ| half-normal with scale 1/√λᵢ; the sign vector uniform over the
    /// 2^{p−1} patterns with positive product.
    fn draw_samples(
        &self,
        point: &ParameterPoint,
        count: usize,
        stream: &RandomStream,
    ) -> Result<SampleBatch> {
        self.validate_point(point)?;
        let lambda = self.lambdas(point)?;
        let scales: Vec<f64> = lambda.iter().map(|&l| 1.0 / l.sqrt()).collect();
        let mut rng = stream.rng();
        let mut data = Vec::with_capacity(count * self.dim);
        let mut row = vec![0.0; self.dim];
        for _ in 0..count {
            for (a, s) in row.iter_mut().zip(&scales) {
                let z: f64 = rng.sample(StandardNormal);
                *a = z.abs() * s;
            }
            let mut product_sign = 1.0;
            for a in row.iter_mut().take(self.dim - 1) {
                if rng.gen::<bool>() {
                    *a = -*a;
                    product_sign = -product_sign;
                }
            }
            if product_sign < 0.0 {
                row[self.dim - 1] = -row[self.dim - 1];
            }
            data.extend_from_slice(&row);
        }
        Ok(SampleBatch::new(self.dim, data))
    }
}

/// ψ(θ) = −½ Σ log(−θᵢ), the potential of the natural chart.
pub fn potential(theta: &[f64]) -> Result<f64> {
    if theta.iter().any(|&t| t >= 0.0 || !t.is_finite()) {
        return Err(Error::Domain(format!("potential needs all coordinates negative, got {theta:?}")));
    }
    Ok(-0.5 * theta.iter().map(|&t| (-t).ln()).sum::<f64>())
}

/// Diagonal Fisher metric g_ii = 1/(2cᵢ²) in either chart (the Hessian of ψ
/// in the natural chart; the same functional form holds for precisions).
pub fn metric_closed(family: &OrthantGaussian, point: &ParameterPoint) -> Result<MetricTensor> {
    family.validate_point(point)?;
    let d: Vec<f64> = point.coords.iter().map(|&c| 1.0 / (2.0 * c * c)).collect();
    Ok(MetricTensor { point: point.clone(), components: Matrix::diagonal(&d) })
}

/// Closed-form α-connection: only the fully diagonal components survive,
/// Γ⁽ᵅ⁾_iii = −(1−α)/(2cᵢ³).
pub fn alpha_connection_closed(
    family: &OrthantGaussian,
    point: &ParameterPoint,
    alpha: f64,
) -> Result<Tensor3> {
    family.validate_point(point)?;
    let p = family.dim();
    let mut t = Tensor3::zeros(p, SymmetryClass::SymmetricFirstPair);
    for (i, &c) in point.coords.iter().enumerate() {
        t.set(i, i, i, -(1.0 - alpha) / (2.0 * c * c * c));
    }
    Ok(t)
}

/// log f(x; λ) for λ in the precision chart.
pub fn log_density_lambda(lambda: &[f64], x: &[f64]) -> Result<f64> {
    let fam = OrthantGaussian::new(lambda.len())?;
    fam.log_density(&fam.precision_point(lambda.to_vec()), x)
}

/// One marginal-moment comparison row.
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    pub order: u32,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
}

/// Marginal-moment check: the first four moments of coordinate `axis`.
///
/// For p ≥ 2 the marginal is the centered Gaussian with variance 1/λ —
/// moments (0, 1/λ, 0, 3/λ²) — even though the joint density is not
/// Gaussian. For p = 1 there is no coordinate to integrate out and the
/// marginal is the half-normal, whose odd moments do not vanish.
#[derive(Debug, Clone)]
pub struct MarginalReport {
    pub axis: usize,
    pub checks: Vec<MomentCheck>,
    pub pass: bool,
}

pub fn marginal_check(
    family: &OrthantGaussian,
    point: &ParameterPoint,
    axis: usize,
    engine: &ExpectationEngine,
) -> Result<MarginalReport> {
    if axis >= family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), got: axis });
    }
    let lambda = family.lambdas(point)?[axis];
    let expected = if family.dim() >= 2 {
        [0.0, 1.0 / lambda, 0.0, 3.0 / (lambda * lambda)]
    } else {
        // half-normal: E[x^k] = 2^{k/2} Γ((k+1)/2) / √π · λ^{-k/2}
        let m1 = (2.0 / (std::f64::consts::PI * lambda)).sqrt();
        [m1, 1.0 / lambda, 2.0 * m1 / lambda, 3.0 / (lambda * lambda)]
    };
    let mut checks = Vec::with_capacity(4);
    let mut pass = true;
    for (idx, &want) in expected.iter().enumerate() {
        let order = idx as u32 + 1;
        let e = engine.expect_detailed(family, point, &|x: &[f64]| {
            Ok(x[axis].powi(order as i32))
        })?;
        let tol = match e.std_error {
            Some(se) => 4.0 * se.max(1e-12),
            None => 1e-6 * want.abs().max(1.0),
        };
        let ok = (e.value - want).abs() <= tol;
        pass &= ok;
        checks.push(MomentCheck { order, value: e.value, expected: want, tol });
    }
    Ok(MarginalReport { axis, checks, pass })
}
