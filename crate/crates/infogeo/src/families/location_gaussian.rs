//! Product of unit-variance Gaussians with the locations as coordinates.
//! Its Fisher metric is the identity at every point, so the Levi-Civita
//! connection and all curvature vanish; useful as a flat cross-check for the
//! generic engine.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::manifold::{AxisHint, ParameterPoint, SampleBatch, StatisticalFamily, Support};
use crate::numerics::linalg::Matrix;
use crate::numerics::rng::RandomStream;

pub const CHART_LOCATION: &str = "location";

const HALF_LOG_TWO_PI: f64 = 0.9189385332046727;

#[derive(Debug, Clone, Copy)]
pub struct LocationGaussian {
    dim: usize,
}

impl LocationGaussian {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(LocationGaussian { dim })
    }

    pub fn point(&self, theta: Vec<f64>) -> ParameterPoint {
        ParameterPoint::new(CHART_LOCATION, theta)
    }
}

impl StatisticalFamily for LocationGaussian {
    fn name(&self) -> &str {
        "location-gaussian"
    }

    fn param_dim(&self) -> usize {
        self.dim
    }

    fn support(&self) -> Support {
        Support::Line { dim: self.dim }
    }

    fn charts(&self) -> &'static [&'static str] {
        &[CHART_LOCATION]
    }

    fn param_domain(&self, chart: &str) -> Result<Vec<(f64, f64)>> {
        if chart != CHART_LOCATION {
            return Err(Error::InvalidChart { chart: chart.into(), family: self.name().into() });
        }
        Ok(vec![(f64::NEG_INFINITY, f64::INFINITY); self.dim])
    }

    fn convert_point(&self, point: &ParameterPoint, chart: &str) -> Result<ParameterPoint> {
        if chart != CHART_LOCATION {
            return Err(Error::InvalidChart { chart: chart.into(), family: self.name().into() });
        }
        Ok(point.clone())
    }

    fn log_density(&self, point: &ParameterPoint, x: &[f64]) -> Result<f64> {
        self.validate_point(point)?;
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(x.iter()
            .zip(&point.coords)
            .map(|(&xi, &ti)| -HALF_LOG_TWO_PI - (xi - ti) * (xi - ti) / 2.0)
            .sum())
    }

    fn analytic_score(&self, point: &ParameterPoint, x: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(Ok(x.iter().zip(&point.coords).map(|(&xi, &ti)| xi - ti).collect()))
    }

    fn analytic_hessian(&self, _point: &ParameterPoint, _x: &[f64]) -> Option<Result<Matrix>> {
        Some(Ok(Matrix::from_fn(self.dim, |i, j| if i == j { -1.0 } else { 0.0 })))
    }

    fn integration_hints(&self, point: &ParameterPoint) -> Vec<AxisHint> {
        point.coords.iter().map(|&t| AxisHint { center: t, scale: 1.0 }).collect()
    }

    fn draw_samples(
        &self,
        point: &ParameterPoint,
        count: usize,
        stream: &RandomStream,
    ) -> Result<SampleBatch> {
        self.validate_point(point)?;
        let mut rng = stream.rng();
        let mut data = Vec::with_capacity(count * self.dim);
        for _ in 0..count {
            for &t in &point.coords {
                let z: f64 = rng.sample(StandardNormal);
                data.push(t + z);
            }
        }
        Ok(SampleBatch::new(self.dim, data))
    }
}
