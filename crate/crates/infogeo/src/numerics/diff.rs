//! Central finite differences over coordinate vectors, with boundary-aware
//! step control for parameters living on open intervals (e.g. σ > 0).

use crate::error::{Error, Result};

/// Derivative order of a stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// How the effective step is derived from the coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    Absolute,
    /// base_step · |coordinate|, floored at `floor` so the step never collapses.
    RelativeToCoordinate,
}

/// Step-size policy for one differencing pass.
#[derive(Debug, Clone, Copy)]
pub struct StepPolicy {
    pub base_step: f64,
    pub order: DiffOrder,
    pub scale_mode: ScaleMode,
    pub floor: f64,
}

impl StepPolicy {
    pub fn first_order() -> Self {
        StepPolicy {
            base_step: 1e-4,
            order: DiffOrder::First,
            scale_mode: ScaleMode::RelativeToCoordinate,
            floor: 1e-6,
        }
    }

    pub fn second_order() -> Self {
        StepPolicy {
            base_step: 1e-3,
            order: DiffOrder::Second,
            scale_mode: ScaleMode::RelativeToCoordinate,
            floor: 1e-5,
        }
    }

    pub fn step_for(&self, coord: f64) -> f64 {
        match self.scale_mode {
            ScaleMode::Absolute => self.base_step,
            ScaleMode::RelativeToCoordinate => (self.base_step * coord.abs()).max(self.floor),
        }
    }
}

/// Shrink `h` so `coord ± h` stays inside the open interval; half the distance
/// to the nearer boundary is kept as margin. Errors when no positive step fits.
fn fit_step(h: f64, coord: f64, bounds: Option<(f64, f64)>, axis: usize) -> Result<f64> {
    let Some((lo, hi)) = bounds else { return Ok(h) };
    let room = (coord - lo).min(hi - coord);
    if !(room > 0.0) {
        return Err(Error::StencilDomain {
            axis,
            detail: format!("coordinate {coord} sits on the boundary of ({lo}, {hi})"),
        });
    }
    let fitted = h.min(room / 2.0);
    if fitted > 0.0 && coord - fitted > lo && coord + fitted < hi {
        Ok(fitted)
    } else {
        Err(Error::StencilDomain {
            axis,
            detail: format!("no usable step at {coord} in ({lo}, {hi})"),
        })
    }
}

/// Boundary-fitted step for callers that run their own stencils (the
/// curvature pipeline differences whole tensor fields, not scalars).
pub fn fitted_step(h: f64, coord: f64, bounds: Option<(f64, f64)>, axis: usize) -> Result<f64> {
    fit_step(h, coord, bounds, axis)
}

/// Central difference of `f` along `axis` at `point`.
///
/// First order uses the symmetric 2-point stencil, second order the symmetric
/// 3-point stencil; both are O(h²) accurate. `bounds`, when given, holds the
/// open domain interval per axis.
pub fn central_difference(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    point: &[f64],
    axis: usize,
    policy: &StepPolicy,
    bounds: Option<&[(f64, f64)]>,
) -> Result<f64> {
    if axis >= point.len() {
        return Err(Error::DimensionMismatch { expected: point.len(), got: axis });
    }
    let h = fit_step(
        policy.step_for(point[axis]),
        point[axis],
        bounds.map(|b| b[axis]),
        axis,
    )?;
    let mut shifted = point.to_vec();
    shifted[axis] = point[axis] + h;
    let fp = f(&shifted)?;
    shifted[axis] = point[axis] - h;
    let fm = f(&shifted)?;
    match policy.order {
        DiffOrder::First => Ok((fp - fm) / (2.0 * h)),
        DiffOrder::Second => {
            let f0 = f(point)?;
            Ok((fp - 2.0 * f0 + fm) / (h * h))
        }
    }
}

/// Mixed second partial ∂²f / ∂xᵢ∂xⱼ by the 4-point cross stencil.
pub fn mixed_central_difference(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    point: &[f64],
    axis_i: usize,
    axis_j: usize,
    policy: &StepPolicy,
    bounds: Option<&[(f64, f64)]>,
) -> Result<f64> {
    let hi = fit_step(policy.step_for(point[axis_i]), point[axis_i], bounds.map(|b| b[axis_i]), axis_i)?;
    let hj = fit_step(policy.step_for(point[axis_j]), point[axis_j], bounds.map(|b| b[axis_j]), axis_j)?;
    let mut p = point.to_vec();
    let mut eval = |si: f64, sj: f64, p: &mut Vec<f64>| -> Result<f64> {
        p[axis_i] = point[axis_i] + si * hi;
        p[axis_j] = point[axis_j] + sj * hj;
        let v = f(p);
        p[axis_i] = point[axis_i];
        p[axis_j] = point[axis_j];
        v
    };
    let pp = eval(1.0, 1.0, &mut p)?;
    let pm = eval(1.0, -1.0, &mut p)?;
    let mp = eval(-1.0, 1.0, &mut p)?;
    let mm = eval(-1.0, -1.0, &mut p)?;
    Ok((pp - pm - mp + mm) / (4.0 * hi * hj))
}
