//! The α-geometry engine: Fisher metric, skewness tensor, connections,
//! curvature and Gaussian curvature for any [`StatisticalFamily`], computed
//! through an [`ExpectationEngine`].
//!
//! Index conventions: tensors are dense, 0-based internally. The curvature
//! orientation is fixed so the generalized Gaussian family at β = 2, α = 0
//! has Gaussian curvature −1/2:
//!
//! ```text
//! R^l_ihj = -( ∂_i Γ^l_hj - ∂_h Γ^l_ij + Σ_m Γ^l_im Γ^m_hj - Σ_m Γ^l_hm Γ^m_ij )
//! R_ihjk  = Σ_l g_lk R^l_ihj
//! ```

use crate::error::{Error, Result};
use crate::manifold::{
    hessian_unvalidated, score_unvalidated, ExpectationEngine, ParameterPoint, StatisticalFamily,
};
use crate::numerics::diff::StepPolicy;
use crate::numerics::linalg::{spd_inverse, Matrix};

/// Fisher metric evaluated at a point.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    pub point: ParameterPoint,
    pub components: Matrix,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.components.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.components.get(i, j)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        spd_inverse(&self.components)
    }

    pub fn determinant(&self) -> Result<f64> {
        self.components.spd_determinant()
    }
}

/// Declared symmetry of a rank-3 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    /// T_ijk invariant under every index permutation.
    FullySymmetric,
    /// Γ_ijk symmetric in (i, j) only.
    SymmetricFirstPair,
}

/// Dense rank-3 tensor with a declared symmetry class.
#[derive(Debug, Clone)]
pub struct Tensor3 {
    p: usize,
    symmetry: SymmetryClass,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(p: usize, symmetry: SymmetryClass) -> Self {
        Tensor3 { p, symmetry, data: vec![0.0; p * p * p] }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.p + j) * self.p + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.p + j) * self.p + k] = v;
    }

    /// Worst violation of the declared symmetry.
    pub fn symmetry_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.p {
            for j in 0..self.p {
                for k in 0..self.p {
                    let base = self.get(i, j, k);
                    worst = worst.max((base - self.get(j, i, k)).abs());
                    if self.symmetry == SymmetryClass::FullySymmetric {
                        worst = worst.max((base - self.get(i, k, j)).abs());
                        worst = worst.max((base - self.get(k, j, i)).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Connection with the last index raised: Γ^k_ij, stored as (k, i, j).
#[derive(Debug, Clone)]
pub struct RaisedConnection {
    p: usize,
    data: Vec<f64>,
}

impl RaisedConnection {
    pub fn zeros(p: usize) -> Self {
        RaisedConnection { p, data: vec![0.0; p * p * p] }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.p + i) * self.p + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.p + i) * self.p + j] = v;
    }
}

/// Dense rank-4 curvature tensor R_ihjk at a fixed α.
#[derive(Debug, Clone)]
pub struct Tensor4 {
    p: usize,
    pub alpha: f64,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(p: usize, alpha: f64) -> Self {
        Tensor4 { p, alpha, data: vec![0.0; p * p * p * p] }
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, h: usize, j: usize, k: usize) -> f64 {
        self.data[((i * self.p + h) * self.p + j) * self.p + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, h: usize, j: usize, k: usize, v: f64) {
        self.data[((i * self.p + h) * self.p + j) * self.p + k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Worst violation of antisymmetry in the first index pair.
    pub fn antisymmetry_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.p {
            for h in 0..self.p {
                for j in 0..self.p {
                    for k in 0..self.p {
                        worst = worst.max((self.get(i, h, j, k) + self.get(h, i, j, k)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Curvature of one point, with the Gaussian curvature when p = 2.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub point: ParameterPoint,
    pub alpha: f64,
    pub tensor: Tensor4,
    pub gaussian_curvature: Option<f64>,
    pub max_abs_component: f64,
}

/// Grid flatness verdict.
#[derive(Debug, Clone)]
pub struct FlatnessVerdict {
    pub flat: bool,
    pub max_abs: f64,
    pub worst_point: ParameterPoint,
    pub tol: f64,
}

fn sym_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect()
}

fn sym_triples(p: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..p {
        for j in i..p {
            for k in j..p {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn conn_entries(p: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..p {
        for j in i..p {
            for k in 0..p {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn unpack_metric(point: &ParameterPoint, pairs: &[(usize, usize)], vals: &[f64]) -> Matrix {
    let p = point.dim();
    let mut g = Matrix::zeros(p);
    for (&(i, j), &v) in pairs.iter().zip(vals) {
        g.set(i, j, v);
        g.set(j, i, v);
    }
    g
}

fn unpack_skewness(p: usize, triples: &[(usize, usize, usize)], vals: &[f64]) -> Tensor3 {
    let mut t = Tensor3::zeros(p, SymmetryClass::FullySymmetric);
    for (&(i, j, k), &v) in triples.iter().zip(vals) {
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            t.set(a, b, c, v);
        }
    }
    t
}

fn unpack_one_connection(p: usize, entries: &[(usize, usize, usize)], vals: &[f64]) -> Tensor3 {
    let mut t = Tensor3::zeros(p, SymmetryClass::SymmetricFirstPair);
    for (&(i, j, k), &v) in entries.iter().zip(vals) {
        t.set(i, j, k, v);
        t.set(j, i, k, v);
    }
    t
}

/// Fisher metric g_ij = −E[∂ᵢ∂ⱼ log p].
pub fn fisher_metric(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    engine: &ExpectationEngine,
) -> Result<MetricTensor> {
    let pairs = sym_pairs(family.param_dim());
    let vals = engine.expect_vector(family, point, pairs.len(), &|x, out| {
        let h = hessian_unvalidated(family, point, x)?;
        for (slot, &(i, j)) in out.iter_mut().zip(&pairs) {
            *slot = -h.get(i, j);
        }
        Ok(())
    })?;
    let g = unpack_metric(point, &pairs, &vals);
    // SPD check up front: a degenerate metric means the engine or the point
    // is bad, and every consumer downstream would divide by it.
    g.cholesky().map_err(|_| Error::NotPositiveDefinite {
        context: format!("Fisher metric at {:?} in chart '{}'", point.coords, point.chart),
    })?;
    Ok(MetricTensor { point: point.clone(), components: g })
}

/// Second Fisher-metric route: the score covariance E[∂ᵢl ∂ⱼl].
pub fn score_covariance(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    engine: &ExpectationEngine,
) -> Result<MetricTensor> {
    let pairs = sym_pairs(family.param_dim());
    let vals = engine.expect_vector(family, point, pairs.len(), &|x, out| {
        let s = score_unvalidated(family, point, x)?;
        for (slot, &(i, j)) in out.iter_mut().zip(&pairs) {
            *slot = s[i] * s[j];
        }
        Ok(())
    })?;
    Ok(MetricTensor { point: point.clone(), components: unpack_metric(point, &pairs, &vals) })
}

/// Skewness tensor T_ijk = E[∂ᵢl ∂ⱼl ∂ₖl] (fully symmetric).
pub fn skewness_tensor(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    engine: &ExpectationEngine,
) -> Result<Tensor3> {
    let p = family.param_dim();
    let triples = sym_triples(p);
    let vals = engine.expect_vector(family, point, triples.len(), &|x, out| {
        let s = score_unvalidated(family, point, x)?;
        for (slot, &(i, j, k)) in out.iter_mut().zip(&triples) {
            *slot = s[i] * s[j] * s[k];
        }
        Ok(())
    })?;
    Ok(unpack_skewness(p, &triples, &vals))
}

/// Γ⁽¹⁾_ijk = E[∂ᵢ∂ⱼl · ∂ₖl] (symmetric in the first pair).
pub fn one_connection(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    engine: &ExpectationEngine,
) -> Result<Tensor3> {
    let p = family.param_dim();
    let entries = conn_entries(p);
    let vals = engine.expect_vector(family, point, entries.len(), &|x, out| {
        let s = score_unvalidated(family, point, x)?;
        let h = hessian_unvalidated(family, point, x)?;
        for (slot, &(i, j, k)) in out.iter_mut().zip(&entries) {
            *slot = h.get(i, j) * s[k];
        }
        Ok(())
    })?;
    Ok(unpack_one_connection(p, &entries, &vals))
}

/// Γ⁽ᵅ⁾ = Γ⁽¹⁾ + (1−α)/2 · T, componentwise.
pub fn alpha_connection(one_conn: &Tensor3, skew: &Tensor3, alpha: f64) -> Result<Tensor3> {
    if one_conn.dim() != skew.dim() {
        return Err(Error::DimensionMismatch { expected: one_conn.dim(), got: skew.dim() });
    }
    let p = one_conn.dim();
    let w = (1.0 - alpha) / 2.0;
    let mut out = Tensor3::zeros(p, SymmetryClass::SymmetricFirstPair);
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                out.set(i, j, k, one_conn.get(i, j, k) + w * skew.get(i, j, k));
            }
        }
    }
    Ok(out)
}

/// Levi-Civita connection of the Fisher metric,
/// Γ_ijk = ½(∂ᵢ g_jk + ∂ⱼ g_ik − ∂ₖ g_ij), metric derivatives by central
/// differences of the metric field.
pub fn levi_civita(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    engine: &ExpectationEngine,
    policy: &StepPolicy,
) -> Result<Tensor3> {
    let p = family.param_dim();
    let bounds = family.param_domain(point.chart)?;
    let mut dg: Vec<Matrix> = Vec::with_capacity(p);
    for axis in 0..p {
        let h = crate::numerics::diff::fitted_step(
            policy.step_for(point.coords[axis]),
            point.coords[axis],
            Some(bounds[axis]),
            axis,
        )?;
        let mut shifted = point.clone();
        shifted.coords[axis] = point.coords[axis] + h;
        let gp = fisher_metric(family, &shifted, engine)?;
        shifted.coords[axis] = point.coords[axis] - h;
        let gm = fisher_metric(family, &shifted, engine)?;
        dg.push(Matrix::from_fn(p, |i, j| (gp.get(i, j) - gm.get(i, j)) / (2.0 * h)));
    }
    let mut t = Tensor3::zeros(p, SymmetryClass::SymmetricFirstPair);
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                let v = 0.5 * (dg[i].get(j, k) + dg[j].get(i, k) - dg[k].get(i, j));
                t.set(i, j, k, v);
            }
        }
    }
    Ok(t)
}

/// Contract the inverse metric against the last index: Γ^k_ij = g^{km} Γ_ijm.
pub fn raise_connection(conn: &Tensor3, metric: &MetricTensor) -> Result<RaisedConnection> {
    if conn.dim() != metric.dim() {
        return Err(Error::DimensionMismatch { expected: metric.dim(), got: conn.dim() });
    }
    let p = conn.dim();
    let ginv = metric.inverse()?;
    let mut out = RaisedConnection::zeros(p);
    for k in 0..p {
        for i in 0..p {
            for j in 0..p {
                let v = (0..p).map(|m| ginv.get(k, m) * conn.get(i, j, m)).sum();
                out.set(k, i, j, v);
            }
        }
    }
    Ok(out)
}

/// Metric plus raised α-connection in one expectation sweep per point.
fn connection_field(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    alpha: f64,
    engine: &ExpectationEngine,
) -> Result<(MetricTensor, RaisedConnection)> {
    let p = family.param_dim();
    let pairs = sym_pairs(p);
    let triples = sym_triples(p);
    let entries = conn_entries(p);
    let (np, nt) = (pairs.len(), triples.len());
    let total = np + nt + entries.len();
    let vals = engine.expect_vector(family, point, total, &|x, out| {
        let s = score_unvalidated(family, point, x)?;
        let h = hessian_unvalidated(family, point, x)?;
        for (slot, &(i, j)) in out[..np].iter_mut().zip(&pairs) {
            *slot = -h.get(i, j);
        }
        for (slot, &(i, j, k)) in out[np..np + nt].iter_mut().zip(&triples) {
            *slot = s[i] * s[j] * s[k];
        }
        for (slot, &(i, j, k)) in out[np + nt..].iter_mut().zip(&entries) {
            *slot = h.get(i, j) * s[k];
        }
        Ok(())
    })?;
    let gm = unpack_metric(point, &pairs, &vals[..np]);
    gm.cholesky().map_err(|_| Error::NotPositiveDefinite {
        context: format!("Fisher metric at {:?} in chart '{}'", point.coords, point.chart),
    })?;
    let g = MetricTensor { point: point.clone(), components: gm };
    let t = unpack_skewness(p, &triples, &vals[np..np + nt]);
    let g1 = unpack_one_connection(p, &entries, &vals[np + nt..]);
    let ga = alpha_connection(&g1, &t, alpha)?;
    let raised = raise_connection(&ga, &g)?;
    Ok((g, raised))
}

/// α-curvature tensor R⁽ᵅ⁾_ihjk by first-order differencing of the raised
/// connection field; see the module docs for the orientation convention.
pub fn curvature_tensor(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    alpha: f64,
    engine: &ExpectationEngine,
    policy: &StepPolicy,
) -> Result<Tensor4> {
    let p = family.param_dim();
    let bounds = family.param_domain(point.chart)?;
    let (g0, gamma0) = connection_field(family, point, alpha, engine)?;

    // ∂_a Γ^l_ij per axis
    let mut dgamma: Vec<RaisedConnection> = Vec::with_capacity(p);
    for axis in 0..p {
        let h = crate::numerics::diff::fitted_step(
            policy.step_for(point.coords[axis]),
            point.coords[axis],
            Some(bounds[axis]),
            axis,
        )?;
        let mut shifted = point.clone();
        shifted.coords[axis] = point.coords[axis] + h;
        let (_, cp) = connection_field(family, &shifted, alpha, engine)?;
        shifted.coords[axis] = point.coords[axis] - h;
        let (_, cm) = connection_field(family, &shifted, alpha, engine)?;
        let mut d = RaisedConnection::zeros(p);
        for l in 0..p {
            for i in 0..p {
                for j in 0..p {
                    d.set(l, i, j, (cp.get(l, i, j) - cm.get(l, i, j)) / (2.0 * h));
                }
            }
        }
        dgamma.push(d);
    }

    let mut out = Tensor4::zeros(p, alpha);
    for i in 0..p {
        for h in 0..p {
            for j in 0..p {
                // R^l_ihj with the anchored orientation
                let mut upper = vec![0.0; p];
                for (l, u) in upper.iter_mut().enumerate() {
                    let mut v = dgamma[i].get(l, h, j) - dgamma[h].get(l, i, j);
                    for m in 0..p {
                        v += gamma0.get(l, i, m) * gamma0.get(m, h, j)
                            - gamma0.get(l, h, m) * gamma0.get(m, i, j);
                    }
                    *u = -v;
                }
                for k in 0..p {
                    let v = (0..p).map(|l| g0.get(l, k) * upper[l]).sum();
                    out.set(i, h, j, k, v);
                }
            }
        }
    }
    Ok(out)
}

/// K⁽ᵅ⁾ = R_1212 / det g, defined for two-parameter manifolds only.
pub fn gaussian_curvature(tensor: &Tensor4, metric: &MetricTensor) -> Result<f64> {
    if tensor.dim() != 2 || metric.dim() != 2 {
        return Err(Error::UnsupportedEngine(format!(
            "gaussian curvature needs p = 2, got p = {}",
            tensor.dim()
        )));
    }
    Ok(tensor.get(0, 1, 0, 1) / metric.determinant()?)
}

/// Curvature tensor plus summary quantities at one point.
pub fn curvature_report(
    family: &dyn StatisticalFamily,
    point: &ParameterPoint,
    alpha: f64,
    engine: &ExpectationEngine,
    policy: &StepPolicy,
) -> Result<CurvatureReport> {
    let tensor = curvature_tensor(family, point, alpha, engine, policy)?;
    let gaussian = if family.param_dim() == 2 {
        let g = fisher_metric(family, point, engine)?;
        Some(gaussian_curvature(&tensor, &g)?)
    } else {
        None
    };
    let max_abs = tensor.max_abs();
    Ok(CurvatureReport {
        point: point.clone(),
        alpha,
        tensor,
        gaussian_curvature: gaussian,
        max_abs_component: max_abs,
    })
}

/// True iff max |R⁽ᵅ⁾_ihjk| ≤ tol over the whole grid.
pub fn is_alpha_flat(
    family: &dyn StatisticalFamily,
    alpha: f64,
    grid: &[ParameterPoint],
    tol: f64,
    engine: &ExpectationEngine,
    policy: &StepPolicy,
) -> Result<FlatnessVerdict> {
    if grid.is_empty() {
        return Err(Error::Domain("flatness check needs a non-empty grid".into()));
    }
    let mut max_abs = -1.0;
    let mut worst_point = grid[0].clone();
    for point in grid {
        let r = curvature_tensor(family, point, alpha, engine, policy)?;
        let m = r.max_abs();
        if m > max_abs {
            max_abs = m;
            worst_point = point.clone();
        }
    }
    Ok(FlatnessVerdict { flat: max_abs <= tol, max_abs, worst_point, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::generalized_gaussian::{self as gg, GeneralizedGaussian};
    use crate::families::orthant_gaussian::{self as og, OrthantGaussian};
    use crate::families::LocationGaussian;
    use crate::numerics::rng::RandomStream;

    fn quad() -> ExpectationEngine {
        ExpectationEngine::quadrature().unwrap()
    }

    #[test]
    fn metric_matches_closed_form_for_standard_gaussian_shape() {
        let fam = GeneralizedGaussian::new(2).unwrap();
        let g = fisher_metric(&fam, &fam.point(0.0, 1.0), &quad()).unwrap();
        assert!((g.get(0, 0) - 2.0).abs() < 1e-9);
        assert!((g.get(1, 1) - 2.0).abs() < 1e-9);
        assert!(g.get(0, 1).abs() < 1e-8);
    }

    #[test]
    fn metric_off_diagonal_vanishes_on_a_grid() {
        for beta in [2u32, 4, 6] {
            let fam = GeneralizedGaussian::new(beta).unwrap();
            for (mu, sigma) in [(-1.0, 0.5), (0.3, 1.0), (1.0, 2.0)] {
                let g = fisher_metric(&fam, &fam.point(mu, sigma), &quad()).unwrap();
                assert!(g.get(0, 1).abs() < 1e-8, "beta={beta} mu={mu} sigma={sigma}");
            }
        }
    }

    #[test]
    fn metric_for_orthant_family_in_natural_chart() {
        // Fisher information = variance of the sufficient statistic x²;
        // at λ = 1 that is Var(χ²₁) = 2.
        let fam = OrthantGaussian::new(1).unwrap();
        let g = fisher_metric(&fam, &fam.natural_point(vec![-0.5]), &quad()).unwrap();
        assert!((g.get(0, 0) - 2.0).abs() < 1e-7, "got {}", g.get(0, 0));
    }

    #[test]
    fn bartlett_identity_ties_the_two_metric_routes() {
        let engine = quad();
        let fam = GeneralizedGaussian::new(4).unwrap();
        for (mu, sigma) in [(0.0, 1.0), (-0.7, 0.5), (1.3, 2.0)] {
            let pt = fam.point(mu, sigma);
            let a = fisher_metric(&fam, &pt, &engine).unwrap();
            let b = score_covariance(&fam, &pt, &engine).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-6);
                }
            }
        }
        let fam = OrthantGaussian::new(2).unwrap();
        let pt = fam.precision_point(vec![0.8, 1.7]);
        let a = fisher_metric(&fam, &pt, &engine).unwrap();
        let b = score_covariance(&fam, &pt, &engine).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn score_identity_on_both_families() {
        let engine = quad();
        let fam = GeneralizedGaussian::new(6).unwrap();
        let pt = fam.point(0.4, 1.3);
        for i in 0..2 {
            let v = engine
                .expect(&fam, &pt, &|x| crate::manifold::score(&fam, &pt, x).map(|s| s[i]))
                .unwrap();
            assert!(v.abs() < 1e-7, "component {i}: {v}");
        }
        let fam = OrthantGaussian::new(3).unwrap();
        let pt = fam.precision_point(vec![0.5, 1.0, 2.0]);
        for i in 0..3 {
            let v = engine
                .expect(&fam, &pt, &|x| crate::manifold::score(&fam, &pt, x).map(|s| s[i]))
                .unwrap();
            assert!(v.abs() < 1e-7, "component {i}: {v}");
        }
    }

    #[test]
    fn skewness_matches_the_coefficient_ledger() {
        let engine = quad();
        let fam = GeneralizedGaussian::new(2).unwrap();
        let t = skewness_tensor(&fam, &fam.point(0.0, 1.0), &engine).unwrap();
        assert!((t.get(1, 1, 1) - 8.0).abs() < 1e-6);
        for (i, j, k) in [(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)] {
            assert!(t.get(i, j, k).abs() < 1e-8);
        }
        // β=4: T₁₁₂ against the closed form
        let fam = GeneralizedGaussian::new(4).unwrap();
        let t = skewness_tensor(&fam, &fam.point(0.0, 1.0), &engine).unwrap();
        let want = gg::connection_constants(4).unwrap().c112;
        assert!((t.get(0, 0, 1) - want).abs() < 1e-6, "got {} want {want}", t.get(0, 0, 1));
        assert!(t.symmetry_error() < 1e-8);
    }

    #[test]
    fn one_connection_matches_the_coefficient_ledger() {
        let engine = quad();
        let fam = GeneralizedGaussian::new(2).unwrap();
        let g1 = one_connection(&fam, &fam.point(0.0, 1.0), &engine).unwrap();
        // Γ⁽¹⁾₂₂₂·σ³ = −β(β+1) = −6 at β = 2
        assert!((g1.get(1, 1, 1) + 6.0).abs() < 1e-6, "got {}", g1.get(1, 1, 1));
        for (i, j, k) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)] {
            assert!(g1.get(i, j, k).abs() < 1e-8);
        }
        // β=4, σ=2: Γ⁽¹⁾₁₂₁ = c₁_₁₂₁/σ³
        let fam = GeneralizedGaussian::new(4).unwrap();
        let g1 = one_connection(&fam, &fam.point(0.0, 2.0), &engine).unwrap();
        let want = gg::connection_constants(4).unwrap().c1_121 / 8.0;
        assert!((g1.get(0, 1, 0) - want).abs() < 1e-6);
        assert!((want + 2.0279347202018538).abs() < 1e-12);
    }

    #[test]
    fn alpha_connection_endpoints() {
        let engine = quad();
        let fam = GeneralizedGaussian::new(2).unwrap();
        let pt = fam.point(0.0, 1.0);
        let g1 = one_connection(&fam, &pt, &engine).unwrap();
        let t = skewness_tensor(&fam, &pt, &engine).unwrap();
        let at1 = alpha_connection(&g1, &t, 1.0).unwrap();
        let atm1 = alpha_connection(&g1, &t, -1.0).unwrap();
        let at0 = alpha_connection(&g1, &t, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(at1.get(i, j, k), g1.get(i, j, k));
                    assert!((atm1.get(i, j, k) - (g1.get(i, j, k) + t.get(i, j, k))).abs() < 1e-15);
                }
            }
        }
        // Γ⁽⁰⁾₂₂₂ = −6 + ½·8 = −2
        assert!((at0.get(1, 1, 1) + 2.0).abs() < 1e-6);
    }

    #[test]
    fn levi_civita_vanishes_for_constant_metric() {
        let fam = LocationGaussian::new(2).unwrap();
        let lc = levi_civita(&fam, &fam.point(vec![0.3, -1.2]), &quad(), &StepPolicy::first_order())
            .unwrap();
        assert!(lc.max_abs() < 1e-8, "max {}", lc.max_abs());
    }

    #[test]
    fn levi_civita_equals_alpha_zero_connection() {
        let engine = quad();
        let policy = StepPolicy::first_order();
        let fam = GeneralizedGaussian::new(2).unwrap();
        let pt = fam.point(0.2, 1.1);
        let lc = levi_civita(&fam, &pt, &engine, &policy).unwrap();
        let g1 = one_connection(&fam, &pt, &engine).unwrap();
        let t = skewness_tensor(&fam, &pt, &engine).unwrap();
        let a0 = alpha_connection(&g1, &t, 0.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!(
                        (lc.get(i, j, k) - a0.get(i, j, k)).abs() < 5e-5,
                        "({i}{j}{k}): lc {} vs a0 {}",
                        lc.get(i, j, k),
                        a0.get(i, j, k)
                    );
                }
            }
        }
    }

    #[test]
    fn levi_civita_for_orthant_family_natural_chart() {
        let fam = OrthantGaussian::new(1).unwrap();
        let pt = fam.natural_point(vec![-0.5]);
        let lc = levi_civita(&fam, &pt, &quad(), &StepPolicy::first_order()).unwrap();
        assert!((lc.get(0, 0, 0) - 4.0).abs() < 1e-5, "got {}", lc.get(0, 0, 0));
        let closed = og::alpha_connection_closed(&fam, &pt, 0.0).unwrap();
        assert!((lc.get(0, 0, 0) - closed.get(0, 0, 0)).abs() < 1e-5);
    }

    #[test]
    fn raising_with_identity_and_diagonal_metrics() {
        let fam = GeneralizedGaussian::new(2).unwrap();
        let pt = fam.point(0.0, 1.0);
        let mut conn = Tensor3::zeros(2, SymmetryClass::SymmetricFirstPair);
        conn.set(0, 0, 1, 3.0);
        conn.set(1, 1, 1, -2.0);
        let id = MetricTensor { point: pt.clone(), components: Matrix::identity(2) };
        let r = raise_connection(&conn, &id).unwrap();
        assert_eq!(r.get(1, 0, 0), 3.0);
        assert_eq!(r.get(1, 1, 1), -2.0);
        let half = MetricTensor { point: pt.clone(), components: Matrix::diagonal(&[2.0, 2.0]) };
        let r = raise_connection(&conn, &half).unwrap();
        assert!((r.get(1, 0, 0) - 1.5).abs() < 1e-14);
        // Γ⁽⁰⁾²₂₂ = g²²Γ⁽⁰⁾₂₂₂ = ½·(−2) = −1 for β=2, σ=1
        let engine = quad();
        let g = fisher_metric(&fam, &pt, &engine).unwrap();
        let g1 = one_connection(&fam, &pt, &engine).unwrap();
        let t = skewness_tensor(&fam, &pt, &engine).unwrap();
        let a0 = alpha_connection(&g1, &t, 0.0).unwrap();
        let raised = raise_connection(&a0, &g).unwrap();
        assert!((raised.get(1, 1, 1) + 1.0).abs() < 1e-6);
    }

    #[test]
    fn curvature_anchor_beta2() {
        let fam = GeneralizedGaussian::new(2).unwrap();
        let r = curvature_tensor(&fam, &fam.point(0.0, 1.0), 0.0, &quad(), &StepPolicy::first_order())
            .unwrap();
        assert!((r.get(0, 1, 0, 1) + 2.0).abs() < 2e-3, "R1212 = {}", r.get(0, 1, 0, 1));
        assert!(r.antisymmetry_error() < 1e-8);
    }

    #[test]
    fn curvature_matches_full_closed_tensor() {
        let policy = StepPolicy::first_order();
        let engine = quad();
        for beta in [2u32, 4] {
            let fam = GeneralizedGaussian::new(beta).unwrap();
            for alpha in [-1.0, 0.0, 0.5, 1.0] {
                let sigma = 1.2;
                let pt = fam.point(0.3, sigma);
                let num = curvature_tensor(&fam, &pt, alpha, &engine, &policy).unwrap();
                let closed = gg::curvature_closed(sigma, beta, alpha).unwrap();
                for i in 0..2 {
                    for h in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                let d = (num.get(i, h, j, k) - closed.get(i, h, j, k)).abs();
                                assert!(
                                    d < 2e-3,
                                    "beta={beta} alpha={alpha} ({i}{h}{j}{k}): num {} closed {}",
                                    num.get(i, h, j, k),
                                    closed.get(i, h, j, k)
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exponential_family_is_flat_at_alpha_one() {
        let fam = OrthantGaussian::new(2).unwrap();
        let pt = fam.natural_point(vec![-0.6, -0.35]);
        let r = curvature_tensor(&fam, &pt, 1.0, &quad(), &StepPolicy::first_order()).unwrap();
        assert!(r.max_abs() < 1e-6, "max {}", r.max_abs());
    }

    #[test]
    fn gaussian_curvature_anchor_values() {
        let engine = quad();
        let policy = StepPolicy::first_order();
        for (beta, want) in [(2u32, -0.5), (4, -0.25), (6, -1.0 / 6.0)] {
            let fam = GeneralizedGaussian::new(beta).unwrap();
            let pt = fam.point(0.0, 1.0);
            let r = curvature_tensor(&fam, &pt, 0.0, &engine, &policy).unwrap();
            let g = fisher_metric(&fam, &pt, &engine).unwrap();
            let k = gaussian_curvature(&r, &g).unwrap();
            assert!((k - want).abs() < 2e-3, "beta={beta}: K = {k}");
        }
    }

    #[test]
    fn gaussian_curvature_needs_two_parameters() {
        let fam = OrthantGaussian::new(3).unwrap();
        let pt = fam.natural_point(vec![-0.5, -0.5, -0.5]);
        let engine = quad();
        let r = curvature_tensor(&fam, &pt, 0.0, &engine, &StepPolicy::first_order()).unwrap();
        let g = fisher_metric(&fam, &pt, &engine).unwrap();
        assert!(gaussian_curvature(&r, &g).is_err());
    }

    #[test]
    fn orthant_family_is_flat_on_a_grid() {
        let fam = OrthantGaussian::new(2).unwrap();
        let grid: Vec<ParameterPoint> = [0.5, 1.0, 2.0]
            .iter()
            .flat_map(|&a| [0.5, 1.0, 2.0].iter().map(move |&b| (a, b)))
            .map(|(a, b)| fam.natural_point(vec![-a / 2.0, -b / 2.0]))
            .collect();
        let v = is_alpha_flat(&fam, 0.0, &grid, 1e-5, &quad(), &StepPolicy::first_order()).unwrap();
        assert!(v.flat, "max |R| = {}", v.max_abs);
    }

    #[test]
    fn generalized_gaussian_is_not_flat_where_only_r1212_vanishes() {
        // at α = 1/(β−1) the (1,2,1,2) component and K vanish, but the
        // (1,2,2,1) component does not: the manifold is not flat there
        let fam = GeneralizedGaussian::new(4).unwrap();
        let grid = vec![fam.point(0.0, 1.0), fam.point(0.5, 1.5)];
        let engine = quad();
        let policy = StepPolicy::first_order();
        let v = is_alpha_flat(&fam, 1.0 / 3.0, &grid, 1e-4, &engine, &policy).unwrap();
        assert!(!v.flat);
        let want = gg::curvature_1221_closed(1.0, 4, 1.0 / 3.0).unwrap().abs();
        let r = curvature_tensor(&fam, &fam.point(0.0, 1.0), 1.0 / 3.0, &engine, &policy).unwrap();
        assert!((r.get(0, 1, 0, 1)).abs() < 2e-3);
        assert!((r.get(0, 1, 1, 0).abs() - want).abs() < 2e-3);
        // and at α = 0 it is plainly curved
        let v0 = is_alpha_flat(&fam, 0.0, &grid, 1e-4, &engine, &policy).unwrap();
        assert!(!v0.flat && v0.max_abs > 1.0);
    }

    #[test]
    fn dual_curvature_identity() {
        let fam = GeneralizedGaussian::new(4).unwrap();
        let engine = quad();
        let policy = StepPolicy::first_order();
        for alpha in [0.5, 1.0] {
            for (mu, sigma) in [(0.0, 1.0), (0.5, 1.4)] {
                let pt = fam.point(mu, sigma);
                let rp = curvature_tensor(&fam, &pt, alpha, &engine, &policy).unwrap();
                let rm = curvature_tensor(&fam, &pt, -alpha, &engine, &policy).unwrap();
                for i in 0..2 {
                    for h in 0..2 {
                        for j in 0..2 {
                            for k in 0..2 {
                                let lhs = rp.get(i, h, j, k);
                                let rhs = -rm.get(i, h, k, j);
                                assert!(
                                    (lhs - rhs).abs() < 5e-4,
                                    "alpha={alpha} ({i}{h}{j}{k}): {lhs} vs {rhs}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn monte_carlo_engine_agrees_with_quadrature() {
        let fam = GeneralizedGaussian::new(4).unwrap();
        let pt = fam.point(0.0, 1.0);
        let mc = ExpectationEngine::monte_carlo(200_000, RandomStream::new(31, 2));
        let e = mc
            .expect_detailed(&fam, &pt, &|x| {
                crate::manifold::score(&fam, &pt, x).map(|s| s[1] * s[1])
            })
            .unwrap();
        let q = quad()
            .expect(&fam, &pt, &|x| crate::manifold::score(&fam, &pt, x).map(|s| s[1] * s[1]))
            .unwrap();
        let se = e.std_error.unwrap();
        assert!((e.value - q).abs() < 4.0 * se, "mc {} quad {q} se {se}", e.value);
    }

    #[test]
    fn curvature_constancy_over_the_parameter_grid() {
        let fam = GeneralizedGaussian::new(4).unwrap();
        let engine = quad();
        let policy = StepPolicy::first_order();
        let mut ks = Vec::new();
        for mu in [-1.0, 0.0, 1.0] {
            for sigma in [0.5, 1.0, 2.0] {
                let pt = fam.point(mu, sigma);
                let r = curvature_tensor(&fam, &pt, 0.5, &engine, &policy).unwrap();
                let g = fisher_metric(&fam, &pt, &engine).unwrap();
                ks.push(gaussian_curvature(&r, &g).unwrap());
            }
        }
        let mean: f64 = ks.iter().sum::<f64>() / ks.len() as f64;
        let sd =
            (ks.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / ks.len() as f64).sqrt();
        assert!(sd <= 1e-3, "K spread {sd} over {ks:?}");
    }
}
