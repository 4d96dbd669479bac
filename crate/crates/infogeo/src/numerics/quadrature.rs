//! Deterministic quadrature on unbounded domains.
//!
//! Two rule classes:
//!
//! * double-exponential (tanh-sinh family) trapezoid rules — `sinh_sinh` for
//!   the whole line, `exp_sinh` for the half line — the default engines for
//!   one-dimensional expectations;
//! * Gauss rules for the weight e^{-u^2/2} on the line and half line, built by
//!   a discretized Stieltjes recurrence plus Golub-Welsch. These are exact for
//!   polynomial integrands against Gaussian-type densities and are used
//!   per-axis inside tensor-product expectations, where double-exponential
//!   node counts would be intractable.
//!
//! Rules store scale-free unit points and Lebesgue weights: an integral over
//! the mapped domain is `Σ wᵢ · scale · f(center + scale·uᵢ)`.

use crate::error::{Error, Result};
use crate::numerics::linalg::tridiagonal_eigen;

const DE_STRETCH: f64 = std::f64::consts::FRAC_PI_2;
const SINH_SINH_T_MAX: f64 = 3.0;
const EXP_SINH_T_MAX: f64 = 4.0;

/// Change of variables carrying canonical nodes to the integration domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainMap {
    /// x = center + scale·sinh(π/2·sinh t) — the whole line.
    SinhSinh,
    /// x = scale·exp(π/2·sinh t) — the half line (0, ∞).
    ExpSinh,
    /// Gauss abscissae against weight e^{-u²/2} on the line; x = center + scale·u.
    GaussLine,
    /// Gauss abscissae against weight e^{-u²/2} on (0, ∞); x = scale·u.
    GaussHalfLine,
}

impl DomainMap {
    pub fn is_half_line(self) -> bool {
        matches!(self, DomainMap::ExpSinh | DomainMap::GaussHalfLine)
    }
}

/// Nodes and weights of one quadrature rule.
///
/// `nodes` are the canonical abscissae (on (-1,1) for line maps, (0,1) for
/// half-line maps); `unit_points`/`weights` are the evaluation-ready form.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    map: DomainMap,
    nodes: Vec<f64>,
    unit_points: Vec<f64>,
    weights: Vec<f64>,
    tolerance: f64,
}

/// 1-D integration domain with integrand location hints.
#[derive(Debug, Clone, Copy)]
pub enum IntegrationDomain {
    Line { center: f64, scale: f64 },
    HalfLine { scale: f64 },
}

impl QuadratureRule {
    /// Double-exponential rule for the whole line.
    pub fn sinh_sinh(node_count: usize) -> Self {
        let (ts, h) = trapezoid_grid(node_count, SINH_SINH_T_MAX);
        let mut nodes = Vec::with_capacity(node_count);
        let mut unit_points = Vec::with_capacity(node_count);
        let mut weights = Vec::with_capacity(node_count);
        for &t in &ts {
            let st = t.sinh();
            nodes.push(t / SINH_SINH_T_MAX);
            unit_points.push((DE_STRETCH * st).sinh());
            weights.push(h * DE_STRETCH * t.cosh() * (DE_STRETCH * st).cosh());
        }
        QuadratureRule { map: DomainMap::SinhSinh, nodes, unit_points, weights, tolerance: 1e-9 }
    }

    /// Double-exponential rule for the half line.
    pub fn exp_sinh(node_count: usize) -> Self {
        let (ts, h) = trapezoid_grid(node_count, EXP_SINH_T_MAX);
        let mut nodes = Vec::with_capacity(node_count);
        let mut unit_points = Vec::with_capacity(node_count);
        let mut weights = Vec::with_capacity(node_count);
        for &t in &ts {
            let x = (DE_STRETCH * t.sinh()).exp();
            // canonical abscissa on (0,1)
            nodes.push((t + EXP_SINH_T_MAX) / (2.0 * EXP_SINH_T_MAX));
            unit_points.push(x);
            weights.push(h * x * DE_STRETCH * t.cosh());
        }
        QuadratureRule { map: DomainMap::ExpSinh, nodes, unit_points, weights, tolerance: 1e-9 }
    }

    /// Gauss rule for ∫_ℝ f(u) e^{-u²/2} du, returned with Lebesgue weights.
    pub fn gauss_line(node_count: usize) -> Result<Self> {
        Self::gauss(node_count, DomainMap::GaussLine)
    }

    /// Gauss rule for ∫₀^∞ f(u) e^{-u²/2} du, returned with Lebesgue weights.
    pub fn gauss_half_line(node_count: usize) -> Result<Self> {
        Self::gauss(node_count, DomainMap::GaussHalfLine)
    }

    fn gauss(n: usize, map: DomainMap) -> Result<Self> {
        // fine double-exponential discretization of the weight
        let base = match map {
            DomainMap::GaussLine => QuadratureRule::sinh_sinh(1201),
            DomainMap::GaussHalfLine => QuadratureRule::exp_sinh(1201),
            _ => unreachable!(),
        };
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for (&x, &w) in base.unit_points.iter().zip(&base.weights) {
            let wt = w * (-x * x / 2.0).exp();
            if wt > 1e-280 {
                xs.push(x);
                ws.push(wt);
            }
        }
        let (alpha, beta) = stieltjes(&xs, &ws, n);
        let off: Vec<f64> = beta[1..].iter().map(|&b| b.sqrt()).collect();
        let (points, firsts) = tridiagonal_eigen(&alpha, &off)?;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (&u, &z) in points.iter().zip(&firsts) {
            // Lebesgue weight: Gauss weight divided by the rule's own weight fn
            weights.push(beta[0] * z * z * (u * u / 2.0).exp());
            nodes.push(match map {
                DomainMap::GaussLine => u / (1.0 + u.abs()),
                _ => u / (1.0 + u),
            });
        }
        Ok(QuadratureRule { map, nodes, unit_points: points, weights, tolerance: 1e-12 })
    }

    pub fn node_count(&self) -> usize {
        self.unit_points.len()
    }

    pub fn map(&self) -> DomainMap {
        self.map
    }

    /// Canonical abscissae on (-1,1) or (0,1), per the domain map.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Unit-scale evaluation points; x = center + scale·u.
    pub fn unit_points(&self) -> &[f64] {
        &self.unit_points
    }

    /// Stated accuracy for smooth sub-exponential integrands.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// ∫_ℝ f(x) dx with the integrand centered/scaled per the hints.
    pub fn integrate_line(&self, center: f64, scale: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        if self.map.is_half_line() {
            return Err(Error::UnsupportedEngine(
                "half-line rule asked to integrate over the whole line".into(),
            ));
        }
        self.sum(center, scale, f)
    }

    /// ∫₀^∞ f(x) dx with the integrand scaled per the hint.
    pub fn integrate_half_line(&self, scale: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        if !self.map.is_half_line() {
            return Err(Error::UnsupportedEngine(
                "line rule asked to integrate over the half line".into(),
            ));
        }
        self.sum(0.0, scale, f)
    }

    fn sum(&self, center: f64, scale: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("integration scale must be positive, got {scale}")));
        }
        let mut acc = 0.0;
        for (&u, &w) in self.unit_points.iter().zip(&self.weights) {
            let x = center + scale * u;
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::EvaluationFailure {
                    abscissa: x,
                    detail: format!("integrand returned {v}"),
                });
            }
            acc += w * v;
        }
        Ok(acc * scale)
    }
}

/// E[integrand] = ∫ integrand·density over the domain.
///
/// Nodes where the density underflows to zero are skipped before the
/// integrand is evaluated, so tail overflow in the integrand cannot poison
/// the sum; a non-finite integrand under positive density is an error naming
/// the abscissa.
pub fn integrate_expectation(
    integrand: impl Fn(f64) -> f64,
    density: impl Fn(f64) -> f64,
    domain: IntegrationDomain,
    rule: &QuadratureRule,
) -> Result<f64> {
    let (center, scale) = match domain {
        IntegrationDomain::Line { center, scale } => {
            if rule.map.is_half_line() {
                return Err(Error::UnsupportedEngine(
                    "half-line rule asked to integrate over the whole line".into(),
                ));
            }
            (center, scale)
        }
        IntegrationDomain::HalfLine { scale } => {
            if !rule.map.is_half_line() {
                return Err(Error::UnsupportedEngine(
                    "line rule asked to integrate over the half line".into(),
                ));
            }
            (0.0, scale)
        }
    };
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("integration scale must be positive, got {scale}")));
    }
    let mut acc = 0.0;
    for (&u, &w) in rule.unit_points.iter().zip(&rule.weights) {
        let x = center + scale * u;
        let d = density(x);
        if d == 0.0 {
            continue;
        }
        if !d.is_finite() {
            return Err(Error::EvaluationFailure {
                abscissa: x,
                detail: format!("density returned {d}"),
            });
        }
        let v = integrand(x);
        if !v.is_finite() {
            return Err(Error::EvaluationFailure {
                abscissa: x,
                detail: format!("integrand returned {v}"),
            });
        }
        acc += w * v * d;
    }
    Ok(acc * scale)
}

// midpoint grid: nodes strictly inside (-t_max, t_max)
fn trapezoid_grid(n: usize, t_max: f64) -> (Vec<f64>, f64) {
    assert!(n >= 3, "quadrature rule needs at least 3 nodes");
    let h = 2.0 * t_max / n as f64;
    ((0..n).map(|i| -t_max + (i as f64 + 0.5) * h).collect(), h)
}

/// Recurrence coefficients of the orthogonal polynomials of a discrete
/// measure (orthonormal Stieltjes procedure; Gautschi's discretization
/// approach). Returns (alpha, beta) with beta[0] the total mass.
fn stieltjes(points: &[f64], weights: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; m];
    let mass: f64 = weights.iter().sum();
    beta[0] = mass;
    let mut p_prev = vec![0.0; points.len()];
    let mut p: Vec<f64> = vec![1.0 / mass.sqrt(); points.len()];
    let mut beta_prev = 0.0;
    for k in 0..m {
        alpha[k] = points
            .iter()
            .zip(weights)
            .zip(&p)
            .map(|((&x, &w), &pk)| w * x * pk * pk)
            .sum();
        if k == m - 1 {
            break;
        }
        let mut q: Vec<f64> = (0..points.len())
            .map(|i| (points[i] - alpha[k]) * p[i] - beta_prev * p_prev[i])
            .collect();
        let norm: f64 = q
            .iter()
            .zip(weights)
            .map(|(&qi, &w)| w * qi * qi)
            .sum::<f64>()
            .sqrt();
        beta[k + 1] = norm * norm;
        for qi in &mut q {
            *qi /= norm;
        }
        p_prev = std::mem::replace(&mut p, q);
        beta_prev = norm;
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal(x: f64) -> f64 {
        (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn normalization_of_standard_gaussian() {
        let rule = QuadratureRule::sinh_sinh(400);
        let v = integrate_expectation(
            |_| 1.0,
            std_normal,
            IntegrationDomain::Line { center: 0.0, scale: 1.0 },
            &rule,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_second_moment() {
        let rule = QuadratureRule::sinh_sinh(400);
        let v = integrate_expectation(
            |x| x * x,
            std_normal,
            IntegrationDomain::Line { center: 0.0, scale: 1.0 },
            &rule,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn generalized_gaussian_beta4_second_moment() {
        // E[(x-mu)^2] under beta=4, sigma=1 equals Γ(3/4)/Γ(1/4)
        let rule = QuadratureRule::sinh_sinh(400);
        let norm = 4.0 / (2.0 * 3.6256099082219083); // β/(2σΓ(1/β))
        let mu = 0.7;
        let v = integrate_expectation(
            |x| (x - mu) * (x - mu),
            |x| norm * (-(x - mu).powi(4)).exp(),
            IntegrationDomain::Line { center: mu, scale: 1.0 },
            &rule,
        )
        .unwrap();
        assert!((v - 0.33798912003364229).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn non_finite_integrand_reports_abscissa() {
        let rule = QuadratureRule::sinh_sinh(60);
        let err = integrate_expectation(
            |x| 1.0 / (x - rule_node_near_zero(&rule)),
            std_normal,
            IntegrationDomain::Line { center: 0.0, scale: 1.0 },
            &rule,
        )
        .unwrap_err();
        match err {
            crate::Error::EvaluationFailure { abscissa, .. } => {
                assert!((abscissa - rule_node_near_zero(&rule)).abs() < 1e-12)
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn rule_node_near_zero(rule: &QuadratureRule) -> f64 {
        *rule
            .unit_points()
            .iter()
            .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .unwrap()
    }

    #[test]
    fn half_line_rule_integrates_half_normal() {
        let rule = QuadratureRule::exp_sinh(400);
        let lam = 1.7;
        let dens = |x: f64| (2.0 * lam / std::f64::consts::PI).sqrt() * (-lam * x * x / 2.0).exp();
        let v = integrate_expectation(
            |_| 1.0,
            dens,
            IntegrationDomain::HalfLine { scale: 1.0 / lam.sqrt() },
            &rule,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // E[x^4] of the half-normal with precision lam is 3/lam^2
        let m4 = integrate_expectation(
            |x| x.powi(4),
            dens,
            IntegrationDomain::HalfLine { scale: 1.0 / lam.sqrt() },
            &rule,
        )
        .unwrap();
        assert!((m4 - 3.0 / (lam * lam)).abs() < 1e-9);
    }

    #[test]
    fn gauss_rules_are_exact_for_polynomial_moments() {
        // half-line: ∫0∞ u^k e^{-u²/2} du = 2^{(k-1)/2} Γ((k+1)/2)
        let rule = QuadratureRule::gauss_half_line(24).unwrap();
        for k in 0..40u32 {
            let got = rule
                .integrate_half_line(1.0, |u| u.powi(k as i32) * (-u * u / 2.0).exp())
                .unwrap();
            let want = 2f64.powf((k as f64 - 1.0) / 2.0)
                * (crate::numerics::gamma::log_gamma((k as f64 + 1.0) / 2.0).unwrap()).exp();
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "k={k}: got {got}, want {want}"
            );
        }
        // line: odd moments vanish, even are (k-1)!!·√(2π)
        let rule = QuadratureRule::gauss_line(24).unwrap();
        let even = rule.integrate_line(0.0, 1.0, |u| u.powi(6) * (-u * u / 2.0).exp()).unwrap();
        let want = 15.0 * (2.0 * std::f64::consts::PI).sqrt();
        assert!(((even - want) / want).abs() < 1e-12);
        let odd = rule.integrate_line(0.0, 1.0, |u| u.powi(5) * (-u * u / 2.0).exp()).unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn canonical_nodes_and_weights_contract() {
        for rule in [
            QuadratureRule::sinh_sinh(101),
            QuadratureRule::exp_sinh(101),
            QuadratureRule::gauss_line(16).unwrap(),
            QuadratureRule::gauss_half_line(16).unwrap(),
        ] {
            assert_eq!(rule.nodes().len(), rule.weights().len());
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let (lo, hi) = if rule.map().is_half_line() { (0.0, 1.0) } else { (-1.0, 1.0) };
            assert!(rule.nodes().iter().all(|&v| v > lo && v < hi));
        }
    }

    #[test]
    fn domain_map_mismatch_is_rejected() {
        let line = QuadratureRule::sinh_sinh(50);
        assert!(line.integrate_half_line(1.0, |_| 1.0).is_err());
        let half = QuadratureRule::exp_sinh(50);
        assert!(half.integrate_line(0.0, 1.0, |_| 1.0).is_err());
    }
}
