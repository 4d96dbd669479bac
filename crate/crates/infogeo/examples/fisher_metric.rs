//! Fisher metrics, closed form vs the quadrature engine.
//!
//! Run with: cargo run --example fisher_metric

use infogeo::families::{generalized_gaussian as gg, GeneralizedGaussian, OrthantGaussian};
use infogeo::geometry::{fisher_metric, score_covariance};
use infogeo::manifold::ExpectationEngine;

fn main() -> infogeo::Result<()> {
    let engine = ExpectationEngine::quadrature()?;

    println!("=== generalized Gaussian metric, diag(c11, c22)/sigma^2 ===");
    for beta in [2u32, 4, 6] {
        let fam = GeneralizedGaussian::new(beta)?;
        let (mu, sigma) = (0.3, 1.5);
        let numeric = fisher_metric(&fam, &fam.point(mu, sigma), &engine)?;
        let closed = gg::metric_closed(sigma, beta)?;
        println!(
            "beta={beta}: numeric diag = ({:.12}, {:.12})",
            numeric.get(0, 0),
            numeric.get(1, 1)
        );
        println!(
            "         closed  diag = ({:.12}, {:.12}), off-diagonal = {:.2e}",
            closed.get(0, 0),
            closed.get(1, 1),
            numeric.get(0, 1)
        );
    }

    println!("\n=== both metric routes agree (Bartlett identity) ===");
    let fam = GeneralizedGaussian::new(4)?;
    let pt = fam.point(0.0, 1.0);
    let a = fisher_metric(&fam, &pt, &engine)?;
    let b = score_covariance(&fam, &pt, &engine)?;
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
        }
    }
    println!("max |(-E[hessian]) - E[score x score]| = {worst:.2e}");

    println!("\n=== orthant family: Fisher information is the x^2 variance ===");
    let fam = OrthantGaussian::new(1)?;
    let g = fisher_metric(&fam, &fam.natural_point(vec![-0.5]), &engine)?;
    println!("natural chart theta = -1/2 (lambda = 1): g11 = {:.10} (expected 2)", g.get(0, 0));

    Ok(())
}
