//! The headline result: the alpha-Gaussian curvature of the generalized
//! Gaussian manifold is constant in (mu, sigma), equal to
//! -(1+alpha)(2-beta+(1-alpha)(beta-1))/beta.
//!
//! Run with: cargo run --release --example curvature_table

use infogeo::families::{generalized_gaussian as gg, GeneralizedGaussian};
use infogeo::geometry::{curvature_tensor, fisher_metric, gaussian_curvature};
use infogeo::manifold::ExpectationEngine;
use infogeo::numerics::StepPolicy;

fn main() -> infogeo::Result<()> {
    let engine = ExpectationEngine::quadrature()?;
    let policy = StepPolicy::first_order();
    let alphas = [-1.0, 0.0, 1.0 / 3.0, 0.5, 1.0];

    println!("numeric K vs closed form (at mu = 0, sigma = 1), K0 column is -1/beta");
    println!("{:>4} {:>8} {:>14} {:>14} {:>10}", "beta", "alpha", "K numeric", "K closed", "abs err");
    for beta in [2u32, 4, 6] {
        let fam = GeneralizedGaussian::new(beta)?;
        for alpha in alphas {
            let pt = fam.point(0.0, 1.0);
            let r = curvature_tensor(&fam, &pt, alpha, &engine, &policy)?;
            let g = fisher_metric(&fam, &pt, &engine)?;
            let k = gaussian_curvature(&r, &g)?;
            let closed = gg::gaussian_curvature_closed(beta, alpha)?;
            println!(
                "{beta:>4} {alpha:>8.4} {k:>14.9} {closed:>14.9} {:>10.2e}",
                (k - closed).abs()
            );
        }
    }

    println!("\nconstancy across the chart (beta = 4, alpha = 0.5):");
    let fam = GeneralizedGaussian::new(4)?;
    for (mu, sigma) in [(-1.0, 0.5), (0.0, 1.0), (1.0, 2.0)] {
        let pt = fam.point(mu, sigma);
        let r = curvature_tensor(&fam, &pt, 0.5, &engine, &policy)?;
        let g = fisher_metric(&fam, &pt, &engine)?;
        println!("  (mu, sigma) = ({mu:+.1}, {sigma:.1}): K = {:+.12}", gaussian_curvature(&r, &g)?);
    }

    Ok(())
}
