//! Where does the alpha-Gaussian curvature vanish? Bisection on the numeric
//! K(alpha) recovers the closed-form roots {-1, 1/(beta-1)} — and shows that
//! the R_1221 component stays nonzero at the second root for beta > 2, so the
//! curvature root is not a flatness point there.
//!
//! Run with: cargo run --release --example curvature_roots

use infogeo::families::{generalized_gaussian as gg, GeneralizedGaussian};
use infogeo::geometry::{curvature_tensor, fisher_metric, gaussian_curvature};
use infogeo::manifold::ExpectationEngine;
use infogeo::numerics::StepPolicy;

fn main() -> infogeo::Result<()> {
    let engine = ExpectationEngine::quadrature()?;
    let policy = StepPolicy::first_order();

    for beta in [2u32, 4, 6] {
        let closed = gg::gaussian_curvature_roots(beta)?;
        println!("beta = {beta}: closed-form K roots = ({:+.6}, {:+.6})", closed[0], closed[1]);
        if beta == 2 {
            println!("  (the classical Gaussian manifold: flat exactly at alpha = ±1)");
            continue;
        }
        let fam = GeneralizedGaussian::new(beta)?;
        let k_num = |alpha: f64| {
            let pt = fam.point(0.0, 1.0);
            let r = curvature_tensor(&fam, &pt, alpha, &engine, &policy).unwrap();
            let g = fisher_metric(&fam, &pt, &engine).unwrap();
            gaussian_curvature(&r, &g).unwrap()
        };
        let r1 = gg::bisect(k_num, -1.3, -0.7)?;
        let r2 = gg::bisect(k_num, 0.05, 1.2)?;
        println!("  numeric bisection roots   = ({r1:+.6}, {r2:+.6})");

        // the full tensor is not flat at the second root
        let pt = fam.point(0.0, 1.0);
        let r = curvature_tensor(&fam, &pt, closed[1], &engine, &policy)?;
        println!(
            "  at alpha = {:+.4}: |R_1212| = {:.2e} but |R_1221| = {:.4} (closed {:.4})",
            closed[1],
            r.get(0, 1, 0, 1).abs(),
            r.get(0, 1, 1, 0).abs(),
            gg::curvature_1221_closed(1.0, beta, closed[1])?.abs(),
        );
    }
    Ok(())
}
