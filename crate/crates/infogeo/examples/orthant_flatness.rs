//! The orthant-Gaussian family is alpha-flat for every alpha in every
//! dimension: the curvature tensor vanishes on a whole lambda-grid, in both
//! the precision and the natural chart.
//!
//! Run with: cargo run --release --example orthant_flatness

use infogeo::families::orthant_gaussian::CHART_NATURAL;
use infogeo::families::OrthantGaussian;
use infogeo::geometry::is_alpha_flat;
use infogeo::manifold::ExpectationEngine;
use infogeo::numerics::StepPolicy;

fn main() -> infogeo::Result<()> {
    let engine = ExpectationEngine::quadrature()?;
    let policy = StepPolicy::first_order();
    let axis = [0.5, 1.25, 2.0];

    for p in [1usize, 2, 3] {
        let fam = OrthantGaussian::new(p)?;
        let mut grid = Vec::new();
        let mut idx = vec![0usize; p];
        'fill: loop {
            let lambda: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            let prec = fam.precision_point(lambda);
            grid.push(fam.convert_point(&prec, CHART_NATURAL)?);
            grid.push(prec);
            for d in idx.iter_mut().rev() {
                *d += 1;
                if *d < axis.len() {
                    continue 'fill;
                }
                *d = 0;
            }
            break;
        }
        println!("p = {p}: {} grid points across both charts", grid.len());
        for alpha in [-1.0, 0.0, 0.5, 1.0] {
            let v = is_alpha_flat(&fam, alpha, &grid, 1e-5, &engine, &policy)?;
            println!(
                "  alpha = {alpha:+.1}: flat = {} (max |R| = {:.3e}, tol {:.0e})",
                v.flat, v.max_abs, v.tol
            );
        }
    }
    Ok(())
}
