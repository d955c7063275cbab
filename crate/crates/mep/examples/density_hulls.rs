//! Continuous drop densities: the αL* estimator of a piecewise-constant
//! density, its exact square expectation, and the hull-equivalent density
//! whose square bounds the original within a factor α.

use mep::PiecewiseDensity;

fn main() -> mep::Result<()> {
    let g = PiecewiseDensity::new(vec![0.0, 0.2, 0.5, 0.8, 1.0], vec![3.0, 0.5, 1.5, 0.25])?;
    let h = g.hull_density();

    println!("total mass: g {:.6}, hull {:.6}", g.total_mass(), h.total_mass());
    println!("hull boundaries: {:?}", h.boundaries());
    println!("{:>6} {:>12} {:>12} {:>10}", "alpha", "square(g)", "square(h)", "ratio");
    for alpha in [1.0, 1.25, 1.5, 2.0] {
        let sg = g.alpha_l_square(alpha)?;
        let sh = h.alpha_l_square(alpha)?;
        // Lemma: square(g) <= alpha * square(h)
        println!("{alpha:>6} {sg:>12.6} {sh:>12.6} {:>10.6}", sg / sh);
    }
    Ok(())
}
