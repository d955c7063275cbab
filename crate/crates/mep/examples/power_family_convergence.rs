//! Convergence of the discrete αL* ratio at v = 0 on the `1 − v^p` family
//! toward its continuum value 2α²/((2α−1)(α+p−1)), and toward the worst-case
//! constant 4α²/(2α−1)² as p → 1/2.

use mep::estimator::{alpha_l_estimator, ratio_value};
use mep::hull::opt_square;
use mep::{Family, MepInstance};

fn main() -> mep::Result<()> {
    println!("{:>5} {:>5} {:>6} {:>10} {:>10} {:>8}", "alpha", "p", "n", "ratio", "limit", "relerr");
    for &alpha in &[1.0, 1.5, 2.0] {
        for &p in &[0.51, 0.6, 0.75, 1.0] {
            for &n in &[500usize, 2000] {
                let inst = MepInstance::family(Family::OneMinusPow, p, n)?;
                let form = alpha_l_estimator(&inst, 0, alpha)?;
                let ratio = ratio_value(opt_square(&inst, 0), form.square_expectation());
                let limit = 2.0 * alpha * alpha / ((2.0 * alpha - 1.0) * (alpha + p - 1.0));
                println!(
                    "{alpha:>5} {p:>5} {n:>6} {ratio:>10.5} {limit:>10.5} {:>8.5}",
                    (ratio - limit).abs() / limit
                );
            }
        }
    }
    Ok(())
}
