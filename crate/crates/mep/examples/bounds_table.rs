//! Closed-form competitiveness bounds of the αL* family: the universal upper
//! bound 4α³/(2α−1)², the worst-case single-instance bound 4α²/(2α−1)², and
//! the convex-profile bound (2α/(2α−1))². The upper bound is minimized at
//! α = 3/2, where it equals 27/8.

use mep::bounds::BoundsRow;

fn main() -> mep::Result<()> {
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "alpha", "upper", "worst_lower", "convex"
    );
    for alpha in [1.0, 1.25, 1.5, 1.75, 2.0, 3.0] {
        let row = BoundsRow::new(alpha)?;
        println!(
            "{:>6} {:>12.6} {:>12.6} {:>12.6}",
            alpha, row.upper, row.worst_lower, row.convex
        );
    }
    Ok(())
}
