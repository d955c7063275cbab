//! The classic three-point instance {0, 0.5, 1} with f = {2, 1, 0}: its
//! optimal competitive ratio is exactly 10/9, achieved by estimating 4/3 on
//! outcomes with seed above 1/2.

use mep::search::optimal_ratio;
use mep::MepInstance;

fn main() -> mep::Result<()> {
    let inst = MepInstance::new(vec![0.0, 0.5, 1.0], vec![2.0, 1.0, 0.0])?;
    let res = optimal_ratio(&inst, 1e-6)?;

    println!("c*        = {:.8}  (10/9 = {:.8})", res.c_star, 10.0 / 9.0);
    println!("bracket   = [{:.8}, {:.8}]", res.bracket.0, res.bracket.1);
    println!("unrevealed estimates per interval (left to right):");
    for (k, y) in res.table.y.iter().enumerate() {
        println!("  interval {k}: y = {y:.6}");
    }
    println!("revealed-region estimates per datum:");
    for (v, z) in inst.values().iter().zip(&res.table.z) {
        println!("  v = {v}: z = {z:.6}");
    }
    println!("per-datum ratios: {:?}", res.ratios);
    Ok(())
}
