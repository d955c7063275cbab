//! Sweep the optimal competitive ratio across the (1−v)^p family, the MEP
//! behind exponentiated-range (and hence Manhattan/Euclidean distance)
//! estimation under PPS sampling.

use mep::search::sweep_optimal;
use mep::Family;

fn main() -> mep::Result<()> {
    let ps = [1.0, 1.25, 1.5, 2.0, 3.0];
    let rows = sweep_optimal(Family::PowOneMinus, &ps, 200, 1e-4)?;
    println!("{:>5} {:>10} {:>12}", "p", "c_star", "lstar_ratio");
    for row in &rows {
        println!("{:>5} {:>10.5} {:>12.5}", row.p, row.c_star, row.lstar_ratio);
    }
    let best = rows
        .iter()
        .max_by(|a, b| a.c_star.partial_cmp(&b.c_star).unwrap())
        .expect("non-empty sweep");
    println!("max c* = {:.5} at p = {}", best.c_star, best.p);
    Ok(())
}
