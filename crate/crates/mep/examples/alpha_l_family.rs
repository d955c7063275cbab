//! The αL* estimator family on a small instance: closed-form evaluation,
//! exact unbiasedness, per-datum ratios against the v-optimal square, and the
//! truncated in-range variant that never leaves the admissible optimal range.

use mep::estimator::{
    alpha_l_estimator, alpha_l_truncated, ratio, unbiasedness_check, EstimatorRef,
};
use mep::hull::{opt_square, v_optimal_estimator};
use mep::MepInstance;

fn main() -> mep::Result<()> {
    let inst = MepInstance::new(vec![0.0, 0.25, 0.5, 1.0], vec![3.0, 2.0, 1.5, 0.0])?;

    for j in 0..inst.len() {
        let v = inst.values()[j];
        println!("datum v = {v} (f = {}):", inst.f()[j]);
        println!("  OPT = {:.6}", opt_square(&inst, j));
        for alpha in [1.0, 1.5, 2.0] {
            let form = alpha_l_estimator(&inst, j, alpha)?;
            let trunc = alpha_l_truncated(&inst, j, alpha, 64)?;
            println!(
                "  alpha {alpha:>3}: ratio {:.6}, truncated ratio {:.6}, residual {:+.2e}",
                ratio(&inst, EstimatorRef::AlphaL(&form), j),
                ratio(&inst, EstimatorRef::Step(&trunc), j),
                unbiasedness_check(&inst, EstimatorRef::AlphaL(&form), j),
            );
        }
        let vopt = v_optimal_estimator(&inst, j);
        println!(
            "  v-optimal ratio {:.6} (by definition 1)",
            ratio(&inst, EstimatorRef::Step(&vopt), j)
        );
    }
    Ok(())
}
