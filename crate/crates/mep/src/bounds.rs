//! Closed-form competitive-ratio constants and the `1 − v^p` family
//! formulas, used as oracles for the discrete convergence tests and for the
//! bounds table of the CLI.

use serde::Serialize;

use crate::error::{MepError, Result};

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(MepError::InvalidParameter(format!(
            "alpha = {alpha} must be >= 1"
        )))
    }
}

/// One row of the bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsRow {
    pub alpha: f64,
    /// Universal upper bound `4α³/(2α−1)²` on the αL* ratio.
    pub upper: f64,
    /// Worst-case supremum `4α²/(2α−1)²` over the `1 − v^p` family.
    pub worst_lower: f64,
    /// Bound `(2α/(2α−1))²` for convex lower-bound functions.
    pub convex: f64,
}

impl BoundsRow {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(BoundsRow {
            alpha,
            upper: universal_upper(alpha)?,
            worst_lower: worstcase_lower(alpha)?,
            convex: convex_bound(alpha)?,
        })
    }
}

/// `4α³/(2α−1)²`: every αL* estimator is this competitive.
pub fn universal_upper(alpha: f64) -> Result<f64> {
    require_alpha(alpha)?;
    let d = 2.0 * alpha - 1.0;
    Ok(4.0 * alpha.powi(3) / (d * d))
}

/// `4α²/(2α−1)²`: the supremum of the αL* ratio over instances.
pub fn worstcase_lower(alpha: f64) -> Result<f64> {
    require_alpha(alpha)?;
    let d = 2.0 * alpha - 1.0;
    Ok(4.0 * alpha * alpha / (d * d))
}

/// `(2α/(2α−1))²`: the αL* ratio bound when the lower-bound function is
/// convex.
pub fn convex_bound(alpha: f64) -> Result<f64> {
    require_alpha(alpha)?;
    let r = 2.0 * alpha / (2.0 * alpha - 1.0);
    Ok(r * r)
}

/// `OPT(0) = p²/(2p−1)` for the continuous `f(v) = 1 − v^p` problem;
/// square-integrable only for `p > 1/2`.
pub fn power_opt_square(p: f64) -> Result<f64> {
    if p <= 0.5 || p > 1.0 {
        return Err(MepError::InvalidParameter(format!(
            "p = {p} outside (0.5, 1]: the 0-optimal estimator is square \
             integrable only there"
        )));
    }
    Ok(p * p / (2.0 * p - 1.0))
}

/// αL* ratio at `v = 0` for `f(v) = 1 − v^p`: `2α²/((2α−1)(α+p−1))`.
pub fn power_alphal_ratio(alpha: f64, p: f64) -> Result<f64> {
    require_alpha(alpha)?;
    if p <= 0.5 || p > 1.0 {
        return Err(MepError::InvalidParameter(format!(
            "p = {p} outside (0.5, 1]"
        )));
    }
    Ok(2.0 * alpha * alpha / ((2.0 * alpha - 1.0) * (alpha + p - 1.0)))
}

/// Closed-form αL* estimate at seed `x` for `f(v) = 1 − v^p`:
/// `(αp/(α−p))(x^{p−1} − x^{α−1})`, with the limit branch
/// `α²·x^{α−1}·ln(1/x)` when `α = p`.
pub fn power_alphal_estimate(alpha: f64, p: f64, x: f64) -> Result<f64> {
    require_alpha(alpha)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(MepError::InvalidParameter(format!(
            "p = {p} outside (0, 1]"
        )));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(MepError::InvalidParameter(format!(
            "x = {x} outside (0, 1]"
        )));
    }
    if (alpha - p).abs() < 1e-12 {
        Ok(alpha * alpha * x.powf(alpha - 1.0) * (1.0 / x).ln())
    } else {
        Ok(alpha * p / (alpha - p) * (x.powf(p - 1.0) - x.powf(alpha - 1.0)))
    }
}
