//! Piecewise-constant drop densities.
//!
//! Where discrete instances put atoms of the lower-bound function at grid
//! breakpoints, continuous profiles put a density `g`: the lower-bound
//! function is `G(x) = ∫_x^1 g(y) dy`. The αL* estimator for such a profile
//! is `f̂(x) = α·x^{α−1}·∫_x^1 y^{−α} g(y) dy`, and both its mean and its
//! square admit exact per-cell power-form integrals (with a log branch at
//! α = 1).

use crate::error::{MepError, Result};
use crate::hull::chain_from_points;

/// Density `values[k]` on `(boundaries[k], boundaries[k+1]]`, spanning
/// `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    boundaries: Vec<f64>,
    values: Vec<f64>,
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn x_ln2_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln() * x.ln()
    }
}

impl PiecewiseDensity {
    pub fn new(boundaries: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if boundaries.len() != values.len() + 1
            || values.is_empty()
            || boundaries[0] != 0.0
            || *boundaries.last().unwrap() != 1.0
        {
            return Err(MepError::InvalidParameter(
                "density needs boundaries spanning [0, 1] with one value per cell".into(),
            ));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MepError::InvalidParameter(
                "density boundaries must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(MepError::InvalidParameter(
                "density values must be finite and nonnegative".into(),
            ));
        }
        Ok(PiecewiseDensity { boundaries, values })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `G(0) = ∫_0^1 g` — the target `f` of the continuous problem at 0.
    pub fn total_mass(&self) -> f64 {
        self.boundaries
            .windows(2)
            .zip(&self.values)
            .map(|(w, &g)| g * (w[1] - w[0]))
            .sum()
    }

    /// `G(x) = ∫_x^1 g(y) dy`.
    pub fn lower_bound_at(&self, x: f64) -> f64 {
        self.boundaries
            .windows(2)
            .zip(&self.values)
            .map(|(w, &g)| g * (w[1].max(x) - w[0].max(x)).max(0.0))
            .sum()
    }

    /// `∫_x^1 y^{−α} g(y) dy` by direct summation (test/evaluation helper).
    fn tail_power_integral(&self, x: f64, alpha: f64) -> f64 {
        let mut total = 0.0;
        for (w, &g) in self.boundaries.windows(2).zip(&self.values) {
            let lo = w[0].max(x);
            let hi = w[1];
            if hi <= lo || g == 0.0 {
                continue;
            }
            total += if alpha == 1.0 {
                g * (hi / lo).ln()
            } else {
                g * (lo.powf(1.0 - alpha) - hi.powf(1.0 - alpha)) / (alpha - 1.0)
            };
        }
        total
    }

    /// Pointwise αL* estimate `α·x^{α−1}·∫_x^1 y^{−α} g`.
    pub fn alpha_l_eval(&self, x: f64, alpha: f64) -> f64 {
        assert!(x > 0.0 && x <= 1.0);
        alpha * x.powf(alpha - 1.0) * self.tail_power_integral(x, alpha)
    }

    /// `∫_0^1` of the αL* estimate (equals [`Self::total_mass`] — the
    /// estimator is unbiased).
    pub fn alpha_l_integral(&self, alpha: f64) -> Result<f64> {
        self.fold_cells(alpha, |lo, hi, a, b, alpha| {
            if alpha == 1.0 {
                // f̂ = a − b·ln x
                a * (hi - lo) - b * (x_ln_x(hi) - x_ln_x(lo) - (hi - lo))
            } else {
                // f̂ = α x^{α−1} (a + b x^{1−α})
                a * (hi.powf(alpha) - lo.powf(alpha)) + alpha * b * (hi - lo)
            }
        })
    }

    /// Exact expectation of the square of the αL* estimate.
    pub fn alpha_l_square(&self, alpha: f64) -> Result<f64> {
        self.fold_cells(alpha, |lo, hi, a, b, alpha| {
            if alpha == 1.0 {
                // ∫ (a − b ln x)² dx
                let part = |x: f64| {
                    a * a * x - 2.0 * a * b * (x_ln_x(x) - x)
                        + b * b * (x_ln2_x(x) - 2.0 * x_ln_x(x) + 2.0 * x)
                };
                part(hi) - part(lo)
            } else {
                // ∫ α² x^{2α−2} (a + b x^{1−α})² dx
                let part = |x: f64| {
                    a * a * x.powf(2.0 * alpha - 1.0) / (2.0 * alpha - 1.0)
                        + 2.0 * a * b * x.powf(alpha) / alpha
                        + b * b * x
                };
                alpha * alpha * (part(hi) - part(lo))
            }
        })
    }

    /// Folds over cells with the tail integral expressed per cell as
    /// `a + b·x^{1−α}` (or `a − b·ln x` when α = 1).
    fn fold_cells<F>(&self, alpha: f64, cell: F) -> Result<f64>
    where
        F: Fn(f64, f64, f64, f64, f64) -> f64,
    {
        if alpha < 1.0 || !alpha.is_finite() {
            return Err(MepError::InvalidParameter(format!(
                "alpha = {alpha} must be >= 1"
            )));
        }
        let mut total = 0.0;
        let mut tail = 0.0; // ∫_{hi}^1 y^{−α} g at the current cell's hi
        for (w, &g) in self.boundaries.windows(2).zip(&self.values).rev() {
            let (lo, hi) = (w[0], w[1]);
            let (a, b) = if alpha == 1.0 {
                // tail-integral on the cell: tail + g·(ln hi − ln x)
                (tail + g * hi.ln(), g)
            } else {
                (
                    tail - g * hi.powf(1.0 - alpha) / (alpha - 1.0),
                    g / (alpha - 1.0),
                )
            };
            total += cell(lo, hi, a, b, alpha);
            if lo > 0.0 {
                tail += if alpha == 1.0 {
                    g * (hi / lo).ln()
                } else {
                    g * (lo.powf(1.0 - alpha) - hi.powf(1.0 - alpha)) / (alpha - 1.0)
                };
            }
        }
        Ok(total)
    }

    /// The hull-equivalent density: negated slopes of the lower convex hull
    /// of the piecewise-linear lower-bound function `G`.
    pub fn hull_density(&self) -> PiecewiseDensity {
        let mut points = Vec::with_capacity(self.boundaries.len());
        for &b in &self.boundaries {
            points.push((b, self.lower_bound_at(b)));
        }
        let chain = chain_from_points(&points);
        let boundaries: Vec<f64> = chain.vertices().iter().map(|&(x, _)| x).collect();
        let values = chain.neg_slopes().to_vec();
        PiecewiseDensity { boundaries, values }
    }
}
