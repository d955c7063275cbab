//! The αL* estimator family and generic estimator evaluation.
//!
//! `alpha_l_estimator` solves the integral equation `x·f̂(x) = α(f̲(x) −
//! ∫_x^1 f̂)` in closed form on the shifted problem (the lower-bound function
//! minus its value at 1), then adds the shift back. `alpha_l_truncated` is
//! the in-range variant `min{λ_U, α·λ_L}` computed on a refined seed grid.

use crate::error::{MepError, Result};
use crate::hull;
use crate::instance::MepInstance;
use crate::stepfn::StepFn;

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha >= 1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(MepError::InvalidParameter(format!(
            "alpha = {alpha} not supported; alpha must be >= 1 (below 1 the \
             plain L* estimator dominates)"
        )))
    }
}

/// One segment `(lo, hi]` of an [`AlphaLForm`] with coefficient `c`:
/// the estimate there is `shift + alpha·c·x^(alpha−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaLSegment {
    pub lo: f64,
    pub hi: f64,
    pub c: f64,
}

/// Closed-form αL* estimator for one datum.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaLForm {
    pub alpha: f64,
    /// `f̲^{(v)}(1)`, added back after solving the shifted problem.
    pub shift: f64,
    pub segments: Vec<AlphaLSegment>,
}

impl AlphaLForm {
    pub fn eval(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u <= 1.0, "seed {u} outside (0, 1]");
        let i = self
            .segments
            .partition_point(|s| s.hi < u);
        let s = &self.segments[i];
        self.shift + self.alpha * s.c * u.powf(self.alpha - 1.0)
    }

    /// `∫_0^1` of the estimate, in closed form.
    pub fn integral(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                self.shift * (s.hi - s.lo) + s.c * (s.hi.powf(self.alpha) - s.lo.powf(self.alpha))
            })
            .sum()
    }

    /// Expectation of the square, in closed form
    /// (`2α−1 > 0` for every admissible α).
    pub fn square_expectation(&self) -> f64 {
        let a = self.alpha;
        self.segments
            .iter()
            .map(|s| {
                self.shift * self.shift * (s.hi - s.lo)
                    + 2.0 * self.shift * s.c * (s.hi.powf(a) - s.lo.powf(a))
                    + a * a * s.c * s.c * (s.hi.powf(2.0 * a - 1.0) - s.lo.powf(2.0 * a - 1.0))
                        / (2.0 * a - 1.0)
            })
            .sum()
    }
}

/// Closed-form αL* estimator for datum `j`: per-segment coefficients
/// `C_k = Σ δ_b · b^{−α}` over profile drops at breakpoints `b >= t_hi`.
pub fn alpha_l_estimator(inst: &MepInstance, j: usize, alpha: f64) -> Result<AlphaLForm> {
    require_alpha(alpha)?;
    let profile = inst.lower_bound_fn(j);
    let shift = profile.eval(1.0);
    let bs = profile.boundaries();
    let vals = profile.values();
    // suffix sums of δ_b · b^{−α} over interior breakpoints b = bs[k]
    let n = vals.len();
    let mut c = vec![0.0; n];
    for k in (0..n - 1).rev() {
        let b = bs[k + 1];
        let drop = vals[k] - vals[k + 1];
        c[k] = c[k + 1] + drop * b.powf(-alpha);
    }
    let segments = (0..n)
        .map(|k| AlphaLSegment {
            lo: bs[k],
            hi: bs[k + 1],
            c: c[k],
        })
        .collect();
    Ok(AlphaLForm {
        alpha,
        shift,
        segments,
    })
}

/// Free-function alias for [`AlphaLForm::square_expectation`].
pub fn square_expectation_alphal(form: &AlphaLForm) -> f64 {
    form.square_expectation()
}

/// Internal state shared by the refined-grid recursions.
struct GridRecursion<'a> {
    inst: &'a MepInstance,
    j: usize,
    alpha: f64,
    shift: f64,
    /// profile piece values per partition interval
    pv: Vec<f64>,
    /// largest datum index consistent on interval k (`v_z <= b_k`), if any
    jmax: Vec<Option<usize>>,
}

impl<'a> GridRecursion<'a> {
    fn new(inst: &'a MepInstance, j: usize, alpha: f64) -> Self {
        let profile = inst.lower_bound_fn(j);
        let shift = profile.eval(1.0);
        let pv = profile.values().to_vec();
        let bs = inst.partition().boundaries();
        let jmax = bs[..bs.len() - 1]
            .iter()
            .map(|&b| {
                let cnt = inst.values().partition_point(|&v| v <= b);
                cnt.checked_sub(1)
            })
            .collect();
        GridRecursion {
            inst,
            j,
            alpha,
            shift,
            pv,
            jmax,
        }
    }

    /// `λ_U` at seed `rho` in interval `k`, on the shifted problem with
    /// committed mass `m`. Uses the fact that for consistent `z`, candidate
    /// breakpoints `η = b_i < v_z` are dominated by `η = 0`, and candidates
    /// with `b_i >= v_z` contribute terms independent of `z`.
    fn lambda_u(&self, k: usize, rho: f64, m: f64) -> f64 {
        let bs = self.inst.partition().boundaries();
        let jm = self.jmax[k].expect("unrevealed interval has consistent data");
        // suffix minima of (pm_i − shift − m)/(rho − b_i) for i = 1..=k
        let mut sm = vec![f64::INFINITY; k + 2];
        for i in (1..=k).rev() {
            let term = (self.inst.prefix_min(i) - self.shift - m) / (rho - bs[i]);
            sm[i] = term.min(sm[i + 1]);
        }
        let mut best = f64::NEG_INFINITY;
        for z in 0..=jm {
            let head = (self.inst.f()[z] - self.shift - m) / rho;
            let i0 = self.inst.boundary_index(z).max(1);
            let tail = if i0 <= k { sm[i0] } else { f64::INFINITY };
            best = best.max(head.min(tail));
        }
        best
    }

    /// Runs the right-to-left recursion with `m_sub` cells per interval.
    /// `truncate` selects `min{λ_U, α·λ_L}` versus plain `α·λ_L`.
    fn run(&self, m_sub: usize, truncate: bool) -> StepFn {
        let bs = self.inst.partition().boundaries();
        let v = self.inst.values()[self.j];
        let fsj = self.inst.f()[self.j] - self.shift;
        let nk = bs.len() - 1;
        let mut grid = Vec::with_capacity(nk * m_sub + 1);
        grid.push(0.0);
        for k in 0..nk {
            for i in 1..=m_sub {
                let x = bs[k] + (bs[k + 1] - bs[k]) * i as f64 / m_sub as f64;
                grid.push(if i == m_sub { bs[k + 1] } else { x });
            }
        }
        let ncells = grid.len() - 1;
        let mut vals = vec![0.0; ncells];
        let mut m = 0.0; // committed shifted mass right of the current cell
        for cell in (0..ncells).rev() {
            let a = grid[cell];
            let rho = grid[cell + 1];
            let h = rho - a;
            let k = cell / m_sub;
            let val = if bs[k] < v {
                // revealed region: singleton consistent set {v_j}, so
                // λ_U = λ_L = (f_s(v) − M)/ρ; the cap keeps the committed
                // mass below the (shifted) lower bound and makes the final
                // cell absorb the residual exactly.
                let lambda = (fsj - m) / rho;
                let cap = (fsj - m) / h;
                if truncate {
                    lambda
                } else {
                    (self.alpha * lambda).min(cap)
                }
            } else {
                let lambda_l = (self.pv[k] - self.shift - m) / rho;
                let cap = (self.pv[k] - self.shift - m) / h;
                let raw = if truncate {
                    self.lambda_u(k, rho, m).min(self.alpha * lambda_l)
                } else {
                    self.alpha * lambda_l
                };
                raw.min(cap)
            };
            let val = val.max(0.0);
            vals[cell] = val + self.shift;
            m += val * h;
        }
        let limit0 = vals[0];
        StepFn::new(grid, vals, limit0).expect("refined grid is valid")
    }
}

/// In-range (truncated) αL* variant on a refined grid with `m_sub` cells per
/// partition interval. Exactly unbiased and nonnegative by construction.
pub fn alpha_l_truncated(inst: &MepInstance, j: usize, alpha: f64, m_sub: usize) -> Result<StepFn> {
    require_alpha(alpha)?;
    if m_sub < 1 {
        return Err(MepError::InvalidParameter(
            "refinement must be >= 1".into(),
        ));
    }
    Ok(GridRecursion::new(inst, j, alpha).run(m_sub, true))
}

/// Untruncated αL* computed with the same grid recursion (value `α·λ_L`),
/// for like-for-like comparisons with [`alpha_l_truncated`] at equal
/// refinement.
pub fn alpha_l_grid_untruncated(
    inst: &MepInstance,
    j: usize,
    alpha: f64,
    m_sub: usize,
) -> Result<StepFn> {
    require_alpha(alpha)?;
    if m_sub < 1 {
        return Err(MepError::InvalidParameter(
            "refinement must be >= 1".into(),
        ));
    }
    Ok(GridRecursion::new(inst, j, alpha).run(m_sub, false))
}

/// Admissible-estimator table: one shared value per seed interval plus one
/// revealed constant per datum.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EstimatorTable {
    /// `y_k` on interval `(b_k, b_{k+1}]`, applied to every datum unrevealed
    /// there.
    pub y: Vec<f64>,
    /// `z_j` on `(0, v_j]` (unused for a zero-valued datum).
    pub z: Vec<f64>,
}

impl EstimatorTable {
    pub fn eval(&self, inst: &MepInstance, j: usize, u: f64) -> f64 {
        assert!(u > 0.0 && u <= 1.0, "seed {u} outside (0, 1]");
        if u <= inst.values()[j] {
            self.z[j]
        } else {
            self.y[inst.partition().interval_of(u)]
        }
    }

    pub fn integral(&self, inst: &MepInstance, j: usize) -> f64 {
        let v = inst.values()[j];
        let bs = inst.partition().boundaries();
        let mut total = v * self.z[j];
        for k in 0..bs.len() - 1 {
            if bs[k] >= v {
                total += self.y[k] * (bs[k + 1] - bs[k]);
            }
        }
        total
    }

    pub fn square_expectation(&self, inst: &MepInstance, j: usize) -> f64 {
        let v = inst.values()[j];
        let bs = inst.partition().boundaries();
        let mut total = v * self.z[j] * self.z[j];
        for k in 0..bs.len() - 1 {
            if bs[k] >= v {
                total += self.y[k] * self.y[k] * (bs[k + 1] - bs[k]);
            }
        }
        total
    }
}

/// Any estimator representation the crate produces.
#[derive(Debug, Clone, Copy)]
pub enum EstimatorRef<'a> {
    AlphaL(&'a AlphaLForm),
    Table(&'a EstimatorTable),
    Step(&'a StepFn),
}

/// Estimate value at seed `u` for datum `j`.
pub fn evaluate(inst: &MepInstance, est: EstimatorRef<'_>, j: usize, u: f64) -> f64 {
    match est {
        EstimatorRef::AlphaL(form) => form.eval(u),
        EstimatorRef::Table(table) => table.eval(inst, j, u),
        EstimatorRef::Step(step) => step.eval(u),
    }
}

/// `∫_0^1 est(u) du − f(v_j)`, in closed form per representation.
pub fn unbiasedness_check(inst: &MepInstance, est: EstimatorRef<'_>, j: usize) -> f64 {
    let integral = match est {
        EstimatorRef::AlphaL(form) => form.integral(),
        EstimatorRef::Table(table) => table.integral(inst, j),
        EstimatorRef::Step(step) => step.integral(),
    };
    integral - inst.f()[j]
}

/// Expectation of the square of the estimator for datum `j`.
pub fn square_expectation(inst: &MepInstance, est: EstimatorRef<'_>, j: usize) -> f64 {
    match est {
        EstimatorRef::AlphaL(form) => form.square_expectation(),
        EstimatorRef::Table(table) => table.square_expectation(inst, j),
        EstimatorRef::Step(step) => step.square_integral(),
    }
}

/// Competitive ratio convention: when `OPT(v) = 0`, the ratio is 1 for a
/// zero-square estimator and `+inf` otherwise.
pub fn ratio_value(opt: f64, square: f64) -> f64 {
    if opt <= 0.0 {
        if square.abs() <= 1e-15 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        square / opt
    }
}

/// Per-datum competitive ratio of an estimator.
pub fn ratio(inst: &MepInstance, est: EstimatorRef<'_>, j: usize) -> f64 {
    ratio_value(hull::opt_square(inst, j), square_expectation(inst, est, j))
}

/// Maximum ratio of the αL* family over all data, with the attaining datum.
pub fn alpha_l_max_ratio(inst: &MepInstance, alpha: f64) -> Result<(f64, usize)> {
    let mut best = (f64::NEG_INFINITY, 0);
    for j in 0..inst.len() {
        let form = alpha_l_estimator(inst, j, alpha)?;
        let r = ratio(inst, EstimatorRef::AlphaL(&form), j);
        if r > best.0 {
            best = (r, j);
        }
    }
    Ok(best)
}

/// Maximum ratio of an estimator table over all data.
pub fn table_max_ratio(inst: &MepInstance, table: &EstimatorTable) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for j in 0..inst.len() {
        let r = ratio(inst, EstimatorRef::Table(table), j);
        if r > best.0 {
            best = (r, j);
        }
    }
    best
}
