//! Lower convex hulls of lower-bound profiles with a pinned endpoint.
//!
//! The v-optimal estimator is the negated slope of the greatest convex
//! minorant of the lower-bound function, pinned at the endpoint where the
//! remaining estimate mass must vanish.

use crate::error::{MepError, Result};
use crate::instance::MepInstance;
use crate::stepfn::StepFn;

/// Slack for endpoint-feasibility checks (absolute).
pub const FEAS_SLACK: f64 = 1e-12;

/// A convex chain `(x_0, y_0) … (x_r, y_r)` with `x_0 = 0` and the last
/// vertex at the pinned endpoint; `neg_slopes[i] >= 0` is the negated slope
/// of segment `i`, non-increasing left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct HullSegments {
    vertices: Vec<(f64, f64)>,
    neg_slopes: Vec<f64>,
}

impl HullSegments {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn neg_slopes(&self) -> &[f64] {
        &self.neg_slopes
    }

    /// Iterates `(x_lo, x_hi, neg_slope)` over segments.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.vertices
            .windows(2)
            .zip(self.neg_slopes.iter())
            .map(|(w, &s)| (w[0].0, w[1].0, s))
    }

    /// `Σ neg_slope² · length` — the expectation of the square of the
    /// estimator whose value is the negated hull slope.
    pub fn square(&self) -> f64 {
        self.segments().map(|(lo, hi, s)| s * s * (hi - lo)).sum()
    }

    /// The negated-slope function as a step function on `(x_0, x_r]`.
    pub fn to_step_fn(&self) -> StepFn {
        let boundaries = self.vertices.iter().map(|&(x, _)| x).collect();
        StepFn::new(boundaries, self.neg_slopes.clone(), self.neg_slopes[0])
            .expect("hull chain is a valid step function")
    }
}

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

pub(crate) fn chain_from_points(points: &[(f64, f64)]) -> HullSegments {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len().min(16));
    for &p in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let neg_slopes = hull
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0))
        .collect();
    HullSegments {
        vertices: hull,
        neg_slopes,
    }
}

/// Greatest convex minorant of a non-increasing step profile on `(0, rho)`,
/// anchored at `(0, min(anchor0, first piece))` and pinned at `(rho, m_end)`.
///
/// Fails when the endpoint lies above the profile value just left of `rho`.
pub fn lower_hull(profile: &StepFn, anchor0: f64, rho: f64, m_end: f64) -> Result<HullSegments> {
    assert!(
        rho > profile.start() && rho <= profile.end(),
        "endpoint abscissa {rho} outside profile domain"
    );
    let bound = profile.eval(rho);
    if m_end > bound + FEAS_SLACK {
        return Err(MepError::InfeasibleExtension {
            rho,
            committed: m_end,
            bound,
        });
    }
    let mut points = Vec::with_capacity(profile.num_pieces() + 2);
    points.push((profile.start(), anchor0.min(profile.values()[0])));
    for (lo, _, v) in profile.pieces() {
        if lo > profile.start() && lo < rho {
            points.push((lo, v));
        }
    }
    points.push((rho, m_end));
    Ok(chain_from_points(&points))
}

/// The v-optimal estimator: negated slopes of the hull of `f̲^{(v)}` pinned
/// at `(1, 0)`, as a step function on `(0, 1]`.
pub fn v_optimal_estimator(inst: &MepInstance, j: usize) -> StepFn {
    let profile = inst.lower_bound_fn(j);
    lower_hull(&profile, inst.f()[j], 1.0, 0.0)
        .expect("pinning at (1, 0) is always feasible")
        .to_step_fn()
}

/// `OPT(v)`: minimum expectation of the square over unbiased nonnegative
/// estimators for datum `j`.
pub fn opt_square(inst: &MepInstance, j: usize) -> f64 {
    let profile = inst.lower_bound_fn(j);
    lower_hull(&profile, inst.f()[j], 1.0, 0.0)
        .expect("pinning at (1, 0) is always feasible")
        .square()
}

/// `λ(rho, v_j, M)`: infimum over `η ∈ {0} ∪ {breakpoints < rho}` of
/// `(f̲^{(v)}(η+) − M) / (rho − η)`; attained at a breakpoint for step
/// profiles.
pub fn lambda_point(inst: &MepInstance, j: usize, rho: f64, m: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(MepError::InvalidParameter(format!(
            "rho = {rho} outside (0, 1]"
        )));
    }
    let profile = inst.lower_bound_fn(j);
    if m < 0.0 || m > profile.eval(rho) + FEAS_SLACK {
        return Err(MepError::InvalidParameter(format!(
            "committed mass {m} outside [0, {}]",
            profile.eval(rho)
        )));
    }
    let mut best = f64::INFINITY;
    for (lo, _, v) in profile.pieces() {
        if lo < rho {
            best = best.min((v - m) / (rho - lo));
        }
    }
    Ok(best)
}

/// The admissible optimal range `(λ_L, λ_U)` at an outcome with seed `rho`,
/// consistent data `consistent` (indices), and committed mass `m`.
pub fn lambda_bounds(
    inst: &MepInstance,
    rho: f64,
    consistent: &[usize],
    m: f64,
) -> Result<(f64, f64)> {
    if consistent.is_empty() {
        return Err(MepError::InvalidParameter(
            "consistent set must be nonempty".into(),
        ));
    }
    let f_min = consistent
        .iter()
        .map(|&j| inst.f()[j])
        .fold(f64::INFINITY, f64::min);
    let lambda_l = (f_min - m) / rho;
    let mut lambda_u = f64::NEG_INFINITY;
    for &j in consistent {
        lambda_u = lambda_u.max(lambda_point(inst, j, rho, m)?);
    }
    Ok((lambda_l, lambda_u))
}

/// Minimum achievable `∫_0^rho f̂²` over unbiased nonnegative completions for
/// datum `j`, given mass `m` already committed on seeds above `rho`.
pub fn optimal_completion_square(inst: &MepInstance, j: usize, rho: f64, m: f64) -> Result<f64> {
    let profile = inst.lower_bound_fn(j);
    Ok(lower_hull(&profile, inst.f()[j], rho, m)?.square())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::three_point;

    #[test]
    fn constant_profile_single_segment() {
        let profile = StepFn::new(vec![0.0, 1.0], vec![2.0], 2.0).unwrap();
        let h = lower_hull(&profile, 2.0, 1.0, 0.0).unwrap();
        assert_eq!(h.vertices(), &[(0.0, 2.0), (1.0, 0.0)]);
        assert_eq!(h.neg_slopes(), &[2.0]);
    }

    #[test]
    fn collinear_profile_has_constant_slope() {
        // Two-step profile: 2 on (0, 0.5], 1 on (0.5, 1]; pinned at (1, 0).
        let inst = three_point();
        let h = lower_hull(&inst.lower_bound_fn(0), 2.0, 1.0, 0.0).unwrap();
        assert!(h.neg_slopes().iter().all(|&s| (s - 2.0).abs() < 1e-12));
        assert!((h.square() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_endpoint_is_rejected() {
        let profile = StepFn::new(vec![0.0, 1.0], vec![1.0], 1.0).unwrap();
        assert!(matches!(
            lower_hull(&profile, 1.0, 1.0, 2.0),
            Err(MepError::InfeasibleExtension { .. })
        ));
    }

    #[test]
    fn v_optimal_three_point() {
        let inst = three_point();
        let e0 = v_optimal_estimator(&inst, 0);
        assert!((e0.eval(0.3) - 2.0).abs() < 1e-12);
        assert!((e0.eval(0.9) - 2.0).abs() < 1e-12);
        let e1 = v_optimal_estimator(&inst, 1);
        assert!((e1.eval(0.7) - 1.0).abs() < 1e-12);
        let e2 = v_optimal_estimator(&inst, 2);
        assert_eq!(e2.eval(0.4), 0.0);
        // unbiasedness is exact for hull estimators
        assert!((e0.integral() - 2.0).abs() < 1e-12);
        assert!((e1.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opt_square_three_point() {
        let inst = three_point();
        assert!((opt_square(&inst, 0) - 4.0).abs() < 1e-12);
        assert!((opt_square(&inst, 1) - 1.0).abs() < 1e-12);
        assert_eq!(opt_square(&inst, 2), 0.0);
    }

    #[test]
    fn lambda_point_hand_values() {
        let inst = three_point();
        // min{(2-0)/1, (1-0)/0.5} = 2
        assert!((lambda_point(&inst, 0, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
        // v = 0.5, rho = 0.5, M = 0.5 -> (1 - 0.5)/0.5 = 1
        assert!((lambda_point(&inst, 1, 0.5, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(lambda_point(&inst, 1, 0.5, 1.5).is_err());
    }

    #[test]
    fn lambda_bounds_hand_values() {
        let inst = three_point();
        let (l, u) = lambda_bounds(&inst, 0.75, &[0, 1], 0.0).unwrap();
        assert!((l - 4.0 / 3.0).abs() < 1e-12);
        let l0 = lambda_point(&inst, 0, 0.75, 0.0).unwrap();
        assert!((u - l0.max(4.0 / 3.0)).abs() < 1e-12);
        // singleton set collapses the range
        let (l, u) = lambda_bounds(&inst, 0.4, &[1], 0.0).unwrap();
        assert_eq!(l, u);
        // exhausted mass
        let (l, _) = lambda_bounds(&inst, 0.75, &[0, 1], 1.0).unwrap();
        assert_eq!(l, 0.0);
        assert!(lambda_bounds(&inst, 0.5, &[], 0.0).is_err());
    }

    #[test]
    fn completion_square_hand_values() {
        let inst = three_point();
        // full-range completion equals OPT
        let c = optimal_completion_square(&inst, 0, 1.0, 0.0).unwrap();
        assert!((c - opt_square(&inst, 0)).abs() < 1e-12);
        // Worked witness: v = 0.5, rho = 0.5, M = (4/3)·0.5 -> slope 2/3
        let c = optimal_completion_square(&inst, 1, 0.5, 2.0 / 3.0).unwrap();
        assert!((c - 0.5 * (2.0 / 3.0_f64).powi(2)).abs() < 1e-12);
        // pin at the profile value itself
        let c = optimal_completion_square(&inst, 0, 0.5, 2.0).unwrap();
        assert_eq!(c, 0.0);
        assert!(optimal_completion_square(&inst, 0, 0.5, 2.5).is_err());
    }

    #[test]
    fn completion_integrates_remaining_mass() {
        let inst = three_point();
        for &(j, rho, m) in &[(0usize, 1.0, 0.0), (0, 0.5, 1.0), (1, 0.5, 0.25), (1, 1.0, 0.0)] {
            let profile = inst.lower_bound_fn(j);
            let h = lower_hull(&profile, inst.f()[j], rho, m).unwrap();
            let mass: f64 = h.segments().map(|(lo, hi, s)| s * (hi - lo)).sum();
            assert!((mass - (inst.f()[j] - m)).abs() < 1e-10 * 1f64.max(inst.f()[j]));
            let slopes = h.neg_slopes();
            assert!(slopes.windows(2).all(|w| w[0] >= w[1]));
            assert!(slopes.iter().all(|&s| s >= -1e-12));
        }
    }
}
