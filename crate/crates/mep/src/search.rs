//! Instance-optimal competitive estimators: the greedy max-estimate
//! feasibility subroutine and the outer binary search on the ratio `c`.
//!
//! Intervals are processed right to left. Every datum unrevealed on an
//! interval shares the same committed mass and committed square (their
//! outcomes coincide on all seeds to the right), so the state is two scalars
//! plus one incremental lower-hull per datum for optimal-completion queries.

use serde::Serialize;

use crate::error::{MepError, Result};
use crate::estimator::{alpha_l_max_ratio, ratio_value, EstimatorTable};
use crate::hull::opt_square;
use crate::instance::{Family, MepInstance};

/// Relative slack for the final per-datum ratio verification.
const VERIFY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible {
        interval: usize,
        binding_datum: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    pub table: Option<EstimatorTable>,
    pub per_v_ratio: Vec<f64>,
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, FeasibilityStatus::Feasible)
    }

    fn infeasible(interval: usize, binding_datum: usize) -> Self {
        FeasibilityOutcome {
            status: FeasibilityStatus::Infeasible {
                interval,
                binding_datum,
            },
            table: None,
            per_v_ratio: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalResult {
    pub c_star: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub table: EstimatorTable,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub c_star: f64,
    pub lstar_ratio: f64,
}

#[derive(Clone, Copy)]
struct Vertex {
    x: f64,
    y: f64,
    /// prefix square integral of the chain up to this vertex
    d: f64,
}

/// Incremental lower hull of one datum's completion point cloud
/// (anchor `(0, f_j)` plus `(b_i, prefix_min_i)` for boundaries at or right
/// of `v_j`), with LIFO undo so the cloud can shrink from the right as the
/// sweep moves left.
struct DatumHull {
    stack: Vec<Vertex>,
    /// per applied insertion: range into `popped`
    journal: Vec<(u32, u32)>,
    popped: Vec<Vertex>,
}

impl DatumHull {
    fn new(anchor_y: f64, capacity: usize) -> Self {
        let mut stack = Vec::with_capacity(capacity + 1);
        stack.push(Vertex {
            x: 0.0,
            y: anchor_y,
            d: 0.0,
        });
        DatumHull {
            stack,
            journal: Vec::with_capacity(capacity),
            popped: Vec::new(),
        }
    }

    fn insert(&mut self, x: f64, y: f64) {
        let start = self.popped.len() as u32;
        while self.stack.len() >= 2 {
            let a = self.stack[self.stack.len() - 2];
            let b = self.stack[self.stack.len() - 1];
            let cr = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
            if cr <= 0.0 {
                self.popped.push(self.stack.pop().unwrap());
            } else {
                break;
            }
        }
        let parent = *self.stack.last().unwrap();
        let d = parent.d + (parent.y - y) * (parent.y - y) / (x - parent.x);
        self.journal
            .push((start, self.popped.len() as u32 - start));
        self.stack.push(Vertex { x, y, d });
    }

    /// Undoes insertions until only `target` remain.
    fn trim(&mut self, target: usize) {
        while self.journal.len() > target {
            let (start, len) = self.journal.pop().unwrap();
            self.stack.pop();
            let start = start as usize;
            for i in (start..start + len as usize).rev() {
                self.stack.push(self.popped[i]);
            }
            self.popped.truncate(start);
        }
    }

    /// Negated slope from chain vertex `i` to the pin `(rho, m)`.
    #[inline]
    fn lambda(&self, i: usize, rho: f64, m: f64) -> f64 {
        let v = self.stack[i];
        (v.y - m) / (rho - v.x)
    }

    /// Tangent vertex for the pin: minimizer of `lambda`, which is unimodal
    /// along a convex chain.
    fn tangent(&self, rho: f64, m: f64) -> usize {
        let (mut lo, mut hi) = (0usize, self.stack.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.lambda(mid, rho, m) <= self.lambda(mid + 1, rho, m) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Minimum `∫_0^rho f̂²` over completions pinned at `(rho, m)`.
    fn completion(&self, rho: f64, m: f64) -> f64 {
        let t = self.tangent(rho, m);
        let v = self.stack[t];
        v.d + (v.y - m) * (v.y - m) / (rho - v.x)
    }

    /// `λ` at the tangent — the derivative of the completion with respect to
    /// the pinned mass is `−2·λ_min` (envelope theorem), used to locate the
    /// minimizer of the per-datum feasibility objective.
    fn lambda_min(&self, rho: f64, m: f64) -> f64 {
        self.lambda(self.tangent(rho, m), rho, m)
    }
}

/// Precomputed per-instance search state, reusable across feasibility calls.
pub struct Searcher<'a> {
    inst: &'a MepInstance,
    opt: Vec<f64>,
    /// first shared-point (boundary) index feeding each datum's hull
    start_i: Vec<usize>,
}

impl<'a> Searcher<'a> {
    pub fn new(inst: &'a MepInstance) -> Self {
        let opt = (0..inst.len()).map(|j| opt_square(inst, j)).collect();
        let start_i = (0..inst.len())
            .map(|j| inst.boundary_index(j).max(1))
            .collect();
        Searcher {
            inst,
            opt,
            start_i,
        }
    }

    pub fn opt(&self) -> &[f64] {
        &self.opt
    }

    fn build_hulls(&self) -> Vec<DatumHull> {
        let bs = self.inst.partition().boundaries();
        let k_total = bs.len() - 1;
        (0..self.inst.len())
            .map(|j| {
                let start = self.start_i[j];
                let mut h =
                    DatumHull::new(self.inst.f()[j], k_total.saturating_sub(start));
                for i in start..k_total {
                    h.insert(bs[i], self.inst.prefix_min(i));
                }
                h
            })
            .collect()
    }

    /// Greedy max-estimate subroutine: succeeds iff it constructs a
    /// `c`-competitive admissible estimator table.
    pub fn feasible(&self, c: f64) -> FeasibilityOutcome {
        let inst = self.inst;
        let bs = inst.partition().boundaries();
        let k_total = bs.len() - 1;
        let n = inst.len();
        let values = inst.values();
        let f = inst.f();
        let mut hulls = self.build_hulls();

        let mut m = 0.0; // committed mass on seeds right of the current interval
        let mut q = 0.0; // committed square on those seeds
        let mut y = vec![0.0; k_total];
        let mut z = vec![0.0; n];
        let mut exit_sq = vec![0.0; n];

        for k in (0..k_total).rev() {
            // datum whose value is the right boundary leaves the unrevealed
            // set here; its revealed constant is fixed by unbiasedness
            if let Some(j) = inst.datum_at_boundary(k + 1) {
                let vj = values[j];
                let zj = ((f[j] - m) / vj).max(0.0);
                z[j] = zj;
                exit_sq[j] = q + zj * zj * vj;
            }

            let delta = bs[k + 1] - bs[k];
            let ucnt = values.partition_point(|&v| v <= bs[k]);
            if ucnt == 0 {
                continue;
            }
            let cap = ((inst.prefix_min(k) - m) / delta).max(0.0);

            if k == 0 {
                // only a zero-valued datum can be unrevealed here; its
                // unbiasedness forces the value (which equals the mass cap)
                let y0 = ((f[0] - m) / delta).max(0.0);
                let total = q + y0 * y0 * delta;
                if total > c * self.opt[0] * (1.0 + VERIFY_SLACK) {
                    return FeasibilityOutcome::infeasible(0, 0);
                }
                y[0] = y0;
                q = total;
                break;
            }

            let rho = bs[k];
            let mut y_k = cap;
            for (j, hull) in hulls.iter_mut().enumerate().take(ucnt) {
                hull.trim(k - self.start_i[j]);
                let bound = c * self.opt[j] - q;
                match upper_endpoint(hull, rho, delta, m, cap, bound) {
                    Some(u) => y_k = y_k.min(u),
                    None => return FeasibilityOutcome::infeasible(k, j),
                }
            }
            if y_k < cap {
                // the per-datum feasible sets are intervals; make sure their
                // intersection actually contains the minimum upper endpoint
                for (j, hull) in hulls.iter().enumerate().take(ucnt) {
                    let bound = c * self.opt[j] - q;
                    let phi = y_k * y_k * delta + hull.completion(rho, m + y_k * delta);
                    if phi > bound * (1.0 + VERIFY_SLACK) + 1e-12 {
                        return FeasibilityOutcome::infeasible(k, j);
                    }
                }
            }
            y[k] = y_k;
            q += y_k * y_k * delta;
            m += y_k * delta;
        }

        if values[0] == 0.0 {
            exit_sq[0] = q;
        }

        let per_v_ratio: Vec<f64> = (0..n)
            .map(|j| ratio_value(self.opt[j], exit_sq[j]))
            .collect();
        if let Some(j) = (0..n).find(|&j| per_v_ratio[j] > c * (1.0 + VERIFY_SLACK)) {
            return FeasibilityOutcome::infeasible(inst.boundary_index(j).min(k_total - 1), j);
        }
        FeasibilityOutcome {
            status: FeasibilityStatus::Feasible,
            table: Some(EstimatorTable { y, z }),
            per_v_ratio,
        }
    }
}

/// Largest `y` in `[0, cap]` with
/// `φ(y) = y²Δ + completion(rho, m + yΔ) <= bound`, or `None` when the
/// constraint is empty. `φ` is convex: its derivative `2Δ(y − λ_min)` is
/// increasing because the tangent slope `λ_min` falls as mass is committed.
fn upper_endpoint(
    hull: &DatumHull,
    rho: f64,
    delta: f64,
    m: f64,
    cap: f64,
    bound: f64,
) -> Option<f64> {
    if bound < -1e-12 {
        return None;
    }
    let phi = |yv: f64| yv * yv * delta + hull.completion(rho, m + yv * delta);
    if phi(cap) <= bound {
        return Some(cap);
    }
    // derivative sign via the envelope form
    let grad = |yv: f64| yv - hull.lambda_min(rho, m + yv * delta);
    let y_min = if grad(cap) <= 0.0 {
        // φ non-increasing on the whole interval, so cap is its minimum
        return scan_fallback(&phi, cap, bound);
    } else if grad(0.0) >= 0.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0f64, cap);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if grad(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    if phi(y_min) > bound {
        return scan_fallback(&phi, cap, bound);
    }
    // upper root of the convex sublevel set, keeping the feasible side
    let (mut lo, mut hi) = (y_min, cap);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * 1f64.max(cap) {
            break;
        }
    }
    Some(lo)
}

/// Guarded fallback for the assumed-convex search: a coarse scan that keeps
/// the largest feasible point, if any.
fn scan_fallback(phi: &impl Fn(f64) -> f64, cap: f64, bound: f64) -> Option<f64> {
    const POINTS: usize = 1024;
    for i in (0..=POINTS).rev() {
        let yv = cap * i as f64 / POINTS as f64;
        if phi(yv) <= bound {
            return Some(yv);
        }
    }
    None
}

/// Binary search for the minimum `c` at which the greedy subroutine
/// succeeds, bracketed from above by `max(L* max-ratio, 4)`.
pub fn optimal_ratio(inst: &MepInstance, tol: f64) -> Result<OptimalResult> {
    if !(tol > 0.0) {
        return Err(MepError::InvalidParameter("tol must be > 0".into()));
    }
    let searcher = Searcher::new(inst);

    let at_one = searcher.feasible(1.0);
    if at_one.is_feasible() {
        return Ok(OptimalResult {
            c_star: 1.0,
            bracket: (1.0, 1.0),
            iterations: 0,
            ratios: at_one.per_v_ratio.clone(),
            table: at_one.table.expect("feasible outcome carries a table"),
        });
    }

    let c_init = alpha_l_max_ratio(inst, 1.0)?.0.max(4.0);
    let mut hi = c_init;
    let mut best = searcher.feasible(hi);
    let mut widenings = 0;
    while !best.is_feasible() {
        widenings += 1;
        if widenings > 6 {
            return Err(MepError::BracketFailure(format!(
                "greedy subroutine still fails at c = {hi} (64x the L* ratio bracket)"
            )));
        }
        hi *= 2.0;
        best = searcher.feasible(hi);
    }

    let mut lo = 1.0;
    let mut iterations = 0u32;
    while hi - lo > tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        let out = searcher.feasible(mid);
        if out.is_feasible() {
            hi = mid;
            best = out;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(OptimalResult {
        c_star: hi,
        bracket: (lo, hi),
        iterations,
        ratios: best.per_v_ratio.clone(),
        table: best.table.expect("feasible outcome carries a table"),
    })
}

/// Convenience wrapper: run the greedy feasibility construction at ratio `c`.
pub fn feasible_estimator(inst: &MepInstance, c: f64) -> Result<FeasibilityOutcome> {
    if c < 1.0 {
        return Err(MepError::InvalidParameter("c must be >= 1".into()));
    }
    Ok(Searcher::new(inst).feasible(c))
}

/// Runs the optimal-ratio search over a family `p`-grid.
pub fn sweep_optimal(
    family: Family,
    ps: &[f64],
    n: usize,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    ps.iter()
        .map(|&p| {
            let inst = MepInstance::family(family, p, n)?;
            let lstar_ratio = alpha_l_max_ratio(&inst, 1.0)?.0;
            let res = optimal_ratio(&inst, tol)?;
            Ok(SweepRow {
                p,
                c_star: res.c_star,
                lstar_ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{unbiasedness_check, EstimatorRef};
    use crate::instance::three_point;

    #[test]
    fn three_point_feasible_at_ten_ninths() {
        let inst = three_point();
        let out = feasible_estimator(&inst, 10.0 / 9.0).unwrap();
        assert!(out.is_feasible(), "{:?}", out.status);
        let table = out.table.unwrap();
        assert!((table.y[1] - 4.0 / 3.0).abs() < 1e-6, "y = {:?}", table.y);
        assert!((table.y[0] - 8.0 / 3.0).abs() < 1e-6);
        assert!((table.z[1] - 2.0 / 3.0).abs() < 1e-6);
        let r = &out.per_v_ratio;
        assert!((r[0] - 10.0 / 9.0).abs() < 1e-6);
        assert!((r[1] - 10.0 / 9.0).abs() < 1e-6);
        assert!((r[2] - 1.0).abs() < 1e-12);
        for j in 0..3 {
            let res = unbiasedness_check(&inst, EstimatorRef::Table(&table), j);
            assert!(res.abs() <= 1e-9 * 1f64.max(inst.f()[j]));
        }
    }

    #[test]
    fn three_point_infeasible_at_1_05() {
        let inst = three_point();
        let out = feasible_estimator(&inst, 1.05).unwrap();
        assert!(!out.is_feasible());
    }

    #[test]
    fn three_point_optimal_ratio() {
        let inst = three_point();
        let res = optimal_ratio(&inst, 1e-4).unwrap();
        assert!((res.c_star - 10.0 / 9.0).abs() < 1e-4, "c* = {}", res.c_star);
        assert!(res.bracket.1 - res.bracket.0 <= 1e-4 + 1e-12);
        assert!((res.table.y[1] - 4.0 / 3.0).abs() < 1e-3);
        assert!((res.table.z[1] - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn constant_instance_is_near_one() {
        let inst = MepInstance::new(vec![0.0, 0.4, 1.0], vec![1.5, 1.5, 1.5]).unwrap();
        let res = optimal_ratio(&inst, 1e-4).unwrap();
        assert!(res.c_star <= 1.0 + 2e-4, "c* = {}", res.c_star);
    }

    #[test]
    fn monotone_in_c() {
        let inst = three_point();
        let s = Searcher::new(&inst);
        let mut was_feasible = false;
        for &c in &[1.0, 1.05, 1.1, 10.0 / 9.0, 1.2, 2.0] {
            let now = s.feasible(c).is_feasible();
            assert!(!was_feasible || now, "feasibility lost at c = {c}");
            was_feasible = now;
        }
    }

    #[test]
    fn family_instance_small_grid() {
        let inst = MepInstance::family(Family::PowOneMinus, 1.0, 8).unwrap();
        let res = optimal_ratio(&inst, 1e-3).unwrap();
        assert!(res.c_star >= 1.0 && res.c_star < 2.0);
        let table = &res.table;
        for j in 0..inst.len() {
            let res = unbiasedness_check(&inst, EstimatorRef::Table(table), j);
            assert!(res.abs() <= 1e-9 * 1f64.max(inst.f()[j]), "datum {j}");
            assert!(table.z[j] >= 0.0);
        }
        assert!(table.y.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let inst = three_point();
        assert!(feasible_estimator(&inst, 0.9).is_err());
        assert!(optimal_ratio(&inst, 0.0).is_err());
    }
}
