//! Finite MEP instances under the threshold sampling scheme.
//!
//! An instance is a sorted grid of values `v_0 < … < v_m` in `[0, 1]`
//! together with nonnegative targets `f(v_i)`. The sampling convention is
//! fixed: datum `v` is revealed exactly when the seed `u <= v`; otherwise the
//! outcome only reveals that `v < u`.

use serde::{Deserialize, Serialize};

use crate::error::{MepError, Result};
use crate::stepfn::StepFn;

/// Descriptor for the two parametric families studied here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `f(v) = 1 - v^p`, `p` in `(0, 1]`.
    OneMinusPow,
    /// `f(v) = (1 - v)^p`, `p >= 1`.
    PowOneMinus,
}

impl Family {
    pub fn eval(self, p: f64, v: f64) -> f64 {
        match self {
            Family::OneMinusPow => 1.0 - v.powf(p),
            Family::PowOneMinus => (1.0 - v).powf(p),
        }
    }

    fn check_p(self, p: f64) -> Result<()> {
        let ok = match self {
            Family::OneMinusPow => p > 0.0 && p <= 1.0,
            Family::PowOneMinus => p >= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(MepError::InvalidParameter(format!(
                "p = {p} outside the admissible range for {self:?}"
            )))
        }
    }
}

/// Seed-interval partition: boundaries `b_0 = 0 < b_1 < … < b_K = 1` where
/// the interior boundaries are exactly the positive grid values below 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedPartition {
    boundaries: Vec<f64>,
}

impl SeedPartition {
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn num_intervals(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn delta(&self, k: usize) -> f64 {
        self.boundaries[k + 1] - self.boundaries[k]
    }

    /// Index of the interval `(b_k, b_{k+1}]` containing `u` in `(0, 1]`.
    pub fn interval_of(&self, u: f64) -> usize {
        assert!(u > 0.0 && u <= 1.0, "seed {u} outside (0, 1]");
        self.boundaries.partition_point(|&b| b < u) - 1
    }

    pub fn total_length(&self) -> f64 {
        (0..self.num_intervals()).map(|k| self.delta(k)).sum()
    }
}

/// Per-datum estimability report from [`MepInstance::check_estimable`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimableRow {
    pub v: f64,
    pub f: f64,
    /// Whether `lim_{u->0+} lower_bound_fn(u) = f(v)` holds exactly.
    pub limit_matches: bool,
    /// `OPT(v)`: the minimum expectation of the square (always finite here).
    pub finite_variance_integral: f64,
}

/// A finite monotone estimation problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MepInstance {
    values: Vec<f64>,
    f: Vec<f64>,
    family_tag: Option<(Family, f64)>,
    partition: SeedPartition,
    /// `prefix_min[k] = min { f(z) : z <= b_k }`; `+inf` when no grid value
    /// lies at or below `b_k` (only possible at `k = 0` with `v_0 > 0`).
    prefix_min: Vec<f64>,
}

impl MepInstance {
    pub fn new(values: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        Self::with_tag(values, f, None)
    }

    fn with_tag(values: Vec<f64>, f: Vec<f64>, family_tag: Option<(Family, f64)>) -> Result<Self> {
        if values.len() != f.len() || values.len() < 2 {
            return Err(MepError::InvalidInstance(format!(
                "need equally long value/target lists of length >= 2, got {} and {}",
                values.len(),
                f.len()
            )));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MepError::InvalidInstance(
                "values must be strictly increasing".into(),
            ));
        }
        if values[0] < 0.0 || *values.last().unwrap() > 1.0 {
            return Err(MepError::InvalidInstance(
                "values must lie within [0, 1]".into(),
            ));
        }
        if f.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(MepError::InvalidInstance(
                "targets must be finite and nonnegative".into(),
            ));
        }

        let mut boundaries = vec![0.0];
        boundaries.extend(values.iter().copied().filter(|&v| v > 0.0 && v < 1.0));
        boundaries.push(1.0);
        let partition = SeedPartition { boundaries };

        let mut prefix_min = Vec::with_capacity(partition.boundaries.len());
        for &b in &partition.boundaries {
            let m = values
                .iter()
                .zip(f.iter())
                .filter(|(&v, _)| v <= b)
                .map(|(_, &fv)| fv)
                .fold(f64::INFINITY, f64::min);
            prefix_min.push(m);
        }

        Ok(MepInstance {
            values,
            f,
            family_tag,
            partition,
            prefix_min,
        })
    }

    /// Instance on the uniform grid `{i/n}` for one of the two families.
    pub fn family(family: Family, p: f64, n: usize) -> Result<Self> {
        family.check_p(p)?;
        if n < 1 {
            return Err(MepError::InvalidParameter("n must be >= 1".into()));
        }
        let values: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let f = values.iter().map(|&v| family.eval(p, v)).collect();
        Self::with_tag(values, f, Some((family, p)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn family_tag(&self) -> Option<(Family, f64)> {
        self.family_tag
    }

    pub fn partition(&self) -> &SeedPartition {
        &self.partition
    }

    /// `min { f(z) : z <= b_k }` at partition boundary `k`.
    pub fn prefix_min(&self, k: usize) -> f64 {
        self.prefix_min[k]
    }

    /// Boundary index of `values[j]` (0 for a zero-valued datum).
    pub fn boundary_index(&self, j: usize) -> usize {
        let v = self.values[j];
        self.partition
            .boundaries
            .partition_point(|&b| b < v)
    }

    /// Datum index whose value equals partition boundary `k`, if any.
    pub fn datum_at_boundary(&self, k: usize) -> Option<usize> {
        let b = self.partition.boundaries[k];
        self.values.iter().position(|&v| v == b)
    }

    /// The lower-bound function `f̲^{(v_j)}` as a step function on `(0, 1]`.
    ///
    /// On intervals fully inside the revealed region (`b_{k+1} <= v`) the
    /// value is `f(v)`; on intervals with `b_k >= v` it is the prefix minimum
    /// of `f` over grid values `<= b_k`. The limit at `0+` is `f(v)`.
    pub fn lower_bound_fn(&self, j: usize) -> StepFn {
        let v = self.values[j];
        let fv = self.f[j];
        let bs = self.partition.boundaries.clone();
        let mut vals = Vec::with_capacity(bs.len() - 1);
        for k in 0..bs.len() - 1 {
            if bs[k] < v {
                vals.push(fv);
            } else {
                vals.push(self.prefix_min[k]);
            }
        }
        StepFn::new(bs, vals, fv).expect("valid by construction")
    }

    /// Existence/finite-variance report per datum.
    pub fn check_estimable(&self) -> Vec<EstimableRow> {
        (0..self.len())
            .map(|j| {
                let profile = self.lower_bound_fn(j);
                EstimableRow {
                    v: self.values[j],
                    f: self.f[j],
                    limit_matches: profile.limit0() == self.f[j],
                    finite_variance_integral: crate::hull::opt_square(self, j),
                }
            })
            .collect()
    }
}

/// JSON file schema for instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub f: Vec<f64>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<MepInstance> {
        match (self.family, self.p, self.n) {
            (Some(fam), Some(p), Some(n)) => MepInstance::family(fam, p, n),
            (None, None, None) => MepInstance::new(self.values, self.f),
            _ => Err(MepError::Parse(
                "instance file must give either values/f or all of family/p/n".into(),
            )),
        }
    }
}

#[cfg(test)]
pub(crate) fn three_point() -> MepInstance {
    MepInstance::new(vec![0.0, 0.5, 1.0], vec![2.0, 1.0, 0.0]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_three_point_instance() {
        let inst = three_point();
        assert_eq!(inst.partition().boundaries(), &[0.0, 0.5, 1.0]);
        assert_eq!(inst.prefix_min(0), 2.0);
        assert_eq!(inst.prefix_min(1), 1.0);
        assert_eq!(inst.prefix_min(2), 0.0);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        assert!(MepInstance::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_ok());
        assert!(MepInstance::new(vec![0.5, 0.2], vec![1.0, 1.0]).is_err());
        assert!(MepInstance::new(vec![0.0, 1.5], vec![1.0, 1.0]).is_err());
        assert!(MepInstance::new(vec![0.0, 1.0], vec![-1.0, 0.0]).is_err());
    }

    #[test]
    fn family_instances() {
        let inst = MepInstance::family(Family::OneMinusPow, 1.0, 2).unwrap();
        assert_eq!(inst.values(), &[0.0, 0.5, 1.0]);
        assert_eq!(inst.f(), &[1.0, 0.5, 0.0]);
        let inst = MepInstance::family(Family::PowOneMinus, 2.0, 2).unwrap();
        assert_eq!(inst.f(), &[1.0, 0.25, 0.0]);
        assert!(MepInstance::family(Family::OneMinusPow, 1.5, 10).is_err());
    }

    #[test]
    fn lower_bound_functions_match_hand_values() {
        let inst = three_point();
        let l0 = inst.lower_bound_fn(0);
        assert_eq!(l0.eval(0.3), 2.0);
        assert_eq!(l0.eval(0.5), 2.0);
        assert_eq!(l0.eval(0.8), 1.0);
        assert_eq!(l0.limit0(), 2.0);

        let l1 = inst.lower_bound_fn(1);
        assert_eq!(l1.eval(0.2), 1.0);
        assert_eq!(l1.eval(0.9), 1.0);

        let l2 = inst.lower_bound_fn(2);
        assert_eq!(l2.eval(0.2), 0.0);
        assert_eq!(l2.eval(1.0), 0.0);
    }

    #[test]
    fn partition_lengths_sum_to_one() {
        let inst = MepInstance::family(Family::OneMinusPow, 0.6, 100).unwrap();
        assert!((inst.partition().total_length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimable_report() {
        let inst = three_point();
        let rows = inst.check_estimable();
        assert!(rows.iter().all(|r| r.limit_matches));
        let ints: Vec<f64> = rows.iter().map(|r| r.finite_variance_integral).collect();
        assert!((ints[0] - 4.0).abs() < 1e-12);
        assert!((ints[1] - 1.0).abs() < 1e-12);
        assert_eq!(ints[2], 0.0);
    }

    #[test]
    fn estimable_on_family_grid() {
        let inst = MepInstance::family(Family::OneMinusPow, 0.6, 100).unwrap();
        assert!(inst.check_estimable().iter().all(|r| r.limit_matches));
    }
}
