use crate::error::{MepError, Result};

/// Piecewise-constant function on half-open seed intervals.
///
/// Value `values[k]` holds on `(boundaries[k], boundaries[k+1]]`; `limit0`
/// is the value approached as the argument tends to `boundaries[0]` from the
/// right (relevant when the domain starts at 0, where the point itself is
/// excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    boundaries: Vec<f64>,
    values: Vec<f64>,
    limit0: f64,
}

impl StepFn {
    pub fn new(boundaries: Vec<f64>, values: Vec<f64>, limit0: f64) -> Result<Self> {
        if boundaries.len() != values.len() + 1 || values.is_empty() {
            return Err(MepError::InvalidParameter(format!(
                "step function needs k+1 boundaries for k>=1 values, got {} and {}",
                boundaries.len(),
                values.len()
            )));
        }
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MepError::InvalidParameter(
                "step function boundaries must be strictly increasing".into(),
            ));
        }
        if boundaries.iter().chain(values.iter()).any(|x| !x.is_finite()) || !limit0.is_finite() {
            return Err(MepError::InvalidParameter(
                "step function entries must be finite".into(),
            ));
        }
        Ok(StepFn {
            boundaries,
            values,
            limit0,
        })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn limit0(&self) -> f64 {
        self.limit0
    }

    pub fn start(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn end(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(lo, hi, value)` over the pieces `(lo, hi]`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.boundaries
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// Value at `u`, for `u` in `(start, end]`.
    pub fn eval(&self, u: f64) -> f64 {
        assert!(
            u > self.start() && u <= self.end(),
            "step function argument {u} outside ({}, {}]",
            self.start(),
            self.end()
        );
        // number of boundaries strictly below u; piece index is that minus 1
        let i = self.boundaries.partition_point(|&b| b < u);
        self.values[i - 1]
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(lo, hi, v)| v * (hi - lo)).sum()
    }

    pub fn square_integral(&self) -> f64 {
        self.pieces().map(|(lo, hi, v)| v * v * (hi - lo)).sum()
    }

    /// True when `limit0 >= values[0]` and the values never increase.
    pub fn is_non_increasing(&self) -> bool {
        self.limit0 >= self.values[0] && self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> StepFn {
        StepFn::new(vec![0.0, 0.5, 1.0], vec![2.0, 1.0], 2.0).unwrap()
    }

    #[test]
    fn eval_uses_left_open_right_closed_pieces() {
        let s = f();
        assert_eq!(s.eval(0.25), 2.0);
        assert_eq!(s.eval(0.5), 2.0);
        assert_eq!(s.eval(0.5000001), 1.0);
        assert_eq!(s.eval(1.0), 1.0);
    }

    #[test]
    fn integrals() {
        let s = f();
        assert_eq!(s.integral(), 1.5);
        assert_eq!(s.square_integral(), 2.5);
        assert!(s.is_non_increasing());
    }

    #[test]
    fn rejects_bad_boundaries() {
        assert!(StepFn::new(vec![0.0, 0.0, 1.0], vec![1.0, 1.0], 1.0).is_err());
        assert!(StepFn::new(vec![0.0, 1.0], vec![], 0.0).is_err());
    }
}
