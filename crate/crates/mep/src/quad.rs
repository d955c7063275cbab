//! Small adaptive-quadrature helper used for cross-checks and the coordinated
//! simulator's general-p integrals.

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        // keep the per-half tolerance above rounding noise so the recursion
        // terminates even when the requested tolerance is unattainable
        let child = (0.5 * tol).max(f64::EPSILON * whole.abs());
        rec(f, a, m, fa, flm, fm, left, child, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, child, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol` (depth-capped; `f` must be finite on the closed interval).
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, b - a);
    rec(&f, a, b, fa, fm, fb, whole, tol, 28)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_power_singularity_well() {
        // ∫_0^1 x^{-1/2} dx = 2 is too hard without substitution, but the
        // smoothed variant after u = t² is exact-ish.
        let v = adaptive_simpson(|t| 2.0 * t * (t * t).sqrt().recip().min(1e8), 1e-8, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-6);
    }
}
