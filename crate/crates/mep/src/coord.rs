//! Coordinated PPS sampling of two keyed value rows and unbiased estimation
//! of per-key exponentiated ranges `|v1 − v2|^p` and their sum (the L_p^p
//! aggregate).
//!
//! Each key gets one hashed seed `u`; a row's value is included iff
//! `v >= u`. The per-key estimate is the αL* estimator for the continuous
//! lower-bound profile `f̲(x) = (w_max − x)^p` on `(w_min, w_max]`, whose
//! drop density `p·(w_max − y)^{p−1}` is computable from the outcome alone
//! (one-known-coordinate reduction).

use serde::Serialize;

use crate::error::{MepError, Result};
use crate::quad::adaptive_simpson;

/// Smallest seed used in estimate evaluation (the hash resolution floor);
/// keeps the `y^{−α}` integrals finite on the measure-zero event `u = 0`.
const SEED_FLOOR: f64 = 1.0 / 9007199254740992.0; // 2^-53

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
}

fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn next_u64(state: &mut u64) -> u64 {
    splitmix64(state);
    splitmix64_mix(*state)
}

/// Deterministic uniform-approximating map from `(key, salt)` to `[0, 1)`
/// with 53 bits of resolution (FNV-1a keyed hash finished with splitmix64).
pub fn hash_seed(key: &str, salt: u64) -> f64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    let mixed = splitmix64_mix(h ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (mixed >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Two aligned nonnegative value rows over a shared key column, normalized
/// to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedDataset {
    keys: Vec<String>,
    row1: Vec<f64>,
    row2: Vec<f64>,
}

impl KeyedDataset {
    pub fn new(keys: Vec<String>, row1: Vec<f64>, row2: Vec<f64>) -> Result<Self> {
        if keys.len() != row1.len() || keys.len() != row2.len() {
            return Err(MepError::InvalidParameter(
                "dataset rows must have one value per key".into(),
            ));
        }
        if row1
            .iter()
            .chain(row2.iter())
            .any(|&v| !(0.0..=1.0).contains(&v))
        {
            return Err(MepError::InvalidParameter(
                "dataset values must lie in [0, 1] (rescale inputs)".into(),
            ));
        }
        Ok(KeyedDataset { keys, row1, row2 })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn rows(&self) -> (&[f64], &[f64]) {
        (&self.row1, &self.row2)
    }

    /// Parses the `key,v1,v2` CSV format (header required).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("key,v1,v2") => {}
            other => {
                return Err(MepError::Parse(format!(
                    "expected header 'key,v1,v2', got {other:?}"
                )))
            }
        }
        let mut keys = Vec::new();
        let mut row1 = Vec::new();
        let mut row2 = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(MepError::Parse(format!(
                    "line {}: expected 3 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| MepError::Parse(format!("line {}: {e}", i + 2)))
            };
            keys.push(fields[0].to_string());
            row1.push(parse(fields[1])?);
            row2.push(parse(fields[2])?);
        }
        KeyedDataset::new(keys, row1, row2)
    }

    /// `Σ_keys |v1 − v2|^p` — the exact aggregate being estimated.
    pub fn lpp_truth(&self, p: f64) -> f64 {
        self.row1
            .iter()
            .zip(&self.row2)
            .map(|(&a, &b)| (a - b).abs().powf(p))
            .sum()
    }
}

/// Per-key coordinated sample: one seed, per-row inclusion (`v >= u`) with
/// the value when included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub seed: f64,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
}

/// Samples both rows with the shared per-key seed `hash_seed(key, salt)`.
pub fn coordinated_sample(ds: &KeyedDataset, salt: u64) -> Vec<SampleRecord> {
    ds.keys
        .iter()
        .zip(ds.row1.iter().zip(&ds.row2))
        .map(|(key, (&a, &b))| {
            let u = hash_seed(key, salt);
            SampleRecord {
                seed: u,
                v1: (a >= u).then_some(a),
                v2: (b >= u).then_some(b),
            }
        })
        .collect()
}

fn check_params(p: f64, alpha: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(MepError::InvalidParameter(format!("p = {p} must be > 0")));
    }
    if alpha < 1.0 || !alpha.is_finite() {
        return Err(MepError::InvalidParameter(format!(
            "alpha = {alpha} must be >= 1"
        )));
    }
    Ok(())
}

/// `∫_l^w y^{−α} p (w − y)^{p−1} dy`; closed forms for p ∈ {1, 2} (with log
/// branches at α ∈ {1, 2}), adaptive quadrature otherwise.
fn tail_integral(l: f64, w: f64, p: f64, alpha: f64) -> f64 {
    if w <= l {
        return 0.0;
    }
    if p == 1.0 {
        return if alpha == 1.0 {
            (w / l).ln()
        } else {
            (l.powf(1.0 - alpha) - w.powf(1.0 - alpha)) / (alpha - 1.0)
        };
    }
    if p == 2.0 {
        // 2w ∫ y^{−α} − 2 ∫ y^{1−α}
        let j0 = if alpha == 1.0 {
            (w / l).ln()
        } else {
            (w.powf(1.0 - alpha) - l.powf(1.0 - alpha)) / (1.0 - alpha)
        };
        let j1 = if alpha == 2.0 {
            (w / l).ln()
        } else {
            (w.powf(2.0 - alpha) - l.powf(2.0 - alpha)) / (2.0 - alpha)
        };
        return 2.0 * w * j0 - 2.0 * j1;
    }
    // substitution s = (w − y)^p turns the (w − y)^{p−1} weight into ds
    adaptive_simpson(
        |s| (w - s.powf(1.0 / p)).max(l).powf(-alpha),
        0.0,
        (w - l).powf(p),
        1e-10,
    )
}

fn estimate_at_seed(u: f64, v1: Option<f64>, v2: Option<f64>, p: f64, alpha: f64) -> f64 {
    let (w_max, w_min) = match (v1, v2) {
        (None, None) => return 0.0,
        (Some(a), Some(b)) => (a.max(b), a.min(b)),
        (Some(a), None) => (a, 0.0),
        (None, Some(b)) => (b, 0.0),
    };
    let u = u.max(SEED_FLOOR);
    let l = u.max(w_min);
    alpha * u.powf(alpha - 1.0) * tail_integral(l, w_max, p, alpha)
}

/// Unbiased nonnegative estimate of `|v1 − v2|^p` from one key's outcome.
pub fn estimate_rgp_key(rec: &SampleRecord, p: f64, alpha: f64) -> Result<f64> {
    check_params(p, alpha)?;
    Ok(estimate_at_seed(rec.seed, rec.v1, rec.v2, p, alpha))
}

/// One-shot estimate of the L_p^p aggregate under salt `salt`.
pub fn estimate_lpp(ds: &KeyedDataset, salt: u64, p: f64, alpha: f64) -> Result<f64> {
    check_params(p, alpha)?;
    Ok(coordinated_sample(ds, salt)
        .iter()
        .map(|rec| estimate_at_seed(rec.seed, rec.v1, rec.v2, p, alpha))
        .sum())
}

/// Empirical bias report over repeated simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasReport {
    pub truth: f64,
    pub mean: f64,
    pub stderr: f64,
    pub reps: usize,
}

/// Repeats `estimate_lpp` under `reps` independent salts derived from
/// `rng_seed` and reports the sample mean and its standard error against the
/// exact aggregate.
pub fn empirical_bias(
    ds: &KeyedDataset,
    p: f64,
    alpha: f64,
    reps: usize,
    rng_seed: u64,
) -> Result<BiasReport> {
    check_params(p, alpha)?;
    if reps < 2 {
        return Err(MepError::InvalidParameter(
            "reps must be >= 2 (the standard error is undefined otherwise)".into(),
        ));
    }
    let mut state = rng_seed;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..reps {
        let salt = next_u64(&mut state);
        let x = estimate_lpp(ds, salt, p, alpha)?;
        sum += x;
        sumsq += x * x;
    }
    let mean = sum / reps as f64;
    let var = ((sumsq - sum * sum / reps as f64) / (reps as f64 - 1.0)).max(0.0);
    Ok(BiasReport {
        truth: ds.lpp_truth(p),
        mean,
        stderr: (var / reps as f64).sqrt(),
        reps,
    })
}

/// `∫_0^1 estimate(u) du − |v1 − v2|^p` by seed quadrature (the substitution
/// `u = t²` tames the logarithmic endpoint at 0).
pub fn seed_unbiasedness_residual(v1: f64, v2: f64, p: f64, alpha: f64) -> Result<f64> {
    check_params(p, alpha)?;
    let est = |u: f64| {
        let iv1 = (v1 >= u).then_some(v1);
        let iv2 = (v2 >= u).then_some(v2);
        estimate_at_seed(u, iv1, iv2, p, alpha)
    };
    let g = |t: f64| 2.0 * t * est(t * t);
    // integrate piecewise between the inclusion breakpoints
    let mut cuts = vec![0.0, v1.min(v2).sqrt(), v1.max(v2).sqrt(), 1.0];
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += adaptive_simpson(g, w[0] + 1e-14, w[1], 1e-9);
        }
    }
    Ok(total - (v1 - v2).abs().powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_seed_is_deterministic_and_salt_sensitive() {
        let a = hash_seed("key-17", 42);
        assert_eq!(a, hash_seed("key-17", 42));
        assert!((0.0..1.0).contains(&a));
        assert_ne!(a, hash_seed("key-17", 43));
        assert_ne!(a, hash_seed("key-18", 42));
    }

    #[test]
    fn hash_seed_is_roughly_uniform() {
        // Kolmogorov–Smirnov at 99%: D_n < 1.63/sqrt(n)
        let n = 100_000usize;
        let mut seeds: Vec<f64> = (0..n).map(|i| hash_seed(&format!("k{i}"), 7)).collect();
        seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = seeds
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let lo = i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64;
                (s - lo).abs().max((s - hi).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn different_salts_decorrelate() {
        let n = 100_000usize;
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let key = format!("k{i}");
            let x = hash_seed(&key, 1);
            let y = hash_seed(&key, 2);
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let n = n as f64;
        let r = (sxy - sx * sy / n) / ((sxx - sx * sx / n).sqrt() * (syy - sy * sy / n).sqrt());
        assert!(r.abs() < 0.02, "correlation {r}");
    }

    #[test]
    fn coordination_properties() {
        let ds = KeyedDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.6, 1.0, 0.0],
            vec![0.6, 0.3, 0.0],
        )
        .unwrap();
        let recs = coordinated_sample(&ds, 11);
        // identical values -> identical inclusion
        assert_eq!(recs[0].v1.is_some(), recs[0].v2.is_some());
        // v = 1 always included, v = 0 (essentially) never
        assert_eq!(recs[1].v1, Some(1.0));
        assert_eq!(recs[2].v1, None);
        assert_eq!(recs[2].v2, None);
    }

    #[test]
    fn inclusion_agreement_fraction_on_seed_grid() {
        let (v1, v2) = (0.3, 0.8);
        let n = 100_000;
        let agree = (0..n)
            .filter(|i| {
                let u = (*i as f64 + 0.5) / n as f64;
                (v1 >= u) == (v2 >= u)
            })
            .count() as f64
            / n as f64;
        let expected = v1.min(v2) + (1.0 - v1.max(v2));
        assert!((agree - expected).abs() < 1e-4);
    }

    #[test]
    fn csv_roundtrip_and_validation() {
        let ds = KeyedDataset::from_csv("key,v1,v2\na,0.5,0.25\nb,1,0\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.rows().0, &[0.5, 1.0]);
        assert!(KeyedDataset::from_csv("k,v1,v2\na,0.5,0.25\n").is_err());
        assert!(KeyedDataset::from_csv("key,v1,v2\na,2.0,0.25\n").is_err());
        assert!(KeyedDataset::from_csv("key,v1,v2\na,0.5\n").is_err());
    }

    #[test]
    fn equal_rows_estimate_zero() {
        let rec = SampleRecord {
            seed: 0.4,
            v1: Some(0.7),
            v2: Some(0.7),
        };
        assert_eq!(estimate_rgp_key(&rec, 2.0, 1.5).unwrap(), 0.0);
        let rec = SampleRecord {
            seed: 0.9,
            v1: None,
            v2: None,
        };
        assert_eq!(estimate_rgp_key(&rec, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn log_estimate_for_disjoint_support() {
        // p = 1, α = 1, row2 = 0, seed u <= v1: estimate ln(v1/u)
        let v1 = 0.8;
        for &u in &[0.1, 0.25, 0.5, 0.8] {
            let rec = SampleRecord {
                seed: u,
                v1: Some(v1),
                v2: None,
            };
            let e = estimate_rgp_key(&rec, 1.0, 1.0).unwrap();
            assert!((e - (v1 / u).ln()).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        use crate::quad::adaptive_simpson;
        for &(p, alpha) in &[(1.0, 1.0), (1.0, 1.5), (2.0, 1.0), (2.0, 1.5), (2.0, 2.0)] {
            for &(l, w) in &[(0.2, 0.9), (0.5, 0.6), (0.05, 1.0)] {
                let exact = tail_integral(l, w, p, alpha);
                let quad = adaptive_simpson(
                    |y| y.powf(-alpha) * p * (w - y).powf(p - 1.0),
                    l,
                    w,
                    1e-12,
                );
                assert!(
                    (exact - quad).abs() < 1e-8,
                    "p {p} alpha {alpha} l {l} w {w}: {exact} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn general_p_matches_p2_closed_form_continuously() {
        // quadrature path (p = 1.999…) should approach the p = 2 closed form
        let a = tail_integral(0.3, 0.9, 1.9999999, 1.5);
        let b = tail_integral(0.3, 0.9, 2.0, 1.5);
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn per_key_unbiasedness_by_quadrature() {
        for &(p, alpha) in &[(1.0, 1.0), (1.0, 1.5), (2.0, 1.0), (2.0, 1.5), (1.3, 1.25)] {
            for &(v1, v2) in &[(0.9, 0.2), (0.5, 0.0), (1.0, 0.4), (0.35, 0.3)] {
                let r = seed_unbiasedness_residual(v1, v2, p, alpha).unwrap();
                assert!(
                    r.abs() < 1e-6,
                    "p {p} alpha {alpha} ({v1}, {v2}): residual {r}"
                );
            }
        }
    }

    #[test]
    fn empirical_bias_requires_reps() {
        let ds = KeyedDataset::new(vec!["a".into()], vec![0.5], vec![0.0]).unwrap();
        assert!(empirical_bias(&ds, 1.0, 1.0, 1, 3).is_err());
        let rep = empirical_bias(&ds, 1.0, 1.0, 2000, 3).unwrap();
        assert!((rep.truth - 0.5).abs() < 1e-12);
        assert!((rep.mean - rep.truth).abs() < 4.0 * rep.stderr + 1e-9);
    }

    #[test]
    fn estimates_are_nonnegative() {
        let ds = KeyedDataset::new(
            (0..50).map(|i| format!("k{i}")).collect(),
            (0..50).map(|i| (i as f64 / 49.0)).collect(),
            (0..50).map(|i| ((49 - i) as f64 / 49.0)).collect(),
        )
        .unwrap();
        for salt in 0..20 {
            for rec in coordinated_sample(&ds, salt) {
                assert!(estimate_rgp_key(&rec, 1.5, 1.25).unwrap() >= 0.0);
            }
        }
    }
}
