//! Reference computations that share no code with the crate under test.

#![allow(dead_code)]

use offload_core::EnergyModel;

/// Two-pass population moments: (mean, sum of squared deviations, sum of cubed deviations).
pub fn batch_central(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum();
    (mean, m2, m3)
}

pub fn batch_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (_, m2, m3) = batch_central(xs);
    (m3 / n) / (m2 / n).powf(1.5)
}

/// Skewness from raw moments: (E[X^3] - 3 E[X] Var[X] - E[X]^3) / Var[X]^(3/2).
pub fn raw_moment_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let e1 = xs.iter().sum::<f64>() / n;
    let e2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let e3 = xs.iter().map(|x| x * x * x).sum::<f64>() / n;
    let var = e2 - e1 * e1;
    (e3 - 3.0 * e1 * var - e1.powi(3)) / var.powf(1.5)
}

/// `|a - b| <= tol * max(|a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Relative tolerance with a floor of one, for dimensionless O(1) quantities
/// that may legitimately sit at zero.
pub fn unit_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// The raw per-round energy inequality, unrearranged.
pub fn energy_fits(f: &EnergyModel, t0: f64, ta: f64, ts: f64, tp: f64, tc: f64, n: i64) -> bool {
    let e = |t: f64| f.evaluate(t);
    (n + 1) as f64 * e(tp) + e(ta) + e(ts) + 2.0 * (n + 1) as f64 * e(tc) <= e(t0)
}

/// Largest `n` in `0..=limit` satisfying the raw inequality, by exhaustive search.
pub fn max_cohort_brute(
    f: &EnergyModel,
    t0: f64,
    ta: f64,
    ts: f64,
    tp: f64,
    tc: f64,
    limit: i64,
) -> Option<i64> {
    (0..=limit)
        .rev()
        .find(|&n| energy_fits(f, t0, ta, ts, tp, tc, n))
}
