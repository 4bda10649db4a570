//! Evaluations in the region of absolute convergence.

use crate::arith::primes::primes_up_to;
use crate::forms::Eigenform;
use crate::numeric::compensated::ComplexAccumulator;
use crate::{Error, Result};
use num_complex::Complex64;

/// `Σ_{n>N} d(n) n^{-σ}` bounded through `Σ_{n≤x} d(n) ≤ x(1 + log x)` and
/// partial summation. Valid for `σ > 1`, `N ≥ 1`.
pub fn divisor_tail_bound(n: usize, sigma: f64) -> f64 {
    let e = sigma - 1.0;
    let nf = n as f64;
    sigma * nf.powf(-e) * (nf.ln() / e + 1.0 / (e * e) + 1.0 / e)
}

/// `Σ_{n>N} log(n) n^{-σ} ≤ ∫_N^∞ log(u) u^{-σ} du` (for `N ≥ 3`).
pub fn log_tail_bound(n: usize, sigma: f64) -> f64 {
    let e = sigma - 1.0;
    let nf = n as f64;
    nf.powf(-e) * (nf.ln() / e + 1.0 / (e * e))
}

/// Smallest `N` (by doubling, then bisection) with `bound(N) ≤ target`, if
/// one exists below `limit`.
fn smallest_cutoff(limit: usize, target: f64, bound: impl Fn(usize) -> f64) -> std::result::Result<usize, f64> {
    if bound(limit) > target {
        return Err(bound(limit));
    }
    let mut hi = 3usize.min(limit);
    while hi < limit && bound(hi) > target {
        hi = (hi * 2).min(limit);
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if bound(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
    /// Rigorous bound on the neglected tail.
    pub tail_bound: f64,
}

pub fn dirichlet_terms_needed(limit: usize, sigma: f64, target: f64) -> std::result::Result<usize, f64> {
    smallest_cutoff(limit, target, |n| divisor_tail_bound(n, sigma))
}

/// `L(s) = Σ λ(n) n^{-s}` truncated where the divisor-bound tail is below
/// `target`.
pub fn l_value_abs_region(form: &Eigenform, s: Complex64, target: f64) -> Result<SeriesValue> {
    l_value_abs_region_limited(form, s, target, form.n_max())
}

/// As [`l_value_abs_region`], using at most `limit` coefficients.
pub fn l_value_abs_region_limited(form: &Eigenform, s: Complex64, target: f64, limit: usize) -> Result<SeriesValue> {
    if s.re <= 1.0 {
        return Err(Error::OutsideAbsoluteConvergence(s.re));
    }
    let n = dirichlet_terms_needed(limit.min(form.n_max()), s.re, target)
        .map_err(|achieved| Error::AccuracyNotReached { target, achieved })?;
    let lambda = form.lambda_table();
    let mut acc = ComplexAccumulator::new();
    for (m, &l) in lambda.iter().enumerate().take(n + 1).skip(1) {
        acc.add(l * (-s * (m as f64).ln()).exp());
    }
    Ok(SeriesValue {
        value: acc.value(),
        terms: n,
        tail_bound: divisor_tail_bound(n, s.re),
    })
}

/// `∏_{p≤P} (1 - λ(p) p^{-s} + p^{-2s})^{-1}`. The tail estimate
/// `2 Σ_{p>P} p^{-σ}` is heuristic (it ignores the `p^{-2σ}` terms' effect
/// on the logarithm and uses `π(x) ≤ 2x/log x`), so it is reported but never
/// relied on.
pub fn euler_product(form: &Eigenform, s: Complex64, p_max: u64) -> Result<SeriesValue> {
    if s.re <= 1.0 {
        return Err(Error::OutsideAbsoluteConvergence(s.re));
    }
    form.require(p_max)?;
    let primes = primes_up_to(p_max);
    let mut log_acc = ComplexAccumulator::new();
    for &p in &primes {
        let x = (-s * (p as f64).ln()).exp();
        let factor = 1.0 - form.lambda(p as usize) * x + x * x;
        log_acc.add(-factor.ln());
    }
    let e = s.re - 1.0;
    let pf = p_max as f64;
    Ok(SeriesValue {
        value: log_acc.value().exp(),
        terms: primes.len(),
        tail_bound: 2.0 * 2.0 * pf.powf(-e) / (e * pf.ln()),
    })
}

/// `Λ_f(n)` for `n ≤ n_max`: `(α₁^m + α₂^m) log p` at `n = p^m`, else 0.
pub fn von_mangoldt_f(form: &Eigenform, n_max: usize) -> Result<Vec<f64>> {
    form.require(n_max as u64)?;
    let mut out = vec![0.0; n_max + 1];
    for p in primes_up_to(n_max as u64) {
        let logp = (p as f64).ln();
        let (a1, a2) = form.local_params(p)?;
        let (mut x1, mut x2) = (a1, a2);
        let mut q = p as usize;
        loop {
            out[q] = (x1 + x2).re * logp;
            match q.checked_mul(p as usize) {
                Some(next) if next <= n_max => q = next,
                _ => break,
            }
            x1 *= a1;
            x2 *= a2;
        }
    }
    Ok(out)
}

/// `-L'/L(s) = Σ Λ_f(n) n^{-s}` with tail `≤ 2 Σ_{n>N} log(n) n^{-σ}`.
pub fn log_derivative_series(form: &Eigenform, s: Complex64, target: f64) -> Result<SeriesValue> {
    if s.re <= 1.0 {
        return Err(Error::OutsideAbsoluteConvergence(s.re));
    }
    let n = smallest_cutoff(form.n_max(), target, |n| 2.0 * log_tail_bound(n.max(3), s.re))
        .map_err(|achieved| Error::AccuracyNotReached { target, achieved })?
        .max(3.min(form.n_max()));
    let vm = von_mangoldt_f(form, n)?;
    let mut acc = ComplexAccumulator::new();
    for (m, &v) in vm.iter().enumerate().skip(2) {
        if v != 0.0 {
            acc.add(v * (-s * (m as f64).ln()).exp());
        }
    }
    Ok(SeriesValue {
        value: acc.value(),
        terms: n,
        tail_bound: 2.0 * log_tail_bound(n.max(3), s.re),
    })
}
