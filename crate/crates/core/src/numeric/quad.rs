//! Adaptive Simpson quadrature with a running error estimate.

use num_complex::Complex64;

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Sum of the per-panel Richardson error estimates.
    pub error: f64,
    pub evaluations: usize,
}

/// Integrate a complex-valued `f` over `[a, b]` with absolute tolerance `tol`.
pub fn simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Quadrature<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut evals = 3usize;
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut evals, &mut err);
    Quadrature {
        value,
        error: err,
        evaluations: evals,
    }
}

/// Real-valued convenience wrapper around [`simpson`].
pub fn simpson_real<F>(f: F, a: f64, b: f64, tol: f64) -> Quadrature<f64>
where
    F: Fn(f64) -> f64,
{
    let q = simpson(|x| Complex64::new(f(x), 0.0), a, b, tol);
    Quadrature {
        value: q.value.re,
        error: q.error,
        evaluations: q.evaluations,
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
    err: &mut f64,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol || (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
        *err += delta.norm() / 15.0;
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, err)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, err)
}

/// Adaptive Simpson on each of the consecutive subintervals given by
/// `breaks`; the tolerance is shared out in proportion to interval length.
/// `f(i, x)` receives the index of the piece so that jump discontinuities at
/// the breaks are never sampled from the wrong side.
pub fn simpson_piecewise<F>(f: F, breaks: &[f64], tol: f64) -> Quadrature<Complex64>
where
    F: Fn(usize, f64) -> Complex64,
{
    let mut out = Quadrature {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        evaluations: 0,
    };
    if breaks.len() < 2 {
        return out;
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    let mut acc = super::compensated::ComplexAccumulator::new();
    for (i, w) in breaks.windows(2).enumerate() {
        let q = simpson(|x| f(i, x), w[0], w[1], tol * (w[1] - w[0]) / span);
        acc.add(q.value);
        out.error += q.error;
        out.evaluations += q.evaluations;
    }
    out.value = acc.value();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_integral() {
        let q = simpson_real(|x| (-x * x / 2.0).exp(), -12.0, 12.0, 1e-12);
        assert!((q.value - (2.0 * PI).sqrt()).abs() < 1e-11);
        assert!(q.error < 1e-10);
    }

    #[test]
    fn polynomial_is_exact() {
        let q = simpson_real(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-9);
        assert!((q.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        let q = simpson(|x| Complex64::new(0.0, 5.0 * x).exp(), 0.0, PI, 1e-11);
        let exact = (Complex64::new(0.0, 5.0 * PI).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((q.value - exact).norm() < 1e-10);
    }

    #[test]
    fn step_function_piecewise() {
        let breaks = [0.0, 1.0, 2.0, 3.0];
        let q = simpson_piecewise(|i, x| Complex64::new((i + 1) as f64 * x, 0.0), &breaks, 1e-10);
        // 1*(1/2) + 2*(3/2) + 3*(5/2)
        assert!((q.value.re - 11.0).abs() < 1e-12);
    }
}
