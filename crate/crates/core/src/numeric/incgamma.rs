//! Upper incomplete gamma function for complex shape and argument.
//!
//! `Γ(a, z) = ∫_z^∞ e^{-u} u^{a-1} du` for `Re z > 0`. Large `|z|` uses the
//! Legendre continued fraction (modified Lentz); small `|z|` uses
//! `Γ(a) - γ(a, z)` with the power series for the lower function. The
//! switchover sits at `|z| = |a| + 1`, the complex analogue of the usual
//! `x = a + 1` rule.
//!
//! Results are returned scaled by `e^{-ln_scale}` so callers working far up
//! the critical strip, where `|Γ(a, z)|` is astronomically small, can keep
//! everything inside the double-precision range.

use super::gamma::ln_gamma;
use num_complex::Complex64;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncGamma {
    /// `Γ(a, z) e^{-ln_scale}`.
    pub value: Complex64,
    pub iterations: usize,
}

/// `Γ(a, z) · e^{-ln_scale}`.
pub fn upper_gamma_scaled(a: Complex64, z: Complex64, ln_scale: f64) -> IncGamma {
    debug_assert!(z.re > 0.0, "upper_gamma_scaled requires Re z > 0");
    if z.norm() > a.norm() + 1.0 {
        continued_fraction(a, z, ln_scale)
    } else {
        let lower = lower_series(a, z, ln_scale);
        let full = (ln_gamma(a) - ln_scale).exp();
        IncGamma {
            value: full - lower.value,
            iterations: lower.iterations,
        }
    }
}

pub fn upper_gamma(a: Complex64, z: Complex64) -> Complex64 {
    upper_gamma_scaled(a, z, 0.0).value
}

fn prefactor(a: Complex64, z: Complex64, ln_scale: f64) -> Complex64 {
    (a * z.ln() - z - ln_scale).exp()
}

fn continued_fraction(a: Complex64, z: Complex64, ln_scale: f64) -> IncGamma {
    let tiny = Complex64::new(TINY, 0.0);
    let mut b = z + 1.0 - a;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut iterations = 0;
    for i in 1..=MAX_ITER {
        iterations = i;
        let an = -(i as f64) * (Complex64::new(i as f64, 0.0) - a);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = d.inv();
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < EPS {
            break;
        }
    }
    IncGamma {
        value: prefactor(a, z, ln_scale) * h,
        iterations,
    }
}

fn lower_series(a: Complex64, z: Complex64, ln_scale: f64) -> IncGamma {
    let mut ap = a;
    let mut del = a.inv();
    let mut sum = del;
    let mut iterations = 0;
    for i in 1..=MAX_ITER {
        iterations = i;
        ap += 1.0;
        del = del * z / ap;
        sum += del;
        if del.norm() < sum.norm() * EPS {
            break;
        }
    }
    IncGamma {
        value: prefactor(a, z, ln_scale) * sum,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Reference values from tools/reference_values.py (mpmath, 60 digits).
    #[test]
    fn matches_high_precision_reference() {
        let cases = [
            (c(6.5, 30.0), c(3.0, 12.0), c(4.467_149_837_823_323e-12, -4.915_707_087_092_314e-12)),
            (c(6.0, 0.0), c(2.0 * PI, 0.0), c(48.159_571_660_454_21, 0.0)),
            (c(7.2, 40.0), c(1.0, 6.0), c(-2.050_177_705_107_598_5e-17, -6.927_056_856_837_953e-17)),
        ];
        for (a, z, expect) in cases {
            let got = upper_gamma(a, z);
            assert!(rel(got, expect) < 1e-11, "a={a} z={z}: {got} vs {expect}");
        }
    }

    #[test]
    fn scaled_far_up_the_line() {
        let a = c(17.5, -191.0);
        let z = c(20.0, -190.0);
        let expect = c(-3.138_580_090_526_814e-92, -1.746_534_645_157_047_5e-92);
        let scale = -200.0;
        let got = upper_gamma_scaled(a, z, scale).value * f64::exp(scale);
        assert!(rel(got, expect) < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn integer_shape_closed_form() {
        // Γ(n, x) = (n-1)! e^{-x} Σ_{k<n} x^k / k!
        for &x in &[0.3, 2.0, 7.5, 30.0] {
            let n = 5;
            let mut s = 0.0;
            let mut term = 1.0;
            for k in 0..n {
                if k > 0 {
                    term *= x / k as f64;
                }
                s += term;
            }
            let exact = 24.0 * (-x).exp() * s;
            let got = upper_gamma(c(n as f64, 0.0), c(x, 0.0));
            assert!(rel(got, c(exact, 0.0)) < 1e-13, "x={x}");
        }
    }

    #[test]
    fn branches_agree_at_switchover() {
        let a = c(8.0, 3.0);
        let z = c(a.norm() + 1.0, 0.5);
        let cf = continued_fraction(a, z, 0.0).value;
        let series = (ln_gamma(a)).exp() - lower_series(a, z, 0.0).value;
        assert!(rel(cf, series) < 1e-12);
    }
}
