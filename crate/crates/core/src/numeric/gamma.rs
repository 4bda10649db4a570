//! Complex log-gamma and digamma.
//!
//! Both use the Stirling series after shifting the argument to `Re z >= 16`;
//! the principal branch of `ln_gamma` is continuous on `Re z > 0`, which the
//! zero-counting code relies on.

use num_complex::Complex64;
use std::f64::consts::PI;

const SHIFT_TO: f64 = 16.0;

// B_{2k} for k = 1..=8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn stirling_ln_gamma(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut acc = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut pow = zinv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        acc += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= zinv2;
    }
    acc
}

/// Principal branch of `ln Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    if z.re >= SHIFT_TO {
        return stirling_ln_gamma(z);
    }
    let shift = (SHIFT_TO - z.re).ceil() as u32;
    // one logarithm of the product keeps the real part accurate; the
    // argument is summed term by term to stay on the principal branch
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    for j in 0..shift {
        let w = z + j as f64;
        prod *= w;
        arg += w.arg();
    }
    stirling_ln_gamma(z + shift as f64) - Complex64::new(prod.norm().ln(), arg)
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// Digamma ψ(z) for `Re z > 0`.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut shift_sum = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift_sum += w.inv();
        w += 1.0;
    }
    let winv = w.inv();
    let winv2 = winv * winv;
    let mut acc = w.ln() - 0.5 * winv;
    let mut pow = winv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        acc -= pow * (b / (2.0 * k));
        pow *= winv2;
    }
    acc - shift_sum
}
