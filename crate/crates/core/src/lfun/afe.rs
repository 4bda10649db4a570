//! Completed L-function in the strip by a rotated-contour approximate
//! functional equation.
//!
//! With `κ = (k-1)/2`, `w₁ = s + κ`, `w₂ = 1 - s + κ` and
//! `Λ*(s) = (2π)^{-w₁} Γ(w₁) L(s)`,
//!
//! ```text
//! Λ*(s) = Σ λ(n) [ (2π)^{-w₁} n^{-s} Γ(w₁, 2πn e^{iθ})
//!                 + i^k (2π)^{-w₂} n^{s-1} Γ(w₂, 2πn e^{-iθ}) ]
//! ```
//!
//! for any `|θ| < π/2`. At height `t` the unrotated sum (`θ = 0`) cancels
//! down from terms of size `e^{π|t|/2}` relative to the result; turning the
//! contour to `θ = sgn(t)(π/2 - c/|t|)` caps that loss at about `e^c`.

use crate::numeric::compensated::{Accumulator, ComplexAccumulator};
use crate::numeric::gamma::ln_gamma;
use crate::numeric::incgamma::upper_gamma_scaled;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeConfig {
    /// Tolerated cancellation exponent `c` (terms may exceed the result by
    /// about `e^c`).
    pub cancellation: f64,
    /// Contour angle used when `|t|` is too small to need rotation.
    pub angle_offset: f64,
    /// Stop once the remaining terms are below this fraction of the sum.
    pub cutoff: f64,
}

impl Default for AfeConfig {
    fn default() -> Self {
        Self {
            cancellation: 8.0,
            angle_offset: 0.0,
            cutoff: 1e-18,
        }
    }
}

impl AfeConfig {
    /// A second, deliberately different contour for self-checks.
    pub fn alternate() -> Self {
        Self {
            cancellation: 6.0,
            angle_offset: 0.2,
            ..Self::default()
        }
    }
}

pub fn rotation_angle(t: f64, cfg: &AfeConfig) -> f64 {
    let delta = if t == 0.0 { FRAC_PI_2 } else { (cfg.cancellation / t.abs()).min(FRAC_PI_2) };
    if delta >= FRAC_PI_2 {
        cfg.angle_offset
    } else {
        t.signum() * (FRAC_PI_2 - delta)
    }
}

/// `Λ*(s) e^{-ln_scale}` with `ln_scale = Re ln Γ(s + κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeValue {
    pub scaled: Complex64,
    pub ln_scale: f64,
    /// Number of coefficients used.
    pub terms: usize,
    /// `Σ |term|`, the scale against which rounding error is measured.
    pub magnitude: f64,
    /// Bound on the neglected tail (same scaling as `scaled`).
    pub truncation: f64,
}

impl AfeValue {
    /// Absolute error estimate in the scaled units.
    pub fn error_estimate(&self) -> f64 {
        64.0 * f64::EPSILON * self.magnitude + self.truncation
    }
}

pub fn kappa(k: u32) -> f64 {
    (k as f64 - 1.0) / 2.0
}

pub fn lambda_star_scaled(lambda: &[f64], k: u32, s: Complex64, cfg: &AfeConfig) -> Result<AfeValue> {
    let kap = kappa(k);
    let w1 = s + kap;
    let w2 = 1.0 - s + kap;
    let ln_scale = ln_gamma(w1).re;
    let theta = rotation_angle(s.im, cfg);
    let rot = Complex64::from_polar(1.0, theta);
    let ik = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let two_pi = 2.0 * PI;
    let ln2pi = two_pi.ln();
    let cos_t = theta.cos();
    let decay = 1.0 / (1.0 - (-two_pi * cos_t).exp());
    let peak = |w: Complex64| ((w.re - 1.0).max(0.0) / (two_pi * cos_t)).ceil() as usize;
    let n_peak = peak(w1).max(peak(w2));
    let c1 = (-w1 * ln2pi).exp();
    let c2 = (-w2 * ln2pi).exp();

    let mut acc = ComplexAccumulator::new();
    let mut mag = Accumulator::new();
    let mut quiet = 0;
    let mut n = 1usize;
    loop {
        if n >= lambda.len() {
            let partial = acc.value().norm().max(f64::MIN_POSITIVE);
            return Err(Error::AccuracyNotReached {
                target: cfg.cutoff,
                achieved: mag.value() / partial,
            });
        }
        let ln_n = (n as f64).ln();
        let z = two_pi * n as f64;
        let g1 = upper_gamma_scaled(w1, z * rot, ln_scale).value;
        let g2 = upper_gamma_scaled(w2, z * rot.conj(), ln_scale).value;
        let t1 = c1 * (-s * ln_n).exp() * g1;
        let t2 = ik * c2 * ((s - 1.0) * ln_n).exp() * g2;
        let weight = t1.norm() + t2.norm();
        let l = lambda[n];
        acc.add(l * (t1 + t2));
        mag.add(l.abs() * weight);
        // Deligne: |λ(n)| ≤ d(n) ≤ 2√n
        let bound = weight * 2.0 * ((n + 1) as f64).sqrt() * decay;
        if n > n_peak && bound <= cfg.cutoff * acc.value().norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(AfeValue {
                    scaled: acc.value(),
                    ln_scale,
                    terms: n,
                    magnitude: mag.value(),
                    truncation: bound,
                });
            }
        } else {
            quiet = 0;
        }
        n += 1;
    }
}

/// `L(s)` from the scaled completed value.
pub fn l_from_scaled(v: &AfeValue, k: u32, s: Complex64) -> Complex64 {
    let w1 = s + kappa(k);
    let factor = (w1 * (2.0 * PI).ln() - ln_gamma(w1) + v.ln_scale).exp();
    v.scaled * factor
}

/// `|L(s)| / |Λ*(s) e^{-ln_scale}|`, the factor converting scaled errors into
/// errors on `L`.
pub fn l_factor_norm(k: u32, s: Complex64, ln_scale: f64) -> f64 {
    let w1 = s + kappa(k);
    (w1 * (2.0 * PI).ln() - ln_gamma(w1) + ln_scale).exp().norm()
}

/// Normalization of the completed function:
/// `Λ(s) = 2^{(3-k)/2} √π (2π)^{-s} Γ(s + κ) L(s) = 2^{(3-k)/2} √π (2π)^κ Λ*(s)`.
pub fn completed_constant(k: u32) -> f64 {
    let kap = kappa(k);
    2f64.powf((3.0 - k as f64) / 2.0) * PI.sqrt() * (2.0 * PI).powf(kap)
}
