use super::CheckContext;
use crate::lfun::l_value_strip;
use crate::numeric::erfc;
use crate::numeric::quad::{simpson, simpson_piecewise};
use crate::report::{complex, real, Report, Status};
use crate::sums::PrefixTable;
use crate::{Error, Result};
use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;

/// Gaussian half-width, in standard deviations, of both integration ranges.
pub const GAUSSIAN_WIDTH: f64 = 12.0;
pub const PLANCHEREL_TOLERANCE: f64 = 1e-3;
/// Target for the rigorous truncation bound of the y-integral.
const ENVELOPE_TARGET: f64 = 1e-12;

/// Fourier transform of `exp(-T y²/2)`: `√(2π/T) exp(-ξ²/(2T))`.
pub fn gaussian_transform(xi: f64, t: f64) -> f64 {
    (2.0 * PI / t).sqrt() * (-xi * xi / (2.0 * t)).exp()
}

/// Bound on `√(2πT) ∫_Y^∞ |S(e^y)| e^{-y} exp(γy - Ty²/2) dy` from
/// `|S(x)| ≤ Σ_{n≤x} τ(n) ≤ x(1 + log x)`.
pub fn lhs_tail_bound(gamma: f64, t: f64, y: f64) -> f64 {
    let m = gamma / t;
    let u = y - m;
    if u <= 0.0 {
        return f64::INFINITY;
    }
    let inner = (-t * u * u / 2.0).exp() / t + (m + 1.0) * (PI / (2.0 * t)).sqrt() * erfc(u * (t / 2.0).sqrt());
    (2.0 * PI * t).sqrt() * (gamma * gamma / (2.0 * t)).exp() * inner
}

/// Upper end of the y-integral: the Gaussian cut `γ/T + 12/√T`, lowered to
/// where the rigorous tail bound falls below 1e-12.
pub fn y_cut(gamma: f64, t: f64) -> f64 {
    let gaussian = gamma / t + GAUSSIAN_WIDTH / t.sqrt();
    let mut y = gamma / t + 0.01;
    while y < gaussian {
        if lhs_tail_bound(gamma, t, y) <= ENVELOPE_TARGET {
            return y;
        }
        y += 0.01;
    }
    gaussian
}

/// Coefficients needed for the y-integral.
pub fn plancherel_coefficients(gamma: f64, t: f64) -> usize {
    y_cut(gamma, t).exp().floor() as usize
}

pub struct PlancherelSides {
    pub lhs: Complex64,
    pub lhs_quadrature: f64,
    pub lhs_truncation: f64,
    pub rhs: Complex64,
    pub rhs_quadrature: f64,
    pub rhs_truncation: f64,
    pub y_cut: f64,
    pub coefficients: usize,
    pub rhs_evaluations: usize,
}

fn validate(gamma: f64, t: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return Err(Error::invalid(format!("gamma = {gamma} outside (0, 1/2]")));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("T = {t} must be positive")));
    }
    Ok(())
}

/// `√(2πT) ∫ S(e^y, f, φ) e^{-y} exp(γy - Ty²/2) dy` with `S` piecewise
/// constant between `log n` and `log(n+1)`.
pub fn plancherel_lhs(ctx: &CheckContext, gamma: f64, t: f64, phi: f64) -> Result<(Complex64, f64, f64, f64, usize)> {
    validate(gamma, t)?;
    let cut = y_cut(gamma, t);
    let n_top = cut.exp().floor() as usize;
    ctx.form.require(n_top as u64)?;
    let table = PrefixTable::new(ctx.form, n_top, phi)?;
    let mut breaks: Vec<f64> = (1..=n_top).map(|n| (n as f64).ln()).collect();
    breaks.push(cut);
    let sums = table.values();
    let weight = |y: f64| ((gamma - 1.0) * y - t * y * y / 2.0).exp();
    let q = simpson_piecewise(|i, y| sums[i + 1] * weight(y), &breaks, ctx.quad_tol);
    let scale = (2.0 * PI * t).sqrt();
    Ok((q.value * scale, q.error * scale, lhs_tail_bound(gamma, t, cut), cut, n_top))
}

/// `∫ L(1-γ+i(φ+ξ)) / (1-γ+iξ) exp(-ξ²/(2T)) dξ` over `|ξ| ≤ 12√T`.
pub fn plancherel_rhs(ctx: &CheckContext, gamma: f64, t: f64, phi: f64) -> Result<(Complex64, f64, f64, usize)> {
    validate(gamma, t)?;
    let width = GAUSSIAN_WIDTH * t.sqrt();
    let integrand = |xi: f64| -> Result<Complex64> {
        let s = Complex64::new(1.0 - gamma, phi + xi);
        let l = l_value_strip(ctx.form, s, &ctx.params)?.value;
        Ok(l / Complex64::new(1.0 - gamma, xi) * (-xi * xi / (2.0 * t)).exp())
    };
    // the quadrature callback cannot fail, so errors are parked here
    let failure = std::cell::RefCell::new(None);
    let q = simpson(
        |xi| match integrand(xi) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        -width,
        width,
        ctx.quad_tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // tail estimate: boundary magnitude times the Gaussian tail mass
    let edge = integrand(width)?.norm().max(integrand(-width)?.norm()) / (-width * width / (2.0 * t)).exp();
    let mass = (2.0 * PI * t).sqrt() * erfc(GAUSSIAN_WIDTH / 2f64.sqrt());
    Ok((q.value, q.error, edge * mass, q.evaluations))
}

pub fn plancherel_sides(ctx: &CheckContext, gamma: f64, t: f64, phi: f64) -> Result<PlancherelSides> {
    let (lhs, lhs_quadrature, lhs_truncation, y_cut, coefficients) = plancherel_lhs(ctx, gamma, t, phi)?;
    let (rhs, rhs_quadrature, rhs_truncation, rhs_evaluations) = plancherel_rhs(ctx, gamma, t, phi)?;
    Ok(PlancherelSides {
        lhs,
        lhs_quadrature,
        lhs_truncation,
        rhs,
        rhs_quadrature,
        rhs_truncation,
        y_cut,
        coefficients,
        rhs_evaluations,
    })
}

pub fn plancherel_check(ctx: &CheckContext, gamma: f64, t: f64, phi: f64) -> Result<Report> {
    let sides = plancherel_sides(ctx, gamma, t, phi)?;
    let gap = (sides.lhs - sides.rhs).norm() / sides.rhs.norm();
    let mut r = Report::new("plancherel")
        .input("gamma", gamma)
        .input("T", t)
        .input("phi", phi)
        .input("weight", ctx.form.weight());
    r.lhs = complex(sides.lhs);
    r.rhs = complex(sides.rhs);
    r.ratio = real(gap);
    r.status = if gap < PLANCHEREL_TOLERANCE { Status::Pass } else { Status::Fail };
    r.error("lhs_quadrature", sides.lhs_quadrature);
    r.error("lhs_truncation", real(sides.lhs_truncation));
    r.error("rhs_quadrature", sides.rhs_quadrature);
    r.error("rhs_truncation", real(sides.rhs_truncation));
    r.meta("relative_gap", real(gap));
    r.meta("tolerance", PLANCHEREL_TOLERANCE);
    r.meta("y_cut", sides.y_cut);
    r.meta("coefficients", sides.coefficients);
    r.meta("rhs_evaluations", sides.rhs_evaluations);
    r.meta("xi_range", json!([-GAUSSIAN_WIDTH * t.sqrt(), GAUSSIAN_WIDTH * t.sqrt()]));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::simpson_real;

    #[test]
    fn gaussian_transform_at_zero() {
        assert!((gaussian_transform(0.0, 2.0) - PI.sqrt()).abs() < 1e-15);
        let q = simpson_real(|y| (-y * y).exp(), -12.0, 12.0, 1e-13);
        assert!((q.value - gaussian_transform(0.0, 2.0)).abs() < 1e-11);
    }

    #[test]
    fn tail_bound_decreases_and_cut_is_small() {
        assert!(lhs_tail_bound(0.3, 1.0, 8.0) < lhs_tail_bound(0.3, 1.0, 6.0));
        let cut = y_cut(0.3, 1.0);
        assert!(cut <= 0.3 + 12.0);
        assert!(lhs_tail_bound(0.3, 1.0, cut) <= ENVELOPE_TARGET);
        assert!(plancherel_coefficients(0.5, 0.5) < 250_000);
    }
}
