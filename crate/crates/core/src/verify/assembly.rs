use super::explicit::HEIGHT_MARGIN;
use super::CheckContext;
use crate::lfun::{corollary12_region_count, disc_zero_count, zero_sum, ZeroTable};
use crate::numeric::compensated::Accumulator;
use crate::pretentious::{find_phi, lipschitz_exponent, FormFunction, PhiResult};
use crate::report::{complex, real, Report, Status};
use crate::sums::{partial_sum, PrefixTable};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;

/// Subdivisions of the ξ-window on each side of zero.
pub const WINDOW_STEPS: usize = 200;

/// `2 √(γ log(k^γ log k) / y₀)`.
pub fn xi_window(k: u32, gamma: f64, y0: f64) -> f64 {
    let lk = (k as f64).ln();
    2.0 * (gamma * (gamma * lk + lk.ln()) / y0).sqrt()
}

/// Disc radius `L log(k (log k)^{1/γ}) / (log x)²` with `γ = L / (100 log x)`.
pub fn theorem1_radius(k: u32, x: f64, l_param: f64) -> f64 {
    let lx = x.ln();
    let gamma = l_param / (100.0 * lx);
    let lk = (k as f64).ln();
    l_param * (lk + lk.ln() / gamma) / (lx * lx)
}

/// The `L` giving disc radius `radius`, if any. The radius equals
/// `100 (γ log k + log log k) / log x`, so radii below
/// `100 log log k / log x` are out of reach.
pub fn theorem1_l_for_radius(k: u32, x: f64, radius: f64) -> Option<f64> {
    let lx = x.ln();
    let lk = (k as f64).ln();
    let gamma = (radius * lx / 100.0 - lk.ln()) / lk;
    (gamma > 0.0).then_some(100.0 * gamma * lx)
}

pub fn theorem1_min_radius(k: u32, x: f64) -> f64 {
    100.0 * (k as f64).ln().ln() / x.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowMax {
    pub window: f64,
    pub xi: f64,
    pub sum: f64,
    pub tail_bound: f64,
}

/// Maximizes `Σ_ρ γ / |1 + γ + i(φ + ξ) - ρ|²` over `|ξ| ≤ window` on a grid of
/// step `window / 200`; the first maximum wins.
pub fn window_max(table: &ZeroTable, k: u32, gamma: f64, phi: f64, window: f64) -> Result<WindowMax> {
    let step = window / WINDOW_STEPS as f64;
    let mut best: Option<WindowMax> = None;
    for j in 0..=2 * WINDOW_STEPS {
        let xi = if window == 0.0 { 0.0 } else { -window + j as f64 * step };
        let zs = zero_sum(table, k, gamma, phi, xi)?;
        if best.is_none_or(|b| zs.sum > b.sum) {
            best = Some(WindowMax {
                window,
                xi,
                sum: zs.sum,
                tail_bound: zs.tail_bound,
            });
        }
        if window == 0.0 {
            break;
        }
    }
    Ok(best.expect("at least one grid point"))
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "satisfied"
    } else {
        "violated"
    }
}

fn phi_for(ctx: &CheckContext, x: f64) -> Result<PhiResult> {
    find_phi(&FormFunction::new(ctx.form, ctx.params), x)
}

pub fn prop43_pipeline(ctx: &CheckContext, y0: f64, gamma: f64) -> Result<Report> {
    if !(gamma > 0.0 && gamma <= 0.4) {
        return Err(Error::invalid(format!("gamma = {gamma} outside (0, 2/5]")));
    }
    if !(y0 > 0.0) {
        return Err(Error::invalid("y0 must be positive"));
    }
    let table = ctx.zeros()?;
    let k = ctx.form.weight();
    let x = y0.exp();
    let s = partial_sum(ctx.form, x)?;
    if s == 0.0 {
        return Err(Error::QUndefined(x));
    }
    let q = y0 * x / s.abs();
    let phi = phi_for(ctx, x)?;
    let window = xi_window(k, gamma, y0);
    let best = window_max(table, k, gamma, phi.phi, window)?;
    let target = y0 / 4.0;
    let top = phi.phi.abs() + window + HEIGHT_MARGIN;

    let mut r = Report::new("prop43").input("y0", y0).input("gamma", gamma).input("weight", k);
    r.lhs = real(best.sum);
    r.rhs = real(target);
    r.ratio = real(best.sum / target);
    r.status = if table.height_scanned < top { Status::Warning } else { Status::Reported };
    r.error("zero_sum_tail", real(best.tail_bound));
    r.meta("Q", q);
    r.meta("sum_S", s);
    r.meta("phi", serde_json::to_value(phi).expect("serializable"));
    r.meta("T", gamma / y0);
    r.meta("xi_window", window);
    r.meta("xi_star", best.xi);
    r.meta("exceeds_y0_over_4", best.sum >= target);
    r.meta("exceeds_with_tail", best.sum + best.tail_bound >= target);
    r.meta("hypothesis_size", flag(q <= y0.powf(0.01)));
    r.meta("hypothesis_gamma_upper", flag(gamma <= 0.4));
    // γ ≥ C Q³ / y₀ holds exactly for C up to this value
    r.meta("largest_admissible_C", gamma * y0 / q.powi(3));
    if table.height_scanned < top {
        r.meta("warning", format!("zero table height {} below {top}", table.height_scanned));
    }
    Ok(r)
}

pub fn theorem1_explorer(ctx: &CheckContext, x: f64, l_param: f64) -> Result<Report> {
    let table = ctx.zeros()?;
    let k = ctx.form.weight();
    if !(x > 1.0) || !(l_param > 0.0) {
        return Err(Error::invalid("theorem1 explorer needs x > 1 and L > 0"));
    }
    let lx = x.ln();
    let gamma = l_param / (100.0 * lx);
    if gamma > 1.0 {
        return Err(Error::invalid(format!("L = {l_param} gives gamma = {gamma} above 1")));
    }
    let s = partial_sum(ctx.form, x)?;
    let q = if s == 0.0 { f64::INFINITY } else { x * lx / s.abs() };
    let phi = phi_for(ctx, x)?;
    let radius = theorem1_radius(k, x, l_param);
    let count = disc_zero_count(table, phi.phi, radius)?;
    let threshold = l_param / 625.0;

    // split of the zero sum at the disc boundary, at the window maximizer
    let window = xi_window(k, gamma, lx);
    let best = window_max(table, k, gamma, phi.phi, window)?;
    let s0 = Complex64::new(1.0 + gamma, phi.phi + best.xi);
    let centre = Complex64::new(1.0, phi.phi);
    let mut near = Accumulator::new();
    let mut far = Accumulator::new();
    for rho in table.points() {
        let term = gamma / (s0 - rho).norm_sqr();
        if (rho - centre).norm() > radius {
            far.add(term);
        } else {
            near.add(term);
        }
    }
    let far_bound = far.value() + best.tail_bound;
    let lk = (k as f64).ln();
    let (lo, hi) = (lk.sqrt().exp(), (k as f64).sqrt());

    let mut r = Report::new("theorem1").input("x", x).input("L", l_param).input("weight", k);
    r.lhs = json!(count.count);
    r.rhs = real(threshold);
    r.ratio = real(count.count as f64 / threshold);
    r.status = if count.warning.is_some() { Status::Warning } else { Status::Reported };
    r.error("zero_sum_tail", real(best.tail_bound));
    r.meta("gamma", gamma);
    r.meta("radius", radius);
    r.meta("min_radius", theorem1_min_radius(k, x));
    r.meta("Q", real(q));
    r.meta("phi", serde_json::to_value(phi).expect("serializable"));
    r.meta("phi_over_Q", real(phi.phi.abs() / q));
    r.meta("xi_star", best.xi);
    r.meta("near_sum", near.value());
    r.meta("far_sum_bound", real(far_bound));
    r.meta("far_limit", 0.09 * lx);
    r.meta("far_within_limit", far_bound <= 0.09 * lx);
    r.meta("near_target", 0.16 * lx);
    r.meta("near_count_bound", real(count.count as f64 / gamma));
    r.meta("hypothesis_window", json!([lo, hi]));
    r.meta("hypothesis_window_empty", lo > hi);
    let note = if lo > hi {
        "exploration only: the theorem's x-range is empty at this weight"
    } else {
        "exploration only: implied constants are not computable"
    };
    r.meta("note", note);
    r.meta("hypothesis_L_upper", flag(l_param <= 40.0 * lx));
    r.meta("hypothesis_Q", flag(q >= 1.0 && q <= lx.powf(0.01)));
    if let Some(w) = count.warning {
        r.meta("warning", w);
    }
    Ok(r)
}

pub fn cor12_check(table: &ZeroTable, phi: f64) -> Report {
    let c = corollary12_region_count(table, phi);
    let mut r = Report::new("cor12").input("phi", phi);
    r.lhs = json!(c.count);
    r.status = if c.warning.is_some() { Status::Warning } else { Status::Reported };
    r.meta("region", "Re s >= 3/4, |Im s - phi| <= 1/4");
    if let Some(w) = c.warning {
        r.meta("warning", w);
    }
    r
}

/// `S(e^{y₀}, φ) - (1 + iφ) e^{-iφy₀} S(e^{y₀})`; exactly zero at `φ = 0`.
pub fn eq42_residual(table0: &PrefixTable, table: &PrefixTable, y0: f64) -> Complex64 {
    let x = y0.exp();
    let phi = table.phi;
    let rot = if phi == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(1.0, phi) * Complex64::from_polar(1.0, -phi * y0)
    };
    table.at(x) - rot * table0.at(x)
}

pub const LEMMA41_OFFSETS: [f64; 8] = [-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0];

pub fn lemma41_report(ctx: &CheckContext, y0: f64) -> Result<Report> {
    if !(y0 > 0.0) {
        return Err(Error::invalid("y0 must be positive"));
    }
    let x = y0.exp();
    let s = partial_sum(ctx.form, x)?;
    let q = if s == 0.0 { f64::INFINITY } else { y0 * x / s.abs() };
    let phi = phi_for(ctx, x)?;
    let n_max = ctx.form.n_max() as f64;

    let mut ys = Vec::new();
    let mut skipped = Vec::new();
    for d in LEMMA41_OFFSETS {
        let y = y0 + d;
        if y > 0.0 && y.exp() <= n_max {
            ys.push(y);
        } else {
            skipped.push(json!({ "y": y, "notice": "outside the coefficient range" }));
        }
    }
    let top = ys.iter().map(|y| y.exp()).fold(x, f64::max).floor() as usize;
    let table = PrefixTable::new(ctx.form, top, phi.phi)?;
    let table0 = PrefixTable::new(ctx.form, top, 0.0)?;
    let base = table.at(x) / x;
    let scale_rows: Vec<_> = ys
        .iter()
        .map(|&y| {
            let lhs = (table.at(y.exp()) / y.exp() - base).norm();
            let shape = ((y0.ln() + (y - y0).abs()) / y0).powf(lipschitz_exponent()) * y.max(y0);
            json!({ "y": y, "lhs": lhs, "shape": shape, "ratio": lhs / shape })
        })
        .collect();
    let residual = eq42_residual(&table0, &table, y0);
    let shape42 = x * y0.powf(-1.0 + 4.0 / PI);

    let mut r = Report::new("lemma41").input("y0", y0).input("weight", ctx.form.weight());
    r.lhs = real((1.0 + phi.phi.abs()) * s.abs() / (y0 * x));
    r.rhs = json!(1.0);
    r.ratio = real(phi.phi.abs() / q);
    r.meta("Q", real(q));
    r.meta("sum_S", s);
    r.meta("phi", serde_json::to_value(phi).expect("serializable"));
    r.meta("hypothesis_size", flag(s.abs() >= y0 * x * y0.powf(-0.01)));
    r.meta("scale_comparison", json!(scale_rows));
    r.meta("scale_skipped", json!(skipped));
    r.meta("eq42_residual", complex(residual));
    r.meta("eq42_shape", shape42);
    r.meta("eq42_scaled", residual.norm() / shape42);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_vanishes_with_gamma() {
        assert!(xi_window(12, 1e-12, 9.0) < 1e-5);
        assert!(xi_window(12, 0.3, 9.0) > 0.4);
    }

    #[test]
    fn radius_formula() {
        let x = 9f64.exp();
        let l = 100.0 * 9.0 * 0.25;
        let lk = 12f64.ln();
        let expect = 100.0 * (0.25 * lk + lk.ln()) / 9.0;
        assert!((theorem1_radius(12, x, l) - expect).abs() < 1e-12);
        let back = theorem1_l_for_radius(12, x, expect).unwrap();
        assert!((back - l).abs() < 1e-9);
        assert!(theorem1_l_for_radius(12, 1e4, 0.6).is_none());
        assert!((theorem1_min_radius(12, 1e4) - 9.88).abs() < 0.01);
    }

    #[test]
    fn dense_cluster_exceeds_quarter_y0() {
        let phi = 40.0;
        let table = ZeroTable::synthetic(vec![phi; 3], 100.0);
        let best = window_max(&table, 12, 0.3, phi, xi_window(12, 0.3, 2.0)).unwrap();
        assert!(best.xi.abs() < 1e-12);
        assert!(best.sum >= 2.0 / 4.0, "{}", best.sum);
    }

    #[test]
    fn cor12_synthetic() {
        let t = ZeroTable::synthetic(vec![9.2, 13.9], 30.0);
        assert_eq!(cor12_check(&t, 5.0).lhs, json!(0));
        let t = t.with_off_line(vec![Complex64::new(0.8, 5.0)]);
        assert_eq!(cor12_check(&t, 5.0).lhs, json!(1));
        let t = ZeroTable::synthetic(vec![9.2], 30.0).with_off_line(vec![Complex64::new(0.8, 5.3)]);
        assert_eq!(cor12_check(&t, 5.0).lhs, json!(0));
    }
}
