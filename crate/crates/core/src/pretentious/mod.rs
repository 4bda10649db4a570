//! Pretentious distance to `n^{it}`, the maximizing twist `φ`, and empirical
//! reporters for the mean-value estimates.

mod function;

pub use function::{ArithmeticFunction, ConstantOne, FormFunction, FunctionRegistry, MobiusToy};

use crate::arith::primes::primes_up_to;
use crate::forms::Eigenform;
use crate::numeric::compensated::Accumulator;
use crate::report::{complex, real, Report};
use crate::sums::{twisted_sum, PrefixTable};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;

pub const PHI_GRID_STEP: f64 = 0.01;
pub const PHI_TOLERANCE: f64 = 1e-6;

/// Exponent `2 - 4/π` of the Lipschitz estimate.
pub fn lipschitz_exponent() -> f64 {
    2.0 - 4.0 / PI
}

/// Primes `p <= x`.
pub fn prime_sieve(x: f64) -> Result<Vec<u64>> {
    if !(x >= 2.0) {
        return Err(Error::invalid(format!("prime sieve bound {x} below 2")));
    }
    Ok(primes_up_to(x.floor() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimeTerm {
    pub p: u64,
    pub term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceProfile {
    pub function: String,
    pub t: f64,
    pub x: f64,
    pub value_sq: f64,
    pub prime_terms: Vec<PrimeTerm>,
    #[serde(skip)]
    acc: Accumulator,
}

fn prime_term(h: &dyn ArithmeticFunction, p: u64, t: f64) -> f64 {
    let lp = (p as f64).ln();
    (1.0 - h.at_prime(p) * (t * lp).cos()) / p as f64
}

/// `𝔻(h, n^{it}; x)² = Σ_{p≤x} (1 - Re h(p) p^{-it}) / p`.
pub fn distance_sq(h: &dyn ArithmeticFunction, t: f64, x: f64) -> Result<DistanceProfile> {
    let mut profile = DistanceProfile {
        function: h.name().to_string(),
        t,
        x: 2.0,
        value_sq: 0.0,
        prime_terms: Vec::new(),
        acc: Accumulator::new(),
    };
    profile.extend(h, x)?;
    Ok(profile)
}

impl DistanceProfile {
    /// Continues the prime sum up to `x2`; the result is bit-identical to
    /// computing `distance_sq` at `x2` directly.
    pub fn extend(&mut self, h: &dyn ArithmeticFunction, x2: f64) -> Result<()> {
        if h.name() != self.function {
            return Err(Error::invalid("distance profile extended with a different function"));
        }
        let primes = prime_sieve(x2)?;
        if let Some(&p) = primes.last() {
            if p as usize > h.n_max() {
                return Err(Error::InsufficientCoefficients {
                    needed: p,
                    available: h.n_max() as u64,
                });
            }
        }
        let start = self.prime_terms.last().map_or(0, |t| t.p);
        for &p in primes.iter().filter(|&&p| p > start) {
            let term = prime_term(h, p, self.t);
            self.acc.add(term);
            self.prime_terms.push(PrimeTerm { p, term });
        }
        self.x = self.x.max(x2);
        self.value_sq = self.acc.value();
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MangerelPoint {
    pub t: f64,
    pub x: f64,
    pub log_abs_h: f64,
    pub log_log_x: f64,
    pub distance_sq: f64,
    /// `log|H(1 + 1/log x + it)| - (log log x - 𝔻²)`.
    pub residual: f64,
}

pub fn mangerel_check(h: &dyn ArithmeticFunction, t: f64, x: f64) -> Result<MangerelPoint> {
    if !(x >= 10.0) {
        return Err(Error::invalid("mangerel check needs x >= 10"));
    }
    let lx = x.ln();
    let s = Complex64::new(1.0 + 1.0 / lx, t);
    let log_abs_h = h.dirichlet(s)?.norm().ln();
    let d = distance_sq(h, t, x)?.value_sq;
    let log_log_x = lx.ln();
    Ok(MangerelPoint {
        t,
        x,
        log_abs_h,
        log_log_x,
        distance_sq: d,
        residual: log_abs_h - (log_log_x - d),
    })
}

/// Runs `mangerel_check` over a grid and reports the residual spread.
pub fn mangerel_sweep(h: &dyn ArithmeticFunction, ts: &[f64], xs: &[f64]) -> Result<Report> {
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (t, x))).collect();
    let points = grid
        .par_iter()
        .map(|&(t, x)| mangerel_check(h, t, x))
        .collect::<Result<Vec<_>>>()?;
    let lo = points.iter().map(|p| p.residual).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.residual).fold(f64::NEG_INFINITY, f64::max);
    let mut r = Report::new("mangerel")
        .input("function", h.name())
        .input("t", json!(ts))
        .input("x", json!(xs));
    r.lhs = json!(points.iter().map(|p| p.log_abs_h).collect::<Vec<_>>());
    r.rhs = json!(points.iter().map(|p| p.log_log_x - p.distance_sq).collect::<Vec<_>>());
    r.ratio = json!(points.iter().map(|p| p.residual).collect::<Vec<_>>());
    r.meta("residual_min", real(lo));
    r.meta("residual_max", real(hi));
    r.meta("spread", real(hi - lo));
    r.meta("points", serde_json::to_value(&points).expect("serializable"));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiResult {
    pub x: f64,
    pub phi: f64,
    /// `max |H(1 + 1/log x + it)|` over `|t| <= (log x)²`.
    #[serde(rename = "M")]
    pub m: f64,
    pub t_max: f64,
    pub grid_step: f64,
    pub grid_points: usize,
    pub coarse_best: f64,
    pub refinement_iterations: usize,
    /// `|H|` at the grid neighbours of the coarse maximum (the maximum itself
    /// when it sits at an end of the segment).
    pub neighbor_values: [f64; 2],
}

/// Maximizes `|H(1 + 1/log x + it)|` over `|t| <= (log x)²`.
///
/// `|H|` is even in `t` (real coefficients), so only `t >= 0` is scanned; the
/// first grid maximum wins, which breaks ties toward smaller `|t|`.
pub fn find_phi(h: &dyn ArithmeticFunction, x: f64) -> Result<PhiResult> {
    find_phi_with_step(h, x, PHI_GRID_STEP)
}

pub fn find_phi_with_step(h: &dyn ArithmeticFunction, x: f64, step: f64) -> Result<PhiResult> {
    if !(x >= 10.0) {
        return Err(Error::invalid("find_phi needs x >= 10"));
    }
    if !(step > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let lx = x.ln();
    let sigma = 1.0 + 1.0 / lx;
    let t_max = lx * lx;
    let eval = |t: f64| -> Result<f64> { Ok(h.dirichlet(Complex64::new(sigma, t))?.norm()) };

    let count = (t_max / step).floor() as usize;
    let mut ts: Vec<f64> = (0..=count).map(|j| j as f64 * step).collect();
    if t_max - ts[count] > 1e-12 {
        ts.push(t_max);
    }
    let values = ts.par_iter().map(|&t| eval(t)).collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (j, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = j;
        }
    }
    let left = best.saturating_sub(1);
    let right = (best + 1).min(ts.len() - 1);

    // golden-section search on the bracketing cell
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (ts[left], ts[right]);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut iterations = 0;
    while b - a > PHI_TOLERANCE {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut phi, mut m) = (ts[best], values[best]);
    for (t, v) in [(c, fc), (d, fd)] {
        if v > m || (v == m && t < phi) {
            phi = t;
            m = v;
        }
    }
    Ok(PhiResult {
        x,
        phi,
        m,
        t_max,
        grid_step: step,
        grid_points: ts.len(),
        coarse_best: ts[best],
        refinement_iterations: iterations,
        neighbor_values: [values[left], values[right]],
    })
}

/// Right-hand shapes of Halász's theorem and of its refinement with `φ`.
pub fn halasz_shapes(m: f64, phi: f64, x: f64) -> (f64, f64) {
    let lx = x.ln();
    let llx = lx.ln();
    let decay = (m + 1.0) * (-m).exp();
    let classic = decay * lx + llx * llx / lx;
    let refined = lx * (decay / (1.0 + phi.abs()) + llx.powf(5.0 - 8.0 / PI) / lx.powf(lipschitz_exponent()));
    (classic, refined)
}

pub fn halasz_report(form: &Eigenform, x: f64, params: &crate::lfun::LParams) -> Result<Report> {
    if !(x >= 1e3) {
        return Err(Error::invalid("halasz report needs x >= 1000"));
    }
    let s = twisted_sum(form, x, 0.0)?.re;
    let phi = find_phi(&FormFunction::new(form, *params), x)?;
    Ok(halasz_from_parts(x, s, &phi))
}

pub(crate) fn halasz_from_parts(x: f64, s: f64, phi: &PhiResult) -> Report {
    let lhs = s.abs() / x;
    let (classic, refined) = halasz_shapes(phi.m, phi.phi, x);
    let mut r = Report::new("halasz").input("x", x);
    r.lhs = real(lhs);
    r.rhs = json!({ "halasz": real(classic), "refined": real(refined) });
    r.ratio = json!({ "halasz": real(lhs / classic), "refined": real(lhs / refined) });
    r.meta("phi", serde_json::to_value(phi).expect("serializable"));
    r.meta("sum", real(s));
    r
}

/// `|S(x, φ)/x - S(z, φ)/z|` from a prefix table.
pub fn lipschitz_lhs(table: &PrefixTable, x: f64, z: f64) -> f64 {
    (table.at(x) / x - table.at(z) / z).norm()
}

/// `((1 + |log(x/z)|)/log x)^{2-4/π} log x`, with the `o(1)` taken as 0.
pub fn lipschitz_shape(x: f64, z: f64) -> f64 {
    let lx = x.ln();
    ((1.0 + (x / z).ln().abs()) / lx).powf(lipschitz_exponent()) * lx
}

pub fn lipschitz_report(form: &Eigenform, x: f64, z_grid: &[f64], phi: f64) -> Result<Report> {
    if !(x >= 2.0) {
        return Err(Error::invalid("lipschitz report needs x >= 2"));
    }
    let (lo, hi) = (x.powf(2.0 / 3.0), x.powf(1.5));
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for &z in z_grid {
        if z >= lo && z <= hi {
            kept.push(z);
        } else {
            skipped.push(json!({ "z": z, "notice": format!("outside [{lo}, {hi}]") }));
        }
    }
    let top = kept.iter().copied().fold(x, f64::max);
    let table = PrefixTable::new(form, top.floor() as usize, phi)?;
    let lhs: Vec<f64> = kept.iter().map(|&z| lipschitz_lhs(&table, x, z)).collect();
    let rhs: Vec<f64> = kept.iter().map(|&z| lipschitz_shape(x, z)).collect();
    let mut r = Report::new("lipschitz").input("x", x).input("phi", phi).input("z", json!(kept));
    r.ratio = json!(lhs.iter().zip(&rhs).map(|(a, b)| real(a / b)).collect::<Vec<_>>());
    r.lhs = json!(lhs);
    r.rhs = json!(rhs);
    r.meta("exponent", lipschitz_exponent());
    r.meta("shape", "((1+|log(x/z)|)/log x)^(2-4/pi) log x, o(1) taken as 0");
    r.meta("skipped", json!(skipped));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationPoint {
    pub x: f64,
    pub phi: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: Complex64,
    pub error_shape: f64,
    pub scaled_residual: f64,
}

/// `S(x)/x` against `x^{iφ}/(1+iφ) · S(x, φ)/x`.
pub fn rotation_point(table0: &PrefixTable, table: &PrefixTable, x: f64) -> RotationPoint {
    let phi = table.phi;
    let lhs = table0.at(x) / x;
    let rot = if phi == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, phi * x.ln()) / Complex64::new(1.0, phi)
    };
    let rhs = rot * (table.at(x) / x);
    let residual = lhs - rhs;
    let lx = x.ln();
    let error_shape = lx.powf(-1.0 + 4.0 / PI) * lx.ln().powf(5.0 - 8.0 / PI);
    RotationPoint {
        x,
        phi,
        lhs,
        rhs,
        residual,
        error_shape,
        scaled_residual: residual.norm() / error_shape,
    }
}

pub fn rotation_identity_report(form: &Eigenform, xs: &[f64], phi: f64) -> Result<Report> {
    if xs.is_empty() || xs.iter().any(|&x| !(x >= 1e3)) {
        return Err(Error::invalid("rotation identity report needs x >= 1000"));
    }
    let top = xs.iter().copied().fold(0.0, f64::max).floor() as usize;
    let table0 = PrefixTable::new(form, top, 0.0)?;
    let table = PrefixTable::new(form, top, phi)?;
    let points: Vec<RotationPoint> = xs.iter().map(|&x| rotation_point(&table0, &table, x)).collect();
    let mut r = Report::new("rotation").input("x", json!(xs)).input("phi", phi);
    r.lhs = json!(points.iter().map(|p| complex(p.lhs)).collect::<Vec<_>>());
    r.rhs = json!(points.iter().map(|p| complex(p.rhs)).collect::<Vec<_>>());
    r.ratio = json!(points.iter().map(|p| real(p.scaled_residual)).collect::<Vec<_>>());
    r.meta("residual", json!(points.iter().map(|p| complex(p.residual)).collect::<Vec<_>>()));
    r.meta("error_shape", json!(points.iter().map(|p| p.error_shape).collect::<Vec<_>>()));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::LParams;
    use std::sync::OnceLock;

    fn delta() -> &'static Eigenform {
        static F: OnceLock<Eigenform> = OnceLock::new();
        F.get_or_init(|| Eigenform::generate(12, 110_000).unwrap())
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(prime_sieve(10.0).unwrap(), vec![2, 3, 5, 7]);
        let recip: f64 = prime_sieve(10.0).unwrap().iter().map(|&p| 1.0 / p as f64).sum();
        assert!((recip - 1.176190).abs() < 1e-6);
        assert!(prime_sieve(1.5).is_err());
    }

    #[test]
    fn constant_function_has_zero_distance() {
        let one = ConstantOne::new(1000);
        let d = distance_sq(&one, 0.0, 1000.0).unwrap();
        assert_eq!(d.value_sq, 0.0);
    }

    #[test]
    fn delta_distance_at_ten() {
        let f = FormFunction::new(delta(), LParams::default());
        let d = distance_sq(&f, 0.0, 10.0).unwrap();
        let tau = [(2.0, -24.0), (3.0, 252.0), (5.0, 4830.0), (7.0, -16744.0)];
        let oracle: f64 = tau.iter().map(|&(p, a): &(f64, f64)| (1.0 - a / p.powf(5.5)) / p).sum();
        assert!((d.value_sq - oracle).abs() < 1e-14);
        assert!((d.value_sq - 1.157).abs() < 1e-3);
        let neg = distance_sq(&f, -3.7, 500.0).unwrap();
        let pos = distance_sq(&f, 3.7, 500.0).unwrap();
        assert_eq!(neg.value_sq, pos.value_sq);
        for t in &pos.prime_terms {
            let p = t.p as f64;
            assert!(t.term >= -1.0 / p && t.term <= 3.0 / p);
        }
    }

    #[test]
    fn distance_is_additive() {
        let f = FormFunction::new(delta(), LParams::default());
        for (x1, x2) in [(10.0, 1e4), (97.0, 100.0), (2.0, 5e4)] {
            let mut d = distance_sq(&f, 1.25, x1).unwrap();
            d.extend(&f, x2).unwrap();
            let direct = distance_sq(&f, 1.25, x2).unwrap();
            assert_eq!(d.value_sq.to_bits(), direct.value_sq.to_bits());
            assert_eq!(d.prime_terms, direct.prime_terms);
        }
    }

    #[test]
    fn distance_beyond_table_errors() {
        let f = FormFunction::new(delta(), LParams::default());
        assert!(matches!(
            distance_sq(&f, 0.0, 2e5),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn zeta_analogue_residual_is_finite() {
        let one = ConstantOne::new(100_000);
        for &(t, x) in &[(0.0, 1e3), (5.0, 1e5), (20.0, 1e4)] {
            let p = mangerel_check(&one, t, x).unwrap();
            assert!(p.residual.is_finite() && p.residual.abs() < 3.0, "{p:?}");
        }
        let mu = MobiusToy::new(100_000);
        let p = mangerel_check(&mu, 0.0, 1e5).unwrap();
        assert!(p.residual.is_finite() && p.residual.abs() < 3.0, "{p:?}");
    }

    #[test]
    fn mangerel_sign_of_zero() {
        let f = FormFunction::new(delta(), LParams::default());
        let a = mangerel_check(&f, 0.0, 1e4).unwrap();
        let b = mangerel_check(&f, -0.0, 1e4).unwrap();
        assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn halasz_shape_at_zero_m() {
        let x = 1e5f64;
        let (classic, _) = halasz_shapes(0.0, 0.0, x);
        let lx = x.ln();
        assert!((classic - (lx + lx.ln().powi(2) / lx)).abs() < 1e-12);
    }

    #[test]
    fn phi_certificates() {
        let f = FormFunction::new(delta(), LParams::default());
        let x = 1e3;
        let r = find_phi(&f, x).unwrap();
        assert!(r.phi >= 0.0 && r.phi <= r.t_max);
        let at_zero = f.dirichlet(Complex64::new(1.0 + 1.0 / x.ln(), 0.0)).unwrap().norm();
        assert!(r.m >= at_zero - PHI_TOLERANCE);
        assert!(r.m >= r.neighbor_values[0] && r.m >= r.neighbor_values[1]);
        let half = find_phi_with_step(&f, x, PHI_GRID_STEP / 2.0).unwrap();
        assert!((half.m - r.m).abs() < 1e-6, "{} vs {}", half.m, r.m);
    }

    #[test]
    fn rotation_identity_exact_at_zero_twist() {
        let r = rotation_identity_report(delta(), &[1e3, 1e4, 1e5], 0.0).unwrap();
        for z in r.meta["residual"].as_array().unwrap() {
            assert_eq!(z["re"].as_f64().unwrap(), 0.0);
            assert_eq!(z["im"].as_f64().unwrap(), 0.0);
        }
    }

    #[test]
    fn rotation_conjugate_twist() {
        let t0 = PrefixTable::new(delta(), 100_000, 0.0).unwrap();
        let tp = PrefixTable::new(delta(), 100_000, 2.3).unwrap();
        let tm = PrefixTable::new(delta(), 100_000, -2.3).unwrap();
        let a = rotation_point(&t0, &tp, 1e5);
        let b = rotation_point(&t0, &tm, 1e5);
        assert_eq!(a.residual.conj(), b.residual);
    }

    #[test]
    fn lipschitz_symmetry_and_diagonal() {
        let table = PrefixTable::new(delta(), 100_000, 0.7).unwrap();
        assert_eq!(lipschitz_lhs(&table, 1e4, 1e4), 0.0);
        assert_eq!(lipschitz_lhs(&table, 1e4, 3e3), lipschitz_lhs(&table, 3e3, 1e4));
        let r = lipschitz_report(delta(), 1e4, &[1e4, 1e3, 300.0, 5e4], 0.0).unwrap();
        assert_eq!(r.lhs[0].as_f64().unwrap(), 0.0);
        assert_eq!(r.meta["skipped"].as_array().unwrap().len(), 1);
        assert!(r.ratio.as_array().unwrap().iter().all(|v| v.as_f64().unwrap().is_finite()));
    }
}
