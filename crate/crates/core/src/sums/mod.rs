//! Partial sums `S(x, f) = Σ_{n≤x} λ(n)` and their twists by `n^{-iφ}`.

use crate::forms::Eigenform;
use crate::numeric::compensated::{complex_prefix_sums, complex_prefix_value, prefix_value};
use crate::{Error, Result};
use num_complex::Complex64;
use std::io::Write;

fn cutoff(form: &Eigenform, x: f64) -> Result<usize> {
    if !(x >= 1.0) {
        return Err(Error::invalid(format!("summation bound x = {x} must be at least 1")));
    }
    let n = x.floor();
    form.require(n as u64)?;
    Ok(n as usize)
}

/// `λ(n) n^{-iφ}` for `n` in `0..=n_max` (index 0 is zero).
pub fn twisted_terms(form: &Eigenform, n_max: usize, phi: f64) -> Vec<Complex64> {
    let lambda = &form.lambda_table()[..=n_max];
    lambda
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(l, -phi * (n as f64).ln())
            }
        })
        .collect()
}

pub fn partial_sum(form: &Eigenform, x: f64) -> Result<f64> {
    let n = cutoff(form, x)?;
    Ok(prefix_value(form.lambda_table(), n + 1))
}

pub fn twisted_sum(form: &Eigenform, x: f64, phi: f64) -> Result<Complex64> {
    let n = cutoff(form, x)?;
    Ok(complex_prefix_value(&twisted_terms(form, n, phi), n + 1))
}

/// All prefix sums `S(n, f, φ)` for `n <= n_max`; `at(x)` looks up `⌊x⌋`.
#[derive(Debug, Clone)]
pub struct PrefixTable {
    pub phi: f64,
    values: Vec<Complex64>,
}

impl PrefixTable {
    pub fn new(form: &Eigenform, n_max: usize, phi: f64) -> Result<Self> {
        form.require(n_max as u64)?;
        Ok(Self {
            phi,
            values: complex_prefix_sums(&twisted_terms(form, n_max, phi)),
        })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `S(x, f, φ)`; zero for `x < 1`.
    pub fn at(&self, x: f64) -> Complex64 {
        if x < 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let n = (x.floor() as usize).min(self.n_max());
        self.values[n]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

#[derive(Debug, Clone)]
pub struct TwistedSumSeries {
    pub phi: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn twisted_series(form: &Eigenform, xs: &[f64], phi: f64) -> Result<TwistedSumSeries> {
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("evaluation points must be strictly increasing"));
    }
    let top = xs.last().copied().unwrap_or(1.0);
    let table = PrefixTable::new(form, cutoff(form, top)?, phi)?;
    for &x in xs {
        cutoff(form, x)?;
    }
    Ok(TwistedSumSeries {
        phi,
        xs: xs.to_vec(),
        values: xs.iter().map(|&x| table.at(x)).collect(),
    })
}

/// `Q = x log x / |S(x, f)|`; `None` stands for an infinite `Q` (`S = 0`).
pub fn quality_from_sum(x: f64, s: f64) -> Option<f64> {
    if s == 0.0 {
        None
    } else {
        Some(x * x.ln() / s.abs())
    }
}

pub fn quality_q(form: &Eigenform, x: f64) -> Result<Option<f64>> {
    Ok(quality_from_sum(x, partial_sum(form, x)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub x: f64,
    pub sum: Complex64,
    /// `|S(x)| / x^e`.
    pub ratio: f64,
    pub running_max: f64,
    pub quality: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GrowthScan {
    pub exponent: f64,
    pub phi: f64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthScan {
    pub fn max_ratio(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.running_max)
    }
}

pub fn growth_scan(form: &Eigenform, xs: &[f64], exponent: f64, phi: f64) -> Result<GrowthScan> {
    let series = twisted_series(form, xs, phi)?;
    let mut running_max = 0.0f64;
    let rows = series
        .xs
        .iter()
        .zip(&series.values)
        .map(|(&x, &s)| {
            let ratio = s.norm() / x.powf(exponent);
            running_max = running_max.max(ratio);
            GrowthRow {
                x,
                sum: s,
                ratio,
                running_max,
                quality: quality_from_sum(x, s.norm()),
            }
        })
        .collect();
    Ok(GrowthScan {
        exponent,
        phi,
        rows,
    })
}

/// `count` points from 1 to `x_max`, geometrically spaced and rounded to
/// distinct integers.
pub fn log_grid(x_max: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(count);
    let top = x_max.ln();
    for i in 0..count {
        let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 1.0 };
        let x = (t * top).exp().round().max(1.0).min(x_max.floor());
        if out.last().is_none_or(|&prev| x > prev) {
            out.push(x);
        }
    }
    out
}

fn fmt_quality(q: Option<f64>) -> String {
    match q {
        Some(v) => format!("{v:.17e}"),
        None => "inf".to_string(),
    }
}

/// `x,re,imag,abs,quality_Q` rows; with `with_ratio` two more columns carry
/// `|S|/x^e` and its running maximum.
pub fn write_growth_csv<W: Write>(scan: &GrowthScan, with_ratio: bool, out: &mut W) -> Result<()> {
    if with_ratio {
        writeln!(out, "x,re,imag,abs,quality_Q,ratio,running_max")?;
    } else {
        writeln!(out, "x,re,imag,abs,quality_Q")?;
    }
    for r in &scan.rows {
        write!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{}",
            r.x,
            r.sum.re,
            r.sum.im,
            r.sum.norm(),
            fmt_quality(r.quality)
        )?;
        if with_ratio {
            write!(out, ",{:.17e},{:.17e}", r.ratio, r.running_max)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::simpson_piecewise;
    use std::sync::OnceLock;

    fn delta() -> &'static Eigenform {
        static F: OnceLock<Eigenform> = OnceLock::new();
        F.get_or_init(|| Eigenform::generate(12, 20_000).unwrap())
    }

    #[test]
    fn small_sums() {
        let f = delta();
        assert_eq!(partial_sum(f, 1.0).unwrap(), 1.0);
        assert!((partial_sum(f, 2.0).unwrap() - 0.469_669_914_110_089_4).abs() < 1e-15);
        assert_eq!(partial_sum(f, 2.5).unwrap(), partial_sum(f, 2.0).unwrap());
        assert_eq!(twisted_sum(f, 1.0, 3.7).unwrap(), Complex64::new(1.0, 0.0));
        let two = twisted_sum(f, 2.0, std::f64::consts::PI).unwrap();
        let want = 1.0 + f.lambda(2) * Complex64::new(0.0, -std::f64::consts::PI * 2f64.ln()).exp();
        assert!((two - want).norm() < 1e-15);
    }

    #[test]
    fn range_errors() {
        let f = delta();
        assert!(matches!(partial_sum(f, 20_001.0), Err(Error::InsufficientCoefficients { .. })));
        assert!(partial_sum(f, 0.5).is_err());
    }

    #[test]
    fn zero_twist_is_real() {
        let f = delta();
        let z = twisted_sum(f, 15_000.0, 0.0).unwrap();
        assert_eq!(z.re, partial_sum(f, 15_000.0).unwrap());
        assert!(z.im.abs() < 1e-12);
    }

    #[test]
    fn conjugate_twist() {
        let f = delta();
        let a = twisted_sum(f, 9_999.0, 2.25).unwrap();
        let b = twisted_sum(f, 9_999.0, -2.25).unwrap();
        assert!((a - b.conj()).norm() < 1e-11);
    }

    #[test]
    fn cold_lookup_equals_table() {
        let f = delta();
        let table = PrefixTable::new(f, 20_000, 0.8).unwrap();
        for x in [1.0, 4095.0, 4096.0, 4097.0, 8192.5, 20_000.0] {
            assert_eq!(table.at(x), twisted_sum(f, x, 0.8).unwrap(), "x={x}");
        }
        let plain = PrefixTable::new(f, 20_000, 0.0).unwrap();
        assert_eq!(plain.at(12_345.0).re, partial_sum(f, 12_345.0).unwrap());
    }

    #[test]
    fn quality_values() {
        let f = delta();
        let q = quality_q(f, 2.0).unwrap().unwrap();
        assert!((q - 2.0 * 2f64.ln() / 0.469_669_914_110_089_4).abs() < 1e-12);
        assert!((q - 2.9516).abs() < 1e-4);
        let x = 7.0f64;
        assert!((quality_from_sum(x, x * x.ln()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(quality_from_sum(3.0, 0.0), None);
    }

    #[test]
    fn growth_scan_basics() {
        let f = delta();
        let s = growth_scan(f, &[1.0], 0.0, 0.0).unwrap();
        assert_eq!(s.rows[0].ratio, 1.0);
        let grid = log_grid(20_000.0, 40);
        let half = growth_scan(f, &grid, 0.5, 0.0).unwrap();
        let third = growth_scan(f, &grid, 1.0 / 3.0, 0.0).unwrap();
        assert!(half.max_ratio().is_finite() && third.max_ratio() >= half.max_ratio());
        let mut buf = Vec::new();
        write_growth_csv(&half, false, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("x,re,imag,abs,quality_Q\n1,"));
    }

    /// `S(x, φ) = x^{-iφ} S(x) + iφ ∫_1^x S(u) u^{-1-iφ} du`, by quadrature.
    #[test]
    fn abel_summation() {
        let f = delta();
        let x = 300.5;
        for phi in [0.0, 0.7, -3.1, 12.0] {
            let plain = PrefixTable::new(f, 300, 0.0).unwrap();
            let mut breaks: Vec<f64> = (1..=300).map(|n| n as f64).collect();
            breaks.push(x);
            let integral = simpson_piecewise(
                |i, u| Complex64::new(plain.values()[i + 1].re, 0.0) * Complex64::new(-1.0, -phi).expf(u),
                &breaks,
                1e-10,
            );
            let rhs = Complex64::new(0.0, -phi * x.ln()).exp() * plain.at(x)
                + Complex64::new(0.0, phi) * integral.value;
            let lhs = twisted_sum(f, x, phi).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "phi={phi}: {lhs} vs {rhs}");
        }
    }
}
