//! Critical-line zeros: sign-change search, import, and the zero sums used
//! by the verification pipelines.

use super::{afe::kappa, hardy_z, LParams};
use crate::forms::Eigenform;
use crate::numeric::compensated::Accumulator;
use crate::numeric::gamma::{digamma, ln_gamma};
use crate::numeric::quad::simpson_real;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

pub const SCAN_STEP: f64 = 0.05;
pub const BISECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroSource {
    Computed,
    Imported,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountCheck {
    /// Zeros with `0 < |γ| ≤ T`, both signs, plus a central zero if present.
    pub found_both_signs: usize,
    /// `(T/π) log(T² / (2πe)²)`.
    pub main_term: f64,
    /// `found_both_signs - main_term`.
    pub discrepancy: f64,
    /// Smooth count of positive ordinates from the Γ-factor.
    pub smooth_positive: f64,
    pub slack: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTable {
    /// Positive ordinates `γ_j` of zeros `1/2 ± iγ_j`, strictly increasing.
    pub ordinates: Vec<f64>,
    pub height_scanned: f64,
    pub source: ZeroSource,
    /// A zero at `s = 1/2` (forced when the root number is -1).
    pub central_zero: bool,
    /// Hypothetical zeros off the critical line with positive imaginary
    /// part (only ever present in imported or synthetic tables).
    pub off_line: Vec<Complex64>,
    pub count_check: Option<CountCheck>,
}

impl ZeroTable {
    pub fn synthetic(mut ordinates: Vec<f64>, height_scanned: f64) -> Self {
        ordinates.sort_by(f64::total_cmp);
        Self {
            ordinates,
            height_scanned,
            source: ZeroSource::Synthetic,
            central_zero: false,
            off_line: Vec::new(),
            count_check: None,
        }
    }

    pub fn with_off_line(mut self, zeros: Vec<Complex64>) -> Self {
        self.off_line = zeros;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty() && !self.central_zero && self.off_line.is_empty()
    }

    /// Restrict to ordinates `≤ height`.
    pub fn truncated(&self, height: f64) -> Self {
        let mut t = self.clone();
        t.ordinates.retain(|&g| g <= height);
        t.off_line.retain(|z| z.im <= height);
        t.height_scanned = height.min(self.height_scanned);
        t.count_check = None;
        t
    }

    /// Every zero as a point, conjugates included.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(2 * self.ordinates.len() + 2 * self.off_line.len() + 1);
        if self.central_zero {
            out.push(Complex64::new(0.5, 0.0));
        }
        for &g in &self.ordinates {
            out.push(Complex64::new(0.5, g));
            out.push(Complex64::new(0.5, -g));
        }
        for &z in &self.off_line {
            out.push(z);
            out.push(z.conj());
        }
        out
    }

    pub fn positive_count_up_to(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }
}

/// `(T/π) log(N T² / (2πe)²)` at level `N = 1`.
pub fn main_term(t: f64) -> f64 {
    t / PI * (t * t / (2.0 * PI * std::f64::consts::E).powi(2)).ln()
}

/// `(1/π)(arg Γ(1/2 + κ + iT) - T log 2π)`, the smooth part of the number of
/// zeros with `0 < γ ≤ T`.
pub fn smooth_positive_count(k: u32, t: f64) -> f64 {
    (ln_gamma(Complex64::new(0.5 + kappa(k), t)).im - t * (2.0 * PI).ln()) / PI
}

/// Derivative of [`smooth_positive_count`].
pub fn zero_density(k: u32, t: f64) -> f64 {
    (digamma(Complex64::new(0.5 + kappa(k), t)).re - (2.0 * PI).ln()) / PI
}

/// Allowed gap between found and smooth counts before a table is flagged.
pub fn count_slack(k: u32, t: f64) -> f64 {
    1.0 + (t + k as f64).ln() / PI
}

fn bisect(form: &Eigenform, params: &LParams, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let fm = hardy_z(form, m, params)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// All sign changes of `Z(t)` on `(0, t_max]` at grid step [`SCAN_STEP`],
/// refined by bisection.
pub fn find_zeros(form: &Eigenform, t_max: f64, params: &LParams) -> Result<ZeroTable> {
    if !(t_max >= 5.0) {
        return Err(Error::invalid("zero scan needs t_max >= 5"));
    }
    let odd = form.root_number() == -1;
    let steps = (t_max / SCAN_STEP).floor() as usize;
    let first = if odd { 1 } else { 0 };
    let grid: Vec<f64> = (first..=steps).map(|j| j as f64 * SCAN_STEP).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| hardy_z(form, t, params))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    let mut exact = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 && grid[i] > 0.0 {
            exact.push(grid[i]);
        } else if i + 1 < grid.len() && values[i] * values[i + 1] < 0.0 {
            brackets.push((grid[i], grid[i + 1], values[i]));
        }
    }
    let mut ordinates: Vec<f64> = brackets
        .par_iter()
        .map(|&(a, b, fa)| bisect(form, params, a, b, fa))
        .collect::<Result<_>>()?;
    ordinates.extend(exact);
    ordinates.sort_by(f64::total_cmp);
    let height = grid.last().copied().unwrap_or(0.0);
    let k = form.weight();
    let found = 2 * ordinates.len() + odd as usize;
    let smooth = smooth_positive_count(k, height);
    let slack = count_slack(k, height);
    let gap = ordinates.len() as f64 - smooth;
    let warning = (gap.abs() > slack).then(|| {
        format!(
            "found {} positive ordinates, smooth count {smooth:.2}: possible missed zeros",
            ordinates.len()
        )
    });
    let main = main_term(height);
    Ok(ZeroTable {
        ordinates,
        height_scanned: height,
        source: ZeroSource::Computed,
        central_zero: odd,
        off_line: Vec::new(),
        count_check: Some(CountCheck {
            found_both_signs: found,
            main_term: main,
            discrepancy: found as f64 - main,
            smooth_positive: smooth,
            slack,
            warning,
        }),
    })
}

/// Parse a zero table: one ordinate per line (`#` starts a comment), or a
/// `sigma gamma` pair for a zero off the critical line.
pub fn parse_zero_table(text: &str) -> Result<ZeroTable> {
    let mut ordinates = Vec::new();
    let mut off_line = Vec::new();
    let mut central = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: i + 1,
            msg: format!("{msg}: {line:?}"),
        };
        let fields: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?;
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(bad("not finite"));
        }
        match fields[..] {
            [g] | [0.5, g] => {
                if g == 0.0 {
                    central = true;
                } else {
                    ordinates.push(g.abs());
                }
            }
            [sigma, g] => off_line.push(Complex64::new(sigma, g.abs())),
            _ => return Err(bad("expected one ordinate or a sigma,gamma pair")),
        }
    }
    ordinates.sort_by(f64::total_cmp);
    ordinates.dedup();
    let height = ordinates
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(off_line.iter().map(|z| z.im).fold(0.0, f64::max));
    Ok(ZeroTable {
        ordinates,
        height_scanned: height,
        source: ZeroSource::Imported,
        central_zero: central,
        off_line,
        count_check: None,
    })
}

pub fn import_zero_table(path: &Path) -> Result<ZeroTable> {
    parse_zero_table(&std::fs::read_to_string(path)?)
}

/// Writes a table in the format read by [`parse_zero_table`]: a comment
/// with source and height, then one zero per line.
pub fn write_zero_table<W: std::io::Write>(table: &ZeroTable, out: &mut W) -> Result<()> {
    let source = match table.source {
        ZeroSource::Computed => "computed",
        ZeroSource::Imported => "imported",
        ZeroSource::Synthetic => "synthetic",
    };
    writeln!(out, "# source={source} height={} count={}", table.height_scanned, table.ordinates.len())?;
    if let Some(c) = &table.count_check {
        writeln!(
            out,
            "# both_signs={} main_term={:.6} discrepancy={:.6}",
            c.found_both_signs, c.main_term, c.discrepancy
        )?;
    }
    if table.central_zero {
        writeln!(out, "0")?;
    }
    for g in &table.ordinates {
        writeln!(out, "{g:.12}")?;
    }
    for z in &table.off_line {
        writeln!(out, "{:.12} {:.12}", z.re, z.im)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroComparison {
    pub compared: usize,
    pub matched: usize,
    pub max_deviation: f64,
    /// Computed ordinates with no reference entry within the tolerance.
    pub unmatched: Vec<f64>,
    /// Reference ordinates below the common height that were not found.
    pub missing: Vec<f64>,
}

/// Matches every computed ordinate up to `height` against the nearest
/// reference ordinate.
pub fn compare_zero_tables(computed: &ZeroTable, reference: &ZeroTable, height: f64, tol: f64) -> ZeroComparison {
    let nearest = |table: &[f64], g: f64| table.iter().map(|r| (r - g).abs()).fold(f64::INFINITY, f64::min);
    let ours: Vec<f64> = computed.ordinates.iter().copied().filter(|&g| g <= height).collect();
    let mut max_deviation: f64 = 0.0;
    let mut unmatched = Vec::new();
    for &g in &ours {
        let d = nearest(&reference.ordinates, g);
        max_deviation = max_deviation.max(d);
        if d > tol {
            unmatched.push(g);
        }
    }
    let missing = reference
        .ordinates
        .iter()
        .copied()
        .filter(|&r| r <= height && nearest(&ours, r) > tol)
        .collect();
    ZeroComparison {
        compared: ours.len(),
        matched: ours.len() - unmatched.len(),
        max_deviation,
        unmatched,
        missing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSum {
    /// `Σ_ρ γ / |1 + γ + ic - ρ|²` over the stored zeros, `c = φ + ξ`.
    pub sum: f64,
    /// Upper bound for the zeros above the table height (not added to `sum`).
    pub tail_bound: f64,
    pub zeros_used: usize,
}

fn pair_kernel(gamma: f64, c: f64, u: f64) -> f64 {
    let a2 = (0.5 + gamma).powi(2);
    gamma / (a2 + (u - c).powi(2)) + gamma / (a2 + (u + c).powi(2))
}

/// Upper bound on `Σ_{γ_j > T} [kernel(γ_j) + kernel(-γ_j)]`.
///
/// Stieltjes integration against the count `N(u) ≤ M(u) + E(u)` (smooth
/// count plus [`count_slack`]) gives
/// `∫_T^∞ (M' + E') g + (M(T) + E(T) - N_found(T)) g(T)`, valid while `g`
/// decreases, i.e. `T ≥ |c|`. Beyond `U` the integrand is bounded by
/// `(8γ/π)(log u + 1)/u²`.
pub fn zero_sum_tail(k: u32, gamma: f64, c: f64, height: f64, found: usize) -> f64 {
    let c = c.abs();
    if height <= c || height <= 0.0 {
        return f64::INFINITY;
    }
    let upper = (100.0 * (height + c)).max(1e7);
    let span = (upper / height).ln();
    let density = |u: f64| zero_density(k, u).max(0.0) + 1.0 / (PI * (u + k as f64));
    let integral = simpson_real(
        |v| {
            let u = height * v.exp();
            density(u) * pair_kernel(gamma, c, u) * u
        },
        0.0,
        span,
        1e-12,
    );
    let remainder = 8.0 * gamma / PI * (upper.ln() + 2.0) / upper;
    let deficit = (smooth_positive_count(k, height) + count_slack(k, height) - found as f64).max(0.0);
    integral.value + integral.error + remainder + deficit * pair_kernel(gamma, c, height)
}

/// `Σ_ρ γ / |1 + γ + i(φ + ξ) - ρ|²` over all zeros of the table (conjugates
/// included), with the tail bound for zeros above the table height.
pub fn zero_sum(table: &ZeroTable, k: u32, gamma: f64, phi: f64, xi: f64) -> Result<ZeroSum> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid(format!("gamma = {gamma} outside (0, 1]")));
    }
    if table.is_empty() {
        return Err(Error::EmptyZeroTable);
    }
    let s0 = Complex64::new(1.0 + gamma, phi + xi);
    let points = table.points();
    let sum: Accumulator = points.iter().map(|&rho| gamma / (s0 - rho).norm_sqr()).collect();
    let tail_bound = if table.ordinates.is_empty() && table.height_scanned == 0.0 {
        f64::INFINITY
    } else {
        zero_sum_tail(k, gamma, phi + xi, table.height_scanned, table.positive_count_up_to(table.height_scanned))
    };
    Ok(ZeroSum {
        sum: sum.value(),
        tail_bound,
        zeros_used: points.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCount {
    pub count: usize,
    pub warning: Option<String>,
}

fn coverage_warning(table: &ZeroTable, top: f64) -> Option<String> {
    (top > table.height_scanned).then(|| {
        format!(
            "region reaches height {top:.4} beyond the scanned height {:.4}",
            table.height_scanned
        )
    })
}

/// Zeros with `|ρ - (1 + iφ)| < radius`.
pub fn disc_zero_count(table: &ZeroTable, center_phi: f64, radius: f64) -> Result<RegionCount> {
    if !(radius >= 0.0) {
        return Err(Error::invalid("radius must be non-negative"));
    }
    let centre = Complex64::new(1.0, center_phi);
    let count = table.points().iter().filter(|&&z| (z - centre).norm() < radius).count();
    Ok(RegionCount {
        count,
        warning: coverage_warning(table, center_phi.abs() + radius),
    })
}

/// Zeros in `Re s ≥ 3/4, |Im s - φ| ≤ 1/4`.
pub fn corollary12_region_count(table: &ZeroTable, phi: f64) -> RegionCount {
    let count = table
        .points()
        .iter()
        .filter(|z| z.re >= 0.75 && (z.im - phi).abs() <= 0.25)
        .count();
    RegionCount {
        count,
        warning: coverage_warning(table, phi.abs() + 0.25),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_zero_and_conjugate_at_centre() {
        // ρ = 1/2 counted with its coincident conjugate; |1 + 1/2 - 1/2| = 1
        let t = ZeroTable::synthetic(vec![0.0], 1.0);
        let z = zero_sum(&t, 12, 0.5, 0.0, 0.0).unwrap();
        assert!((z.sum - 1.0).abs() < 1e-15);
        // ρ = 1/2 ± i√5/2 sits at distance 3/2 from s₀ = 3/2
        let t = ZeroTable::synthetic(vec![1.118_033_988_749_895], 2.0);
        let z = zero_sum(&t, 12, 0.5, 0.0, 0.0).unwrap();
        assert!((z.sum - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_bounded_by_inverse_gamma() {
        let t = ZeroTable::synthetic(vec![3.0], 10.0);
        for gamma in [0.05, 0.2, 0.5] {
            let z = zero_sum(&t, 12, gamma, 3.0, 0.0).unwrap();
            assert!(z.sum <= 2.0 / gamma);
            let single = gamma / (0.5 + gamma).powi(2);
            assert!(single <= 1.0 / gamma);
        }
    }

    #[test]
    fn written_table_parses_back() {
        let mut t = ZeroTable::synthetic(vec![9.222379399921, 13.907549861392], 14.0)
            .with_off_line(vec![Complex64::new(0.7, 11.5)]);
        t.central_zero = true;
        let mut buf = Vec::new();
        write_zero_table(&t, &mut buf).unwrap();
        let back = parse_zero_table(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.ordinates, t.ordinates);
        assert!(back.central_zero);
        assert_eq!(back.off_line, t.off_line);
        let cmp = compare_zero_tables(&back, &ZeroTable::synthetic(vec![9.2224, 17.44], 20.0), 14.0, 1e-3);
        assert_eq!((cmp.compared, cmp.matched), (2, 1));
        assert_eq!(cmp.unmatched, vec![13.907549861392]);
        assert!(cmp.missing.is_empty());
    }

    #[test]
    fn empty_table_errors() {
        let t = ZeroTable::synthetic(vec![], 0.0);
        assert!(matches!(zero_sum(&t, 12, 0.2, 0.0, 0.0), Err(Error::EmptyZeroTable)));
    }

    #[test]
    fn parse_rules() {
        let t = parse_zero_table("# header\n13.90754986\n9.22237940  # first\n\n9.22237940\n").unwrap();
        assert_eq!(t.ordinates, vec![9.22237940, 13.90754986]);
        assert_eq!(t.height_scanned, 13.90754986);
        assert_eq!(t.source, ZeroSource::Imported);
        let e = parse_zero_table("").unwrap();
        assert!(e.ordinates.is_empty() && e.height_scanned == 0.0);
        match parse_zero_table("1.0\nabc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let off = parse_zero_table("0.8 9.5\n0.5,4\n").unwrap();
        assert_eq!(off.off_line, vec![Complex64::new(0.8, 9.5)]);
        assert_eq!(off.ordinates, vec![4.0]);
    }

    #[test]
    fn disc_geometry() {
        let t = ZeroTable::synthetic(vec![2.0, 5.0, 9.2224], 50.0);
        for phi in [0.0, 2.0, 9.2224] {
            assert_eq!(disc_zero_count(&t, phi, 0.4999).unwrap().count, 0);
        }
        assert_eq!(disc_zero_count(&t, 5.0, 0.6).unwrap().count, 1);
        assert_eq!(disc_zero_count(&t, 9.2224, 0.51).unwrap().count, 1);
        assert!(disc_zero_count(&t, 49.9, 0.6).unwrap().warning.is_some());
    }

    #[test]
    fn rectangle_count() {
        let phi = 7.0;
        let t = ZeroTable::synthetic(vec![7.0], 20.0);
        assert_eq!(corollary12_region_count(&t, phi).count, 0);
        let t2 = t.clone().with_off_line(vec![Complex64::new(0.8, phi)]);
        assert_eq!(corollary12_region_count(&t2, phi).count, 1);
        let t3 = t.with_off_line(vec![Complex64::new(0.8, phi + 0.3)]);
        assert_eq!(corollary12_region_count(&t3, phi).count, 0);
    }

    #[test]
    fn smooth_count_for_delta() {
        // eight zeros of Δ below height 30
        let m = smooth_positive_count(12, 30.0);
        assert!((m - 8.0).abs() < 0.5, "{m}");
        let d = (smooth_positive_count(12, 30.001) - smooth_positive_count(12, 29.999)) / 0.002;
        assert!((d - zero_density(12, 30.0)).abs() < 1e-6);
    }

    #[test]
    fn tail_bound_dominates_synthetic_sequence() {
        // zeros placed exactly at the smooth-count quantiles sum to less than
        // the bound
        let k = 12;
        let (gamma, c, height) = (0.3, 2.0, 40.0);
        let mut targets = Vec::new();
        let mut u = height;
        let mut next = smooth_positive_count(k, height).ceil();
        while u < 1e5 {
            u += 0.01;
            if smooth_positive_count(k, u) >= next {
                targets.push(u);
                next += 1.0;
            }
        }
        let tail: f64 = targets.iter().map(|&g| pair_kernel(gamma, c, g)).sum();
        let found = smooth_positive_count(k, height).floor() as usize;
        let bound = zero_sum_tail(k, gamma, c, height, found);
        assert!(tail < bound && bound < 3.0 * tail + 0.1, "{tail} {bound}");
    }
}
