//! `L(s, f)`, its completed form and logarithmic derivative, and zeros on
//! the critical line.

pub mod afe;
pub mod series;
pub mod zeros;

use crate::forms::Eigenform;
use crate::{Error, Result};
use afe::{completed_constant, l_factor_norm, l_from_scaled, lambda_star_scaled, AfeConfig, AfeValue};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use series::{euler_product, l_value_abs_region, log_derivative_series, SeriesValue};
pub use zeros::{
    compare_zero_tables, corollary12_region_count, disc_zero_count, find_zeros, import_zero_table, main_term, parse_zero_table, zero_sum,
    zero_sum_tail,
    write_zero_table, RegionCount, ZeroComparison, ZeroSource, ZeroSum, ZeroTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::invalid("complex point must be finite"));
        }
        Ok(Self { sigma, t })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self { sigma: z.re, t: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LParams {
    /// Upper limit on coefficients used by any series (also capped by the
    /// form's table).
    pub max_terms: usize,
    /// Target absolute accuracy.
    pub accuracy: f64,
    /// AFE truncation threshold relative to the accumulated sum.
    pub afe_cutoff: f64,
    /// AFE contour: tolerated cancellation exponent.
    pub cancellation: f64,
    /// Euler-product prime limit.
    pub euler_primes: u64,
}

impl Default for LParams {
    fn default() -> Self {
        Self {
            max_terms: usize::MAX,
            accuracy: 1e-10,
            afe_cutoff: 1e-18,
            cancellation: 8.0,
            euler_primes: 100_000,
        }
    }
}

impl LParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.accuracy > 0.0) || !(self.afe_cutoff > 0.0) || !(self.cancellation > 0.0) {
            return Err(Error::invalid("L-function accuracies must be positive"));
        }
        Ok(())
    }

    pub fn afe_config(&self) -> AfeConfig {
        AfeConfig {
            cancellation: self.cancellation,
            cutoff: self.afe_cutoff,
            ..AfeConfig::default()
        }
    }

    fn lambda<'a>(&self, form: &'a Eigenform) -> &'a [f64] {
        let table = form.lambda_table();
        &table[..table.len().min(self.max_terms.saturating_add(1))]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValue {
    pub value: Complex64,
    /// Absolute error bound (rigorous for the Dirichlet series, an estimate
    /// otherwise).
    pub error: f64,
    pub terms: usize,
    pub method: &'static str,
}

/// A strategy for evaluating `L(s, f)`.
pub trait LEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue>;
}

pub struct DirichletEvaluator;
pub struct AfeEvaluator;
pub struct EulerEvaluator;
/// Dirichlet series where its rigorous tail meets the target, AFE elsewhere.
pub struct AutoEvaluator;

impl LEvaluator for DirichletEvaluator {
    fn name(&self) -> &'static str {
        "dirichlet"
    }
    fn evaluate(&self, form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
        let v = series::l_value_abs_region_limited(form, s, params.accuracy, params.max_terms)?;
        Ok(LValue {
            value: v.value,
            error: v.tail_bound,
            terms: v.terms,
            method: self.name(),
        })
    }
}

impl LEvaluator for AfeEvaluator {
    fn name(&self) -> &'static str {
        "afe"
    }
    fn evaluate(&self, form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
        let k = form.weight();
        let v = lambda_star_scaled(params.lambda(form), k, s, &params.afe_config())?;
        Ok(LValue {
            value: l_from_scaled(&v, k, s),
            error: v.error_estimate() * l_factor_norm(k, s, v.ln_scale),
            terms: v.terms,
            method: self.name(),
        })
    }
}

impl LEvaluator for EulerEvaluator {
    fn name(&self) -> &'static str {
        "euler"
    }
    fn evaluate(&self, form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
        let p_max = params.euler_primes.min(form.n_max() as u64).min(params.max_terms as u64);
        let v = euler_product(form, s, p_max)?;
        Ok(LValue {
            value: v.value,
            error: v.tail_bound * v.value.norm(),
            terms: v.terms,
            method: self.name(),
        })
    }
}

impl LEvaluator for AutoEvaluator {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn evaluate(&self, form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
        if s.re > 1.0 {
            let limit = form.n_max().min(params.max_terms);
            if series::divisor_tail_bound(limit.max(1), s.re) <= params.accuracy {
                return DirichletEvaluator.evaluate(form, s, params);
            }
        }
        AfeEvaluator.evaluate(form, s, params)
    }
}

/// Named evaluators, looked up at run time.
pub struct EvaluatorRegistry {
    entries: Vec<Box<dyn LEvaluator>>,
}

impl EvaluatorRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn register(&mut self, evaluator: Box<dyn LEvaluator>) {
        self.entries.retain(|e| e.name() != evaluator.name());
        self.entries.push(evaluator);
    }

    pub fn get(&self, name: &str) -> Result<&dyn LEvaluator> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownEvaluator(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

impl Default for EvaluatorRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(AutoEvaluator));
        r.register(Box::new(DirichletEvaluator));
        r.register(Box::new(AfeEvaluator));
        r.register(Box::new(EulerEvaluator));
        r
    }
}

/// `L(s)` anywhere: Dirichlet series where rigorous, AFE otherwise.
pub fn l_value(form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
    AutoEvaluator.evaluate(form, s, params)
}

/// `L(s)` by the AFE, whatever the real part.
pub fn l_value_strip(form: &Eigenform, s: Complex64, params: &LParams) -> Result<LValue> {
    AfeEvaluator.evaluate(form, s, params)
}

pub fn lambda_star(form: &Eigenform, s: Complex64, params: &LParams) -> Result<AfeValue> {
    lambda_star_scaled(params.lambda(form), form.weight(), s, &params.afe_config())
}

/// `Λ(s, f)` scaled by [`completed_constant`] (level 1).
pub fn completed_lambda(form: &Eigenform, s: Complex64, params: &LParams) -> Result<Complex64> {
    let v = lambda_star(form, s, params)?;
    Ok(v.scaled * v.ln_scale.exp() * completed_constant(form.weight()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalEquationCheck {
    pub s: ComplexPoint,
    pub root_number: i32,
    /// `|Λ(s) - εΛ(1-s)| / max(|Λ(s)|, 1e-30)`.
    pub residual: f64,
    /// The sign `Λ(s)/Λ(1-s)` closest to ±1, measured.
    pub measured_sign: f64,
}

/// Compare `Λ(s)` and `εΛ(1-s)`, evaluating the latter on a different contour
/// so the check is not an algebraic identity of the method.
pub fn functional_equation_check(form: &Eigenform, s: Complex64, params: &LParams) -> Result<FunctionalEquationCheck> {
    let k = form.weight();
    let lambda = params.lambda(form);
    let a = lambda_star_scaled(lambda, k, s, &params.afe_config())?;
    let alt = AfeConfig {
        cutoff: params.afe_cutoff,
        ..AfeConfig::alternate()
    };
    let b = lambda_star_scaled(lambda, k, 1.0 - s, &alt)?;
    let b_in_a = b.scaled * (b.ln_scale - a.ln_scale).exp();
    let eps = form.root_number() as f64;
    let tiny = 1e-30 * (-a.ln_scale).exp();
    let residual = (a.scaled - eps * b_in_a).norm() / a.scaled.norm().max(tiny);
    let ratio = a.scaled / b_in_a;
    Ok(FunctionalEquationCheck {
        s: s.into(),
        root_number: form.root_number(),
        residual,
        measured_sign: ratio.re,
    })
}

/// Real function on the critical line with the zeros of `L(1/2 + it)`:
/// `Z(t) = Re(r Λ*(1/2+it)) (2π)^{1/2+κ} / |Γ(1/2+κ+it)|`, `r = 1` for
/// `ε = +1` and `r = -i` for `ε = -1`. `|Z(t)| = |L(1/2 + it)|`.
pub fn hardy_z(form: &Eigenform, t: f64, params: &LParams) -> Result<f64> {
    let v = lambda_star(form, Complex64::new(0.5, t), params)?;
    let rotated = if form.root_number() == 1 {
        v.scaled
    } else {
        v.scaled * Complex64::new(0.0, -1.0)
    };
    Ok(rotated.re * (2.0 * PI).powf(0.5 + afe::kappa(form.weight())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDerivative {
    /// `-L'/L(s)`.
    pub value: Complex64,
    pub error: f64,
    pub method: &'static str,
}

/// Radius and node count of the Cauchy-integral derivative.
const CAUCHY_RADIUS: f64 = 0.1;
const CAUCHY_NODES: usize = 24;

/// `-L'/L(s)` for `Re s > 1`: the `Λ_f` Dirichlet series when its tail bound
/// meets the target, otherwise a Cauchy-integral derivative of AFE values.
pub fn log_derivative(form: &Eigenform, s: Complex64, params: &LParams) -> Result<LogDerivative> {
    if s.re <= 1.0 {
        return Err(Error::OutsideAbsoluteConvergence(s.re));
    }
    if let Ok(v) = log_derivative_series(form, s, params.accuracy) {
        return Ok(LogDerivative {
            value: v.value,
            error: v.tail_bound,
            method: "series",
        });
    }
    let centre = l_value_strip(form, s, params)?;
    let mut derivative = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..CAUCHY_NODES {
        let u = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CAUCHY_NODES as f64);
        let v = l_value_strip(form, s + CAUCHY_RADIUS * u, params)?;
        derivative += v.value / u;
        err += v.error;
    }
    derivative /= CAUCHY_RADIUS * CAUCHY_NODES as f64;
    err /= CAUCHY_RADIUS * CAUCHY_NODES as f64;
    let value = -derivative / centre.value;
    Ok(LogDerivative {
        value,
        error: (err + value.norm() * centre.error) / centre.value.norm(),
        method: "cauchy",
    })
}
