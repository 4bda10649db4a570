use crate::forms::Eigenform;
use crate::lfun::{l_value, LParams};
use crate::numeric::zeta::zeta;
use crate::{Error, Result};
use num_complex::Complex64;

/// A multiplicative function with real values, `|h(n)| <= τ(n)`, and its
/// Dirichlet series `H(s)`.
pub trait ArithmeticFunction: Send + Sync {
    fn name(&self) -> &str;
    /// Largest `n` at which `h` is known.
    fn n_max(&self) -> usize;
    fn at_prime(&self, p: u64) -> f64;
    fn dirichlet(&self, s: Complex64) -> Result<Complex64>;
}

/// `h = λ_f`, `H = L(·, f)`.
pub struct FormFunction<'a> {
    form: &'a Eigenform,
    params: LParams,
}

impl<'a> FormFunction<'a> {
    pub fn new(form: &'a Eigenform, params: LParams) -> Self {
        Self { form, params }
    }

    pub fn form(&self) -> &Eigenform {
        self.form
    }
}

impl ArithmeticFunction for FormFunction<'_> {
    fn name(&self) -> &str {
        "eigenform"
    }
    fn n_max(&self) -> usize {
        self.form.n_max()
    }
    fn at_prime(&self, p: u64) -> f64 {
        self.form.lambda(p as usize)
    }
    fn dirichlet(&self, s: Complex64) -> Result<Complex64> {
        Ok(l_value(self.form, s, &self.params)?.value)
    }
}

/// `h ≡ 1`, `H = ζ`.
pub struct ConstantOne {
    n_max: usize,
}

impl ConstantOne {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }
}

impl ArithmeticFunction for ConstantOne {
    fn name(&self) -> &str {
        "one"
    }
    fn n_max(&self) -> usize {
        self.n_max
    }
    fn at_prime(&self, _p: u64) -> f64 {
        1.0
    }
    fn dirichlet(&self, s: Complex64) -> Result<Complex64> {
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::invalid("zeta has a pole at s = 1"));
        }
        Ok(zeta(s))
    }
}

/// Möbius function, `H = 1/ζ`.
pub struct MobiusToy {
    n_max: usize,
}

impl MobiusToy {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }
}

impl ArithmeticFunction for MobiusToy {
    fn name(&self) -> &str {
        "mobius"
    }
    fn n_max(&self) -> usize {
        self.n_max
    }
    fn at_prime(&self, _p: u64) -> f64 {
        -1.0
    }
    fn dirichlet(&self, s: Complex64) -> Result<Complex64> {
        if s.re <= 1.0 {
            return Err(Error::OutsideAbsoluteConvergence(s.re));
        }
        Ok(zeta(s).inv())
    }
}

/// Named plug-ins; the eigenform entry borrows the form.
pub struct FunctionRegistry<'a> {
    entries: Vec<Box<dyn ArithmeticFunction + 'a>>,
}

impl<'a> FunctionRegistry<'a> {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_form(form: &'a Eigenform, params: LParams) -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FormFunction::new(form, params)));
        r.register(Box::new(ConstantOne::new(form.n_max())));
        r.register(Box::new(MobiusToy::new(form.n_max())));
        r
    }

    pub fn register(&mut self, h: Box<dyn ArithmeticFunction + 'a>) {
        self.entries.retain(|e| e.name() != h.name());
        self.entries.push(h);
    }

    pub fn get(&self, name: &str) -> Result<&(dyn ArithmeticFunction + 'a)> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::invalid(format!("unknown arithmetic function {name:?}")))
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name().to_string()).collect()
    }
}
