//! Verification pipelines: identities checked to a tolerance, and reports of
//! estimates whose implied constants are unknown.

mod assembly;
mod explicit;
mod plancherel;

pub use assembly::{
    cor12_check, eq42_residual, lemma41_report, prop43_pipeline, theorem1_explorer, theorem1_l_for_radius,
    theorem1_min_radius, theorem1_radius, window_max, xi_window, WindowMax, LEMMA41_OFFSETS, WINDOW_STEPS,
};
pub use explicit::{
    explicit_formula_check, explicit_point, explicit_sweep, lemma21_check, lemma21_doubling, lemma21_point,
    lemma21_sweep, zeta_squared_ingredient, ExplicitPoint, Lemma21Point, EXPLICIT_SPREAD_LIMIT, HEIGHT_MARGIN,
    TAIL_FRACTION,
};
pub use plancherel::{
    gaussian_transform, lhs_tail_bound, plancherel_check, plancherel_coefficients, plancherel_lhs, plancherel_rhs,
    plancherel_sides, y_cut, PlancherelSides, GAUSSIAN_WIDTH, PLANCHEREL_TOLERANCE,
};

pub use crate::report::{Report as VerificationReport, Status};

use crate::forms::Eigenform;
use crate::lfun::{LParams, ZeroTable};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Default absolute tolerance of the adaptive quadratures.
pub const QUAD_TOLERANCE: f64 = 1e-9;

/// Everything a check reads; all of it is shared read-only.
#[derive(Clone, Copy)]
pub struct CheckContext<'a> {
    pub form: &'a Eigenform,
    pub zeros: Option<&'a ZeroTable>,
    pub params: LParams,
    pub quad_tol: f64,
}

impl<'a> CheckContext<'a> {
    pub fn new(form: &'a Eigenform) -> Self {
        Self {
            form,
            zeros: None,
            params: LParams::default(),
            quad_tol: QUAD_TOLERANCE,
        }
    }

    pub fn with_zeros(mut self, zeros: &'a ZeroTable) -> Self {
        self.zeros = Some(zeros);
        self
    }

    pub fn zeros(&self) -> Result<&'a ZeroTable> {
        self.zeros.ok_or(Error::EmptyZeroTable)
    }
}

/// Named real parameters of a check (`gamma`, `T`, `phi`, `t`, `y0`, `x`,
/// `L`, `radius`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckArgs(BTreeMap<String, f64>);

impl CheckArgs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }
}

impl FromIterator<(String, f64)> for CheckArgs {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext, args: &CheckArgs) -> Result<VerificationReport>;
}

struct Plancherel;
struct Lemma21;
struct Explicit;
struct Prop43;
struct Theorem1;
struct Cor12;
struct Lemma41;

impl Check for Plancherel {
    fn name(&self) -> &'static str {
        "plancherel"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        plancherel_check(ctx, a.get_or("gamma", 0.3), a.get_or("T", 1.0), a.get_or("phi", 0.0))
    }
}

impl Check for Lemma21 {
    fn name(&self) -> &'static str {
        "lemma21"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        lemma21_check(ctx, a.get_or("gamma", 0.25), a.get_or("t", 0.0))
    }
}

impl Check for Explicit {
    fn name(&self) -> &'static str {
        "explicit"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        explicit_formula_check(ctx, a.get_or("gamma", 0.5), a.get_or("t", 0.0))
    }
}

impl Check for Prop43 {
    fn name(&self) -> &'static str {
        "prop43"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        prop43_pipeline(ctx, a.get_or("y0", 9.0), a.get_or("gamma", 0.3))
    }
}

impl Check for Theorem1 {
    fn name(&self) -> &'static str {
        "theorem1"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        let x = a.get_or("x", 1e4);
        let k = ctx.form.weight();
        let l = match (a.get("L"), a.get("radius")) {
            (Some(l), _) => l,
            (None, Some(radius)) => theorem1_l_for_radius(k, x, radius).ok_or_else(|| {
                Error::invalid(format!(
                    "radius {radius} unreachable: the smallest radius at x = {x} is {:.4}",
                    theorem1_min_radius(k, x)
                ))
            })?,
            (None, None) => 100.0 * a.get_or("gamma", 0.25) * x.ln(),
        };
        theorem1_explorer(ctx, x, l)
    }
}

impl Check for Cor12 {
    fn name(&self) -> &'static str {
        "cor12"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        Ok(cor12_check(ctx.zeros()?, a.get_or("phi", 0.0)))
    }
}

impl Check for Lemma41 {
    fn name(&self) -> &'static str {
        "lemma41"
    }
    fn run(&self, ctx: &CheckContext, a: &CheckArgs) -> Result<VerificationReport> {
        lemma41_report(ctx, a.get_or("y0", 9.0))
    }
}

pub struct CheckRegistry {
    entries: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.entries.retain(|c| c.name() != check.name());
        self.entries.push(check);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.entries
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::UnknownCheck(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|c| c.name()).collect()
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Plancherel));
        r.register(Box::new(Lemma21));
        r.register(Box::new(Explicit));
        r.register(Box::new(Prop43));
        r.register(Box::new(Theorem1));
        r.register(Box::new(Cor12));
        r.register(Box::new(Lemma41));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_and_lookup() {
        let r = CheckRegistry::default();
        assert_eq!(r.names(), ["plancherel", "lemma21", "explicit", "prop43", "theorem1", "cor12", "lemma41"]);
        assert!(matches!(r.get("nope"), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn checks_needing_zeros_say_so() {
        let f = Eigenform::generate(12, 100).unwrap();
        let ctx = CheckContext::new(&f);
        let err = CheckRegistry::default().get("cor12").unwrap().run(&ctx, &CheckArgs::new());
        assert!(matches!(err, Err(Error::EmptyZeroTable)));
    }
}
