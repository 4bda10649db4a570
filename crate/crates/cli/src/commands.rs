//! Single-purpose subcommands.

use crate::config::{parse_grid, Format, RunConfig};
use crate::output::{emit, json_document, text_document, Provenance};
use anyhow::Context;
use cuspsum_core::forms::{cache_load, cache_store, write_lambda_csv, Eigenform};
use cuspsum_core::lfun::{
    compare_zero_tables, find_zeros, import_zero_table, write_zero_table, EvaluatorRegistry, LParams, ZeroTable,
};
use cuspsum_core::pretentious::{distance_sq, find_phi, FunctionRegistry};
use cuspsum_core::sums::{growth_scan, log_grid, write_growth_csv};
use cuspsum_core::verify::{plancherel_coefficients, CheckArgs, CheckContext, CheckRegistry, Status, VerificationReport};
use cuspsum_core::Error as CoreError;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

pub fn lparams(cfg: &RunConfig) -> LParams {
    LParams {
        accuracy: cfg.accuracy,
        ..LParams::default()
    }
}

/// The eigenform of weight `k` with `n` coefficients, from the cache when
/// one is configured; a missing cache file is generated and stored.
pub fn load_form(cfg: &RunConfig, k: u32, n: usize) -> anyhow::Result<Eigenform> {
    let Some(dir) = &cfg.cache_dir else {
        return Ok(Eigenform::generate(k, n)?);
    };
    let path = dir.join(format!("k{k}_n{n}.cache"));
    if path.exists() {
        return cache_load(&path, Some(k)).with_context(|| format!("loading {}", path.display()));
    }
    let form = Eigenform::generate(k, n)?;
    std::fs::create_dir_all(dir)?;
    cache_store(&form, &path)?;
    Ok(form)
}

pub fn load_zeros(cfg: &RunConfig, form: &Eigenform) -> anyhow::Result<ZeroTable> {
    match &cfg.zeros_file {
        Some(p) => import_zero_table(p).with_context(|| format!("importing {}", p.display())),
        None => Ok(find_zeros(form, cfg.zeros_tmax, &lparams(cfg))?),
    }
}

fn csv_f(x: f64) -> String {
    format!("{x:.17e}")
}

fn write_doc<T: Serialize>(cfg: &RunConfig, out: Option<&Path>, payload: &T, csv: impl FnOnce() -> String) -> anyhow::Result<()> {
    let prov = Provenance::of(cfg);
    let bytes = match cfg.format {
        Format::Json => json_document(&prov, payload)?.into_bytes(),
        Format::Csv => text_document(&prov, csv().as_bytes()),
    };
    emit(cfg, out, &bytes)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CoeffKind {
    /// Integer coefficients a(n)
    A,
    /// Normalized coefficients a(n)/n^((k-1)/2)
    Lambda,
}

pub fn coeffs(cfg: &RunConfig, what: CoeffKind, out: Option<&Path>) -> anyhow::Result<()> {
    let form = load_form(cfg, cfg.weight, cfg.nmax_or(100))?;
    let n_max = form.n_max();
    let rows: Vec<Value> = (1..=n_max)
        .map(|n| match what {
            CoeffKind::A => json!({ "n": n, "a": form.a(n).to_string() }),
            CoeffKind::Lambda => json!({ "n": n, "lambda": form.lambda(n) }),
        })
        .collect();
    let payload = json!({ "weight": form.weight(), "nmax": n_max, "rows": rows });
    write_doc(cfg, out, &payload, || {
        let mut body = Vec::new();
        match what {
            CoeffKind::A => {
                body.extend_from_slice(b"n,a\n");
                for n in 1..=n_max {
                    body.extend_from_slice(format!("{n},{}\n", form.a(n)).as_bytes());
                }
            }
            CoeffKind::Lambda => write_lambda_csv(&form, &mut body).expect("in-memory write"),
        }
        String::from_utf8(body).expect("ascii")
    })
}

pub struct SumsArgs {
    pub x: Option<f64>,
    pub phi: f64,
    pub x_max: Option<f64>,
    pub points: usize,
    pub exponent: Option<f64>,
}

pub fn sums(cfg: &RunConfig, a: &SumsArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let xs = match (a.x, a.x_max) {
        (Some(x), None) => vec![x],
        (None, Some(top)) => log_grid(top, a.points),
        _ => return Err(CoreError::InvalidArgument("give exactly one of --x and --x-max".into()).into()),
    };
    let top = xs.last().copied().unwrap_or(1.0);
    if !(top >= 1.0) {
        return Err(CoreError::InvalidArgument(format!("x = {top} must be at least 1")).into());
    }
    let form = load_form(cfg, cfg.weight, cfg.nmax_or(top.floor() as usize))?;
    let scan = growth_scan(&form, &xs, a.exponent.unwrap_or(0.5), a.phi)?;
    let rows: Vec<Value> = scan
        .rows
        .iter()
        .map(|r| {
            let mut row = json!({
                "x": r.x, "re": r.sum.re, "imag": r.sum.im, "abs": r.sum.norm(),
                "quality_Q": r.quality,
            });
            if a.exponent.is_some() {
                row["ratio"] = json!(r.ratio);
                row["running_max"] = json!(r.running_max);
            }
            row
        })
        .collect();
    let payload = json!({ "weight": form.weight(), "phi": a.phi, "exponent": a.exponent, "rows": rows });
    write_doc(cfg, out, &payload, || {
        let mut body = Vec::new();
        write_growth_csv(&scan, a.exponent.is_some(), &mut body).expect("in-memory write");
        String::from_utf8(body).expect("ascii")
    })
}

pub fn distance(cfg: &RunConfig, t: f64, x: f64, function: &str, terms: bool, out: Option<&Path>) -> anyhow::Result<()> {
    let form = load_form(cfg, cfg.weight, cfg.nmax_or(x.floor().max(10.0) as usize))?;
    let registry = FunctionRegistry::with_form(&form, lparams(cfg));
    let profile = distance_sq(registry.get(function)?, t, x)?;
    let payload = json!({
        "function": profile.function,
        "t": profile.t,
        "x": profile.x,
        "distance_sq": profile.value_sq,
        "primes": profile.prime_terms.len(),
        "prime_terms": if terms { json!(profile.prime_terms) } else { Value::Null },
    });
    write_doc(cfg, out, &payload, || {
        let mut s = String::from("p,term,cumulative\n");
        let mut acc = cuspsum_core::numeric::compensated::Accumulator::new();
        for pt in &profile.prime_terms {
            acc.add(pt.term);
            let _ = writeln!(s, "{},{},{}", pt.p, csv_f(pt.term), csv_f(acc.value()));
        }
        s
    })
}

pub fn phi(cfg: &RunConfig, x: f64, function: &str, out: Option<&Path>) -> anyhow::Result<()> {
    let form = load_form(cfg, cfg.weight, cfg.nmax_or((x.floor() as usize).max(20_000)))?;
    let registry = FunctionRegistry::with_form(&form, lparams(cfg));
    let r = find_phi(registry.get(function)?, x)?;
    write_doc(cfg, out, &r, || {
        format!(
            "x,phi,M,t_max,grid_step,grid_points,refinement_iterations\n{},{},{},{},{},{},{}\n",
            r.x,
            csv_f(r.phi),
            csv_f(r.m),
            csv_f(r.t_max),
            r.grid_step,
            r.grid_points,
            r.refinement_iterations
        )
    })
}

pub fn lvalue(cfg: &RunConfig, sigma: f64, t: f64, method: &str, out: Option<&Path>) -> anyhow::Result<()> {
    let registry = EvaluatorRegistry::default();
    let evaluator = registry.get(method)?;
    let form = load_form(cfg, cfg.weight, cfg.nmax_or(100_000))?;
    let s = Complex64::new(sigma, t);
    let v = evaluator.evaluate(&form, s, &lparams(cfg))?;
    let payload = json!({
        "weight": form.weight(), "sigma": sigma, "t": t,
        "re": v.value.re, "im": v.value.im, "abs": v.value.norm(),
        "error": v.error, "terms": v.terms, "method": v.method,
    });
    write_doc(cfg, out, &payload, || {
        format!(
            "sigma,t,re,im,abs,error,terms,method\n{sigma},{t},{},{},{},{},{},{}\n",
            csv_f(v.value.re),
            csv_f(v.value.im),
            csv_f(v.value.norm()),
            csv_f(v.error),
            v.terms,
            v.method
        )
    })
}

pub fn zeros(cfg: &RunConfig, tmax: Option<f64>, compare: Option<&Path>, tol: f64, out: Option<&Path>) -> anyhow::Result<()> {
    let mut cfg = cfg.clone();
    if let Some(t) = tmax {
        cfg.zeros_tmax = t;
    }
    cfg.validate()?;
    let form = load_form(&cfg, cfg.weight, cfg.nmax_or(20_000))?;
    let table = load_zeros(&cfg, &form)?;
    let comparison = match compare {
        Some(p) => {
            let reference = import_zero_table(p).with_context(|| format!("importing {}", p.display()))?;
            let height = table.height_scanned.min(reference.height_scanned);
            Some(compare_zero_tables(&table, &reference, height, tol))
        }
        None => None,
    };
    let payload = json!({ "weight": form.weight(), "table": table, "comparison": comparison });
    write_doc(&cfg, out, &payload, || {
        let mut body = Vec::new();
        if let Some(c) = &comparison {
            body.extend_from_slice(
                format!(
                    "# compared={} matched={} max_deviation={:e} missing={}\n",
                    c.compared,
                    c.matched,
                    c.max_deviation,
                    c.missing.len()
                )
                .as_bytes(),
            );
        }
        write_zero_table(&table, &mut body).expect("in-memory write");
        String::from_utf8(body).expect("utf8")
    })
}

pub struct VerifyArgs {
    pub check: String,
    pub values: CheckArgs,
    pub grid: bool,
    pub t_values: String,
    pub phi_values: String,
}

/// Checks whose pipelines read the zero table.
const NEEDS_ZEROS: [&str; 5] = ["lemma21", "explicit", "prop43", "theorem1", "cor12"];

fn verify_nmax(a: &VerifyArgs, gammas: &[f64], ts: &[f64]) -> usize {
    let mut n = 100_000usize;
    if a.check == "plancherel" {
        for &g in gammas {
            for &t in ts {
                n = n.max(plancherel_coefficients(g, t));
            }
        }
    }
    if let Some(y0) = a.values.get("y0") {
        n = n.max(y0.exp().ceil() as usize + 1);
    }
    if let Some(x) = a.values.get("x") {
        n = n.max(x.ceil() as usize + 1);
    }
    n
}

#[derive(Serialize)]
struct GridReport {
    check: String,
    status: Status,
    reports: Vec<VerificationReport>,
}

pub fn verify(cfg: &RunConfig, a: &VerifyArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let registry = CheckRegistry::default();
    let check = registry.get(&a.check)?;
    let (gammas, big_ts, phis) = if a.grid && a.check == "plancherel" {
        (cfg.gamma_grid.clone(), parse_grid(&a.t_values)?, parse_grid(&a.phi_values)?)
    } else {
        (vec![a.values.get_or("gamma", 0.3)], vec![a.values.get_or("T", 1.0)], vec![a.values.get_or("phi", 0.0)])
    };
    let form = load_form(cfg, cfg.weight, cfg.nmax_or(verify_nmax(a, &gammas, &big_ts)))?;
    let zeros = if NEEDS_ZEROS.contains(&a.check.as_str()) {
        Some(load_zeros(cfg, &form)?)
    } else {
        None
    };
    let mut ctx = CheckContext::new(&form);
    ctx.params = lparams(cfg);
    ctx.quad_tol = cfg.quad_tol;
    if let Some(z) = &zeros {
        ctx = ctx.with_zeros(z);
    }
    let prov = Provenance::of(cfg);
    let doc = if !a.grid {
        json_document(&prov, &check.run(&ctx, &a.values)?)?
    } else {
        match a.check.as_str() {
            "plancherel" => {
                let mut reports = Vec::new();
                for &g in &gammas {
                    for &t in &big_ts {
                        for &p in &phis {
                            let args = a.values.clone().set("gamma", g).set("T", t).set("phi", p);
                            reports.push(check.run(&ctx, &args)?);
                        }
                    }
                }
                let status = if reports.iter().all(|r| r.status == Status::Pass) {
                    Status::Pass
                } else {
                    Status::Fail
                };
                json_document(&prov, &GridReport { check: "plancherel".into(), status, reports })?
            }
            "explicit" => json_document(&prov, &cuspsum_core::verify::explicit_sweep(&ctx, &cfg.gamma_grid, &cfg.t_grid)?)?,
            "lemma21" => json_document(&prov, &cuspsum_core::verify::lemma21_doubling(&ctx, &cfg.gamma_grid, &cfg.t_grid)?)?,
            other => return Err(CoreError::InvalidArgument(format!("check {other:?} has no sweep")).into()),
        }
    };
    emit(cfg, out, doc.as_bytes())?;
    Ok(())
}
