use cuspsum_core::forms::Eigenform;
use cuspsum_core::lfun::{find_zeros, LParams, ZeroTable};
use cuspsum_core::verify::*;
use std::sync::OnceLock;
use std::time::Instant;

fn delta() -> &'static Eigenform {
    static F: OnceLock<Eigenform> = OnceLock::new();
    F.get_or_init(|| Eigenform::generate(12, 1_000_000).unwrap())
}

fn zeros() -> &'static ZeroTable {
    static Z: OnceLock<ZeroTable> = OnceLock::new();
    Z.get_or_init(|| {
        let start = Instant::now();
        let z = find_zeros(delta(), 100.0, &LParams::default()).unwrap();
        println!("zeros to 100: {} in {:?}", z.ordinates.len(), start.elapsed());
        z
    })
}

fn ctx() -> CheckContext<'static> {
    CheckContext::new(delta()).with_zeros(zeros())
}

#[test]
fn plancherel_identity_holds() {
    for (g, t, phi) in [(0.3, 1.0, 0.0), (0.3, 1.0, 1.5), (0.1, 0.5, 0.0), (0.5, 0.5, 1.5)] {
        let start = Instant::now();
        let r = plancherel_check(&ctx(), g, t, phi).unwrap();
        println!("plancherel {g} {t} {phi}: gap {} lhs {} rhs {} {:?} {:?}", r.ratio, r.lhs, r.rhs, r.errors, start.elapsed());
        assert_eq!(r.status, Status::Pass);
    }
}

#[test]
fn plancherel_refinement_is_self_consistent() {
    let coarse = ctx();
    let fine = CheckContext { quad_tol: coarse.quad_tol / 2.0, ..coarse };
    let a = plancherel_sides(&coarse, 0.3, 1.0, 1.5).unwrap();
    let b = plancherel_sides(&fine, 0.3, 1.0, 1.5).unwrap();
    assert!((a.lhs - b.lhs).norm() <= a.lhs_quadrature.max(1e-13));
    assert!((a.rhs - b.rhs).norm() <= a.rhs_quadrature.max(1e-13) + 1e-10);
}

#[test]
fn explicit_and_lemma21_sweeps() {
    let gammas = [0.1, 0.2, 0.3, 0.4, 0.5];
    let ts: Vec<f64> = (0..=60).map(|j| j as f64 * 0.5).collect();
    let start = Instant::now();
    let e = explicit_sweep(&ctx(), &gammas, &ts).unwrap();
    println!("explicit: {:?} {:?} {:?}", e.meta, e.errors, start.elapsed());
    assert_eq!(e.status, Status::Pass);
    let start = Instant::now();
    let l = lemma21_doubling(&ctx(), &gammas, &ts).unwrap();
    println!("lemma21: {:?} {:?} {:?}", l.meta, l.errors, start.elapsed());
    assert_eq!(l.status, Status::Pass);
}

#[test]
fn explicit_conjugation_symmetry() {
    let a = explicit_point(&ctx(), 0.5, 7.25).unwrap();
    let b = explicit_point(&ctx(), 0.5, -7.25).unwrap();
    assert!((a.residual - b.residual).abs() < 1e-9, "{} {}", a.residual, b.residual);
    let r = explicit_formula_check(&ctx(), 0.5, 0.0).unwrap();
    assert!(r.errors.contains_key("zero_tail"));
}

#[test]
fn assembly_reports() {
    for name in ["prop43", "theorem1", "lemma41", "lemma21", "cor12"] {
        let start = Instant::now();
        let r = CheckRegistry::default().get(name).unwrap().run(&ctx(), &CheckArgs::new()).unwrap();
        println!("{name}: lhs {} rhs {} ratio {} status {:?} meta {:?} ({:?})", r.lhs, r.rhs, r.ratio, r.status, r.meta, start.elapsed());
    }
    let r = lemma41_report(&ctx(), 9.0).unwrap();
    let z = &r.meta["eq42_residual"];
    assert!(z["re"].as_f64().unwrap().is_finite());
}

#[test]
fn explicit_identity_gap_within_zero_tail() {
    for (g, t) in [(0.1, 0.0), (0.25, 12.5), (0.5, 30.0), (0.4, 21.0)] {
        let p = explicit_point(&ctx(), g, t).unwrap();
        let slack = 1e-9 + p.lhs_error;
        assert!(p.identity_gap <= slack && p.identity_gap >= -p.zero_tail - slack, "{p:?}");
    }
}

#[test]
fn zero_sum_grows_within_tail_when_table_grows() {
    use cuspsum_core::lfun::zero_sum;
    let full = zeros();
    for h in [40.0, 60.0, 80.0] {
        let small = full.truncated(h);
        for (g, c) in [(0.1, 0.0), (0.3, 17.0), (0.5, 30.0), (0.2, 35.0)] {
            let a = zero_sum(&small, 12, g, c, 0.0).unwrap();
            let b = zero_sum(full, 12, g, c, 0.0).unwrap();
            assert!(b.sum >= a.sum);
            assert!(b.sum - a.sum <= a.tail_bound, "h={h} g={g} c={c}: {} > {}", b.sum - a.sum, a.tail_bound);
        }
    }
}
