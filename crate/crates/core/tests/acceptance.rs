//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its elapsed time (visible under --nocapture).

use modsmooth_core::bestapprox::{best_approx, en_sequence, potapov_ratio, PolyApprox};
use modsmooth_core::cheb::chebyshev_t;
use modsmooth_core::differences::iterated_integral_identity_check;
use modsmooth_core::funcspace::{by_name, catalog, FunctionSpec};
use modsmooth_core::geometry::{endpoint_map, phi, step_domain, step_weight};
use modsmooth_core::moduli::{omega, ModulusQuery};
use modsmooth_core::quadrature::{Lp, QuadratureRule};
use modsmooth_core::sampling::SplitMix64;
use modsmooth_core::smoothcheck::vanishing_limit_probe;
use modsmooth_core::verify::{default_n_grid, default_t_grid, log_grid, Verdict, Verifier};
use std::time::Instant;

fn matrix_functions() -> Vec<FunctionSpec> {
    ["x^3", "abs_x_1", "abs_x_1.5", "abs_x_2.5", "one_minus_x_1.5", "exp", "truncpow_2"]
        .iter()
        .map(|n| by_name(n).expect("catalog member"))
        .collect()
}

const MATRIX_K: [u32; 3] = [1, 2, 3];
const MATRIX_R: [u32; 2] = [0, 1];

fn matrix_p() -> [Lp; 3] {
    [Lp::Finite(1.0), Lp::Finite(2.0), Lp::Infinity]
}

fn done(criterion: u32, name: &str, start: Instant) {
    println!(
        "ACCEPTANCE {criterion} ({name}): PASS [{:.2}s]",
        start.elapsed().as_secs_f64()
    );
}

/// Criterion 1: the step-weight and domain properties on 10^3 random
/// samples, closed forms at 1e-12, finite-difference slope at 1e-6.
#[test]
fn criterion_01_geometry_properties() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC0FFEE);
    let mut tested = 0;
    while tested < 1000 {
        let delta = rng.in_range(1e-3, 2.0);
        let dom = step_domain(delta);
        if dom.is_empty() {
            continue;
        }
        let x = rng.in_range(dom.lo, dom.hi);
        let reach = x.abs() + delta * phi(x) / 2.0;
        let u = rng.in_range(-reach, reach).clamp(-1.0, 1.0);
        // (i) w_delta(x) <= phi(u) on the stencil reach
        assert!(step_weight(delta, x) <= phi(u) + 1e-12, "(i) delta={delta} x={x} u={u}");
        // (ii) w_delta <= phi
        assert!(step_weight(delta, x) <= phi(x) + 1e-12, "(ii) delta={delta} x={x}");
        // (iii) phi <= 2 w_delta on D_{2 delta}
        let dom2 = step_domain(2.0 * delta);
        if !dom2.is_empty() {
            let x2 = rng.in_range(dom2.lo, dom2.hi);
            assert!(phi(x2) <= 2.0 * step_weight(delta, x2) + 1e-12, "(iii) delta={delta} x={x2}");
        }
        // (iv) delta |phi'(x)| <= 1 via the closed form |x|/phi(x)
        assert!(delta * x.abs() / phi(x) <= 1.0 + 1e-12, "(iv) delta={delta} x={x}");
        // (v) closed-form slope of the endpoint map in [1/2, 3/2],
        //     finite-difference slope within 1e-6 of the same window
        let frac = rng.in_range(-1.0, 1.0);
        let ds = frac * delta;
        let slope = 1.0 - ds * x / (2.0 * phi(x));
        assert!((0.5 - 1e-12..=1.5 + 1e-12).contains(&slope), "(v) delta={delta} x={x}");
        let h = 1e-7 * (dom.hi - dom.lo).max(1e-3);
        if x - h > dom.lo && x + h < dom.hi {
            let fd = (endpoint_map(ds, x + h) - endpoint_map(ds, x - h)) / (2.0 * h);
            assert!(
                (0.5 - 1e-6..=1.5 + 1e-6).contains(&fd),
                "(v-fd) delta={delta} x={x} fd={fd}"
            );
        }
        // (vi) nesting
        let d_big = rng.in_range(delta, 2.0);
        let dom_big = step_domain(d_big);
        if !dom_big.is_empty() {
            assert!(dom.lo <= dom_big.lo && dom_big.hi <= dom.hi, "(vi) {delta} vs {d_big}");
        }
        tested += 1;
    }
    done(1, "geometry suite", start);
}

/// Criterion 2: the k-th symmetric difference equals the k-fold iterated
/// integral of f^(k) within 1e-10 for k <= 3, 50 random queries.
#[test]
fn criterion_02_difference_identity() {
    let start = Instant::now();
    let smooth = ["exp", "x^3", "x^4", "x^5", "x^6"];
    let mut rng = SplitMix64::new(0xBEEF);
    let mut checked = 0;
    while checked < 50 {
        let f = by_name(smooth[(rng.next_u64() % smooth.len() as u64) as usize]).unwrap();
        let k = 1 + (rng.next_u64() % 3) as u32;
        let h = rng.in_range(0.01, 0.3);
        let margin = k as f64 * h / 2.0 + 0.05;
        let x = rng.in_range(-1.0 + margin, 1.0 - margin);
        let (diff, quad) = iterated_integral_identity_check(&f, k, h, x).unwrap();
        assert!(
            (diff - quad).abs() <= 1e-10 * (1.0 + diff.abs()),
            "{} k={k} h={h} x={x}: {diff} vs {quad}",
            f.name
        );
        checked += 1;
    }
    done(2, "difference identity", start);
}

/// Criterion 3: closed-form modulus values for the monomials
/// (sup-resolution limited to 1e-6 relative). The k = 2 value is the one
/// the definition forces: the second difference of x^2 is 2 h^2 phi^2.
#[test]
fn criterion_03_modulus_exact_values() {
    let start = Instant::now();
    let line = by_name("x^1").unwrap();
    let square = by_name("x^2").unwrap();
    for &t in &[0.05, 0.1, 0.3] {
        let w1 = omega(&ModulusQuery::new(&line, 1, 0, Lp::Infinity, t).unwrap()).unwrap().value;
        assert!((w1 - t).abs() <= 1e-6 * t, "omega_(1,0)(x, {t}) = {w1}");
        let w2 = omega(&ModulusQuery::new(&square, 2, 0, Lp::Infinity, t).unwrap()).unwrap().value;
        let expect = 2.0 * t * t;
        assert!((w2 - expect).abs() <= 1e-6 * expect, "omega_(2,0)(x^2, {t}) = {w2}");
    }
    done(3, "modulus exact values", start);
}

/// Criterion 4: the chain inequality over the full verification matrix;
/// omega* <= omega to 1e-8 relative on every query, and both sandwich
/// constants at most 100 per (k, r, p) cell.
#[test]
fn criterion_04_chain_inequality() {
    let start = Instant::now();
    let v = Verifier::default();
    let funcs = matrix_functions();
    for &k in &MATRIX_K {
        for &r in &MATRIX_R {
            for p in matrix_p() {
                let mut upper = 0.0_f64; // omega / Khat
                let mut lower = 0.0_f64; // Khat / omega*
                for f in &funcs {
                    let report = v.check_equivalence(f, k, r, p, &default_t_grid(k)).unwrap();
                    assert_ne!(
                        report.verdict,
                        Verdict::Fail,
                        "cell k={k} r={r} p={p} f={}: {}",
                        f.name,
                        report.tolerance_note
                    );
                    for row in &report.rows {
                        if row.is_degenerate() {
                            continue;
                        }
                        if row.params.contains("side=omega_vs_k") {
                            // rhs carries the sqrt(2) surrogate slack
                            upper = upper.max(core::f64::consts::SQRT_2 * row.lhs / row.rhs);
                        } else {
                            lower = lower.max(row.lhs / row.rhs);
                        }
                    }
                }
                assert!(upper <= 100.0, "omega/Khat = {upper} in cell k={k} r={r} p={p}");
                assert!(lower <= 100.0, "Khat/omega* = {lower} in cell k={k} r={r} p={p}");
            }
        }
    }
    done(4, "chain inequality", start);
}

/// Criterion 5: the lambda^k scaling bound with fitted C <= 10.
#[test]
fn criterion_05_scaling() {
    let start = Instant::now();
    let v = Verifier::default();
    let mut fitted = 0.0_f64;
    for f in matrix_functions() {
        for &k in &MATRIX_K {
            for &r in &MATRIX_R {
                for p in matrix_p() {
                    let t_grid = log_grid(0.01, 2.0 / k as f64, 4);
                    let report = v.check_scaling(&f, k, r, p, &t_grid, &[2.0, 4.0]).unwrap();
                    assert_ne!(report.verdict, Verdict::Fail, "f={} k={k} r={r} p={p}: C = {}",
                        f.name, report.fitted_constant);
                    if report.verdict == Verdict::Pass {
                        fitted = fitted.max(report.fitted_constant);
                    }
                }
            }
        }
    }
    assert!(fitted <= 10.0, "global scaling constant {fitted}");
    done(5, "scaling", start);
}

/// Criterion 6: best-approximation oracles.
#[test]
fn criterion_06_best_approx_oracles() {
    let start = Instant::now();
    let rule = QuadratureRule::default();
    let res = best_approx(&by_name("x^2").unwrap(), 2, Lp::Infinity, &rule).unwrap();
    assert!((res.error - 0.5).abs() <= 1e-9, "E_2(x^2)_inf = {}", res.error);
    let res = best_approx(&by_name("x^1").unwrap(), 1, Lp::Finite(2.0), &rule).unwrap();
    assert!(
        (res.error - (2.0f64 / 3.0).sqrt()).abs() <= 1e-9,
        "E_1(x)_2 = {}",
        res.error
    );
    let f = by_name("abs_x_1").unwrap();
    let res = best_approx(&f, 2, Lp::Infinity, &rule).unwrap();
    assert!((res.error - 0.5).abs() <= 1e-8, "E_2(|x|)_inf = {}", res.error);
    let cert = res.certificate.as_ref().expect("certificate");
    assert!(cert.len() >= 3);
    let poly = res.poly();
    let mut prev = 0.0;
    for &x in cert {
        let r = f.eval(x, 0).unwrap() - poly.eval(x);
        assert!(r.abs() >= res.error * (1.0 - 1e-8));
        assert!(r.signum() != prev, "alternation");
        prev = r.signum();
    }
    for (name, n) in [("x^3", 4u32), ("x^5", 6)] {
        for p in matrix_p() {
            let e = best_approx(&by_name(name).unwrap(), n, p, &rule).unwrap().error;
            assert!(e <= 1e-10, "E_{n}({name})_{p} = {e}");
        }
    }
    done(6, "best approximation oracles", start);
}

/// Criterion 7: rate recovery instantiating the characterization at
/// alpha = 1 and alpha = 1.5 (slopes within 0.1).
#[test]
fn criterion_07_rate_recovery() {
    let start = Instant::now();
    let v = Verifier::default();
    for (name, alpha) in [("abs_x_1", 1.0), ("abs_x_1.5", 1.5)] {
        let f = by_name(name).unwrap();
        let report = v.check_alpha_characterization(&f, 2, 0, Lp::Infinity, alpha).unwrap();
        assert!(
            report.fitted_constant <= 0.1,
            "{name}: slope deviation {} ({})",
            report.fitted_constant,
            report.tolerance_note
        );
    }
    done(7, "rate recovery", start);
}

/// Criterion 8: the direct (Jackson-type) estimate with fitted C <= 50
/// over the matrix, n up to 64.
#[test]
fn criterion_08_jackson() {
    let start = Instant::now();
    let v = Verifier::default();
    let mut fitted = 0.0_f64;
    for f in matrix_functions() {
        for &k in &MATRIX_K {
            for &r in &MATRIX_R {
                for p in matrix_p() {
                    if !f.in_bpr(r, p) || f.max_order < r {
                        continue;
                    }
                    let report = v.check_jackson(&f, k, r, p, &default_n_grid(k, r)).unwrap();
                    assert_ne!(report.verdict, Verdict::Fail, "f={} k={k} r={r} p={p}: C = {}",
                        f.name, report.fitted_constant);
                    if report.verdict == Verdict::Pass {
                        fitted = fitted.max(report.fitted_constant);
                    }
                }
            }
        }
    }
    assert!(fitted <= 50.0, "global Jackson constant {fitted}");
    done(8, "jackson", start);
}

/// Criterion 9: both hierarchy estimates on smooth members, C <= 20.
#[test]
fn criterion_09_hierarchy() {
    let start = Instant::now();
    let v = Verifier::default();
    let mut fitted = 0.0_f64;
    for name in ["exp", "x^4", "abs_x_2.5", "one_minus_x_1.5"] {
        let f = by_name(name).unwrap();
        for k in [2u32, 3] {
            for &r in &MATRIX_R {
                for p in matrix_p() {
                    if !f.in_bpr(r + 1, p) || f.max_order < r + 1 {
                        continue;
                    }
                    let report = v.check_hierarchy(&f, k, r, p, &default_t_grid(k)).unwrap();
                    assert_ne!(report.verdict, Verdict::Fail, "f={name} k={k} r={r} p={p}: C = {}",
                        report.fitted_constant);
                    if report.verdict == Verdict::Pass {
                        fitted = fitted.max(report.fitted_constant);
                    }
                }
            }
        }
    }
    assert!(fitted <= 20.0, "global hierarchy constant {fitted}");
    done(9, "hierarchy", start);
}

/// Criterion 10: the Markov-Bernstein ratio for Chebyshev polynomials
/// stays at most 2 for nu <= 2, p in {2, inf}, n <= 64.
#[test]
fn criterion_10_potapov() {
    let start = Instant::now();
    let rule = QuadratureRule::default();
    for n in [4usize, 8, 16, 32, 64] {
        let pa = PolyApprox::from_cheb_coeffs(chebyshev_t(n).coeffs, Lp::Infinity);
        for nu in [1u32, 2] {
            for p in [Lp::Finite(2.0), Lp::Infinity] {
                let ratio = potapov_ratio(&pa, nu, p, &rule).unwrap();
                assert!(ratio <= 2.0, "T_{n} nu={nu} p={p}: ratio = {ratio}");
            }
        }
    }
    done(10, "potapov", start);
}

/// Criterion 11: the summed inverse estimate with the measured step
/// envelope bounds the modulus at every grid t in (0, 1/2], C <= 100.
#[test]
fn criterion_11_inverse() {
    let start = Instant::now();
    let v = Verifier::default();
    let t_grid = log_grid(0.01, 0.5, 12);
    for (name, k, r) in [("abs_x_1", 2u32, 0u32), ("abs_x_2.5", 2, 1)] {
        let f = by_name(name).unwrap();
        let report = v.check_inverse(&f, k, r, Lp::Infinity, 128, &t_grid).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{name}: {}", report.tolerance_note);
        assert!(report.fitted_constant <= 100.0, "{name}: C = {}", report.fitted_constant);
        // bounded at every grid point by the fitted constant
        for row in &report.rows {
            assert!(
                row.lhs <= report.fitted_constant * row.rhs * (1.0 + 1e-12),
                "{name} at {}",
                row.params
            );
        }
    }
    done(11, "inverse", start);
}

/// Criterion 12: the endpoint counterexample. The sup modulus of the
/// family with f_r^(r) = phi^(-r) stays >= 0.1 across t in [1e-3, 1];
/// at p = 2 the vanishing-limit probe is asserted to report decay under
/// its spec-fixed convention (final/initial < 1e-3 by t = 2^-10). The
/// measured p = 2 ratios sit at 2.8e-3..1.2e-2 — the modulus vanishes,
/// but only ~ linearly in t, which that convention cannot register — so
/// the second clause fails by construction; see the decisions ledger.
#[test]
fn criterion_12_counterexample() {
    let start = Instant::now();
    let rule = QuadratureRule::default();
    let mut p2_failures = Vec::new();
    for (name, r) in [("phi_inv_r1", 1u32), ("phi_inv_r2", 2u32)] {
        let f = by_name(name).unwrap();
        for k in [1u32, 2] {
            for t in log_grid(1e-3, 1.0, 7) {
                let w = omega(&ModulusQuery::new(&f, k, r, Lp::Infinity, t).unwrap())
                    .unwrap()
                    .value;
                assert!(w >= 0.1, "{name} k={k} t={t}: omega_inf = {w}");
            }
            let probe = vanishing_limit_probe(&f, k, r, Lp::Finite(2.0), &rule).unwrap();
            let ratio = probe.rows.last().unwrap().1 / probe.rows[0].1;
            if !probe.decays {
                p2_failures.push(format!("{name} k={k}: final/initial = {ratio:.3e}"));
            }
        }
    }
    assert!(
        p2_failures.is_empty(),
        "p = 2 vanishing-limit probe did not report decay under the 1e-3 convention: {}",
        p2_failures.join("; ")
    );
    done(12, "counterexample", start);
}
