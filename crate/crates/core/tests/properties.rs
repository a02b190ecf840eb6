//! Property tests for the numeric kernels, plus the catalog-wide
//! diagnostics that are cheap enough to sweep.

use modsmooth_core::differences::{sym_diff, sym_diff_phi_step};
use modsmooth_core::funcspace::{by_name, catalog};
use modsmooth_core::moduli::{omega, omega_dt_weighted, ModulusQuery};
use modsmooth_core::quadrature::{Lp, QuadratureRule};
use modsmooth_core::smoothcheck::{is_cr_in_open_interval, vanishing_limit_probe};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// lp_norm is absolutely homogeneous.
    #[test]
    fn lp_norm_homogeneous(c in -5.0f64..5.0, p_sel in 0usize..4) {
        let rule = QuadratureRule::default();
        let p = [Lp::Finite(1.0), Lp::Finite(2.0), Lp::Finite(3.5), Lp::Infinity][p_sel];
        let g = |x: f64| (2.0 * x).sin() + 0.3 * x;
        let scaled = rule.lp_norm(&|x| c * g(x), p, (-1.0, 1.0)).unwrap();
        let base = rule.lp_norm(&g, p, (-1.0, 1.0)).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (1.0 + scaled.abs()));
    }

    /// The k-th symmetric difference is linear in the function.
    #[test]
    fn sym_diff_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        x in -0.4f64..0.4,
        h in 1e-4f64..0.2,
        k in 1u32..5,
    ) {
        let f = |u: f64| u.exp();
        let g = |u: f64| (3.0 * u).cos();
        let lhs = sym_diff(|u| a * f(u) + b * g(u), k, h, x, (-1.0, 1.0));
        let rhs = a * sym_diff(f, k, h, x, (-1.0, 1.0)) + b * sym_diff(g, k, h, x, (-1.0, 1.0));
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()));
    }

    /// Differences annihilate polynomials of lower degree (1e-12 absolute
    /// at O(1) coefficients).
    #[test]
    fn sym_diff_annihilates(
        x in -0.5f64..0.5,
        h in 1e-4f64..0.2,
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        c2 in -1.0f64..1.0,
    ) {
        let f = |u: f64| c0 + c1 * u + c2 * u * u;
        let d = sym_diff(f, 3, h, x, (-1.0, 1.0));
        prop_assert!(d.abs() <= 1e-12, "residual {d}");
    }

    /// Truncation to zero outside the admissible set is bitwise.
    #[test]
    fn sym_diff_truncates_bitwise(h in 0.01f64..1.9, x in 0.9f64..0.999) {
        // push the stencil over the right endpoint
        let span = h / 2.0;
        if x + span > 1.0 {
            let d = sym_diff(|u| u.exp(), 1, h, x, (-1.0, 1.0));
            prop_assert_eq!(d.to_bits(), 0.0f64.to_bits());
        }
        let dom = modsmooth_core::geometry::step_domain(2.0 * h.min(1.0));
        if !dom.contains(x) {
            let d = sym_diff_phi_step(|u| u.exp(), 2, h.min(1.0), x);
            prop_assert_eq!(d.to_bits(), 0.0f64.to_bits());
        }
    }
}

/// Doubling panels moves catalog-integrand norms by < 1e-8 relative at the
/// default resolution (with panel splits at the declared singular points).
#[test]
fn quadrature_converged_on_catalog_integrands() {
    let base = QuadratureRule::default();
    let fine = QuadratureRule::new(128, 16, modsmooth_core::quadrature::Grading::Cosine);
    for name in ["abs_x_1.5", "one_minus_x_0.75", "exp", "truncpow_2", "phi_inv_r1"] {
        let f = by_name(name).unwrap();
        for p in [Lp::Finite(1.0), Lp::Finite(2.0)] {
            let g = |x: f64| f.eval(x, 0).unwrap();
            let a = base
                .lp_norm_with_breaks(&g, p, (-1.0, 1.0), &f.meta.singular_points)
                .unwrap();
            let b = fine
                .lp_norm_with_breaks(&g, p, (-1.0, 1.0), &f.meta.singular_points)
                .unwrap();
            assert!(
                (a - b).abs() <= 1e-8 * a.abs().max(1e-300),
                "{name} p={p}: {a} vs {b}"
            );
        }
    }
}

/// The three-term DT modulus and the step-weighted modulus stay within a
/// bounded ratio of each other for small t (the equivalence holds below
/// t = 1/(2 k sqrt(A + k/2)) with A = 12).
#[test]
fn dt_modulus_equivalent_to_omega() {
    for (name, k, r) in [("abs_x_1.5", 1u32, 0u32), ("abs_x_1.5", 2, 0), ("exp", 2, 1)] {
        let f = by_name(name).unwrap();
        let t_max = 1.0 / (2.0 * k as f64 * (12.0 + k as f64 / 2.0).sqrt());
        for p in [Lp::Finite(2.0), Lp::Infinity] {
            for frac in [0.3, 0.6, 1.0] {
                let t = frac * t_max;
                let q = ModulusQuery::new(&f, k, r, p, t).unwrap();
                let w = omega(&q).unwrap().value;
                let dt = omega_dt_weighted(&q).unwrap().value;
                if w < 1e-12 && dt < 1e-12 {
                    continue;
                }
                let ratio = dt / w;
                assert!(
                    (1.0 / 50.0..=50.0).contains(&ratio),
                    "{name} k={k} r={r} p={p} t={t}: dt={dt} omega={w}"
                );
            }
        }
    }
}

/// For p = inf the vanishing of the modulus agrees with the vanishing of
/// the weighted derivative at the endpoints, for every catalog member that
/// is C^r inside the interval.
#[test]
fn endpoint_agreement_across_catalog() {
    let rule = QuadratureRule::default();
    for f in catalog() {
        let r = 1u32;
        if f.max_order < r || !is_cr_in_open_interval(&f, r) {
            continue;
        }
        let probe = vanishing_limit_probe(&f, 1, r, Lp::Infinity, &rule).unwrap();
        assert_eq!(
            probe.agreement,
            Some(true),
            "{}: decays={} endpoint_limit_zero={:?}",
            f.name,
            probe.decays,
            probe.endpoint_limit_zero
        );
    }
}
