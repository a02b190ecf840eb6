//! Symmetric, forward, and backward finite differences with the
//! domain-truncation convention: whenever the stencil would leave the
//! interval, the difference is defined to be exactly 0.

use crate::funcspace::{FuncError, FunctionSpec};
use crate::geometry::{phi, step_domain};
use crate::math;
use crate::quadrature::gauss_legendre;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffFlavor {
    Symmetric,
    Forward,
    Backward,
}

/// A single finite-difference evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct DifferenceQuery {
    pub k: u32,
    pub h: f64,
    pub x: f64,
    pub flavor: DiffFlavor,
    pub interval: (f64, f64),
}

impl DifferenceQuery {
    pub fn symmetric(k: u32, h: f64, x: f64) -> Self {
        DifferenceQuery { k, h, x, flavor: DiffFlavor::Symmetric, interval: (-1.0, 1.0) }
    }

    pub fn eval(&self, f: impl Fn(f64) -> f64) -> f64 {
        assert!(self.k >= 1, "difference order must be >= 1");
        assert!(self.h >= 0.0, "step must be nonnegative");
        assert!(self.interval.0 < self.interval.1, "empty interval");
        match self.flavor {
            DiffFlavor::Symmetric => sym_diff(f, self.k, self.h, self.x, self.interval),
            DiffFlavor::Forward | DiffFlavor::Backward => {
                directed_diff(f, self.k, self.h, self.x, self.flavor, self.interval)
            }
        }
    }
}

/// k-th symmetric difference with step `h` anchored at `x`:
/// `sum_i C(k,i) (-1)^(k-i) f(x + (i - k/2) h)` when `x ± kh/2` lie in the
/// interval, exactly 0 otherwise.
pub fn sym_diff(f: impl Fn(f64) -> f64, k: u32, h: f64, x: f64, interval: (f64, f64)) -> f64 {
    let half_span = k as f64 * h / 2.0;
    if x - half_span < interval.0 || x + half_span > interval.1 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..=k {
        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        let point = x + (i as f64 - k as f64 / 2.0) * h;
        acc += sign * math::binomial(k, i) * f(point);
    }
    acc
}

/// k-th symmetric difference with the endpoint-adapted step `h * phi(x)`.
///
/// Zero outside `D_{kh}`; membership is decided through the closed-form
/// margin `mu`, so truncation is reproducible. Stencil points are clamped
/// into `[-1, 1]` (they lie there analytically whenever `x` is in `D_{kh}`).
pub fn sym_diff_phi_step(f: impl Fn(f64) -> f64, k: u32, h: f64, x: f64) -> f64 {
    assert!(k >= 1 && h >= 0.0);
    if h == 0.0 {
        return 0.0;
    }
    let domain = step_domain(k as f64 * h);
    if !domain.contains(x) {
        return 0.0;
    }
    let step = h * phi(x);
    let mut acc = 0.0;
    for i in 0..=k {
        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        let point = x + (i as f64 - k as f64 / 2.0) * step;
        let point = math::min(1.0, math::max(-1.0, point));
        acc += sign * math::binomial(k, i) * f(point);
    }
    acc
}

/// Forward difference `sum_i C(k,i) (-1)^(k-i) f(x + i h)` (zero unless
/// `x` and `x + kh` lie in the interval), and its mirror image, the
/// backward difference over the points `x - (k - i) h`.
pub fn directed_diff(
    f: impl Fn(f64) -> f64,
    k: u32,
    h: f64,
    x: f64,
    flavor: DiffFlavor,
    interval: (f64, f64),
) -> f64 {
    assert!(k >= 1 && h >= 0.0);
    let span = k as f64 * h;
    let mut acc = 0.0;
    match flavor {
        DiffFlavor::Forward => {
            if x < interval.0 || x + span > interval.1 {
                return 0.0;
            }
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * math::binomial(k, i) * f(x + i as f64 * h);
            }
        }
        DiffFlavor::Backward => {
            if x - span < interval.0 || x > interval.1 {
                return 0.0;
            }
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * math::binomial(k, i) * f(x - (k - i) as f64 * h);
            }
        }
        DiffFlavor::Symmetric => return sym_diff(f, k, h, x, interval),
    }
    acc
}

/// Checks the identity expressing the k-th symmetric difference as the
/// k-fold iterated integral of the k-th derivative over `[-h/2, h/2]^k`.
///
/// Returns `(difference, nested quadrature)`; the two agree to quadrature
/// tolerance for smooth functions.
pub fn iterated_integral_identity_check(
    g: &FunctionSpec,
    k: u32,
    h: f64,
    x: f64,
) -> Result<(f64, f64), FuncError> {
    assert!(k >= 1);
    let half_span = k as f64 * h / 2.0;
    assert!(
        x - half_span > -1.0 && x + half_span < 1.0,
        "stencil must stay interior for the identity check"
    );
    let diff = sym_diff(|u| g.eval(u, 0).expect("interior evaluation"), k, h, x, (-1.0, 1.0));
    let (nodes, weights) = gauss_legendre(24);
    let quad = nested_integral(g, k, h, x, 0.0, k, &nodes, &weights)?;
    Ok((diff, quad))
}

fn nested_integral(
    g: &FunctionSpec,
    k: u32,
    h: f64,
    x: f64,
    shift: f64,
    depth: u32,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64, FuncError> {
    let half = h / 2.0;
    let mut acc = 0.0;
    for (node, weight) in nodes.iter().zip(weights) {
        let u = half * node; // maps [-1,1] to [-h/2, h/2]
        let value = if depth == 1 {
            g.eval(x + shift + u, k)?
        } else {
            nested_integral(g, k, h, x, shift + u, depth - 1, nodes, weights)?
        };
        acc += weight * value;
    }
    Ok(acc * half)
}

/// Stencil points of the symmetric phi-step difference, exposed for
/// diagnostics.
pub fn phi_step_stencil(k: u32, h: f64, x: f64) -> Vec<f64> {
    let step = h * phi(x);
    (0..=k)
        .map(|i| {
            let p = x + (i as f64 - k as f64 / 2.0) * step;
            math::min(1.0, math::max(-1.0, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SplitMix64;

    #[test]
    fn second_difference_of_quadratic() {
        // f(x+h) - 2 f(x) + f(x-h) = 2 h^2 for f = x^2
        let d = sym_diff(|x| x * x, 2, 0.1, 0.3, (-1.0, 1.0));
        assert!((d - 0.02).abs() < 1e-15);
    }

    #[test]
    fn truncated_to_zero_outside() {
        let d = sym_diff(|x| x, 1, 0.2, 0.95, (-1.0, 1.0));
        assert_eq!(d, 0.0); // bitwise zero by the convention
    }

    #[test]
    fn annihilates_low_degree() {
        // k-th difference of a polynomial of degree < k vanishes
        let mut rng = SplitMix64::new(3);
        for _ in 0..50 {
            let x = rng.in_range(-0.3, 0.3);
            let h = rng.in_range(0.0, 0.1);
            let d = sym_diff(|u| u.powi(5), 6, h, x, (-1.0, 1.0));
            assert!(d.abs() < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn phi_step_values() {
        let d = sym_diff_phi_step(|x| x, 1, 0.5, 0.0);
        assert!((d - 0.5).abs() < 1e-15);
        let d2 = sym_diff_phi_step(|x| x * x, 2, 0.2, 0.0);
        assert!((d2 - 0.08).abs() < 1e-15); // 2 (h phi(0))^2
    }

    #[test]
    fn phi_step_zero_outside_domain() {
        // mu(1.9) ~ 0.94875 so D_{1.9} ~ [-0.051, 0.051]
        let d = sym_diff_phi_step(|x| x * x * x + 1.0, 1, 1.9, 0.9);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn forward_backward_conventions() {
        let f = |x: f64| x;
        assert!((directed_diff(f, 1, 0.1, -1.0, DiffFlavor::Forward, (-1.0, 1.0)) - 0.1).abs() < 1e-15);
        let g = |x: f64| x * x;
        assert!((directed_diff(g, 2, 0.1, -1.0, DiffFlavor::Forward, (-1.0, 1.0)) - 0.02).abs() < 1e-14);
        // backward: sum C(k,i)(-1)^(k-i) f(x - (k-i) h), so for k=1: f(x) - f(x-h)
        assert!((directed_diff(f, 1, 0.1, 1.0, DiffFlavor::Backward, (-1.0, 1.0)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn directed_truncation() {
        let f = |x: f64| x;
        assert_eq!(directed_diff(f, 1, 0.1, 0.95, DiffFlavor::Forward, (-1.0, 1.0)), 0.0);
        assert_eq!(directed_diff(f, 1, 0.1, -0.95, DiffFlavor::Backward, (-1.0, 1.0)), 0.0);
    }

    #[test]
    fn linearity() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let x = rng.in_range(-0.4, 0.4);
            let h = rng.in_range(0.001, 0.2);
            let (a, b) = (rng.in_range(-2.0, 2.0), rng.in_range(-2.0, 2.0));
            let f = |u: f64| u.exp();
            let g = |u: f64| u * u * u;
            let lhs = sym_diff(|u| a * f(u) + b * g(u), 3, h, x, (-1.0, 1.0));
            let rhs = a * sym_diff(f, 3, h, x, (-1.0, 1.0)) + b * sym_diff(g, 3, h, x, (-1.0, 1.0));
            assert!((lhs - rhs).abs() < 1e-13, "lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn query_struct_dispatches() {
        let q = DifferenceQuery::symmetric(2, 0.1, 0.3);
        assert!((q.eval(|x| x * x) - 0.02).abs() < 1e-15);
        let fwd = DifferenceQuery {
            k: 1,
            h: 0.1,
            x: -1.0,
            flavor: DiffFlavor::Forward,
            interval: (-1.0, 1.0),
        };
        assert!((fwd.eval(|x| x) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn iterated_integral_small_cases() {
        let cat = crate::funcspace::catalog();
        let cube = cat.iter().find(|f| f.name == "x^3").unwrap();
        let (d, q) = iterated_integral_identity_check(cube, 2, 0.2, 0.1).unwrap();
        assert!((d - 0.024).abs() < 1e-14);
        assert!((d - q).abs() < 1e-12);

        let e = cat.iter().find(|f| f.name == "exp").unwrap();
        let (d, q) = iterated_integral_identity_check(e, 1, 0.1, 0.0).unwrap();
        let expected = 2.0 * (0.05f64).sinh();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - q).abs() < 1e-12);

        let quart = cat.iter().find(|f| f.name == "x^4").unwrap();
        let (d, q) = iterated_integral_identity_check(quart, 3, 0.15, 0.2).unwrap();
        assert!((d - q).abs() < 1e-10, "d={d} q={q}");
    }
}
