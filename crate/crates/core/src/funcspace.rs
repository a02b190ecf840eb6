//! Catalog of test functions on [-1, 1] with analytic derivatives.
//!
//! Every member carries smoothness metadata: the expected approximation
//! exponent (where one is known), its singular points, and the largest `p`
//! for which the weighted r-th derivative is p-integrable. Derivatives are
//! supplied in closed form; finite differences appear only in tests, never
//! inside modulus computations, because cancellation near the endpoints
//! would dominate there.

use crate::math;
use crate::quadrature::Lp;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum FuncError {
    OutOfDomain { x: f64 },
    OrderTooHigh { order: u32, max: u32 },
    /// Derivative of this order does not exist at the listed point.
    SingularPoint { x: f64, order: u32 },
}

impl core::fmt::Display for FuncError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FuncError::OutOfDomain { x } => write!(f, "x = {x} outside [-1, 1]"),
            FuncError::OrderTooHigh { order, max } => {
                write!(f, "derivative order {order} exceeds max_order {max}")
            }
            FuncError::SingularPoint { x, order } => {
                write!(f, "derivative of order {order} does not exist at x = {x}")
            }
        }
    }
}

impl core::error::Error for FuncError {}

#[derive(Debug, Clone, PartialEq)]
pub enum FuncKind {
    /// x^m
    Monomial { m: u32 },
    /// |x|^alpha, non-integer alpha or alpha = 1
    AbsPow { alpha: f64 },
    /// (1 - x)^beta
    OneMinusXPow { beta: f64 },
    /// The primitive family whose r-th derivative is phi^(-r).
    /// r = 1: asin(x); r = 2: ((1-x)ln(1-x) + (1+x)ln(1+x)) / 2.
    PhiInvPrimitive { r: u32 },
    Exp,
    /// Truncated power (x - knot)_+^k
    TruncPow { k: u32, knot: f64 },
}

/// Smoothness metadata attached to each catalog member.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessMeta {
    /// Expected exponent alpha with E_n(f)_inf ~ n^(-alpha), when known.
    pub alpha: Option<f64>,
    pub singular_points: Vec<f64>,
    /// bpr_pmax[r] is the largest p with f in B_p^r (0 = not a member for
    /// any p, infinity = member for every p). Membership is monotone
    /// downward in p on a finite interval.
    pub bpr_pmax: Vec<f64>,
}

impl SmoothnessMeta {
    /// Explicit (r, p) membership list over p in {1, 2, inf}.
    pub fn in_bpr_for(&self) -> Vec<(u32, Lp)> {
        let mut out = Vec::new();
        for (r, &pmax) in self.bpr_pmax.iter().enumerate() {
            for p in [Lp::Finite(1.0), Lp::Finite(2.0), Lp::Infinity] {
                let ok = match p {
                    Lp::Finite(q) => q <= pmax,
                    Lp::Infinity => pmax.is_infinite(),
                };
                if ok {
                    out.push((r as u32, p));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub name: String,
    pub kind: FuncKind,
    pub max_order: u32,
    pub meta: SmoothnessMeta,
}

impl FunctionSpec {
    /// Value of the order-th derivative at x in the closed interval.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64, FuncError> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(FuncError::OutOfDomain { x });
        }
        if order > self.max_order {
            return Err(FuncError::OrderTooHigh { order, max: self.max_order });
        }
        self.kind.eval(x, order)
    }

    pub fn in_bpr(&self, r: u32, p: Lp) -> bool {
        let Some(&pmax) = self.meta.bpr_pmax.get(r as usize) else {
            return false;
        };
        match p {
            Lp::Finite(q) => q <= pmax,
            Lp::Infinity => pmax.is_infinite(),
        }
    }
}

/// Free-function form of `FunctionSpec::eval`.
pub fn eval_deriv(f: &FunctionSpec, x: f64, order: u32) -> Result<f64, FuncError> {
    f.eval(x, order)
}

impl FuncKind {
    fn eval(&self, x: f64, order: u32) -> Result<f64, FuncError> {
        let j = order;
        match *self {
            FuncKind::Monomial { m } => {
                if j > m {
                    return Ok(0.0);
                }
                let mut c = 1.0;
                for i in 0..j {
                    c *= (m - i) as f64;
                }
                Ok(c * math::powi(x, (m - j) as i32))
            }
            FuncKind::AbsPow { alpha } => {
                let expo = alpha - j as f64;
                if x == 0.0 {
                    return if expo > 1e-12 && j == 0 {
                        Ok(0.0)
                    } else if expo > 1e-12 {
                        // derivative formula c |x|^(alpha-j) sgn^j still
                        // tends to 0 when the exponent is positive
                        Ok(0.0)
                    } else {
                        Err(FuncError::SingularPoint { x, order: j })
                    };
                }
                let mut c = 1.0;
                for i in 0..j {
                    c *= alpha - i as f64;
                }
                let sign = if x < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
                Ok(sign * c * math::powf(math::abs(x), expo))
            }
            FuncKind::OneMinusXPow { beta } => {
                let expo = beta - j as f64;
                if x == 1.0 && expo < -1e-12 {
                    return Err(FuncError::SingularPoint { x, order: j });
                }
                let mut c = 1.0;
                for i in 0..j {
                    c *= beta - i as f64;
                }
                let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                if x == 1.0 {
                    return Ok(if expo > 0.0 { 0.0 } else { sign * c });
                }
                Ok(sign * c * math::powf(1.0 - x, expo))
            }
            FuncKind::PhiInvPrimitive { r } => phi_inv_primitive(r, x, j),
            FuncKind::Exp => Ok(math::exp(x)),
            FuncKind::TruncPow { k, knot } => {
                if x == knot && j >= k {
                    return Err(FuncError::SingularPoint { x, order: j });
                }
                if x <= knot || j > k {
                    return Ok(0.0);
                }
                let mut c = 1.0;
                for i in 0..j {
                    c *= (k - i) as f64;
                }
                Ok(c * math::powi(x - knot, (k - j) as i32))
            }
        }
    }
}

/// Derivatives of the family with f^(r) = phi^(-r), r in {1, 2}.
///
/// r = 1: f = asin(x). r = 2: f = ((1-x)ln(1-x) + (1+x)ln(1+x))/2, which is
/// the numerically stable primitive of atanh on the closed interval (the
/// x*atanh(x) + ln(1-x^2)/2 form is 0 * inf at the endpoints).
fn phi_inv_primitive(r: u32, x: f64, j: u32) -> Result<f64, FuncError> {
    let phi2 = (1.0 - x) * (1.0 + x);
    let singular = |order| Err(FuncError::SingularPoint { x, order });
    match (r, j) {
        (1, 0) => Ok(math::asin(x)),
        (1, _) if phi2 == 0.0 => singular(j),
        (1, 1) => Ok(math::powf(phi2, -0.5)),
        (1, 2) => Ok(x * math::powf(phi2, -1.5)),
        (1, 3) => Ok((1.0 + 2.0 * x * x) * math::powf(phi2, -2.5)),
        (1, 4) => Ok((9.0 * x + 6.0 * x * x * x) * math::powf(phi2, -3.5)),
        (2, 0) => {
            let xlx = |u: f64| if u == 0.0 { 0.0 } else { u * math::ln(u) };
            Ok(0.5 * (xlx(1.0 - x) + xlx(1.0 + x)))
        }
        (2, _) if phi2 == 0.0 => singular(j),
        (2, 1) => Ok(math::atanh(x)),
        (2, 2) => Ok(1.0 / phi2),
        (2, 3) => Ok(2.0 * x / (phi2 * phi2)),
        (2, 4) => Ok((2.0 + 6.0 * x * x) / (phi2 * phi2 * phi2)),
        _ => Err(FuncError::OrderTooHigh { order: j, max: 4 }),
    }
}

const INF: f64 = f64::INFINITY;

/// The full catalog.
pub fn catalog() -> Vec<FunctionSpec> {
    let mut out = Vec::new();
    for m in 0..=6u32 {
        out.push(FunctionSpec {
            name: format!("x^{m}"),
            kind: FuncKind::Monomial { m },
            max_order: 12,
            meta: SmoothnessMeta {
                alpha: None,
                singular_points: vec![],
                bpr_pmax: vec![INF; 13],
            },
        });
    }
    // |x|^alpha: pmax per r worked out from |x|^(alpha - r) integrability
    // near 0 (phi is harmless there) and local absolute continuity of the
    // (r-1)st derivative.
    let abs_members: [(f64, Vec<f64>, u32); 4] = [
        (0.5, vec![INF, 1.0], 4),
        (1.0, vec![INF, INF], 1),
        (1.5, vec![INF, INF, 1.0], 4),
        (2.5, vec![INF, INF, INF, 1.0], 4),
    ];
    for (alpha, mut pmax, max_order) in abs_members {
        pmax.resize(max_order as usize + 1, 0.0);
        out.push(FunctionSpec {
            name: format!("abs_x_{alpha}"),
            kind: FuncKind::AbsPow { alpha },
            max_order,
            meta: SmoothnessMeta {
                alpha: Some(alpha),
                singular_points: vec![0.0],
                bpr_pmax: pmax,
            },
        });
    }
    // (1 - x)^beta: the right endpoint singularity is tamed by phi^r, so
    // the expected approximation exponent doubles to 2*beta.
    let omx_members: [(f64, Vec<f64>, u32); 2] = [
        (0.75, vec![INF, INF, 2.0, 1.0], 4),
        (1.5, vec![INF, INF, INF, INF, 1.0], 5),
    ];
    for (beta, mut pmax, max_order) in omx_members {
        pmax.resize(max_order as usize + 1, 0.0);
        out.push(FunctionSpec {
            name: format!("one_minus_x_{beta}"),
            kind: FuncKind::OneMinusXPow { beta },
            max_order,
            meta: SmoothnessMeta {
                alpha: Some(2.0 * beta),
                singular_points: vec![1.0],
                bpr_pmax: pmax,
            },
        });
    }
    out.push(FunctionSpec {
        name: "phi_inv_r1".to_string(),
        kind: FuncKind::PhiInvPrimitive { r: 1 },
        max_order: 4,
        meta: SmoothnessMeta {
            alpha: Some(1.0),
            singular_points: vec![-1.0, 1.0],
            bpr_pmax: vec![INF, INF, 1.0, 0.0, 0.0],
        },
    });
    out.push(FunctionSpec {
        name: "phi_inv_r2".to_string(),
        kind: FuncKind::PhiInvPrimitive { r: 2 },
        max_order: 4,
        meta: SmoothnessMeta {
            alpha: None,
            singular_points: vec![-1.0, 1.0],
            bpr_pmax: vec![INF, INF, INF, 1.0, 0.0],
        },
    });
    out.push(FunctionSpec {
        name: "exp".to_string(),
        kind: FuncKind::Exp,
        max_order: 16,
        meta: SmoothnessMeta {
            alpha: None,
            singular_points: vec![],
            bpr_pmax: vec![INF; 17],
        },
    });
    for k in 1..=3u32 {
        out.push(FunctionSpec {
            name: format!("truncpow_{k}"),
            kind: FuncKind::TruncPow { k, knot: 0.3 },
            max_order: k,
            meta: SmoothnessMeta {
                alpha: Some(k as f64),
                singular_points: vec![0.3],
                bpr_pmax: vec![INF; k as usize + 1],
            },
        });
    }
    out
}

/// Catalog lookup by name.
pub fn by_name(name: &str) -> Option<FunctionSpec> {
    catalog().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SplitMix64;

    fn get(name: &str) -> FunctionSpec {
        by_name(name).unwrap_or_else(|| panic!("missing member {name}"))
    }

    #[test]
    fn catalog_required_members() {
        for name in [
            "x^0", "x^6", "abs_x_0.5", "abs_x_1", "abs_x_1.5", "abs_x_2.5", "one_minus_x_0.75",
            "one_minus_x_1.5", "phi_inv_r1", "phi_inv_r2", "exp", "truncpow_1", "truncpow_2",
            "truncpow_3",
        ] {
            assert!(by_name(name).is_some(), "missing {name}");
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(get("x^2").eval(0.5, 1).unwrap(), 1.0);
        let v = get("abs_x_1.5").eval(0.5, 0).unwrap();
        assert!((v - 0.5f64.powf(1.5)).abs() < 1e-15);
        assert_eq!(get("phi_inv_r1").eval(0.0, 1).unwrap(), 1.0);
        assert_eq!(get("x^3").eval(0.5, 2).unwrap(), 3.0);
        assert!(matches!(
            get("abs_x_1").eval(0.0, 1),
            Err(FuncError::SingularPoint { .. })
        ));
        assert_eq!(get("exp").eval(0.0, 4).unwrap(), 1.0);
    }

    #[test]
    fn domain_and_order_errors() {
        assert!(matches!(get("exp").eval(1.2, 0), Err(FuncError::OutOfDomain { .. })));
        assert!(matches!(
            get("abs_x_1").eval(0.5, 3),
            Err(FuncError::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn polynomial_annihilation() {
        for m in 0..=6u32 {
            let f = get(&format!("x^{m}"));
            for x in [-0.9, -0.2, 0.0, 0.4, 1.0] {
                assert_eq!(f.eval(x, m + 1).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn phi_inv_r2_endpoint_value() {
        let f = get("phi_inv_r2");
        let v = f.eval(1.0, 0).unwrap();
        assert!((v - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(f.eval(1.0, 2), Err(FuncError::SingularPoint { .. })));
    }

    #[test]
    fn truncpow_values() {
        let f = get("truncpow_2");
        assert_eq!(f.eval(0.1, 0).unwrap(), 0.0);
        assert!((f.eval(0.8, 0).unwrap() - 0.25).abs() < 1e-15);
        assert!((f.eval(0.8, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(0.3, 1).unwrap(), 0.0);
        assert!(matches!(f.eval(0.3, 2), Err(FuncError::SingularPoint { .. })));
    }

    /// Central finite difference of eval(., o-1) agrees with eval(., o) at
    /// random interior points bounded away from singular points.
    #[test]
    fn finite_difference_consistency() {
        let h = 1e-6;
        let mut rng = SplitMix64::new(2024);
        for f in catalog() {
            let max_check = f.max_order.saturating_sub(1).min(4);
            for order in 1..=max_check {
                let mut checked = 0;
                let mut tries = 0;
                while checked < 100 && tries < 10_000 {
                    tries += 1;
                    let x = rng.in_range(-0.95, 0.95);
                    if f.meta.singular_points.iter().any(|s| (x - s).abs() < 0.05) {
                        continue;
                    }
                    let (Ok(v), Ok(fp), Ok(fm)) =
                        (f.eval(x, order), f.eval(x + h, order - 1), f.eval(x - h, order - 1))
                    else {
                        continue;
                    };
                    let fd = (fp - fm) / (2.0 * h);
                    let err = (v - fd).abs() / (1.0 + v.abs());
                    assert!(err <= 1e-5, "{} order {} at x={x}: v={v} fd={fd}", f.name, order);
                    checked += 1;
                }
                assert!(checked == 100, "{}: not enough admissible samples", f.name);
            }
        }
    }

    #[test]
    fn membership_lists() {
        let f = get("abs_x_1.5");
        assert!(f.in_bpr(0, Lp::Infinity));
        assert!(f.in_bpr(1, Lp::Infinity));
        assert!(f.in_bpr(2, Lp::Finite(1.0)));
        assert!(!f.in_bpr(2, Lp::Finite(2.0)));
        assert!(!f.in_bpr(3, Lp::Finite(1.0)));
        let lst = f.meta.in_bpr_for();
        assert!(lst.contains(&(1, Lp::Infinity)));
        assert!(!lst.contains(&(2, Lp::Finite(2.0))));
    }
}
