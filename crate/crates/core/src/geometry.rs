//! The endpoint weight `phi`, the step weight `w_delta`, and the domain
//! `D_delta` on which phi-step differences are nonzero.
//!
//! For a step parameter `delta > 0` the stencil `x ± delta*phi(x)/2` stays
//! inside `[-1, 1]` exactly when `|x| <= 1 - mu(delta)` with
//! `mu(delta) = 2*delta^2/(4 + delta^2)`; that closed interval is
//! `D_delta`, empty once `delta > 2`.

use crate::math;

/// Endpoint weight `sqrt(1 - x^2)`.
///
/// Panics if `|x| > 1`.
pub fn phi(x: f64) -> f64 {
    assert!(x.abs() <= 1.0, "phi: out of domain x = {x}");
    // (1-x)(1+x) keeps precision near the endpoints.
    math::sqrt((1.0 - x) * (1.0 + x))
}

/// Margin `mu(delta) = 2*delta^2 / (4 + delta^2)` by which `D_delta`
/// retracts from the endpoints.
pub fn mu(delta: f64) -> f64 {
    debug_assert!(delta >= 0.0);
    2.0 * delta * delta / (4.0 + delta * delta)
}

/// The closed interval `D_delta = [-1 + mu(delta), 1 - mu(delta)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainInterval {
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl DomainInterval {
    pub fn new(delta: f64) -> Self {
        assert!(delta > 0.0, "step_domain: delta must be positive");
        if delta > 2.0 {
            DomainInterval { delta, lo: f64::NAN, hi: f64::NAN, empty: true }
        } else {
            let m = mu(delta);
            DomainInterval { delta, lo: -1.0 + m, hi: 1.0 - m, empty: false }
        }
    }

    /// Closed-interval membership; no epsilon, since `mu` is exact.
    pub fn contains(&self, x: f64) -> bool {
        !self.empty && self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }
}

/// Domain of the phi-step difference with step parameter `delta`.
pub fn step_domain(delta: f64) -> DomainInterval {
    DomainInterval::new(delta)
}

/// Step weight `w_delta(x) = sqrt((1 - x - delta*phi(x)/2)(1 + x - delta*phi(x)/2))`.
///
/// Defined on `D_delta` together with the endpoints `±1`; vanishes at the
/// boundary of `D_delta`. Tiny negative products from roundoff are clamped
/// to zero. Panics when called outside the declared domain.
pub fn step_weight(delta: f64, x: f64) -> f64 {
    assert!(delta > 0.0, "step_weight: delta must be positive");
    let on_endpoint = x == 1.0 || x == -1.0;
    assert!(
        on_endpoint || step_domain(delta).contains(x),
        "step_weight: x = {x} outside D_delta for delta = {delta}"
    );
    let half_step = delta * phi(x) / 2.0;
    let prod = (1.0 - x - half_step) * (1.0 + x - half_step);
    if prod <= 0.0 {
        0.0
    } else {
        math::sqrt(prod)
    }
}

/// Stencil endpoint `y(x) = x + delta_signed * phi(x) / 2`.
///
/// For `|delta_signed| <= 2` and `x` in `D_{|delta_signed|}` the result lies
/// in `[-1, 1]`; roundoff excursions are clamped back.
pub fn endpoint_map(delta_signed: f64, x: f64) -> f64 {
    let delta = delta_signed.abs();
    assert!(delta <= 2.0, "endpoint_map: |delta_signed| must be <= 2");
    assert!(
        delta == 0.0 || step_domain(delta).contains(x),
        "endpoint_map: x = {x} outside D_delta for delta = {delta}"
    );
    let y = x + delta_signed * phi(x) / 2.0;
    math::min(1.0, math::max(-1.0, y))
}
