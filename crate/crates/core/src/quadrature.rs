//! L_p norms over subintervals of [-1, 1] and grids for sup-over-step
//! scans.
//!
//! Integrands here typically vanish or blow up like powers of
//! `sqrt(1 - x^2)` at the endpoints, so the composite Gauss-Legendre rule
//! grades its panels toward `±1` through the cosine map. The numerical sup
//! (`p = inf`) is a dense graded sample refined by golden section around
//! the discrete argmax; that convention is part of the reported tolerance.

use crate::math;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Integrability exponent `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn new(p: f64) -> Result<Self, QuadratureError> {
        if p.is_infinite() && p > 0.0 {
            Ok(Lp::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Lp::Finite(p))
        } else {
            Err(QuadratureError::BadExponent { p })
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Lp::Infinity)
    }

    /// 1/p with the convention 1/inf = 0.
    pub fn recip(&self) -> f64 {
        match self {
            Lp::Finite(p) => 1.0 / p,
            Lp::Infinity => 0.0,
        }
    }
}

impl core::fmt::Display for Lp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Lp::Finite(p) => write!(f, "{p}"),
            Lp::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureError {
    /// Integrand produced inf or NaN at `x`.
    NonFinite { x: f64 },
    BadExponent { p: f64 },
}

impl core::fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QuadratureError::NonFinite { x } => {
                write!(f, "non-finite integrand sample at x = {x}")
            }
            QuadratureError::BadExponent { p } => write!(f, "p must be in [1, inf], got {p}"),
        }
    }
}

impl core::error::Error for QuadratureError {}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Accurate to machine precision for n <= 64.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi-style initial guess
        let mut x = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if math::abs(dx) < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(-x); // ascending order
        weights.push(w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss nodes and weights mapped onto [a, b].
pub fn gauss_nodes_scaled(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Uniform,
    /// Panel boundaries follow `x = cos(theta)` with a uniform theta grid,
    /// clustering panels toward the endpoints of [-1, 1].
    Cosine,
}

/// Composite Gauss-Legendre rule plus the sup-sampling convention.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub grading: Grading,
    pub tol_estimate: f64,
    /// Dense sample count for the p = inf norm.
    pub sup_samples: usize,
    gauss: (Vec<f64>, Vec<f64>),
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::new(64, 16, Grading::Cosine)
    }
}

impl QuadratureRule {
    pub fn new(panels: usize, nodes_per_panel: usize, grading: Grading) -> Self {
        assert!(panels >= 1 && nodes_per_panel >= 1);
        assert!(panels * nodes_per_panel <= 1_000_000, "rule too large");
        QuadratureRule {
            panels,
            nodes_per_panel,
            grading,
            tol_estimate: 1e-10,
            sup_samples: 4096,
            gauss: gauss_legendre(nodes_per_panel),
        }
    }

    /// Panel boundaries over [a, b], graded per the rule.
    fn panel_edges(&self, a: f64, b: f64) -> Vec<f64> {
        let n = self.panels;
        let mut edges = Vec::with_capacity(n + 1);
        match self.grading {
            Grading::Uniform => {
                for j in 0..=n {
                    edges.push(a + (b - a) * j as f64 / n as f64);
                }
            }
            Grading::Cosine => {
                // theta decreasing maps to x increasing; the acos/cos round
                // trip can stray an ulp outside [a, b], so clamp
                let ta = math::acos(b.clamp(-1.0, 1.0));
                let tb = math::acos(a.clamp(-1.0, 1.0));
                for j in 0..=n {
                    let theta = tb + (ta - tb) * j as f64 / n as f64;
                    edges.push(math::cos(theta).clamp(a, b));
                }
                edges[0] = a;
                edges[n] = b;
                for j in 1..=n {
                    if edges[j] < edges[j - 1] {
                        edges[j] = edges[j - 1];
                    }
                }
            }
        }
        edges
    }

    /// ∫_a^b g(x) dx by the composite rule (deterministic summation order).
    pub fn integrate(
        &self,
        g: &dyn Fn(f64) -> f64,
        interval: (f64, f64),
    ) -> Result<f64, QuadratureError> {
        let (a, b) = interval;
        if b <= a {
            return Ok(0.0);
        }
        let edges = self.panel_edges(a, b);
        let (nodes, weights) = &self.gauss;
        let mut acc = 0.0;
        for p in 0..self.panels {
            let (lo, hi) = (edges[p], edges[p + 1]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, w) in nodes.iter().zip(weights) {
                let point = mid + half * x;
                let v = g(point);
                if !v.is_finite() {
                    return Err(QuadratureError::NonFinite { x: point });
                }
                acc += half * w * v;
            }
        }
        Ok(acc)
    }

    /// ∫ with extra panel boundaries at the given break points (used to
    /// keep the composite rule accurate across known kinks).
    pub fn integrate_with_breaks(
        &self,
        g: &dyn Fn(f64) -> f64,
        interval: (f64, f64),
        breaks: &[f64],
    ) -> Result<f64, QuadratureError> {
        let (a, b) = interval;
        if b <= a {
            return Ok(0.0);
        }
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&s| s > a && s < b).collect();
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        cuts.dedup();
        if cuts.is_empty() {
            return self.integrate(g, interval);
        }
        let mut acc = 0.0;
        let mut lo = a;
        for &cut in cuts.iter().chain(core::iter::once(&b)) {
            acc += self.integrate(g, (lo, cut))?;
            lo = cut;
        }
        Ok(acc)
    }

    /// All composite nodes with their weights over [a, b].
    pub fn flat_nodes(&self, interval: (f64, f64)) -> Vec<(f64, f64)> {
        let (a, b) = interval;
        let edges = self.panel_edges(a, b);
        let (nodes, weights) = &self.gauss;
        let mut out = Vec::with_capacity(self.panels * self.nodes_per_panel);
        for p in 0..self.panels {
            let (lo, hi) = (edges[p], edges[p + 1]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, w) in nodes.iter().zip(weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }

    /// `L_p` norm of `g` over the interval.
    ///
    /// For finite `p` this is the composite graded rule applied to `|g|^p`;
    /// for `p = inf` it is the max over a dense graded sample refined
    /// locally by golden section around the discrete argmax.
    pub fn lp_norm(
        &self,
        g: &dyn Fn(f64) -> f64,
        p: Lp,
        interval: (f64, f64),
    ) -> Result<f64, QuadratureError> {
        self.lp_norm_with_breaks(g, p, interval, &[])
    }

    pub fn lp_norm_with_breaks(
        &self,
        g: &dyn Fn(f64) -> f64,
        p: Lp,
        interval: (f64, f64),
        breaks: &[f64],
    ) -> Result<f64, QuadratureError> {
        let (a, b) = interval;
        if b <= a {
            return Ok(0.0);
        }
        match p {
            Lp::Finite(p) => {
                let power = |x: f64| math::powf(math::abs(g(x)), p);
                let integral = self.integrate_with_breaks(&power, interval, breaks)?;
                Ok(math::powf(integral, 1.0 / p))
            }
            Lp::Infinity => self.sup_norm(g, interval),
        }
    }

    fn sup_norm(&self, g: &dyn Fn(f64) -> f64, interval: (f64, f64)) -> Result<f64, QuadratureError> {
        let (a, b) = interval;
        let m = self.sup_samples;
        let ta = math::acos(b.clamp(-1.0, 1.0));
        let tb = math::acos(a.clamp(-1.0, 1.0));
        let mut best = 0.0_f64;
        let mut best_idx = 0usize;
        let mut prev_x = a;
        let mut xs = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let x = if j == 0 {
                a
            } else if j == m {
                b
            } else {
                match self.grading {
                    Grading::Cosine => math::cos(tb + (ta - tb) * j as f64 / m as f64),
                    Grading::Uniform => a + (b - a) * j as f64 / m as f64,
                }
            };
            let x = x.clamp(a, b).max(prev_x);
            prev_x = x;
            xs.push(x);
            let v = math::abs(g(x));
            if !v.is_finite() {
                return Err(QuadratureError::NonFinite { x });
            }
            if v > best {
                best = v;
                best_idx = j;
            }
        }
        // golden-section refinement in the bracket around the argmax
        let lo = xs[best_idx.saturating_sub(1)];
        let hi = xs[(best_idx + 1).min(m)];
        let refined = golden_max(&|x| math::abs(g(x)), lo, hi);
        if !refined.is_finite() {
            return Err(QuadratureError::NonFinite { x: 0.5 * (lo + hi) });
        }
        Ok(math::max(best, refined))
    }
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b <= a {
        return g(a);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    let mut best = math::max(fc, fd);
    for _ in 0..70 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = g(d);
        }
        best = math::max(best, math::max(fc, fd));
        if b - a < 1e-14 {
            break;
        }
    }
    best
}

/// Cosine-graded sample grid on [-1, 1] (m+1 points, endpoints included)
/// with trapezoid cell weights; the discretization used by grid-based
/// solvers.
pub fn cosine_grid_with_weights(m: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..=m).map(|i| math::cos(math::PI * (m - i) as f64 / m as f64)).collect();
    let mut ws = alloc::vec![0.0; m + 1];
    for i in 0..=m {
        let lo = if i == 0 { xs[0] } else { xs[i - 1] };
        let hi = if i == m { xs[m] } else { xs[i + 1] };
        ws[i] = 0.5 * (hi - lo);
    }
    (xs, ws)
}

/// Log-spaced grid of step values for the sup over `0 < h <= t`.
///
/// Capped at `2/k` (the modulus is constant beyond), floored at 1e-5
/// (documented cancellation floor for difference scans), right endpoint
/// included exactly. A grid whose cap falls below the floor degenerates to
/// the single floor point and is flagged.
#[derive(Debug, Clone)]
pub struct HGrid {
    pub t: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub floor: f64,
    pub points: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

pub const H_FLOOR: f64 = 1e-5;

pub fn build_hgrid(t: f64, k: u32, count: usize) -> HGrid {
    assert!(t > 0.0 && k >= 1 && count >= 1);
    let cap = math::min(t, 2.0 / k as f64);
    if cap <= H_FLOOR {
        return HGrid {
            t,
            count,
            spacing: Spacing::Log,
            floor: H_FLOOR,
            points: alloc::vec![H_FLOOR],
            degenerate: true,
        };
    }
    let lo = math::max(H_FLOOR, cap / 1e3);
    let mut points = Vec::with_capacity(count);
    if count == 1 {
        points.push(cap);
    } else {
        let (la, lb) = (math::ln(lo), math::ln(cap));
        for j in 0..count {
            let s = la + (lb - la) * j as f64 / (count - 1) as f64;
            points.push(math::exp(s));
        }
        points[0] = lo;
        *points.last_mut().unwrap() = cap;
    }
    HGrid { t, count, spacing: Spacing::Log, floor: lo, points, degenerate: false }
}

/// Human-readable description of a grid, used in resolution notes.
pub fn describe_hgrid(g: &HGrid) -> String {
    format!(
        "hgrid[count={} range=({:.3e},{:.3e}) degenerate={}]",
        g.points.len(),
        g.points.first().copied().unwrap_or(f64::NAN),
        g.points.last().copied().unwrap_or(f64::NAN),
        g.degenerate
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        // n-point rule is exact through degree 2n-1
        let pts = gauss_nodes_scaled(8, -1.0, 1.0);
        let integral: f64 = pts.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn constant_l2_norm() {
        let n = rule().lp_norm(&|_| 1.0, Lp::Finite(2.0), (-1.0, 1.0)).unwrap();
        assert!((n - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_of_identity() {
        let n = rule().lp_norm(&|x| x, Lp::Infinity, (-1.0, 1.0)).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_l2_norm() {
        // ∫ (1-x^2) dx = 4/3 over [-1,1]
        let n = rule()
            .lp_norm(&|x| crate::geometry::phi(x), Lp::Finite(2.0), (-1.0, 1.0))
            .unwrap();
        assert!((n - (4.0f64 / 3.0).sqrt()).abs() < 1e-10, "n = {n}");
    }

    #[test]
    fn homogeneous() {
        let g = |x: f64| (1.3 * x).sin() + 0.2;
        for p in [Lp::Finite(1.0), Lp::Finite(2.0), Lp::Finite(3.5), Lp::Infinity] {
            let a = rule().lp_norm(&|x| 3.5 * g(x), p, (-1.0, 1.0)).unwrap();
            let b = rule().lp_norm(&g, p, (-1.0, 1.0)).unwrap();
            assert!((a - 3.5 * b).abs() <= 1e-12 * a.abs().max(1.0), "p={p:?}");
        }
    }

    #[test]
    fn monotone_in_interval() {
        let g = |x: f64| x.exp();
        let small = rule().lp_norm(&g, Lp::Finite(2.0), (-0.5, 0.5)).unwrap();
        let large = rule().lp_norm(&g, Lp::Finite(2.0), (-0.9, 0.9)).unwrap();
        assert!(large + 1e-12 >= small);
    }

    #[test]
    fn doubling_panels_converges_on_sqrt_weight() {
        // integrand with the phi^(1/2) endpoint behavior the grading targets
        let g = |x: f64| crate::geometry::phi(x).sqrt();
        let base = rule().lp_norm(&g, Lp::Finite(2.0), (-1.0, 1.0)).unwrap();
        let fine = QuadratureRule::new(128, 16, Grading::Cosine)
            .lp_norm(&g, Lp::Finite(2.0), (-1.0, 1.0))
            .unwrap();
        assert!((base - fine).abs() / base < 1e-8, "base={base} fine={fine}");
    }

    #[test]
    fn non_finite_reported() {
        let g = |x: f64| 1.0 / (x - 0.123456); // pole inside
        let err = rule().lp_norm(&|x| g(x) * f64::INFINITY, Lp::Finite(1.0), (-1.0, 1.0));
        assert!(matches!(err, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn hgrid_examples() {
        let g = build_hgrid(3.0, 2, 8);
        assert_eq!(*g.points.last().unwrap(), 1.0); // capped at 2/k
        let g = build_hgrid(0.1, 1, 2);
        assert_eq!(g.points.len(), 2);
        assert_eq!(g.points[0], 1e-4);
        assert_eq!(g.points[1], 0.1);
        let g = build_hgrid(1e-6, 1, 4);
        assert!(g.degenerate);
        assert_eq!(g.points, alloc::vec![1e-5]);
    }

    #[test]
    fn breaks_recover_accuracy_on_kink() {
        // |x| has a kink at 0; with a break there the rule is exact
        let g = |x: f64| x.abs();
        let with_break = rule().integrate_with_breaks(&g, (-1.0, 1.0), &[0.0]).unwrap();
        assert!((with_break - 1.0).abs() < 1e-13);
    }
}
