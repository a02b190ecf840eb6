//! The step-weighted modulus of smoothness, its averaged variant, the
//! weighted DT modulus (three-term form), and the main-part modulus.
//!
//! All four reduce to norms of `weight^r * difference` over step-dependent
//! subintervals. The sup over the step is discretized on a log grid joined
//! with the Gauss nodes used by the averaged variant (so the average can
//! never numerically exceed the sup), then refined once around the discrete
//! argmax.

use crate::differences::{directed_diff, sym_diff_phi_step, DiffFlavor};
use crate::funcspace::{FuncError, FunctionSpec};
use crate::geometry::{phi, step_domain, step_weight};
use crate::math;
use crate::quadrature::{
    build_hgrid, describe_hgrid, gauss_nodes_scaled, Lp, QuadratureError, QuadratureRule,
};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Steps of the averaging rule in the averaged modulus; the same nodes are
/// folded into every sup grid.
const TAU_NODES: usize = 32;
/// Linear refinement points around the discrete argmax.
const REFINE_POINTS: usize = 10;
/// Edge-strip width multiplier of the DT modulus.
pub const DT_EDGE_FACTOR: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ModulusError {
    Unsupported(String),
    Func(FuncError),
    Quadrature(QuadratureError),
}

impl core::fmt::Display for ModulusError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModulusError::Unsupported(s) => write!(f, "{s}"),
            ModulusError::Func(e) => write!(f, "{e}"),
            ModulusError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ModulusError {}

impl From<FuncError> for ModulusError {
    fn from(e: FuncError) -> Self {
        ModulusError::Func(e)
    }
}

impl From<QuadratureError> for ModulusError {
    fn from(e: QuadratureError) -> Self {
        ModulusError::Quadrature(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    Omega,
    OmegaStar,
    OmegaDt,
    OmegaMainPart,
}

impl core::fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            ModulusKind::Omega => "omega",
            ModulusKind::OmegaStar => "star",
            ModulusKind::OmegaDt => "dt",
            ModulusKind::OmegaMainPart => "mainpart",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct ModulusQuery {
    pub f: FunctionSpec,
    pub k: u32,
    pub r: u32,
    pub p: Lp,
    pub t: f64,
    pub hgrid_count: usize,
    pub rule: QuadratureRule,
}

impl ModulusQuery {
    pub fn new(f: &FunctionSpec, k: u32, r: u32, p: Lp, t: f64) -> Result<Self, ModulusError> {
        Self::with_resolution(f, k, r, p, t, 40, QuadratureRule::default())
    }

    pub fn with_resolution(
        f: &FunctionSpec,
        k: u32,
        r: u32,
        p: Lp,
        t: f64,
        hgrid_count: usize,
        rule: QuadratureRule,
    ) -> Result<Self, ModulusError> {
        if k == 0 || t <= 0.0 {
            return Err(ModulusError::Unsupported(format!(
                "need k >= 1 and t > 0 (k = {k}, t = {t})"
            )));
        }
        if k + r > 8 {
            return Err(ModulusError::Unsupported(format!(
                "k + r = {} exceeds the supported range 8",
                k + r
            )));
        }
        if f.max_order < r {
            return Err(ModulusError::Unsupported(format!(
                "{} has max_order {} < r = {r}",
                f.name, f.max_order
            )));
        }
        Ok(ModulusQuery { f: f.clone(), k, r, p, t, hgrid_count, rule })
    }
}

#[derive(Debug, Clone)]
pub struct ModulusResult {
    pub value: f64,
    pub argmax_h: f64,
    pub kind: ModulusKind,
    pub resolution_note: String,
}

/// r-th derivative as a plain closure for quadrature sampling.
///
/// Points are pulled off the exact endpoints by one ulp (stencils land
/// there only up to roundoff) and evaluation failures surface as NaN so the
/// norm reports the offending sample.
pub fn deriv_closure(f: &FunctionSpec, r: u32) -> impl Fn(f64) -> f64 + '_ {
    move |x: f64| {
        let x = x.clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
        f.eval(x, r).unwrap_or(f64::NAN)
    }
}

/// `|| w_{kh}^r * diff^k_{h phi} f^(r) ||_p` over `D_{kh}`; the single-step
/// building block shared by the sup and the average.
pub fn weighted_diff_norm(
    f: &FunctionSpec,
    k: u32,
    r: u32,
    p: Lp,
    h: f64,
    rule: &QuadratureRule,
) -> Result<f64, ModulusError> {
    if h <= 0.0 {
        return Ok(0.0);
    }
    let delta = k as f64 * h;
    if delta > 2.0 {
        return Ok(0.0);
    }
    let domain = step_domain(delta);
    let fr = deriv_closure(f, r);
    let integrand = move |x: f64| {
        let w = step_weight(delta, x);
        let wr = math::powi(w, r as i32);
        if r >= 1 && wr == 0.0 {
            // the weight annihilates the (possibly unbounded) difference
            return 0.0;
        }
        wr * sym_diff_phi_step(&fr, k, h, x)
    };
    Ok(rule.lp_norm(&integrand, p, (domain.lo, domain.hi))?)
}

/// The sup grid: log-spaced points joined with the averaging nodes on
/// `(0, cap]`, `cap = min(t, 2/k)`.
pub fn sup_grid(t: f64, k: u32, count: usize) -> Vec<f64> {
    let grid = build_hgrid(t, k, count);
    if grid.degenerate {
        return grid.points;
    }
    let cap = *grid.points.last().unwrap();
    let mut points = grid.points;
    for (tau, _) in gauss_nodes_scaled(TAU_NODES, 0.0, cap) {
        points.push(tau);
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    points
}

fn sup_over_grid(
    grid: &[f64],
    mut eval: impl FnMut(f64) -> Result<f64, ModulusError>,
) -> Result<(f64, f64), ModulusError> {
    let mut best = 0.0_f64;
    let mut best_idx = 0usize;
    let mut values = Vec::with_capacity(grid.len());
    for (i, &h) in grid.iter().enumerate() {
        let v = eval(h)?;
        values.push(v);
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    if grid.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut argmax = grid[best_idx];
    // one linear refinement pass between the argmax neighbors
    if grid.len() > 1 {
        let lo = grid[best_idx.saturating_sub(1)];
        let hi = grid[(best_idx + 1).min(grid.len() - 1)];
        for j in 1..=REFINE_POINTS {
            let h = lo + (hi - lo) * j as f64 / (REFINE_POINTS + 1) as f64;
            let v = eval(h)?;
            if v > best {
                best = v;
                argmax = h;
            }
        }
    }
    Ok((best, argmax))
}

/// The modulus `omega_{k,r}(f^(r), t)_p`: sup over `0 < h <= t` of the
/// weighted-difference norm, constant for `t >= 2/k`.
pub fn omega(q: &ModulusQuery) -> Result<ModulusResult, ModulusError> {
    let grid = sup_grid(q.t, q.k, q.hgrid_count);
    omega_on_grid(q, &grid)
}

/// Same sup restricted to an explicit step grid (verification runs use
/// nested grids to make monotonicity exact).
pub fn omega_on_grid(q: &ModulusQuery, grid: &[f64]) -> Result<ModulusResult, ModulusError> {
    let (value, argmax_h) =
        sup_over_grid(grid, |h| weighted_diff_norm(&q.f, q.k, q.r, q.p, h, &q.rule))?;
    Ok(ModulusResult {
        value,
        argmax_h,
        kind: ModulusKind::Omega,
        resolution_note: format!(
            "sup over {} steps + {} refinements; {}",
            grid.len(),
            REFINE_POINTS,
            describe_hgrid(&build_hgrid(q.t, q.k, q.hgrid_count))
        ),
    })
}

/// The averaged modulus: the L_p mean over the step variable of the same
/// weighted-difference norm. For `p = inf` it is defined to coincide with
/// the sup modulus.
pub fn omega_star(q: &ModulusQuery) -> Result<ModulusResult, ModulusError> {
    let p = match q.p {
        Lp::Infinity => {
            let mut res = omega(q)?;
            res.kind = ModulusKind::OmegaStar;
            res.resolution_note = format!("p=inf: equals omega by definition; {}", res.resolution_note);
            return Ok(res);
        }
        Lp::Finite(p) => p,
    };
    let mut acc = 0.0;
    let mut best = 0.0_f64;
    let mut best_tau = 0.0;
    for (tau, w) in gauss_nodes_scaled(TAU_NODES, 0.0, q.t) {
        let g = weighted_diff_norm(&q.f, q.k, q.r, q.p, tau, &q.rule)?;
        acc += w * math::powf(g, p);
        if g > best {
            best = g;
            best_tau = tau;
        }
    }
    let value = math::powf(acc / q.t, 1.0 / p);
    Ok(ModulusResult {
        value,
        argmax_h: best_tau,
        kind: ModulusKind::OmegaStar,
        resolution_note: format!("step average over {TAU_NODES} Gauss nodes on (0, {})", q.t),
    })
}

/// The weighted DT modulus in its three-term form: a phi-step term on the
/// central interval `[-1 + t#, 1 - t#]` with `t# = 2 k^2 t^2`, plus
/// one-sided difference terms on edge strips of width `12 t#`.
pub fn omega_dt_weighted(q: &ModulusQuery) -> Result<ModulusResult, ModulusError> {
    let t_star = 2.0 * (q.k * q.k) as f64 * q.t * q.t;
    let fr = deriv_closure(&q.f, q.r);
    let r = q.r;
    let k = q.k;

    // central term: sup over 0 < h <= t on [-1 + t#, 1 - t#]
    let mid_interval = (-1.0 + t_star, 1.0 - t_star);
    let (mid, argmax_h) = if mid_interval.0 < mid_interval.1 {
        let grid = sup_grid(q.t, q.k, q.hgrid_count);
        sup_over_grid(&grid, |h| {
            let integrand = |x: f64| {
                let wr = math::powi(phi(x), r as i32);
                if r >= 1 && wr == 0.0 {
                    return 0.0;
                }
                wr * sym_diff_phi_step(&fr, k, h, x)
            };
            Ok(q.rule.lp_norm(&integrand, q.p, mid_interval)?)
        })?
    } else {
        (0.0, q.t)
    };

    // edge terms: sup over 0 < h <= t# of one-sided differences
    let mut edges = 0.0;
    if t_star > 0.0 {
        let edge_grid = sup_grid(t_star, 1, q.hgrid_count);
        let left_hi = math::min(-1.0 + DT_EDGE_FACTOR * t_star, 1.0);
        let (left, _) = sup_over_grid(&edge_grid, |h| {
            let integrand = |x: f64| {
                let wr = math::powi(phi(x), r as i32);
                if r >= 1 && wr == 0.0 {
                    return 0.0;
                }
                wr * directed_diff(&fr, k, h, x, DiffFlavor::Forward, (-1.0, 1.0))
            };
            Ok(q.rule.lp_norm(&integrand, q.p, (-1.0, left_hi))?)
        })?;
        let right_lo = math::max(1.0 - DT_EDGE_FACTOR * t_star, -1.0);
        let (right, _) = sup_over_grid(&edge_grid, |h| {
            let integrand = |x: f64| {
                let wr = math::powi(phi(x), r as i32);
                if r >= 1 && wr == 0.0 {
                    return 0.0;
                }
                wr * directed_diff(&fr, k, h, x, DiffFlavor::Backward, (-1.0, 1.0))
            };
            Ok(q.rule.lp_norm(&integrand, q.p, (right_lo, 1.0))?)
        })?;
        edges = left + right;
    }

    Ok(ModulusResult {
        value: mid + edges,
        argmax_h,
        kind: ModulusKind::OmegaDt,
        resolution_note: format!(
            "three-term DT form, t# = {t_star:.3e}, edge factor {DT_EDGE_FACTOR}"
        ),
    })
}

/// The main-part modulus: like the DT central term but with the interval
/// `[-1 + 2 k^2 h^2, 1 - 2 k^2 h^2]` shrinking with each step h, and no
/// edge terms.
pub fn omega_mainpart(q: &ModulusQuery) -> Result<ModulusResult, ModulusError> {
    let fr = deriv_closure(&q.f, q.r);
    let r = q.r;
    let k = q.k;
    let grid = sup_grid(q.t, q.k, q.hgrid_count);
    let (value, argmax_h) = sup_over_grid(&grid, |h| {
        let margin = 2.0 * (k * k) as f64 * h * h;
        let interval = (-1.0 + margin, 1.0 - margin);
        if interval.0 >= interval.1 {
            return Ok(0.0);
        }
        let integrand = |x: f64| {
            let wr = math::powi(phi(x), r as i32);
            if r >= 1 && wr == 0.0 {
                return 0.0;
            }
            wr * sym_diff_phi_step(&fr, k, h, x)
        };
        Ok(q.rule.lp_norm(&integrand, q.p, interval)?)
    })?;
    Ok(ModulusResult {
        value,
        argmax_h,
        kind: ModulusKind::OmegaMainPart,
        resolution_note: String::from("sup over shrinking main-part intervals"),
    })
}

/// Dispatch by kind.
pub fn compute(q: &ModulusQuery, kind: ModulusKind) -> Result<ModulusResult, ModulusError> {
    match kind {
        ModulusKind::Omega => omega(q),
        ModulusKind::OmegaStar => omega_star(q),
        ModulusKind::OmegaDt => omega_dt_weighted(q),
        ModulusKind::OmegaMainPart => omega_mainpart(q),
    }
}
