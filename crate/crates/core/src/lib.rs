//! Numerical machinery for weighted moduli of smoothness on `[-1, 1]`.
//!
//! The crate computes the step-weighted moduli `omega_{k,r}` built from
//! symmetric differences with step `h * phi(x)`, `phi(x) = sqrt(1 - x^2)`,
//! their averaged and Ditzian-Totik variants, upper bounds on the matching
//! K-functionals, and degrees of best polynomial approximation `E_n(f)_p`.
//! A verification harness assembles these quantities into the equivalence,
//! direct (Jackson-type), inverse, and hierarchy inequalities that relate
//! them, fitting the unknown constants empirically.
//!
//! The crate is `no_std` compatible (with `alloc`); all floating-point
//! primitives are routed through `libm` so results do not depend on the
//! host math library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bestapprox;
pub mod cheb;
pub mod differences;
pub mod funcspace;
pub mod geometry;
pub mod kfunctional;
pub(crate) mod linalg;
pub mod math;
pub mod moduli;
pub mod quadrature;
pub mod sampling;
pub mod smoothcheck;
pub mod verify;

pub use funcspace::{catalog, eval_deriv, FuncError, FunctionSpec};
pub use geometry::{endpoint_map, mu, phi, step_domain, step_weight, DomainInterval};
pub use quadrature::{build_hgrid, HGrid, Lp, QuadratureRule};
