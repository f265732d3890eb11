//! Deterministic numerical kernels shared by every other module: adaptive
//! Gauss–Kronrod quadrature, Brent root bracketing and fixed Gauss rules.
//!
//! All routines are pure functions of their arguments. Callers split
//! integrals at known discontinuities; the quadrature assumes the integrand
//! is smooth on each piece it is handed.

mod gauss;
mod quad;
mod roots;

pub use gauss::{gauss_laguerre, gauss_legendre};
pub use quad::{integrate, integrate_halfline, integrate_line, integrate_pieces, QuadSpec};
pub use roots::{expand_bracket, find_root_bracketed, RootSpec};

/// Tail mass tolerated when an infinite domain is replaced by a finite one.
pub const EPS_TAIL_QUAD: f64 = 1e-12;
