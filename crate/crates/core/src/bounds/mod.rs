//! Lower bounds for coarse-grained uncertainty relations and the checks
//! built on them.
//!
//! For bin widths `Δ` (position) and `δ` (momentum):
//!
//! * `B_α = c(α) − ln(Δδ/πħ)` is the entropic bound obtained from the
//!   continuous Rényi relation; it turns negative for large `Δδ`.
//! * `R = −ln λ₀(Δδ/4ħ)`, with `λ₀` the top Slepian concentration
//!   eigenvalue, is positive for every finite `Δδ`.
//! * `L_α = max(B_α, R)`.
//!
//! The variance relations use the function chain `M`, `F`, `K` of the
//! truncated-Gaussian GHF: `K(u)` is the smallest per-axis factor any GHF
//! can achieve for reduced discrete variance `u = σ²/η²`.

mod kfun;
mod region;
mod relations;

use std::f64::consts::{E, PI};

use serde::Serialize;

pub use kfun::{func_F, func_K, func_M, func_M_inv, ln_F, ln_K, ln_M};
pub use region::{feasibility_region, Region, RegionGrid};
pub use relations::{
    check_binned_relations, check_binned_relations_at, check_coarse_relations,
    check_coarse_relations_with, check_variance_relations, GhfPair, RelationId, RelationReport,
    Verdict, VERDICT_TOL,
};

use crate::error::{domain, Result};
use crate::numerics::{find_root_bracketed, RootSpec};
use crate::specfun::prolate_r00;

/// Evaluated bounds at one `(Δ, δ, ħ, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSet {
    pub delta_x: f64,
    pub delta_p: f64,
    pub hbar: f64,
    pub alpha: f64,
    pub b_alpha: f64,
    pub b_half: f64,
    pub b_one: f64,
    pub r: f64,
    pub l_alpha: f64,
    pub r00: f64,
    /// `max(1, (2/e)² R₀₀⁻⁴)`.
    pub g: f64,
    /// `2L₁ = ln[(πeħ/Δδ)² g]`, the log of the optimal variance bound.
    pub log_rhs_heis: f64,
}

/// `ln x / (x - 1)` written as `ln(1+y)/y` with `y = x - 1`, equal to one at `y = 0`.
fn log_ratio(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else if y.is_infinite() {
        0.0
    } else {
        y.ln_1p() / y
    }
}

/// `c(α) = −½(ln α/(1−α) + ln β/(1−β))` with `β = α/(2α−1)`.
/// Takes the values `ln 2` at `α = 1/2` and `1` at `α = 1`.
pub fn renyi_constant(alpha: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1/2, 1], got {alpha}"));
    }
    let beta_minus_one = if alpha == 0.5 {
        f64::INFINITY
    } else {
        (1.0 - alpha) / (2.0 * alpha - 1.0)
    };
    Ok(0.5 * (log_ratio(alpha - 1.0) + log_ratio(beta_minus_one)))
}

fn check_widths(delta_x: f64, delta_p: f64, hbar: f64) -> Result<()> {
    for (name, v) in [("delta", delta_x), ("delta_p", delta_p), ("hbar", hbar)] {
        if !(v > 0.0 && v.is_finite()) {
            return domain(format!("{name} must be positive and finite, got {v}"));
        }
    }
    Ok(())
}

/// `B_α = c(α) − ln(Δδ/πħ)`; `B_{1/2} = −ln(Δδ/2πħ)`, `B₁ = −ln(Δδ/πeħ)`.
#[allow(non_snake_case)]
pub fn bound_B(delta_x: f64, delta_p: f64, hbar: f64, alpha: f64) -> Result<f64> {
    check_widths(delta_x, delta_p, hbar)?;
    Ok(renyi_constant(alpha)? - (delta_x * delta_p / (PI * hbar)).ln())
}

/// `R = −ln[(Δδ/2πħ) R₀₀(Δδ/4ħ, 1)²] = −ln λ₀(Δδ/4ħ) > 0`.
#[allow(non_snake_case)]
pub fn bound_R(delta_x: f64, delta_p: f64, hbar: f64) -> Result<f64> {
    check_widths(delta_x, delta_p, hbar)?;
    Ok(prolate_r00(delta_x * delta_p / (4.0 * hbar))?.neg_ln_lambda0)
}

/// All bounds at once, including `g` and `2L₁`.
#[allow(non_snake_case)]
pub fn bound_L(delta_x: f64, delta_p: f64, hbar: f64, alpha: f64) -> Result<BoundSet> {
    check_widths(delta_x, delta_p, hbar)?;
    let prolate = prolate_r00(delta_x * delta_p / (4.0 * hbar))?;
    let r = prolate.neg_ln_lambda0;
    let b_alpha = bound_B(delta_x, delta_p, hbar, alpha)?;
    let b_one = bound_B(delta_x, delta_p, hbar, 1.0)?;
    let ln_g = (2.0 * (2.0 / E).ln() - 4.0 * prolate.r00_at_1.ln()).max(0.0);
    Ok(BoundSet {
        delta_x,
        delta_p,
        hbar,
        alpha,
        b_alpha,
        b_half: bound_B(delta_x, delta_p, hbar, 0.5)?,
        b_one,
        r,
        l_alpha: b_alpha.max(r),
        r00: prolate.r00_at_1,
        g: ln_g.exp(),
        log_rhs_heis: 2.0 * b_one.max(r),
    })
}

fn crossing_spec() -> RootSpec {
    RootSpec {
        x_tol: 1e-15,
        f_tol: 1e-15,
        max_iter: 300,
    }
}

/// The `Δδ/ħ` at which `R` and `B₁` cross. The bracket `[1, 20]` encloses
/// the "below 6" and "about 7" regions where the switch is expected; only
/// the computed root is reported.
pub fn entropy_crossing() -> Result<f64> {
    let f = |dd: f64| {
        bound_R(dd, 1.0, 1.0).expect("finite positive width")
            - bound_B(dd, 1.0, 1.0, 1.0).expect("finite positive width")
    };
    find_root_bracketed(f, 1.0, 20.0, &crossing_spec())
}

/// The `Δδ/ħ` at which `g` leaves one, i.e. `R₀₀(Δδ/4ħ, 1)² = 2/e`.
pub fn g_switch() -> Result<f64> {
    let f = |dd: f64| {
        let r = prolate_r00(dd / 4.0).expect("positive bandwidth").r00_at_1;
        2.0 * r.ln() - (2.0 / E).ln()
    };
    find_root_bracketed(f, 1.0, 20.0, &crossing_spec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_endpoints() {
        assert!(bound_B(2.0 * PI, 1.0, 1.0, 0.5).unwrap().abs() < 1e-15);
        assert!(bound_B(PI * E, 1.0, 1.0, 1.0).unwrap().abs() < 1e-15);
        let half = bound_B(1.0, 1.0, 1.0, 0.5).unwrap();
        let mid = bound_B(1.0, 1.0, 1.0, 0.75).unwrap();
        let one = bound_B(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(half < mid && mid < one);
        assert!(bound_B(1.0, 1.0, 1.0, 0.4).is_err());
        assert!(bound_B(1.0, 1.0, 1.0, 1.01).is_err());
    }

    #[test]
    fn b_increases_with_alpha() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..20 {
            let a = 0.5 + 0.5 * i as f64 / 19.0;
            let b = bound_B(0.7, 1.3, 1.0, a).unwrap();
            assert!(b > prev, "α={a}");
            prev = b;
        }
    }

    #[test]
    fn renyi_constant_is_continuous_at_ends() {
        assert!((renyi_constant(1.0).unwrap() - renyi_constant(1.0 - 1e-9).unwrap()).abs() < 1e-8);
        assert!((renyi_constant(0.5).unwrap() - renyi_constant(0.5 + 1e-12).unwrap()).abs() < 1e-9);
        assert!((renyi_constant(0.5).unwrap() - 2f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn r_examples() {
        let r = bound_R(0.01, 1.0, 1.0).unwrap();
        let b = bound_B(0.01, 1.0, 1.0, 0.5).unwrap();
        assert!((r - b).abs() < 0.01);
        let oracle = crate::specfun::sinc_eigen_oracle(1.0).unwrap();
        assert!((bound_R(4.0, 1.0, 1.0).unwrap() + oracle.ln()).abs() < 1e-9);
        let r40 = bound_R(40.0, 1.0, 1.0).unwrap();
        assert!(r40 > 4e-8 && r40 < 5e-8, "{r40}");
    }

    #[test]
    fn l_examples() {
        let small = bound_L(1e-6, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(small.g, 1.0);
        let one = bound_L(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(one.l_alpha, one.b_alpha);
        assert_eq!(one.g, 1.0);
        let twelve = bound_L(12.0, 1.0, 1.0, 1.0).unwrap();
        assert!(twelve.r > twelve.b_one && twelve.l_alpha == twelve.r);
        assert!(twelve.g > 1.0);
        // exp(2L₁) = (πeħ/Δδ)² g on both sides of the switch.
        for b in [one, twelve] {
            let alt = 2.0 * (PI * E / (b.delta_x * b.delta_p)).ln() + b.g.ln();
            assert!((b.log_rhs_heis - alt).abs() < 1e-10);
        }
    }

    #[test]
    fn crossing_points_coincide() {
        let a = entropy_crossing().unwrap();
        let b = g_switch().unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        assert!((a - 7.166_608_108_089_41).abs() < 1e-8);
    }

    #[test]
    fn bound_set_invariants() {
        for i in 0..=30 {
            let dd = 10f64.powf(-3.0 + 0.2 * i as f64);
            for &a in &[0.5, 0.75, 1.0] {
                let b = bound_L(dd, 1.0, 1.0, a).unwrap();
                assert!(b.l_alpha >= 0.0 && b.g >= 1.0);
                assert!(b.r >= b.b_half);
                assert!(b.b_half <= b.b_alpha && b.b_alpha <= b.b_one);
            }
        }
    }
}
