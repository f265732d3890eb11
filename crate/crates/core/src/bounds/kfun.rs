use crate::coarse::{ln_m_unchecked, m_unchecked, unit_stats};
use crate::error::{domain, Result};
use crate::numerics::{expand_bracket, find_root_bracketed, RootSpec};
use crate::specfun::ln_erf;

const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("M is defined for finite t > 0, got {t}"))
    }
}

/// `M(t) = e^{-t/4} / (2√(πt) Erf(√t/2))`, the reciprocal-variance map of
/// the truncated-Gaussian GHF: `v(t) = 1/(2t) − M(t)` is its per-bin
/// variance in units of `η²`. Strictly decreasing on `t > 0`.
#[allow(non_snake_case)]
pub fn func_M(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(m_unchecked(t))
}

/// `ln M(t)`, finite far beyond the point where `M(t)` underflows.
#[allow(non_snake_case)]
pub fn ln_M(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(ln_m_unchecked(t))
}

/// Inverse of [`func_M`]: the `t > 0` with `M(t) = u`.
///
/// Solved for `s = ln t` on `ln M(e^s) = ln u`. The starting guess comes
/// from the small-`t` series (`t ≈ 1/(2u + 1/6)`) for large `u` and from
/// the asymptote `ln M ≈ −t/4` for small `u`.
#[allow(non_snake_case)]
pub fn func_M_inv(u: f64) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return domain(format!("M⁻¹ is defined for finite u > 0, got {u}"));
    }
    let target = u.ln();
    let guess = if u > 0.05 {
        1.0 / (2.0 * u + 1.0 / 6.0)
    } else {
        (-4.0 * target).max(1.0)
    };
    let f = |s: f64| ln_m_unchecked(s.exp()) - target;
    let s0 = guess.ln();
    let (lo, hi) = expand_bracket(f, s0 - 0.5, s0 + 0.5, 1.0, 200)?;
    let spec = RootSpec {
        x_tol: 1e-16,
        f_tol: 1e-16,
        max_iter: 300,
    };
    Ok(find_root_bracketed(f, lo, hi, &spec)?.exp())
}

/// `ln F(u, t)`; see [`func_F`].
#[allow(non_snake_case)]
pub fn ln_F(u: f64, t: f64) -> Result<f64> {
    if !(u >= 0.0 && u.is_finite()) {
        return domain(format!("F needs finite u ≥ 0, got {u}"));
    }
    check_t(t)?;
    let (v, ln_z) = unit_stats(t);
    Ok(TWO_PI_E.ln() + (u + v).ln() - 2.0 * ln_z - 2.0 * t * v)
}

/// Per-axis objective `F(u, t) = [2t(u − M(t)) + 1] e^{2tM(t)} / Erf²(√t/2)`
/// for a truncated-Gaussian GHF of shape `t` and reduced discrete variance
/// `u`. Evaluated as `2πe (u + v) e^{−2 ln Z − 2tv}`, which avoids the
/// cancellation in the bracket as `t → 0`.
#[allow(non_snake_case)]
pub fn func_F(u: f64, t: f64) -> Result<f64> {
    ln_F(u, t).map(f64::exp)
}

/// `ln K(u)` with `ln K = 2u t* − 2 ln Erf(√t*/2)` at `t* = M⁻¹(u)`.
#[allow(non_snake_case)]
pub fn ln_K(u: f64) -> Result<f64> {
    if !(u >= 0.0 && u.is_finite()) {
        return domain(format!("K needs finite u ≥ 0, got {u}"));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let t = func_M_inv(u)?;
    Ok((2.0 * u * t - 2.0 * ln_erf(0.5 * t.sqrt())).max(0.0))
}

/// `K(u) = min_t F(u, t)`, attained at `t = M⁻¹(u)`; `K(0) = 1`.
#[allow(non_snake_case)]
pub fn func_K(u: f64) -> Result<f64> {
    ln_K(u).map(f64::exp)
}
