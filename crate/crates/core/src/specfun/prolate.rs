use std::f64::consts::PI;

use serde::Serialize;

#[cfg(test)]
use super::spherical_bessel_j;
use crate::error::{domain, Error, Result};
use crate::numerics::gauss_laguerre;

/// Below this bandwidth `-ln λ₀` is taken directly from `λ₀`; above it
/// `1 - λ₀` is too small for that and the tail integral is used instead.
const DIRECT_LIMIT: f64 = 6.0;
const R00_TOL: f64 = 1e-10;
const MAX_TERMS: usize = 5000;
const LAGUERRE_NODES: usize = 40;
const LAGUERRE_CHECK_NODES: usize = 28;

/// `R₀₀(c, 1)` and the concentration eigenvalue it determines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProlateResult {
    pub c: f64,
    pub r00_at_1: f64,
    /// `λ₀ = (2c/π) R₀₀(c, 1)²`.
    pub lambda0: f64,
    /// `-ln λ₀`, accurate in relative terms even when `λ₀` rounds to one.
    /// Underflows to zero once `c` exceeds roughly 350.
    pub neg_ln_lambda0: f64,
    /// `1 - λ₀` with the same relative accuracy as `neg_ln_lambda0`.
    pub one_minus_lambda0: f64,
    /// Number of even Legendre coefficients in the final expansion.
    pub terms_used: usize,
    pub est_error: f64,
}

/// Radial prolate spheroidal function of the first kind `R₀₀(c, 1)`.
///
/// The even Legendre coefficients `d_r` of the angular function `S₀₀` are
/// the lowest eigenvector of a symmetric tridiagonal matrix. With them
/// `R₀₀(c, 1) = d₀ / S₀₀(c, 0)` once `S₀₀` is normalized on `[-1, 1]`.
/// The truncation grows until successive values differ by less than 1e-10.
///
/// For `c > 6` the logarithm `-ln λ₀` is obtained from
/// `-ln λ₀(c) = ∫_c^∞ (2/s) ψ₀(1; s)² ds`, where `ψ₀` is the unit-norm
/// angular function; `ψ₀(1; s)²` comes from integrating a Riccati form of
/// the spheroidal equation from the endpoint to the origin.
pub fn prolate_r00(c: f64) -> Result<ProlateResult> {
    if !(c >= 0.0 && c.is_finite()) {
        return domain(format!(
            "prolate bandwidth must be finite and nonnegative, got {c}"
        ));
    }
    if c == 0.0 {
        return Ok(ProlateResult {
            c,
            r00_at_1: 1.0,
            lambda0: 0.0,
            neg_ln_lambda0: f64::INFINITY,
            one_minus_lambda0: 1.0,
            terms_used: 1,
            est_error: 0.0,
        });
    }
    let mut n = initial_terms(c);
    let mut prev = expansion_at(c, n).r00;
    let (r00, terms, err) = loop {
        let next_n = n + 10 + n / 4;
        if next_n > MAX_TERMS {
            return Err(Error::NonConvergence {
                what: "prolate Legendre expansion",
                estimate: prev,
                error: f64::NAN,
            });
        }
        let cur = expansion_at(c, next_n).r00;
        let diff = (cur - prev).abs();
        n = next_n;
        if diff < R00_TOL {
            break (cur, n, diff);
        }
        prev = cur;
    };
    let ln_pref = (2.0 * c / PI).ln();
    let (neg_ln, est_error) = if c <= DIRECT_LIMIT {
        (-(ln_pref + 2.0 * r00.ln()), err)
    } else {
        let (tail, tail_err) = tail_neg_ln_lambda(c)?;
        (tail, err.max(tail_err))
    };
    Ok(ProlateResult {
        c,
        r00_at_1: r00,
        lambda0: (-neg_ln).exp(),
        neg_ln_lambda0: neg_ln,
        one_minus_lambda0: -(-neg_ln).exp_m1(),
        terms_used: terms,
        est_error,
    })
}

fn initial_terms(c: f64) -> usize {
    ((1.5 * c + 40.0) / 2.0) as usize + 1
}

struct Expansion {
    /// Unnormalized Legendre coefficients `d_0, d_2, d_4, ...`.
    #[cfg_attr(not(test), allow(dead_code))]
    d: Vec<f64>,
    r00: f64,
}

/// Diagonal and off-diagonal of the tridiagonal matrix in the orthonormal
/// even Legendre basis.
fn tridiagonal(c: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let c2 = c * c;
    let diag = (0..n)
        .map(|i| {
            let r = (2 * i) as f64;
            r * (r + 1.0) + c2 * (2.0 * r * (r + 1.0) - 1.0) / ((2.0 * r - 1.0) * (2.0 * r + 3.0))
        })
        .collect();
    let off = (0..n.saturating_sub(1))
        .map(|i| {
            let r = (2 * i) as f64;
            c2 * (r + 1.0) * (r + 2.0)
                / ((2.0 * r + 3.0) * ((2.0 * r + 1.0) * (2.0 * r + 5.0)).sqrt())
        })
        .collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let qq = if q == 0.0 {
            f64::EPSILON * (x.abs() + 1.0)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / qq;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue by bisection on the Sturm count.
fn lowest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    hi = hi.min(diag[0]);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T - shift) x = b` with partial pivoting (LAPACK `dgtsv` style).
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &mut [f64]) {
    let n = diag.len();
    let tiny = f64::EPSILON * diag.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            }
            du[i] = temp;
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    // dl now holds the second superdiagonal for pivoted rows.
    let m = n.saturating_sub(2);
    du2[..m].copy_from_slice(&dl[..m]);
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

fn expansion_at(c: f64, n: usize) -> Expansion {
    let (diag, off) = tridiagonal(c, n);
    let chi = lowest_eigenvalue(&diag, &off);
    let mut v = vec![1.0; n];
    for _ in 0..3 {
        solve_shifted(&diag, &off, chi, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    let d: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, e)| e * ((4 * i + 1) as f64 / 2.0).sqrt())
        .collect();
    // S₀₀(c, 0) = Σ d_r P_r(0), with P_{2i+2}(0) = -P_{2i}(0) (2i+1)/(2i+2).
    let mut p = 1.0;
    let mut s0 = 0.0;
    for (i, di) in d.iter().enumerate() {
        if i > 0 {
            let k = (2 * i) as f64;
            p *= -(k - 1.0) / k;
        }
        s0 += di * p;
    }
    Expansion { r00: d[0] / s0, d }
}

/// The lowest separation constant `χ₀(c)` of the prolate equation.
fn separation_constant(c: f64) -> f64 {
    let mut n = initial_terms(c);
    let mut prev = {
        let (d, o) = tridiagonal(c, n);
        lowest_eigenvalue(&d, &o)
    };
    loop {
        n += 10 + n / 4;
        let (d, o) = tridiagonal(c, n);
        let cur = lowest_eigenvalue(&d, &o);
        if (cur - prev).abs() <= 4.0 * f64::EPSILON * cur.abs().max(1.0) || n > MAX_TERMS {
            return cur;
        }
        prev = cur;
    }
}

/// Flammer's spherical-Bessel series for `R₀₀(c, 1)`. It cancels badly
/// for large `c` and is only used as an independent check.
#[cfg(test)]
fn r00_bessel_series(c: f64) -> f64 {
    let e = expansion_at(c, initial_terms(c) + 30);
    let j = spherical_bessel_j(2 * (e.d.len() - 1), c);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, di) in e.d.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        num += sign * di * j[2 * i];
        den += di;
    }
    num / den
}

/// `ln ψ₀(1; c)²` for the unit-norm angular function of bandwidth `c`.
///
/// With `y = 1 - x` and `φ(y) = ψ(x)/ψ(1)` the spheroidal equation becomes
/// `y(2-y)φ'' + 2(1-y)φ' + (χ - c²(1-y)²)φ = 0`. We integrate
/// `W = φ'/φ`, `L = ln φ` and `S = ∫₀^y φ² / φ(y)²` from a Frobenius start
/// near `y = 0` up to `y = 1`, then `ψ(1)² = 1 / (2 e^{2L} S)`.
fn ln_psi_endpoint_sq(c: f64) -> Result<f64> {
    let chi = separation_constant(c);
    let c2 = c * c;
    let y0 = (1e-3f64).min(1e-3 / c2);
    // Frobenius coefficients of φ around y = 0 with a₀ = 1.
    let mut a = vec![1.0, 0.5 * (c2 - chi)];
    for k in 1..40usize {
        let kf = k as f64;
        let am2 = if k >= 2 { a[k - 2] } else { 0.0 };
        let next = ((kf * (kf + 1.0) - (chi - c2)) * a[k] - 2.0 * c2 * a[k - 1] + c2 * am2)
            / (2.0 * (kf + 1.0) * (kf + 1.0));
        a.push(next);
    }
    let mut phi = 0.0;
    let mut dphi = 0.0;
    let mut yp = 1.0;
    for (k, ak) in a.iter().enumerate() {
        if k > 0 {
            dphi += k as f64 * ak * yp;
            yp *= y0;
        }
        phi += ak * yp;
    }
    // ∫₀^{y0} φ² via the squared series.
    let m = a.len();
    let mut int_sq = 0.0;
    for i in 0..m {
        for j in 0..m - i {
            let k = i + j;
            int_sq += a[i] * a[j] * y0.powi(k as i32 + 1) / (k + 1) as f64;
        }
    }
    let state = [dphi / phi, phi.ln(), int_sq / (phi * phi)];
    let rhs = |y: f64, z: &[f64; 3]| -> [f64; 3] {
        let (w, s) = (z[0], z[2]);
        let q = chi - c2 * (1.0 - y) * (1.0 - y);
        [
            -w * w - (2.0 * (1.0 - y) * w + q) / (y * (2.0 - y)),
            w,
            1.0 - 2.0 * w * s,
        ]
    };
    let end = dopri5(rhs, y0, 1.0, state, 1e-12, 1e-14)?;
    Ok(-2.0 * end[1] - (2.0 * end[2]).ln())
}

/// `-ln λ₀(c) = ∫_c^∞ (2/s) ψ₀(1; s)² ds` by Gauss–Laguerre after the
/// substitution `s = c + x/2`, with a lower-order rule as the error estimate.
fn tail_neg_ln_lambda(c: f64) -> Result<(f64, f64)> {
    let rule = |n: usize| -> Result<f64> {
        let (x, w) = gauss_laguerre(n);
        let mut sum = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let s = c + 0.5 * xi;
            // h(s) e^{-2c} e^{-x} = (2/s) ψ²; we carry e^{x} (2/s) ψ².
            let ln_h = (2.0 / s).ln() + ln_psi_endpoint_sq(s)? + xi;
            sum += wi * ln_h.exp();
        }
        Ok(0.5 * sum)
    };
    let fine = rule(LAGUERRE_NODES)?;
    let coarse = rule(LAGUERRE_CHECK_NODES)?;
    Ok((fine, (fine - coarse).abs()))
}

/// Dormand–Prince 5(4) with standard step-size control. Private: the only
/// ODE in the crate is the three-component Riccati system above.
fn dopri5<F>(f: F, t0: f64, t1: f64, y0: [f64; 3], rtol: f64, atol: f64) -> Result<[f64; 3]>
where
    F: Fn(f64, &[f64; 3]) -> [f64; 3],
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut t = t0;
    let mut y = y0;
    let mut h = 0.1 * t0.max(1e-12);
    for _ in 0..1_000_000 {
        if t >= t1 {
            return Ok(y);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k = [[0.0; 3]; 7];
        k[0] = f(t, &y);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for m in 0..3 {
                    ys[m] += h * A[s][j] * kj[m];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut yn = y;
        let mut err = 0.0f64;
        for m in 0..3 {
            let mut inc = 0.0;
            let mut e = 0.0;
            for s in 0..7 {
                inc += B[s] * k[s][m];
                e += E[s] * k[s][m];
            }
            yn[m] += h * inc;
            let sc = atol + rtol * y[m].abs().max(yn[m].abs());
            err = err.max((h * e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = yn;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Err(Error::NonConvergence {
        what: "prolate endpoint ODE",
        estimate: t,
        error: f64::NAN,
    })
}
