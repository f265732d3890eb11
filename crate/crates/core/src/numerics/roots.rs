use crate::error::{domain, Error, Result};

/// Stopping rule for bracketed root finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// Relative bracket width at which iteration stops.
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            x_tol: 1e-13,
            f_tol: 1e-13,
            max_iter: 200,
        }
    }
}

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// The returned point always lies inside the initial bracket.
pub fn find_root_bracketed<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &RootSpec,
) -> Result<f64> {
    if !(spec.x_tol > 0.0 && spec.f_tol > 0.0) {
        return domain("root tolerances must be strictly positive");
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.x_tol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if fb.abs() <= spec.f_tol || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence {
                what: "Brent root search (NaN)",
                estimate: b,
                error: m.abs(),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "Brent root search",
        estimate: b,
        error: (c - b).abs(),
    })
}

/// Grows `[lo, hi]` geometrically (about its midpoint in log space when both
/// ends are positive) until `f` changes sign or `max_steps` is exhausted.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    factor: f64,
    max_steps: usize,
) -> Result<(f64, f64)> {
    let (mut flo, mut fhi) = (f(lo), f(hi));
    for _ in 0..max_steps {
        if flo.signum() != fhi.signum() {
            return Ok((lo, hi));
        }
        if flo.abs() < fhi.abs() {
            let w = hi - lo;
            lo -= factor * w;
            flo = f(lo);
        } else {
            let w = hi - lo;
            hi += factor * w;
            fhi = f(hi);
        }
    }
    Err(Error::InvalidBracket {
        lo,
        hi,
        f_lo: flo,
        f_hi: fhi,
    })
}
