use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_pieces, QuadSpec};
use crate::specfun::erfc;

/// Quadrature settings for densities: tight enough that sums over many
/// bins or pieces stay well inside the 1e-9 budgets.
pub(crate) fn density_quad() -> QuadSpec {
    QuadSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

/// Mass left outside the window used for moments and entropies.
const MOMENT_EPS: f64 = 1e-15;
/// Window mass budget for heavy (power-law) tails, whose remainder is
/// added back analytically.
const HEAVY_EPS: f64 = 1e-12;

/// A one-dimensional probability density with known closed form.
///
/// Besides pointwise evaluation a density knows its support, its jump
/// points, and how far out one must go to capture all but a given mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Density1D {
    shape: Shape,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `h_n(x/s)² / s` with `h_n` the normalized Hermite function.
    Hermite {
        n: u32,
        scale: f64,
    },
    /// `(2/L) sin²(nπx/L)` on `[0, L]`.
    SineSquared {
        n: u32,
        length: f64,
    },
    /// Momentum density of the `n`-th infinite-well eigenstate.
    WellMomentum {
        n: u32,
        length: f64,
        hbar: f64,
    },
    Mixture(Vec<(f64, Density1D)>),
}

impl Density1D {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidState(format!(
                "normal density needs finite mean and sd > 0, got ({mean}, {sd})"
            )));
        }
        Ok(Self {
            shape: Shape::Normal { mean, sd },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidState(format!(
                "uniform density needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            shape: Shape::Uniform { lo, hi },
        })
    }

    pub(crate) fn hermite(n: u32, scale: f64) -> Self {
        Self {
            shape: Shape::Hermite { n, scale },
        }
    }

    pub(crate) fn sine_squared(n: u32, length: f64) -> Self {
        Self {
            shape: Shape::SineSquared { n, length },
        }
    }

    pub(crate) fn well_momentum(n: u32, length: f64, hbar: f64) -> Self {
        Self {
            shape: Shape::WellMomentum { n, length, hbar },
        }
    }

    /// Convex combination; weights must be positive and sum to one.
    pub fn mixture(parts: Vec<(f64, Density1D)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidState(
                "mixture needs at least one component".into(),
            ));
        }
        if parts.iter().any(|(w, _)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidState(
                "mixture weights must be positive".into(),
            ));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            shape: Shape::Mixture(parts),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            Shape::Uniform { lo, hi } => {
                if x >= *lo && x < *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Shape::Hermite { n, scale } => {
                let h = hermite_function(*n, x / scale);
                h * h / scale
            }
            Shape::SineSquared { n, length } => {
                if x < 0.0 || x > *length {
                    0.0
                } else {
                    let s = (*n as f64 * PI * x / length).sin();
                    2.0 / length * s * s
                }
            }
            Shape::WellMomentum { n, length, hbar } => {
                well_density_k(*n, *length, (x / hbar).abs()) / hbar
            }
            Shape::Mixture(parts) => parts.iter().map(|(w, d)| w * d.eval(x)).sum(),
        }
    }

    /// Closed interval outside which the density vanishes.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Uniform { lo, hi } => (*lo, *hi),
            Shape::SineSquared { length, .. } => (0.0, *length),
            Shape::Mixture(parts) => {
                parts
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, d)| {
                        let (lo, hi) = d.support();
                        (a.min(lo), b.max(hi))
                    })
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Sorted points where the density or its first derivative jumps.
    pub fn discontinuities(&self) -> Vec<f64> {
        let mut v = match &self.shape {
            Shape::Uniform { lo, hi } => vec![*lo, *hi],
            Shape::SineSquared { length, .. } => vec![0.0, *length],
            Shape::Mixture(parts) => parts
                .iter()
                .flat_map(|(_, d)| d.discontinuities())
                .collect(),
            _ => Vec::new(),
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// True when the density decays only like a power law.
    pub fn is_heavy_tailed(&self) -> bool {
        match &self.shape {
            Shape::WellMomentum { .. } => true,
            Shape::Mixture(parts) => parts.iter().any(|(_, d)| d.is_heavy_tailed()),
            _ => false,
        }
    }

    /// A finite interval holding all but at most `eps` of the mass.
    pub fn window(&self, eps: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Normal { mean, sd } => {
                let mut z = 1.0;
                while erfc(z / SQRT_2) > eps && z < 40.0 {
                    z += 0.25;
                }
                (mean - z * sd, mean + z * sd)
            }
            Shape::Uniform { lo, hi } => (*lo, *hi),
            Shape::SineSquared { length, .. } => (0.0, *length),
            Shape::Hermite { n, scale } => {
                let mut y = (2.0 * *n as f64 + 1.0).sqrt() + 1.0;
                loop {
                    let tail = hermite_tail(*n, y);
                    if 2.0 * tail <= eps || y > 60.0 {
                        return (-y * scale, y * scale);
                    }
                    y += 0.5;
                }
            }
            Shape::WellMomentum { n, length, hbar } => {
                let k = well_window_k(*n, *length, eps);
                (-k * hbar, k * hbar)
            }
            Shape::Mixture(parts) => {
                parts
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, d)| {
                        let (lo, hi) = d.window(eps);
                        (a.min(lo), b.max(hi))
                    })
            }
        }
    }

    /// Sorted quadrature breakpoints covering `[lo, hi]`: the ends, any
    /// discontinuities inside, and shape-specific split points (zeros of
    /// oscillating densities, the center of bell shapes).
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v = vec![lo, hi];
        self.push_splits(lo, hi, &mut v);
        v.retain(|x| *x >= lo && *x <= hi);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn push_splits(&self, lo: f64, hi: f64, v: &mut Vec<f64>) {
        match &self.shape {
            Shape::Normal { mean, sd } => {
                for j in -8..=8 {
                    v.push(mean + j as f64 * sd);
                }
            }
            Shape::Uniform { lo: a, hi: b } => v.extend([*a, *b]),
            Shape::Hermite { n, scale } => {
                let y = (2.0 * *n as f64 + 1.0).sqrt() + 8.0;
                let steps = (2.0 * y).ceil() as i32;
                for j in -steps..=steps {
                    v.push(0.5 * j as f64 * scale);
                }
            }
            Shape::SineSquared { n, length } => {
                for j in 0..=*n {
                    v.push(j as f64 * length / *n as f64);
                }
            }
            Shape::WellMomentum { n, length, hbar } => {
                // Zeros sit at k = ±(q + 2πm/L), m ≥ 1; the peaks at ±q are
                // useful split points too.
                let q = *n as f64 * PI / length;
                let period = 2.0 * PI / length;
                let kmax = lo.abs().max(hi.abs()) / hbar;
                let m_lo = (((lo / hbar).abs().min((hi / hbar).abs()) - q) / period)
                    .floor()
                    .max(0.0) as i64;
                let m_hi = ((kmax - q) / period).ceil().max(0.0) as i64;
                let m_start = if lo < 0.0 && hi > 0.0 { 0 } else { m_lo };
                for m in m_start..=m_hi {
                    let k = q + m as f64 * period;
                    v.push(k * hbar);
                    v.push(-k * hbar);
                }
                // Inner structure between the two peaks.
                let inner = (2.0 * q / period).ceil() as i64;
                for j in -inner..=inner {
                    let k = j as f64 * period * 0.5;
                    if k.abs() < q {
                        v.push(k * hbar);
                    }
                }
            }
            Shape::Mixture(parts) => {
                for (_, d) in parts {
                    d.push_splits(lo, hi, v);
                }
            }
        }
    }

    /// Probability of `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        match &self.shape {
            Shape::Normal { mean, sd } => {
                let za = (a - mean) / (SQRT_2 * sd);
                let zb = (b - mean) / (SQRT_2 * sd);
                Ok(if za >= 0.0 {
                    0.5 * (erfc(za) - erfc(zb))
                } else if zb <= 0.0 {
                    0.5 * (erfc(-zb) - erfc(-za))
                } else {
                    1.0 - 0.5 * (erfc(-za) + erfc(zb))
                })
            }
            Shape::Uniform { lo, hi } => Ok(((b.min(*hi) - a.max(*lo)).max(0.0)) / (hi - lo)),
            Shape::SineSquared { n, length } => {
                let cdf = |x: f64| {
                    let x = x.clamp(0.0, *length);
                    let w = 2.0 * *n as f64 * PI;
                    x / length - (w * x / length).sin() / w
                };
                Ok((cdf(b) - cdf(a)).max(0.0))
            }
            Shape::Mixture(parts) => {
                let mut s = 0.0;
                for (w, d) in parts {
                    s += w * d.mass(a, b)?;
                }
                Ok(s)
            }
            _ => {
                let (lo, hi) = self.window(MOMENT_EPS);
                let (a2, b2) = if self.is_heavy_tailed() {
                    (a, b)
                } else {
                    (a.max(lo), b.min(hi))
                };
                if b2 <= a2 {
                    return Ok(0.0);
                }
                let v =
                    integrate_pieces(|x| self.eval(x), &self.breakpoints(a2, b2), &density_quad())?;
                Ok(v.max(0.0))
            }
        }
    }

    /// Total probability, used to validate normalization.
    pub fn total_mass(&self) -> Result<f64> {
        match &self.shape {
            Shape::Mixture(parts) => {
                let mut s = 0.0;
                for (w, d) in parts {
                    s += w * d.total_mass()?;
                }
                Ok(s)
            }
            Shape::WellMomentum { .. } => {
                let (inner, tails) = self.well_moment(0)?;
                Ok(inner + tails)
            }
            _ => {
                let (lo, hi) = self.window(MOMENT_EPS);
                integrate_pieces(|x| self.eval(x), &self.breakpoints(lo, hi), &density_quad())
            }
        }
    }

    /// Mean and variance by quadrature, with analytic tails where the
    /// density decays as a power law. Mixtures combine component moments.
    pub fn mean_and_variance(&self) -> Result<(f64, f64)> {
        match &self.shape {
            Shape::Mixture(parts) => {
                let moments: Vec<(f64, f64, f64)> = parts
                    .iter()
                    .map(|(w, d)| d.mean_and_variance().map(|(m, v)| (*w, m, v)))
                    .collect::<Result<_>>()?;
                let mean: f64 = moments.iter().map(|(w, m, _)| w * m).sum();
                let var = moments
                    .iter()
                    .map(|(w, m, v)| w * (v + (m - mean) * (m - mean)))
                    .sum();
                Ok((mean, var))
            }
            Shape::WellMomentum { .. } => {
                let (inner, tails) = self.well_moment(2)?;
                Ok((0.0, inner + tails))
            }
            _ => {
                let (lo, hi) = self.window(MOMENT_EPS);
                let bp = self.breakpoints(lo, hi);
                let q = density_quad();
                let mass = integrate_pieces(|x| self.eval(x), &bp, &q)?;
                let mean = integrate_pieces(|x| x * self.eval(x), &bp, &q)? / mass;
                let var =
                    integrate_pieces(|x| (x - mean) * (x - mean) * self.eval(x), &bp, &q)? / mass;
                Ok((mean, var.max(0.0)))
            }
        }
    }

    /// `∫ p^j ρ̃(p) dp` for the well momentum density, returned as the
    /// windowed quadrature part and the analytic two-sided tail.
    fn well_moment(&self, j: u32) -> Result<(f64, f64)> {
        let Shape::WellMomentum { n, length, hbar } = &self.shape else {
            unreachable!("well_moment called on a non-well density");
        };
        let kmax = well_window_k(*n, *length, HEAVY_EPS);
        let bp = self.breakpoints(-kmax * hbar, kmax * hbar);
        let inner = integrate_pieces(|p| p.powi(j as i32) * self.eval(p), &bp, &density_quad())?;
        let tail_k = well_tail_k(*n, *length, kmax, j);
        Ok((inner, 2.0 * tail_k * hbar.powi(j as i32)))
    }

    /// `∫ ρ^λ` over the whole line, with the power-law tail for a single
    /// well momentum density replaced by its phase-averaged asymptote.
    pub(crate) fn power_integral(&self, lambda: f64) -> Result<f64> {
        let heavy = self.is_heavy_tailed();
        if heavy && lambda <= 0.25 {
            return Err(Error::Divergent(format!(
                "∫ρ^λ diverges for a p⁻⁴ tail when λ = {lambda} ≤ 1/4"
            )));
        }
        // For light tails ρ^λ outside the window scales like eps^λ, so
        // orders below one need a wider window.
        let eps = if heavy {
            HEAVY_EPS
        } else if lambda < 1.0 {
            MOMENT_EPS.powf(1.0 / lambda).max(1e-300)
        } else {
            MOMENT_EPS
        };
        let (lo, hi) = self.window(eps);
        let bp = self.breakpoints(lo, hi);
        let f = |x: f64| {
            let r = self.eval(x);
            if r > 0.0 {
                r.powf(lambda)
            } else {
                0.0
            }
        };
        let inner = integrate_pieces(f, &bp, &density_quad())?;
        if !heavy || lambda >= 1.0 {
            return Ok(inner);
        }
        match &self.shape {
            Shape::WellMomentum { n, length, hbar } => {
                let q = *n as f64 * PI / length;
                let a = 2.0 * q * q / (PI * length);
                let k = hi / hbar;
                let phase_avg =
                    libm::tgamma(lambda + 0.5) / (PI.sqrt() * libm::tgamma(lambda + 1.0));
                let tail_k = (2.0 * a).powf(lambda) * phase_avg * k.powf(1.0 - 4.0 * lambda)
                    / (4.0 * lambda - 1.0);
                Ok(inner + 2.0 * tail_k * hbar.powf(1.0 - lambda))
            }
            _ => Err(Error::Divergent(
                "tail of ∫ρ^λ with λ < 1 is not controlled for mixtures with power-law components"
                    .into(),
            )),
        }
    }

    /// `-∫ ρ ln ρ` over the window.
    pub(crate) fn shannon_integral(&self) -> Result<f64> {
        let eps = if self.is_heavy_tailed() {
            HEAVY_EPS
        } else {
            MOMENT_EPS
        };
        let (lo, hi) = self.window(eps);
        let bp = self.breakpoints(lo, hi);
        let f = |x: f64| {
            let r = self.eval(x);
            if r > 0.0 {
                -r * r.ln()
            } else {
                0.0
            }
        };
        integrate_pieces(f, &bp, &density_quad())
    }
}

/// Normalized Hermite function `h_n(y) = H_n(y) e^{-y²/2} / √(2ⁿ n! √π)`.
pub(crate) fn hermite_function(n: u32, y: f64) -> f64 {
    let mut h0 = PI.powf(-0.25) * (-0.5 * y * y).exp();
    if n == 0 {
        return h0;
    }
    let mut h1 = SQRT_2 * y * h0;
    for k in 1..n {
        let kf = k as f64;
        let h2 = (2.0 / (kf + 1.0)).sqrt() * y * h1 - (kf / (kf + 1.0)).sqrt() * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn hermite_tail(n: u32, y: f64) -> f64 {
    let spec = QuadSpec {
        abs_tol: 1e-18,
        rel_tol: 1e-6,
        max_subdivisions: 200,
    };
    integrate(|t| hermite_function(n, t).powi(2), y, y + 30.0, &spec).unwrap_or(f64::INFINITY)
}

/// Well momentum density in wavenumber units, `k ≥ 0`, written in a form
/// that stays finite through the removable singularity at `k = nπ/L`.
fn well_density_k(n: u32, length: f64, k: f64) -> f64 {
    let q = n as f64 * PI / length;
    let u = 0.5 * (k - q) * length;
    let sinc = if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    };
    q * q * length / PI * sinc * sinc / ((k + q) * (k + q))
}

/// Smallest zero `k = q + 2πm/L` beyond which each tail carries at most
/// `eps / 2`, using `∫_K^∞ ρ ≤ 4q² / (3πL(K-q)³)`.
fn well_window_k(n: u32, length: f64, eps: f64) -> f64 {
    let q = n as f64 * PI / length;
    let period = 2.0 * PI / length;
    let need = (8.0 * q * q / (3.0 * PI * length * eps)).cbrt();
    let m = (need / period).ceil().max(1.0);
    q + m * period
}

/// One-sided `∫_K^∞ k^j ρ(k) dk` for `j ∈ {0, 2}` at a zero `K` of the
/// density. The smooth envelope integrates in closed form; the oscillating
/// part contributes `f_j'(K)/L²` after two integrations by parts.
fn well_tail_k(n: u32, length: f64, k: f64, j: u32) -> f64 {
    let q = n as f64 * PI / length;
    let a = 2.0 * q * q / (PI * length);
    let x = q / k;
    let d = k * k - q * q;
    match j {
        0 => {
            // (1/(2q²K)) Σ_{i≥1} 2i/(2i+1) x^{2i}
            let mut s = 0.0;
            let mut p = 1.0;
            for i in 1..200 {
                p *= x * x;
                let t = 2.0 * i as f64 / (2.0 * i as f64 + 1.0) * p;
                s += t;
                if t < 1e-18 * s {
                    break;
                }
            }
            let envelope = s / (2.0 * q * q * k);
            let osc = -4.0 * k / (d * d * d) / (length * length);
            a * (envelope + osc)
        }
        2 => {
            let envelope = 0.5 * k / d + x.atanh() / (2.0 * q);
            let osc = -2.0 * k * (k * k + q * q) / (d * d * d) / (length * length);
            a * (envelope + osc)
        }
        _ => unreachable!("only even moments 0 and 2 are needed"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let q = QuadSpec::tight();
        for n in 0..6 {
            for m in 0..6 {
                let v = integrate(
                    |y| hermite_function(n, y) * hermite_function(m, y),
                    -15.0,
                    15.0,
                    &q,
                )
                .unwrap();
                let e = if n == m { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-12, "{n},{m}: {v}");
            }
        }
    }

    #[test]
    fn well_density_matches_raw_formula() {
        let (n, l) = (3, 1.7);
        let q = n as f64 * PI / l;
        for &k in &[0.0, 0.3, 2.0, 7.9, 25.0] {
            let raw = 2.0 * q * q / (PI * l) * (1.0 - (-1f64).powi(n as i32) * (k * l).cos())
                / (q * q - k * k).powi(2);
            assert!(
                (well_density_k(n, l, k) - raw).abs() <= 1e-12 * raw.max(1e-12),
                "k={k}"
            );
        }
        assert!((well_density_k(n, l, q) - l / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn tail_series_and_closed_form_agree() {
        let (n, l) = (2, 1.0);
        let q = n as f64 * PI / l;
        let k = q + 2.0 * PI * 3.0;
        let x = q / k;
        let closed = k / (2.0 * q * q * (k * k - q * q)) - x.atanh() / (2.0 * q * q * q);
        let series = (well_tail_k(n, l, k, 0) / (2.0 * q * q / (PI * l)))
            + 4.0 * k / (k * k - q * q).powi(3) / (l * l);
        assert!((closed - series).abs() < 1e-14);
    }

    #[test]
    fn window_bounds_are_conservative() {
        let d = Density1D::normal(0.3, 2.0).unwrap();
        let (lo, hi) = d.window(1e-12);
        let out = 1.0 - d.mass(lo, hi).unwrap();
        assert!(out <= 1e-12);
    }
}
