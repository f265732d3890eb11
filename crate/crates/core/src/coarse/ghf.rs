use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{integrate, QuadSpec};
use crate::specfun::ln_erf;

/// Shape of a generalized histogram function on one bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GhfFamily {
    Rectangle,
    /// `∝ exp(-a z²)` on the bin, `a` of either sign.
    TruncatedGaussian {
        a: f64,
    },
}

/// A generalized histogram function `D_η(z, z_j)`: a normalized density
/// supported on the bin `[z_j - η/2, z_j + η/2)` with centroid `z_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GhfSpec {
    pub family: GhfFamily,
    pub eta: f64,
}

impl GhfSpec {
    pub fn new(family: GhfFamily, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return domain(format!(
                "histogram function width must be positive, got {eta}"
            ));
        }
        if let GhfFamily::TruncatedGaussian { a } = family {
            if !a.is_finite() {
                return domain(format!(
                    "truncated-Gaussian parameter must be finite, got {a}"
                ));
            }
        }
        Ok(Self { family, eta })
    }

    pub fn rectangle(eta: f64) -> Result<Self> {
        Self::new(GhfFamily::Rectangle, eta)
    }

    pub fn truncated_gaussian(a: f64, eta: f64) -> Result<Self> {
        Self::new(GhfFamily::TruncatedGaussian { a }, eta)
    }

    /// Dimensionless shape parameter `t = a η²` (zero for the rectangle).
    pub fn shape_t(&self) -> f64 {
        match self.family {
            GhfFamily::Rectangle => 0.0,
            GhfFamily::TruncatedGaussian { a } => a * self.eta * self.eta,
        }
    }

    /// `D_η(z, center)`.
    pub fn eval(&self, z: f64, center: f64) -> f64 {
        let u = (z - center) / self.eta;
        if !(-0.5..0.5).contains(&u) {
            return 0.0;
        }
        let t = self.shape_t();
        let (_, ln_z) = unit_stats(t);
        (-t * u * u - ln_z).exp() / self.eta
    }
}

/// Per-bin variance `σ_η²`: `η²/12` for the rectangle, and for the
/// truncated Gaussian `(1/2a)(1 − √(a/π) η e^{−aη²/4} / Erf(η√a/2))`.
pub fn ghf_variance(g: &GhfSpec) -> f64 {
    g.eta * g.eta * unit_stats(g.shape_t()).0
}

/// Shannon entropy `h_η = -∫ D ln D` of the per-bin density.
pub fn ghf_entropy(g: &GhfSpec) -> f64 {
    let t = g.shape_t();
    let (v, ln_z) = unit_stats(t);
    g.eta.ln() + ln_z + t * v
}

/// For the unit-width profile `e^{-t u²}` on `[-1/2, 1/2]`: its variance
/// `v(t)` and `ln Z(t)` with `Z(t) = ∫ e^{-t u²} du`.
pub(crate) fn unit_stats(t: f64) -> (f64, f64) {
    if t.abs() <= 2.0 {
        // Z = Σ (-t)^k/k! m_k and ∫u² e^{-tu²} = Σ (-t)^k/k! m_{k+1},
        // with m_k = ∫u^{2k} = 4^{-k}/(2k+1).
        let mut z = 0.0;
        let mut num = 0.0;
        let mut c = 1.0;
        let mut quarter = 1.0;
        for k in 0..60 {
            let kf = k as f64;
            if k > 0 {
                c *= -t / kf;
                quarter *= 0.25;
            }
            z += c * quarter / (2.0 * kf + 1.0);
            num += c * quarter * 0.25 / (2.0 * kf + 3.0);
            if c.abs() * quarter < 1e-18 {
                break;
            }
        }
        (num / z, z.ln())
    } else if t > 2.0 {
        let v = 1.0 / (2.0 * t) - m_unchecked(t);
        let ln_z = 0.5 * (std::f64::consts::PI / t).ln() + ln_erf(0.5 * t.sqrt());
        (v, ln_z)
    } else {
        // Convex profile: integrate e^{-t(u²-1/4)}, which peaks at one.
        let spec = QuadSpec {
            abs_tol: 1e-16,
            rel_tol: 1e-14,
            max_subdivisions: 500,
        };
        let g = |u: f64| (-t * (u * u - 0.25)).exp();
        let z = 2.0 * integrate(g, 0.0, 0.5, &spec).expect("smooth integrand on a finite interval");
        let m2 = 2.0
            * integrate(|u| u * u * g(u), 0.0, 0.5, &spec)
                .expect("smooth integrand on a finite interval");
        (m2 / z, z.ln() - 0.25 * t)
    }
}

/// `M(t)` for `t > 0` without argument checks; see `bounds::func_M`.
pub(crate) fn m_unchecked(t: f64) -> f64 {
    if t < 1e-8 {
        return 1.0 / (2.0 * t) - 1.0 / 12.0 + t / 180.0;
    }
    ln_m_unchecked(t).exp()
}

pub(crate) fn ln_m_unchecked(t: f64) -> f64 {
    if t < 1e-8 {
        return m_unchecked(t).ln();
    }
    -0.25 * t - (2.0 * (std::f64::consts::PI * t).sqrt()).ln() - ln_erf(0.5 * t.sqrt())
}
