//! Catalog of analytically known quantum states and the statistics of
//! their continuous position and momentum densities.
//!
//! Momentum densities are closed forms for every state kind. The square
//! well is the awkward one: its momentum density falls off only like `p⁻⁴`
//! and oscillates, so moments and entropies integrate between its zeros
//! over a finite window and add the remainder analytically.

mod density;

use std::f64::consts::PI;

use serde::Serialize;

pub(crate) use density::density_quad;
pub use density::Density1D;

use crate::bounds::{renyi_constant, RelationId, RelationReport};
use crate::error::{domain, Error, Result};

/// One pure state of the catalog, or a convex mixture of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    Gaussian {
        x0: f64,
        p0: f64,
        sigma: f64,
    },
    /// `n`-th harmonic-oscillator eigenfunction whose ground state has
    /// position spread `sigma`.
    HermiteGauss {
        n: u32,
        sigma: f64,
    },
    /// `n`-th eigenstate of the infinite well on `[0, L]`.
    SquareWell {
        n: u32,
        length: f64,
    },
    Mixture {
        components: Vec<(f64, StateModel)>,
    },
}

/// A state together with the value of ħ it lives in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateModel {
    kind: StateKind,
    hbar: f64,
}

/// Exact first and second moments of both densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
}

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidState(format!(
            "hbar must be positive and finite, got {hbar}"
        )))
    }
}

impl StateModel {
    pub fn gaussian(sigma: f64, hbar: f64) -> Result<Self> {
        Self::gaussian_at(0.0, 0.0, sigma, hbar)
    }

    pub fn gaussian_at(x0: f64, p0: f64, sigma: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if !(sigma > 0.0 && sigma.is_finite() && x0.is_finite() && p0.is_finite()) {
            return Err(Error::InvalidState(format!(
                "gaussian needs sigma > 0 and finite centers, got sigma = {sigma}"
            )));
        }
        Ok(Self {
            kind: StateKind::Gaussian { x0, p0, sigma },
            hbar,
        })
    }

    pub fn hermite(n: u32, sigma: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidState(format!(
                "hermite needs sigma > 0, got {sigma}"
            )));
        }
        if n > 60 {
            return Err(Error::InvalidState(format!(
                "hermite order {n} is above the supported 60"
            )));
        }
        Ok(Self {
            kind: StateKind::HermiteGauss { n, sigma },
            hbar,
        })
    }

    pub fn square_well(n: u32, length: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if n == 0 {
            return Err(Error::InvalidState(
                "square-well level n starts at 1".into(),
            ));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidState(format!(
                "square-well width must be positive, got {length}"
            )));
        }
        Ok(Self {
            kind: StateKind::SquareWell { n, length },
            hbar,
        })
    }

    /// Convex mixture. Weights must be positive and sum to one within
    /// 1e-9, and every component must share the same ħ.
    pub fn mixture(components: Vec<(f64, StateModel)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidState(
                "mixture needs at least one component".into(),
            ));
        };
        let hbar = first.hbar;
        if components.iter().any(|(_, s)| s.hbar != hbar) {
            return Err(Error::InvalidState(
                "mixture components must share the same hbar".into(),
            ));
        }
        if components.iter().any(|(w, _)| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidState(
                "mixture weights must be positive".into(),
            ));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            kind: StateKind::Mixture { components },
            hbar,
        })
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Representative members of every state kind, used for sweeps.
    pub fn catalog(hbar: f64) -> Result<Vec<(String, StateModel)>> {
        let g1 = Self::gaussian(1.0, hbar)?;
        let g3 = Self::gaussian(3.0, hbar)?;
        Ok(vec![
            ("gaussian:sigma=1".into(), g1.clone()),
            (
                "gaussian:sigma=0.3,x0=0.2,p0=-1".into(),
                Self::gaussian_at(0.2, -1.0, 0.3, hbar)?,
            ),
            ("hermite:n=1,sigma=1".into(), Self::hermite(1, 1.0, hbar)?),
            ("hermite:n=4,sigma=0.7".into(), Self::hermite(4, 0.7, hbar)?),
            (
                "squarewell:n=1,L=1".into(),
                Self::square_well(1, 1.0, hbar)?,
            ),
            (
                "squarewell:n=3,L=2".into(),
                Self::square_well(3, 2.0, hbar)?,
            ),
            (
                "mix:0.5*gaussian:sigma=1+0.5*gaussian:sigma=3".into(),
                Self::mixture(vec![(0.5, g1), (0.5, g3)])?,
            ),
        ])
    }

    /// Moments known in closed form for every catalog kind.
    pub fn exact_moments(&self) -> ExactMoments {
        let h = self.hbar;
        match &self.kind {
            StateKind::Gaussian { x0, p0, sigma } => ExactMoments {
                mean_x: *x0,
                var_x: sigma * sigma,
                mean_p: *p0,
                var_p: h * h / (4.0 * sigma * sigma),
            },
            StateKind::HermiteGauss { n, sigma } => {
                let f = 2.0 * *n as f64 + 1.0;
                ExactMoments {
                    mean_x: 0.0,
                    var_x: f * sigma * sigma,
                    mean_p: 0.0,
                    var_p: f * h * h / (4.0 * sigma * sigma),
                }
            }
            StateKind::SquareWell { n, length } => {
                let npi = *n as f64 * PI;
                ExactMoments {
                    mean_x: 0.5 * length,
                    var_x: length * length * (1.0 / 12.0 - 1.0 / (2.0 * npi * npi)),
                    mean_p: 0.0,
                    var_p: (h * npi / length).powi(2),
                }
            }
            StateKind::Mixture { components } => {
                let parts: Vec<(f64, ExactMoments)> = components
                    .iter()
                    .map(|(w, s)| (*w, s.exact_moments()))
                    .collect();
                let mx: f64 = parts.iter().map(|(w, m)| w * m.mean_x).sum();
                let mp: f64 = parts.iter().map(|(w, m)| w * m.mean_p).sum();
                ExactMoments {
                    mean_x: mx,
                    var_x: parts
                        .iter()
                        .map(|(w, m)| w * (m.var_x + (m.mean_x - mx).powi(2)))
                        .sum(),
                    mean_p: mp,
                    var_p: parts
                        .iter()
                        .map(|(w, m)| w * (m.var_p + (m.mean_p - mp).powi(2)))
                        .sum(),
                }
            }
        }
    }
}

/// Position density `ρ(x) = ⟨x|ϱ|x⟩`.
pub fn position_density(s: &StateModel) -> Density1D {
    match &s.kind {
        StateKind::Gaussian { x0, sigma, .. } => {
            Density1D::normal(*x0, *sigma).expect("validated state")
        }
        StateKind::HermiteGauss { n, sigma } => {
            Density1D::hermite(*n, sigma * std::f64::consts::SQRT_2)
        }
        StateKind::SquareWell { n, length } => Density1D::sine_squared(*n, *length),
        StateKind::Mixture { components } => Density1D::mixture(
            components
                .iter()
                .map(|(w, c)| (*w, position_density(c)))
                .collect(),
        )
        .expect("validated mixture"),
    }
}

/// Momentum density `ρ̃(p) = ⟨p|ϱ|p⟩`, always in closed form.
pub fn momentum_density(s: &StateModel) -> Density1D {
    let h = s.hbar;
    match &s.kind {
        StateKind::Gaussian { p0, sigma, .. } => {
            Density1D::normal(*p0, h / (2.0 * sigma)).expect("validated state")
        }
        StateKind::HermiteGauss { n, sigma } => {
            Density1D::hermite(*n, h / (sigma * std::f64::consts::SQRT_2))
        }
        StateKind::SquareWell { n, length } => Density1D::well_momentum(*n, *length, h),
        StateKind::Mixture { components } => Density1D::mixture(
            components
                .iter()
                .map(|(w, c)| (*w, momentum_density(c)))
                .collect(),
        )
        .expect("validated mixture"),
    }
}

/// `σ² = ⟨z²⟩ - ⟨z⟩²` by quadrature split at discontinuities.
pub fn variance(d: &Density1D) -> Result<f64> {
    d.mean_and_variance().map(|(_, v)| v)
}

/// Continuous Rényi entropy `ln(∫ρ^λ) / (1-λ)` in nats; `λ = 1` gives the
/// Shannon entropy `-∫ρ ln ρ`.
pub fn renyi_entropy_cont(d: &Density1D, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!(
            "entropy order must be positive and finite, got {lambda}"
        ));
    }
    if lambda == 1.0 {
        return d.shannon_integral();
    }
    let s = d.power_integral(lambda)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Divergent(format!("∫ρ^λ evaluated to {s}")));
    }
    Ok(s.ln() / (1.0 - lambda))
}

/// Heisenberg, Rényi and Shannon relations for the continuous densities.
///
/// `alpha` must lie in `[1/2, 1]`. The Rényi check pairs `h_α` of the
/// position density with `h_β` of the momentum density, `1/α + 1/β = 2`;
/// at `α = 1/2` the conjugate order is infinite and that check is omitted.
pub fn check_continuous_relations(s: &StateModel, alpha: f64) -> Result<Vec<RelationReport>> {
    if !(0.5..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1/2, 1], got {alpha}"));
    }
    let h = s.hbar;
    let rho = position_density(s);
    let rho_p = momentum_density(s);
    let vx = variance(&rho)?;
    let vp = variance(&rho_p)?;
    let mut out = vec![RelationReport::product(
        RelationId::Hur,
        vx.ln() + vp.ln(),
        (0.25 * h * h).ln(),
    )];
    if alpha > 0.5 {
        let beta = alpha / (2.0 * alpha - 1.0);
        let lhs = renyi_entropy_cont(&rho, alpha)? + renyi_entropy_cont(&rho_p, beta)?;
        out.push(RelationReport::sum(
            RelationId::RenyiCont,
            lhs,
            (PI * h).ln() + renyi_constant(alpha)?,
        ));
    }
    let shannon = renyi_entropy_cont(&rho, 1.0)? + renyi_entropy_cont(&rho_p, 1.0)?;
    out.push(RelationReport::sum(
        RelationId::ShannonCont,
        shannon,
        (PI * std::f64::consts::E * h).ln(),
    ));
    Ok(out)
}
