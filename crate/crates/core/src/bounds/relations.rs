use std::f64::consts::{E, PI};

use serde::Serialize;

use super::kfun::ln_K;
use super::{bound_L, BoundSet};
use crate::coarse::{
    bin_density, discrete_renyi, discrete_variance, ghf_entropy, ghf_variance, BinnedDistribution,
    GhfFamily, GhfSpec,
};
use crate::error::{domain, Result};
use crate::states::{momentum_density, position_density, StateModel};

/// Margin below which a relation counts as violated.
pub const VERDICT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RelationId {
    /// `σ_x² σ_p² ≥ ħ²/4`.
    #[serde(rename = "HUR")]
    Hur,
    /// `h_α[ρ] + h_β[ρ̃] ≥ ln(πħ) + c(α)`.
    RenyiCont,
    /// `h[ρ] + h[ρ̃] ≥ ln(πeħ)`.
    ShannonCont,
    /// `H_α[r] + H_β[s] ≥ L_α`.
    RenyiDiscrete,
    /// Variance relation for reconstructed densities with arbitrary GHFs.
    HeisPreopt,
    /// Rectangle-GHF variance relation `(σ²_xΔ + Δ²/12)(σ²_pδ + δ²/12) ≥ ħ²g/4`.
    HeisRect,
    /// `K(σ²_xΔ/Δ²) K(σ²_pδ/δ²) ≥ exp(2L₁)`.
    HeisOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// The caller-supplied inputs cannot come from any quantum state.
    InfeasibleInputs,
}

/// Outcome of one relation check. Product-form relations are compared in
/// log domain: then `lhs` and `rhs` are natural logs and `log_domain` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationReport {
    pub relation_id: RelationId,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub log_domain: bool,
}

impl RelationReport {
    fn new(relation_id: RelationId, lhs: f64, rhs: f64, log_domain: bool) -> Self {
        let margin = lhs - rhs;
        let verdict = if margin >= -VERDICT_TOL {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        Self {
            relation_id,
            lhs,
            rhs,
            margin,
            verdict,
            log_domain,
        }
    }

    pub(crate) fn sum(id: RelationId, lhs: f64, rhs: f64) -> Self {
        Self::new(id, lhs, rhs, false)
    }

    pub(crate) fn product(id: RelationId, ln_lhs: f64, ln_rhs: f64) -> Self {
        Self::new(id, ln_lhs, ln_rhs, true)
    }

    fn hypothetical(mut self) -> Self {
        if self.verdict == Verdict::Violated {
            self.verdict = Verdict::InfeasibleInputs;
        }
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Position and momentum GHF families for the pre-optimized relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhfPair {
    pub x: GhfFamily,
    pub p: GhfFamily,
}

impl Default for GhfPair {
    fn default() -> Self {
        Self {
            x: GhfFamily::Rectangle,
            p: GhfFamily::Rectangle,
        }
    }
}

/// Coarse-grained relations for a state binned with widths `Δ`, `δ` and
/// grid offsets `(x, p)`, using rectangle GHFs for the pre-optimized check.
pub fn check_coarse_relations(
    s: &StateModel,
    delta_x: f64,
    delta_p: f64,
    alpha: f64,
    offsets: (f64, f64),
) -> Result<Vec<RelationReport>> {
    check_coarse_relations_with(s, delta_x, delta_p, alpha, offsets, GhfPair::default())
}

/// As [`check_coarse_relations`] with caller-chosen GHF families.
pub fn check_coarse_relations_with(
    s: &StateModel,
    delta_x: f64,
    delta_p: f64,
    alpha: f64,
    offsets: (f64, f64),
    ghfs: GhfPair,
) -> Result<Vec<RelationReport>> {
    let r = bin_density(&position_density(s), delta_x, offsets.0)?;
    let sp = bin_density(&momentum_density(s), delta_p, offsets.1)?;
    check_binned_relations(&r, &sp, s.hbar(), alpha, ghfs)
}

/// The four coarse-grained relations for given position and momentum bin
/// probabilities:
///
/// 1. `H_α[r] + H_β[s] ≥ L_α`; at `α = 1/2` the momentum side is the
///    min-entropy `-ln max s`.
/// 2. `σ²[w_Δ] σ²[w̃_δ] ≥ e^{2L₁} e^{2h_Δ + 2h_δ} / (2πe)²` for the chosen GHFs.
/// 3. The same with rectangles: `(σ²_xΔ + Δ²/12)(σ²_pδ + δ²/12) ≥ ħ²g/4`.
/// 4. `K(σ²_xΔ/Δ²) K(σ²_pδ/δ²) ≥ e^{2L₁}`.
pub fn check_binned_relations(
    r: &BinnedDistribution,
    s: &BinnedDistribution,
    hbar: f64,
    alpha: f64,
    ghfs: GhfPair,
) -> Result<Vec<RelationReport>> {
    let bounds = bound_L(r.width(), s.width(), hbar, alpha)?;
    check_binned_relations_at(r, s, &bounds, ghfs)
}

/// As [`check_binned_relations`] with bounds evaluated beforehand, which
/// saves the spheroidal evaluation when many states share one `(Δ, δ, α)`.
/// The bin widths must equal the widths the bounds were computed for.
pub fn check_binned_relations_at(
    r: &BinnedDistribution,
    s: &BinnedDistribution,
    bounds: &BoundSet,
    ghfs: GhfPair,
) -> Result<Vec<RelationReport>> {
    let (dx, dp) = (r.width(), s.width());
    if dx != bounds.delta_x || dp != bounds.delta_p {
        return domain(format!(
            "binning widths ({dx}, {dp}) differ from the bound widths ({}, {})",
            bounds.delta_x, bounds.delta_p
        ));
    }
    let alpha = bounds.alpha;
    let beta = if alpha == 0.5 {
        f64::INFINITY
    } else {
        alpha / (2.0 * alpha - 1.0)
    };
    let entropic = discrete_renyi(r, alpha)? + discrete_renyi(s, beta)?;
    let mut out = vec![RelationReport::sum(
        RelationId::RenyiDiscrete,
        entropic,
        bounds.l_alpha,
    )];

    let gx = GhfSpec::new(ghfs.x, dx)?;
    let gp = GhfSpec::new(ghfs.p, dp)?;
    let (vx, vp) = (discrete_variance(r), discrete_variance(s));
    out.push(RelationReport::product(
        RelationId::HeisPreopt,
        (vx + ghf_variance(&gx)).ln() + (vp + ghf_variance(&gp)).ln(),
        bounds.log_rhs_heis - 2.0 * (2.0 * PI * E).ln()
            + 2.0 * (ghf_entropy(&gx) + ghf_entropy(&gp)),
    ));
    out.extend(variance_reports(vx, vp, bounds)?);
    Ok(out)
}

fn variance_reports(vx: f64, vp: f64, b: &BoundSet) -> Result<[RelationReport; 2]> {
    let (dx, dp) = (b.delta_x, b.delta_p);
    let rect = RelationReport::product(
        RelationId::HeisRect,
        (vx + dx * dx / 12.0).ln() + (vp + dp * dp / 12.0).ln(),
        2.0 * b.hbar.ln() - 4f64.ln() + b.g.ln(),
    );
    let optimal = RelationReport::product(
        RelationId::HeisOptimal,
        ln_K(vx / (dx * dx))? + ln_K(vp / (dp * dp))?,
        b.log_rhs_heis,
    );
    Ok([rect, optimal])
}

/// Variance relations for hypothetical discrete variances. Inputs that
/// violate a relation are reported as infeasible: no state produces them.
pub fn check_variance_relations(
    var_x: f64,
    var_p: f64,
    delta_x: f64,
    delta_p: f64,
    hbar: f64,
) -> Result<Vec<RelationReport>> {
    if !(var_x >= 0.0 && var_p >= 0.0 && var_x.is_finite() && var_p.is_finite()) {
        return domain(format!(
            "discrete variances must be finite and ≥ 0, got ({var_x}, {var_p})"
        ));
    }
    let b = bound_L(delta_x, delta_p, hbar, 1.0)?;
    Ok(variance_reports(var_x, var_p, &b)?
        .map(RelationReport::hypothetical)
        .to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_fine_grid_reduces_to_hur() {
        let s = StateModel::gaussian(1.0, 1.0).unwrap();
        let reports = check_coarse_relations(&s, 1e-3, 1e-3, 1.0, (0.0, 0.0)).unwrap();
        let opt = reports
            .iter()
            .find(|r| r.relation_id == RelationId::HeisOptimal)
            .unwrap();
        // σ_x² σ_p² = 1/4 makes both sides (πe/Δδ)² to leading order.
        assert!(opt.margin >= 0.0 && opt.margin < 1e-2, "{opt:?}");
        assert!(reports.iter().all(|r| r.holds()));
    }

    #[test]
    fn zero_variances_are_infeasible() {
        let dd: f64 = 20.0;
        let reports = check_variance_relations(0.0, 0.0, dd.sqrt(), dd.sqrt(), 1.0).unwrap();
        let opt = reports
            .iter()
            .find(|r| r.relation_id == RelationId::HeisOptimal)
            .unwrap();
        assert_eq!(opt.verdict, Verdict::InfeasibleInputs);
        assert_eq!(opt.lhs, 0.0);
        assert!(opt.rhs > 0.0);
        assert!(check_variance_relations(-1.0, 0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn square_well_with_one_position_bin() {
        let s = StateModel::square_well(1, 1.0, 1.0).unwrap();
        let reports = check_coarse_relations(&s, 1.0, 40.0, 1.0, (0.5, 0.0)).unwrap();
        assert!(reports.iter().all(|r| r.holds()), "{reports:?}");
        let r = bin_density(&position_density(&s), 1.0, 0.5).unwrap();
        assert_eq!(discrete_variance(&r), 0.0);
        let sp = bin_density(&momentum_density(&s), 40.0, 0.0).unwrap();
        assert!(discrete_variance(&sp) > 0.0);
    }

    #[test]
    fn half_order_uses_min_entropy() {
        let s = StateModel::gaussian(1.0, 1.0).unwrap();
        let reports = check_coarse_relations(&s, 0.5, 0.5, 0.5, (0.0, 0.0)).unwrap();
        let r = bin_density(&position_density(&s), 0.5, 0.0).unwrap();
        let p = bin_density(&momentum_density(&s), 0.5, 0.0).unwrap();
        let expect = discrete_renyi(&r, 0.5).unwrap() - p.max_prob().ln();
        assert!((reports[0].lhs - expect).abs() < 1e-12);
    }

    #[test]
    fn optimized_ghf_pair_also_holds() {
        let s = StateModel::hermite(2, 0.8, 1.0).unwrap();
        let pair = GhfPair {
            x: GhfFamily::TruncatedGaussian { a: 3.0 },
            p: GhfFamily::TruncatedGaussian { a: -2.0 },
        };
        let reports = check_coarse_relations_with(&s, 0.4, 1.1, 0.8, (0.0, 0.2), pair).unwrap();
        assert!(reports.iter().all(|r| r.holds()), "{reports:?}");
    }
}
