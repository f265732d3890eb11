use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::states::density_quad;

use super::{
    discrete_renyi, discrete_variance, ghf_entropy, ghf_variance, BinnedDistribution, GhfSpec,
};

/// The continuous density `w(z) = Σ_j p_j D_η(z, z_j)` rebuilt from bin
/// probabilities with a generalized histogram function.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedPdf {
    pub base: BinnedDistribution,
    pub ghf: GhfSpec,
}

fn check_width(b: &BinnedDistribution, g: &GhfSpec) -> Result<()> {
    if (b.width() - g.eta).abs() > 1e-12 * b.width() {
        return Err(Error::WidthMismatch {
            ghf: g.eta,
            bins: b.width(),
        });
    }
    Ok(())
}

pub fn reconstruct_pdf(b: &BinnedDistribution, g: &GhfSpec) -> Result<ReconstructedPdf> {
    check_width(b, g)?;
    Ok(ReconstructedPdf {
        base: b.clone(),
        ghf: *g,
    })
}

impl ReconstructedPdf {
    pub fn eval(&self, z: f64) -> f64 {
        let j = self.base.index_of(z);
        self.base.prob(j) / self.base.total() * self.ghf.eval(z, self.base.center(j))
    }

    fn edges(&self, j: i64) -> (f64, f64) {
        let c = self.base.center(j);
        let h = 0.5 * self.base.width();
        (c - h, c + h)
    }

    /// Mass, variance and Shannon entropy by quadrature bin by bin.
    pub fn direct_stats(&self) -> Result<(f64, f64, f64)> {
        let q = density_quad();
        let mut mass = 0.0;
        let mut first = 0.0;
        for (j, _) in self.base.iter().filter(|(_, p)| *p > 0.0) {
            let (lo, hi) = self.edges(j);
            mass += integrate(|z| self.eval(z), lo, hi, &q)?;
            first += integrate(|z| z * self.eval(z), lo, hi, &q)?;
        }
        let mean = first / mass;
        let mut var = 0.0;
        let mut ent = 0.0;
        for (j, _) in self.base.iter().filter(|(_, p)| *p > 0.0) {
            let (lo, hi) = self.edges(j);
            var += integrate(|z| (z - mean) * (z - mean) * self.eval(z), lo, hi, &q)?;
            ent += integrate(
                |z| {
                    let w = self.eval(z);
                    if w > 0.0 {
                        -w * w.ln()
                    } else {
                        0.0
                    }
                },
                lo,
                hi,
                &q,
            )?;
        }
        Ok((mass, var / mass, ent))
    }
}

/// Variance and entropy of the reconstructed density from the identities
/// `σ²[w] = σ²_disc + σ_η²` and `h[w] = H[p] + h_η`.
pub fn decompose_stats(b: &BinnedDistribution, g: &GhfSpec) -> Result<(f64, f64)> {
    check_width(b, g)?;
    Ok((
        discrete_variance(b) + ghf_variance(g),
        discrete_renyi(b, 1.0)? + ghf_entropy(g),
    ))
}
