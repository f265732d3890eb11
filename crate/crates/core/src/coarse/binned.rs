use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::states::Density1D;

/// Largest tail mass a binned distribution may leave unassigned.
pub const EPS_TAIL: f64 = 1e-9;
/// Upper limit on the number of bins enumerated by [`bin_density`].
pub const MAX_BINS: usize = 1_000_000;
/// Coverage target for light (sub-Gaussian) tails.
const LIGHT_COVER: f64 = 1e-13;

/// Probabilities on the grid `z_j = offset + j·width`; bin `j` is
/// `[offset + (j-½)width, offset + (j+½)width)`.
///
/// Bins with indices `first .. first + probs.len()` are stored
/// contiguously; every other bin has probability zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedDistribution {
    width: f64,
    offset: f64,
    first: i64,
    probs: Vec<f64>,
    tail_mass: f64,
}

impl BinnedDistribution {
    /// Builds a distribution from explicit probabilities. They must be
    /// nonnegative and sum to `1 - tail_mass` within 1e-9.
    pub fn from_probs(
        width: f64,
        offset: f64,
        first: i64,
        probs: Vec<f64>,
        tail_mass: f64,
    ) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && offset.is_finite()) {
            return domain(format!(
                "bin width must be positive and offset finite, got ({width}, {offset})"
            ));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return domain("bin probabilities must be finite and nonnegative");
        }
        if !(0.0..=EPS_TAIL).contains(&tail_mass) {
            return domain(format!(
                "tail mass {tail_mass} exceeds the budget {EPS_TAIL}"
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total + tail_mass - 1.0).abs() > 1e-9 {
            return domain(format!(
                "bin probabilities sum to {total}, expected {}",
                1.0 - tail_mass
            ));
        }
        Ok(Self {
            width,
            offset,
            first,
            probs,
            tail_mass,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn center(&self, j: i64) -> f64 {
        self.offset + j as f64 * self.width
    }

    /// Index of the bin containing `x`.
    pub fn index_of(&self, x: f64) -> i64 {
        ((x - self.offset) / self.width + 0.5).floor() as i64
    }

    pub fn prob(&self, j: i64) -> f64 {
        let i = j - self.first;
        if i < 0 {
            return 0.0;
        }
        self.probs.get(i as usize).copied().unwrap_or(0.0)
    }

    /// `(index, probability)` for every stored bin, including zeros.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.first + i as i64, *p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Sum of the stored probabilities.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }
}

/// Bin probabilities `∫_bin ρ` on the grid of width `eta` and origin `offset`.
///
/// Bins span a window holding all but 1e-13 of the mass (5e-10 for
/// power-law tails); whatever the window misses is recorded as
/// `tail_mass`.
pub fn bin_density(d: &Density1D, eta: f64, offset: f64) -> Result<BinnedDistribution> {
    if !(eta > 0.0 && eta.is_finite() && offset.is_finite()) {
        return domain(format!(
            "bin width must be positive and offset finite, got ({eta}, {offset})"
        ));
    }
    let cover = if d.is_heavy_tailed() {
        0.5 * EPS_TAIL
    } else {
        LIGHT_COVER
    };
    let (lo, hi) = d.window(cover);
    let idx = |x: f64| ((x - offset) / eta + 0.5).floor();
    let (jlo, jhi) = (idx(lo), idx(hi));
    let count = jhi - jlo + 1.0;
    if count.is_nan() || count > MAX_BINS as f64 {
        return Err(Error::TailBudgetExceeded { limit: MAX_BINS });
    }
    let first = jlo as i64;
    let n = count as usize;
    let edge = |j: i64| offset + (j as f64 - 0.5) * eta;
    let probs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let j = first + i as i64;
            d.mass(edge(j), edge(j + 1))
        })
        .collect::<Result<_>>()?;
    let total: f64 = probs.iter().sum();
    let tail_mass = (1.0 - total).max(0.0);
    if tail_mass > EPS_TAIL {
        return Err(Error::TailBudgetExceeded { limit: MAX_BINS });
    }
    Ok(BinnedDistribution {
        width: eta,
        offset,
        first,
        probs,
        tail_mass,
    })
}

/// `Σ z_j² p_j − (Σ z_j p_j)²` with the probabilities renormalized over the
/// stored bins.
pub fn discrete_variance(b: &BinnedDistribution) -> f64 {
    let total = b.total();
    let mean = b.iter().map(|(j, p)| b.center(j) * p).sum::<f64>() / total;
    let var = b
        .iter()
        .map(|(j, p)| {
            let z = b.center(j) - mean;
            z * z * p
        })
        .sum::<f64>()
        / total;
    var.max(0.0)
}

/// Discrete Rényi entropy `ln(Σ p^α) / (1-α)` in nats. `α = 1` gives the
/// Shannon entropy and `α = ∞` the min-entropy `-ln max p`.
pub fn discrete_renyi(b: &BinnedDistribution, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return domain(format!("entropy order must be positive, got {alpha}"));
    }
    let total = b.total();
    let pmax = b.max_prob() / total;
    if alpha.is_infinite() {
        return Ok(-pmax.ln());
    }
    if alpha == 1.0 {
        let h = b
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(_, p)| {
                let q = p / total;
                -q * q.ln()
            })
            .sum::<f64>();
        return Ok(h.max(0.0));
    }
    // Factor out the largest probability so Σ(p/pmax)^α stays near O(1).
    let s: f64 = b
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(_, p)| (p / total / pmax).powf(alpha))
        .sum();
    let h = (alpha * pmax.ln() + s.ln()) / (1.0 - alpha);
    Ok(h.max(0.0))
}
