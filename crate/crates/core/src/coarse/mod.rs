//! Coarse graining: bin probabilities of a continuous density, discrete
//! variances and Rényi entropies, generalized histogram functions (GHFs),
//! reconstruction of a continuous density from bins, and an ideal detector
//! simulator for finite statistics.
//!
//! A GHF is a normalized density supported on a single bin and centred on
//! it. Rebuilding a density as `Σ p_j D_η(z, z_j)` splits its variance and
//! entropy exactly into a discrete part and a per-bin part; see
//! [`decompose_stats`].

mod binned;
mod ghf;
mod reconstruct;
mod sample;

pub use binned::{
    bin_density, discrete_renyi, discrete_variance, BinnedDistribution, EPS_TAIL, MAX_BINS,
};
pub use ghf::{ghf_entropy, ghf_variance, GhfFamily, GhfSpec};
pub use reconstruct::{decompose_stats, reconstruct_pdf, ReconstructedPdf};
pub use sample::sample_counts;

pub(crate) use ghf::{ln_m_unchecked, m_unchecked, unit_stats};
