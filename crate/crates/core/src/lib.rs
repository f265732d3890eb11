//! Coarse-grained position/momentum statistics of quantum states and the
//! entropic and Heisenberg-like uncertainty relations that constrain them.
//!
//! * [`numerics`]: quadrature, root finding, Gauss rules.
//! * [`specfun`]: error function, `R₀₀(c, 1)`, Slepian eigenvalue oracle.
//! * [`states`]: state catalog, continuous densities and their statistics.
//! * [`coarse`]: binning, discrete statistics, histogram functions, sampling.
//! * [`bounds`]: `B_α`, `R`, `L_α`, the `M`/`F`/`K` chain, relation checks.

pub mod bounds;
pub mod coarse;
pub mod error;
pub mod numerics;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};
