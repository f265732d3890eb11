//! Special functions needed by the bounds: the error function family, the
//! radial prolate spheroidal function `R₀₀(c, 1)` and the Slepian
//! concentration eigenvalue `λ₀(c)` of the sinc kernel on `[-1, 1]`.
//!
//! `λ₀` is computed two independent ways. [`prolate_r00`] goes through the
//! Legendre expansion of the angular function; [`sinc_eigen_oracle`]
//! discretizes the integral operator directly. The two are expected to
//! agree to about 1e-6 relative (in practice far better).

#[cfg(test)]
mod bessel;
mod nystrom;
mod prolate;

pub use nystrom::sinc_eigen_oracle;
pub use prolate::{prolate_r00, ProlateResult};

#[cfg(test)]
pub(crate) use bessel::spherical_bessel_j;

/// Error function, accurate to a few ulps over the real line.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)` without cancellation for large `x`.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln erf(x)` for `x > 0`, accurate both near zero and for large `x`
/// where `erf(x)` rounds to one.
pub fn ln_erf(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < 0.5 {
        erf(x).ln()
    } else {
        (-erfc(x)).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadSpec};

    #[test]
    fn erf_reference_points() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() <= 1e-15);
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        let q =
            two_over_sqrt_pi * integrate(|t| (-t * t).exp(), 0.0, 1.0, &QuadSpec::tight()).unwrap();
        assert!((erf(1.0) - q).abs() <= 1e-14 * q);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
    }

    #[test]
    fn erf_is_odd() {
        for i in 0..200 {
            let x = -6.0 + 0.0613 * i as f64;
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn ln_erf_branches_agree() {
        for &x in &[1e-8, 0.1, 0.49, 0.5, 0.51, 1.0] {
            let direct = erf(x).ln();
            assert!((ln_erf(x) - direct).abs() <= 1e-14 * direct.abs(), "{x}");
        }
        // ln(1 - e) = -e - e²/2 - ... with e = erfc(x).
        for &x in &[3.0, 6.0] {
            let e = erfc(x);
            let series = -e - 0.5 * e * e - e * e * e / 3.0;
            assert!((ln_erf(x) - series).abs() <= 1e-14 * series.abs(), "{x}");
        }
        // erf(30) rounds to 1 but ln erf is -erfc(30) to leading order.
        assert!((ln_erf(30.0) + erfc(30.0)).abs() <= 1e-15 * erfc(30.0));
    }
}
