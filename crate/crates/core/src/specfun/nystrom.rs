use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::numerics::gauss_legendre;

const START_NODES: usize = 16;
const MAX_NODES: usize = 1024;
const AGREEMENT: f64 = 1e-9;

/// Largest eigenvalue of `sin(c(x-y)) / (π(x-y))` on `[-1, 1]`.
///
/// Nyström discretization on Gauss–Legendre nodes, symmetrized as
/// `√wᵢ K(xᵢ, xⱼ) √wⱼ` and diagonalized densely. The node count doubles
/// from 16 until two successive estimates agree to 1e-9.
pub fn sinc_eigen_oracle(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return domain(format!(
            "sinc kernel bandwidth must be positive and finite, got {c}"
        ));
    }
    let mut n = START_NODES;
    let mut prev = top_eigenvalue(c, n);
    while n < MAX_NODES {
        n *= 2;
        let cur = top_eigenvalue(c, n);
        if (cur - prev).abs() <= AGREEMENT * cur {
            return Ok(cur.min(1.0 - f64::EPSILON));
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "Nyström sinc eigenvalue",
        estimate: prev,
        error: f64::NAN,
    })
}

fn top_eigenvalue(c: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let d = x[i] - x[j];
        let k = if i == j {
            c / PI
        } else {
            (c * d).sin() / (PI * d)
        };
        sw[i] * k * sw[j]
    });
    SymmetricEigen::new(a)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_c_limit() {
        let c = 0.01;
        let l = sinc_eigen_oracle(c).unwrap();
        assert!((l / (2.0 * c / PI) - 1.0).abs() < 0.01);
    }

    #[test]
    fn monotone_and_bounded() {
        let l1 = sinc_eigen_oracle(1.0).unwrap();
        let l2 = sinc_eigen_oracle(2.0).unwrap();
        assert!(0.0 < l1 && l1 < l2 && l2 < 1.0);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(sinc_eigen_oracle(0.0).is_err());
        assert!(sinc_eigen_oracle(-1.0).is_err());
    }
}
