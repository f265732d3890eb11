use rayon::prelude::*;
use serde::Serialize;

use super::bound_L;
use super::kfun::ln_K;
use crate::error::{domain, Result};

/// A rectangular grid of reduced discrete variances `u = σ²/η²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionGrid {
    pub u_x: (f64, f64),
    pub u_p: (f64, f64),
    /// Points per axis; `n = 1` evaluates the lower corner only.
    pub n: usize,
}

/// Allowed and forbidden cells of the optimal variance relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub u_x: Vec<f64>,
    pub u_p: Vec<f64>,
    /// Row-major over `u_x` then `u_p`: index `i * n + j`.
    pub forbidden: Vec<bool>,
    pub log_rhs: f64,
}

impl Region {
    pub fn forbidden_fraction(&self) -> f64 {
        self.forbidden.iter().filter(|f| **f).count() as f64 / self.forbidden.len() as f64
    }

    pub fn is_forbidden(&self, i: usize, j: usize) -> bool {
        self.forbidden[i * self.u_p.len() + j]
    }
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Marks each grid cell forbidden when `K(u_x) K(u_p) < exp(2L₁)`,
/// compared in log domain. The cell `(0, 0)` is always forbidden for
/// finite widths because `K(0) = 1` while `L₁ > 0`.
pub fn feasibility_region(
    delta_x: f64,
    delta_p: f64,
    hbar: f64,
    grid: &RegionGrid,
) -> Result<Region> {
    if grid.n == 0 {
        return domain("region grid needs at least one point per axis");
    }
    for (lo, hi) in [grid.u_x, grid.u_p] {
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return domain(format!(
                "variance range must satisfy 0 ≤ lo ≤ hi, got [{lo}, {hi}]"
            ));
        }
    }
    let log_rhs = bound_L(delta_x, delta_p, hbar, 1.0)?.log_rhs_heis;
    let ux = axis(grid.u_x, grid.n);
    let up = axis(grid.u_p, grid.n);
    let kx: Vec<f64> = ux.par_iter().map(|u| ln_K(*u)).collect::<Result<_>>()?;
    let kp: Vec<f64> = up.par_iter().map(|u| ln_K(*u)).collect::<Result<_>>()?;
    let forbidden = kx
        .iter()
        .flat_map(|a| kp.iter().map(move |b| a + b < log_rhs))
        .collect();
    Ok(Region {
        u_x: ux,
        u_p: up,
        forbidden,
        log_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> RegionGrid {
        RegionGrid {
            u_x: (0.0, 0.1),
            u_p: (0.0, 0.1),
            n,
        }
    }

    #[test]
    fn origin_forbidden_and_far_corner_allowed() {
        for &dd in &[1.0, 10.0, 100.0] {
            let r = feasibility_region(dd, 1.0, 1.0, &grid(11)).unwrap();
            assert!(r.is_forbidden(0, 0));
        }
        let big = RegionGrid {
            u_x: (1e6, 1e6),
            u_p: (1e6, 1e6),
            n: 1,
        };
        assert!(!feasibility_region(1.0, 1.0, 1.0, &big).unwrap().forbidden[0]);
    }

    #[test]
    fn forbidden_area_shrinks() {
        let f1 = feasibility_region(1.0, 1.0, 1.0, &grid(101))
            .unwrap()
            .forbidden_fraction();
        let f100 = feasibility_region(100.0, 1.0, 1.0, &grid(101))
            .unwrap()
            .forbidden_fraction();
        assert!(f100 < f1);
    }

    #[test]
    fn single_point_grid() {
        let r = feasibility_region(1.0, 1.0, 1.0, &grid(1)).unwrap();
        assert_eq!(r.forbidden.len(), 1);
        assert!(feasibility_region(1.0, 1.0, 1.0, &grid(0)).is_err());
    }
}
