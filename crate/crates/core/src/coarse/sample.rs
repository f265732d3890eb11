use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::binned::EPS_TAIL;
use super::BinnedDistribution;
use crate::error::{domain, Result};
use crate::states::Density1D;

const GRID_POINTS: usize = 1 << 16;

/// Simulates `n` ideal detections: samples drawn by inverse CDF from a
/// 2¹⁶-point tabulation of `d`, tallied into bins of width `eta`.
/// The result holds empirical frequencies and is reproducible for a seed.
pub fn sample_counts(
    d: &Density1D,
    eta: f64,
    offset: f64,
    n: u64,
    seed: u64,
) -> Result<BinnedDistribution> {
    if n == 0 {
        return domain("sample count must be at least 1");
    }
    if !(eta > 0.0 && eta.is_finite() && offset.is_finite()) {
        return domain(format!(
            "bin width must be positive and offset finite, got ({eta}, {offset})"
        ));
    }
    let (lo, hi) = d.window(EPS_TAIL);
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + i as f64 * step).collect();
    let cells: Vec<f64> = grid
        .par_windows(2)
        .map(|w| d.mass(w[0], w[1]))
        .collect::<Result<_>>()?;
    let mut cdf = Vec::with_capacity(GRID_POINTS);
    cdf.push(0.0);
    let mut acc = 0.0;
    for c in &cells {
        acc += c;
        cdf.push(acc);
    }
    let total = acc;
    cdf.iter_mut().for_each(|c| *c /= total);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let support = d.support();
    for _ in 0..n {
        let u: f64 = rng.gen();
        let i = cdf.partition_point(|c| *c <= u).clamp(1, GRID_POINTS - 1);
        let (c0, c1) = (cdf[i - 1], cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        let mut x = grid[i - 1] + frac * step;
        // Keep samples inside a half-open support.
        if x >= support.1 {
            x = support.1.next_down();
        }
        let j = ((x - offset) / eta + 0.5).floor() as i64;
        *counts.entry(j).or_insert(0) += 1;
    }
    let first = *counts.keys().next().expect("n ≥ 1 samples were drawn");
    let last = *counts.keys().next_back().expect("n ≥ 1 samples were drawn");
    let mut probs = vec![0.0; (last - first + 1) as usize];
    for (j, c) in counts {
        probs[(j - first) as usize] = c as f64 / n as f64;
    }
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
    BinnedDistribution::from_probs(eta, offset, first, probs, 0.0)
}
