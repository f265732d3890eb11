use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return domain("quadrature tolerances must be strictly positive");
        }
        if self.max_subdivisions == 0 {
            return domain("max_subdivisions must be at least 1");
        }
        Ok(())
    }
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error: err,
        abs: res_abs,
    }
}

/// Adaptive 21-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimated error drops below `max(abs_tol, rel_tol * |I|)`, or below the
/// rounding floor `100 ε ∫|f|` when the requested tolerance is tighter.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return domain(format!("integration limits must be finite, got [{a}, {b}]"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, spec).map(|v| -v);
    }
    let first = gk21(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.abs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut pieces = 1;
    loop {
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                what: "quadrature (non-finite integrand)",
                estimate: total,
                error: total_err,
            });
        }
        let floor = 100.0 * f64::EPSILON * total_abs;
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()).max(floor) {
            return Ok(total);
        }
        if pieces >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                estimate: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(worst);
            return Ok(total);
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        pieces += 1;
        // Keep the running sums honest against drift.
        if pieces % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
            total_abs = heap.iter().map(|s| s.abs).sum();
        }
    }
}

/// Integrates over consecutive pairs of a sorted list of breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], spec: &QuadSpec) -> Result<f64> {
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            sum += integrate(&f, w[0], w[1], spec)?;
        }
    }
    Ok(sum)
}

/// Integral of `f` over `[a, ∞)` via the map `x = a + t/(1-t)`.
pub fn integrate_halfline<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadSpec) -> Result<f64> {
    if !a.is_finite() {
        return domain("half-line start must be finite");
    }
    let g = |t: f64| {
        let s = 1.0 - t;
        let x = a + t / s;
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    integrate(g, 0.0, 1.0, spec)
}

/// Integral of `f` over the whole real line, split at `center`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, center: f64, spec: &QuadSpec) -> Result<f64> {
    let right = integrate_halfline(&f, center, spec)?;
    let left = integrate_halfline(|x| f(2.0 * center - x), center, spec)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_and_odd() {
        let s = QuadSpec::default();
        assert!((integrate(|_| 1.0, 0.0, 1.0, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!(integrate(|x| x, -1.0, 1.0, &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gaussian_mass_matches_erf() {
        let s = QuadSpec::tight();
        let v = integrate(
            |x| (-x * x).exp() / std::f64::consts::PI.sqrt(),
            -8.0,
            8.0,
            &s,
        )
        .unwrap();
        assert!((v - crate::specfun::erf(8.0)).abs() < 1e-12);
    }

    #[test]
    fn halfline_examples() {
        let s = QuadSpec::tight();
        assert!((integrate_halfline(|x| (-x).exp(), 0.0, &s).unwrap() - 1.0).abs() < 1e-12);
        assert!((integrate_halfline(|x| x * (-x * x).exp(), 0.0, &s).unwrap() - 0.5).abs() < 1e-12);
        let sigma: f64 = 1.3;
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let tail = integrate_halfline(
            |x| norm * (-0.5 * x * x / (sigma * sigma)).exp(),
            5.0 * sigma,
            &s,
        )
        .unwrap();
        let exact = 0.5 * (1.0 - crate::specfun::erf(5.0 / 2f64.sqrt()));
        assert!((tail - exact).abs() < 1e-14, "{tail} vs {exact}");
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let s = QuadSpec::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &s);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    proptest! {
        #[test]
        fn linearity(al in -3.0f64..3.0, be in -3.0f64..3.0, w in 0.5f64..6.0, k in 0.0f64..2.0, b in 0.5f64..4.0) {
            let s = QuadSpec::default();
            let f = |x: f64| (w * x).sin() + (x - k).abs();
            let g = |x: f64| (-x * x).exp() * (1.0 + x.powi(3));
            let combo = integrate_pieces(|x| al * f(x) + be * g(x), &[-1.0, k.min(b), b], &s).unwrap();
            let sep = al * integrate_pieces(f, &[-1.0, k.min(b), b], &s).unwrap()
                + be * integrate_pieces(g, &[-1.0, k.min(b), b], &s).unwrap();
            prop_assert!((combo - sep).abs() <= 4.0 * s.abs_tol.max(s.rel_tol * combo.abs()));
        }

        #[test]
        fn nonnegative_integrand(c in -2.0f64..2.0, w in 0.1f64..20.0) {
            let s = QuadSpec::default();
            let v = integrate(|x| ((w * x).sin() + c).powi(2) * (-x).exp(), 0.0, 3.0, &s).unwrap();
            prop_assert!(v >= -s.abs_tol);
        }
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(QuadSpec::new(0.0, 1e-10, 10).is_err());
        assert!(QuadSpec::new(1e-10, 1e-10, 0).is_err());
    }
}
