/// Spherical Bessel functions `j_0(x) ..= j_{n_max}(x)` for `x > 0`.
///
/// Upward recurrence is used while it is stable (`n < x`); beyond that the
/// values come from Miller's backward recurrence normalized against the
/// last stable value.
pub(crate) fn spherical_bessel_j(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let j0 = x.sin() / x;
    out[0] = j0;
    if n_max == 0 {
        return out;
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    out[1] = j1;
    let stable = (x.floor() as usize).min(n_max);
    for n in 1..stable {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    if stable >= n_max {
        return out;
    }
    // Backward recurrence from well above n_max.
    let start = n_max + 20 + (x.abs().sqrt() * 10.0) as usize + 2 * (n_max as f64).sqrt() as usize;
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut back = vec![0.0; n_max + 1];
    for n in (1..=start).rev() {
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if n - 1 <= n_max {
            back[n - 1] = cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            for v in back.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let anchor = stable.max(1);
    let (ref_val, ref_back) = if out[anchor].abs() > out[anchor - 1].abs() {
        (out[anchor], back[anchor])
    } else {
        (out[anchor - 1], back[anchor - 1])
    };
    let scale = ref_val / ref_back;
    for n in (anchor + 1)..=n_max {
        out[n] = back[n] * scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j2(x: f64) -> f64 {
        (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x)
    }

    #[test]
    fn low_orders_match_closed_forms() {
        for &x in &[0.3, 1.0, 2.5, 7.0, 20.0] {
            let j = spherical_bessel_j(2, x);
            assert!((j[0] - x.sin() / x).abs() < 1e-15);
            assert!((j[2] - j2(x)).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn small_argument_power_law() {
        // j_n(x) ~ x^n / (2n+1)!! as x -> 0.
        let x = 1e-3;
        let j = spherical_bessel_j(8, x);
        let mut dfact = 1.0;
        for (n, jn) in j.iter().enumerate().skip(1) {
            dfact *= (2 * n + 1) as f64;
            let lead = x.powi(n as i32) / dfact;
            assert!((jn / lead - 1.0).abs() < 1e-5, "n={n}");
        }
    }

    #[test]
    fn wronskian_like_identity() {
        // Sum rule: sum_n (2n+1) j_n(x)^2 = 1.
        let j = spherical_bessel_j(80, 6.3);
        let s: f64 = j
            .iter()
            .enumerate()
            .map(|(n, v)| (2 * n + 1) as f64 * v * v)
            .sum();
        assert!((s - 1.0).abs() < 1e-13);
    }
}
