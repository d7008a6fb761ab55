//! Brute-force oracle for the sup-norm distance to a Strassen ball.
//!
//! Independent of the library's bisection + projected-coordinate-descent
//! route: the inner box-constrained energy minimum is found exactly by
//! enumerating all 3^m KKT active-set patterns (lower/free/upper per
//! coordinate). Free runs between pinned coordinates minimize the
//! tridiagonal energy in closed form (linear interpolation; a trailing
//! free run is flat). Every accepted candidate is feasible, so the best
//! accepted energy equals the true minimum.

pub fn energy(values: &[f64]) -> f64 {
    let m = (values.len() - 1) as f64;
    m * values
        .windows(2)
        .map(|w| (w[1] - w[0]) * (w[1] - w[0]))
        .sum::<f64>()
}

/// Exact min of energy over { |y_i − x_i| ≤ eps, y_0 = 0 }.
pub fn oracle_min_energy(x: &[f64], eps: f64) -> f64 {
    let n = x.len() - 1;
    assert!(n <= 10, "oracle enumeration is for small grids");
    let mut best = f64::INFINITY;
    let patterns = 3usize.pow(n as u32);
    let mut kind = vec![0u8; n + 1];
    let mut y = vec![0.0f64; n + 1];
    for code in 0..patterns {
        let mut c = code;
        for k in kind.iter_mut().skip(1) {
            *k = (c % 3) as u8; // 0 lower, 1 free, 2 upper
            c /= 3;
        }
        y[0] = 0.0;
        for i in 1..=n {
            match kind[i] {
                0 => y[i] = x[i] - eps,
                2 => y[i] = x[i] + eps,
                _ => y[i] = f64::NAN,
            }
        }
        // closed-form fill of free runs
        let mut i = 1;
        while i <= n {
            if kind[i] == 1 {
                let start = i;
                let mut j = i;
                while j <= n && kind[j] == 1 {
                    j += 1;
                }
                let left = y[start - 1];
                if j > n {
                    for v in y.iter_mut().take(n + 1).skip(start) {
                        *v = left;
                    }
                } else {
                    let right = y[j];
                    let len = (j - start + 1) as f64;
                    for (off, k) in (start..j).enumerate() {
                        y[k] = left + (right - left) * (off + 1) as f64 / len;
                    }
                }
                i = j;
            } else {
                i += 1;
            }
        }
        // feasibility of the free coordinates
        let mut ok = true;
        for i in 1..=n {
            if kind[i] == 1 && ((y[i] < x[i] - eps - 1e-12) || (y[i] > x[i] + eps + 1e-12)) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // KKT sign conditions at the pinned coordinates
        for i in 1..=n {
            let grad = if i < n {
                2.0 * y[i] - y[i - 1] - y[i + 1]
            } else {
                y[n] - y[n - 1]
            };
            let bad = match kind[i] {
                0 => grad < -1e-9,
                2 => grad > 1e-9,
                _ => false,
            };
            if bad {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let e = energy(&y);
        if e < best {
            best = e;
        }
    }
    assert!(best.is_finite(), "no KKT-consistent pattern found");
    best
}

/// Distance oracle: bisection on eps with the exact inner minimum.
pub fn oracle_dist(x: &[f64], beta: f64) -> f64 {
    if energy(x) <= beta * beta {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if oracle_min_energy(x, mid) <= beta * beta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
