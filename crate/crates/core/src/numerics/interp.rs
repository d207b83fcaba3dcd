//! Cubic (four-point Lagrange) interpolation helpers.

use num_complex::Complex64;

/// Values at the midpoints `x_j + h/2`, `j = 0..n-1`, of uniformly spaced
/// samples. Interior midpoints use the centred four-point stencil; the two
/// end intervals use one-sided stencils.
pub fn midpoints(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    if n < 2 {
        return Vec::new();
    }
    if n < 4 {
        return f.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    out.push((f[0] * 5.0 + f[1] * 15.0 - f[2] * 5.0 + f[3]) / 16.0);
    for j in 1..n - 2 {
        out.push((-f[j - 1] + f[j] * 9.0 + f[j + 1] * 9.0 - f[j + 2]) / 16.0);
    }
    out.push((f[n - 4] - f[n - 3] * 5.0 + f[n - 2] * 15.0 + f[n - 1] * 5.0) / 16.0);
    out
}

/// Values at `x_j + theta*h` for `theta` in `[0, 1]` and every subinterval `j`.
pub fn at_fraction(f: &[Complex64], theta: f64) -> Vec<Complex64> {
    let n = f.len();
    if n < 4 {
        return f.windows(2).map(|w| w[0] * (1.0 - theta) + w[1] * theta).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let s = if j == 0 {
            0
        } else if j + 2 >= n {
            n - 4
        } else {
            j - 1
        };
        let t = (j - s) as f64 + theta;
        let w = lagrange4_weights(t);
        out.push(f[s] * w[0] + f[s + 1] * w[1] + f[s + 2] * w[2] + f[s + 3] * w[3]);
    }
    out
}

/// Lagrange weights for nodes `0, 1, 2, 3` evaluated at `t`.
pub fn lagrange4_weights(t: f64) -> [f64; 4] {
    [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ]
}

/// Cubic interpolation of a table with strictly increasing, possibly
/// non-uniform abscissae. `x` must lie inside `[xs[0], xs[last]]`.
pub fn cubic_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2);
    if n < 4 {
        let i = match xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] * (1.0 - t) + ys[i + 1] * t;
    }
    let p = xs.partition_point(|&v| v <= x);
    let i = p.saturating_sub(1).min(n - 2);
    let s = i.saturating_sub(1).min(n - 4);
    let mut acc = 0.0;
    for k in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                w *= (x - xs[s + m]) / (xs[s + k] - xs[s + m]);
            }
        }
        acc += w * ys[s + k];
    }
    acc
}
