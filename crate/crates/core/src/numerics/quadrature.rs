//! Cumulative quadrature on a uniform grid.
//!
//! Even offsets from the anchor use composite Simpson. Odd offsets close the
//! last three subintervals with the Simpson 3/8 rule, and the very first
//! subinterval uses a four-point rule, so every partial integral is exact for
//! cubics.

use num_complex::Complex64;

use super::grid::ComplexSamples;

/// `F(x_j) = ∫_{x_0}^{x_j} f(t) dt`, with `F(x_0) = 0`.
pub fn cumulative_integral_from_left(f: &ComplexSamples) -> ComplexSamples {
    let h = f.grid().step();
    let values = cumulative(f.values(), h);
    ComplexSamples::new(*f.grid(), values).expect("length preserved")
}

/// `F(x_j) = ∫_{x_j}^{x_last} f(t) dt`, with `F(x_last) = 0`.
pub fn cumulative_integral_from_right(f: &ComplexSamples) -> ComplexSamples {
    let h = f.grid().step();
    let reversed: Vec<Complex64> = f.values().iter().rev().copied().collect();
    let mut values = cumulative(&reversed, h);
    values.reverse();
    ComplexSamples::new(*f.grid(), values).expect("length preserved")
}

/// Definite integral over the whole grid.
pub fn integral(f: &ComplexSamples) -> Complex64 {
    let h = f.grid().step();
    cumulative(f.values(), h).last().copied().unwrap_or_default()
}

/// Definite integral of equally spaced samples with spacing `h`.
pub fn integrate_values(f: &[Complex64], h: f64) -> Complex64 {
    cumulative(f, h).last().copied().unwrap_or_default()
}

fn cumulative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (f[0] + f[1]) * (0.5 * h);
        return out;
    }
    // Composite Simpson at even offsets.
    for j in (2..n).step_by(2) {
        out[j] = out[j - 2] + (f[j - 2] + f[j - 1] * 4.0 + f[j]) * (h / 3.0);
    }
    if n >= 4 {
        out[1] = (f[0] * 9.0 + f[1] * 19.0 - f[2] * 5.0 + f[3]) * (h / 24.0);
    } else {
        out[1] = (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0);
    }
    for j in (3..n).step_by(2) {
        out[j] = out[j - 3] + (f[j - 3] + f[j - 2] * 3.0 + f[j - 1] * 3.0 + f[j]) * (3.0 * h / 8.0);
    }
    out
}
