//! Polynomial roots as eigenvalues of the balanced companion matrix.
//!
//! The companion matrix is already upper Hessenberg, so the eigenvalues are
//! found with single-shift complex QR sweeps (Givens rotations, Wilkinson
//! shifts, exceptional shifts on stagnation) and deflation of negligible
//! subdiagonal entries. Each root is then refined with Newton steps on the
//! original polynomial.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ITERATIONS_PER_ROOT: usize = 40;
const NEWTON_STEPS: usize = 2;

/// All complex roots of `sum_k coeffs[k] z^k`.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = strip_leading_zeros(coeffs);
    if coeffs.len() < 2 {
        return Err(Error::DegreeZero);
    }
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::non_finite("polynomial coefficients"));
    }
    let mut h = companion(coeffs);
    balance(&mut h);
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in &mut roots {
        *r = polish(coeffs, *r);
    }
    Ok(roots)
}

/// Horner evaluation of `p(z)` and `p'(z)`.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of `prod_k (z - r_k)`, ascending degree.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        p = next;
    }
    p
}

fn strip_leading_zeros(coeffs: &[Complex64]) -> &[Complex64] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1] == Complex64::new(0.0, 0.0) {
        end -= 1;
    }
    &coeffs[..end]
}

/// Row-major dense matrix used only inside this module.
struct Dense {
    n: usize,
    a: Vec<Complex64>,
}

impl Dense {
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

fn companion(coeffs: &[Complex64]) -> Dense {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = Dense { n: deg, a: vec![Complex64::new(0.0, 0.0); deg * deg] };
    // first row holds -c_{deg-1-j}/c_deg, ones on the subdiagonal
    for j in 0..deg {
        *m.at_mut(0, j) = -coeffs[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        *m.at_mut(i, i - 1) = Complex64::new(1.0, 0.0);
    }
    m
}

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett-Reinsch balancing with power-of-two scaling; preserves the
/// Hessenberg pattern and the eigenvalues exactly.
fn balance(m: &mut Dense) {
    const RADIX: f64 = 2.0;
    let n = m.n;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(m.at(j, i));
                    r += abs1(m.at(i, j));
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    *m.at_mut(i, j) *= inv;
                    *m.at_mut(j, i) *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = (a + d) * 0.5 + disc;
    let l2 = (a + d) * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let norm = na.hypot(nb);
    let c = na / norm;
    let s = (a / na) * b.conj() / norm;
    (c, s)
}

fn hessenberg_eigenvalues(mut h: Dense) -> Result<Vec<Complex64>> {
    let n = h.n;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 1 {
        eig[0] = h.at(0, 0);
        return Ok(eig);
    }
    let max_total = ITERATIONS_PER_ROOT * n;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h.at(0, 0);
            break;
        }
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let s = abs1(h.at(lo - 1, lo - 1)) + abs1(h.at(lo, lo));
            let sub = abs1(h.at(lo, lo - 1));
            if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                *h.at_mut(lo, lo - 1) = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h.at(hi, hi);
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > max_total {
            return Err(Error::NoConvergence { iterations: total });
        }
        let shift = if its % 11 == 10 {
            // exceptional shift to break cycles
            let t = abs1(h.at(hi, hi - 1)) + if hi >= 2 { abs1(h.at(hi - 1, hi - 2)) } else { 0.0 };
            h.at(hi, hi) + Complex64::new(0.75 * t, 0.4375 * t)
        } else {
            wilkinson_shift(h.at(hi - 1, hi - 1), h.at(hi - 1, hi), h.at(hi, hi - 1), h.at(hi, hi))
        };

        for k in lo..=hi {
            *h.at_mut(k, k) -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let (c, s) = givens(h.at(k, k), h.at(k + 1, k));
            for j in k..=hi {
                let x = h.at(k, j);
                let y = h.at(k + 1, j);
                *h.at_mut(k, j) = x * c + s * y;
                *h.at_mut(k + 1, j) = -s.conj() * x + y * c;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            let last = (k + 2).min(hi);
            for i in lo..=last {
                let x = h.at(i, k);
                let y = h.at(i, k + 1);
                *h.at_mut(i, k) = x * c + y * s.conj();
                *h.at_mut(i, k + 1) = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            *h.at_mut(k, k) += shift;
        }
    }
    Ok(eig)
}

fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = eval(coeffs, z).norm();
    for _ in 0..NEWTON_STEPS {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let val = eval(coeffs, cand).norm();
        if !(val <= best) {
            break;
        }
        z = cand;
        best = val;
    }
    z
}
