//! Jost solutions `e(i/2, x)`, `g(i/2, x)` of `-y'' + q1 y = -y/4` and their
//! companions `η`, `ξ` normalized by `W[e, η] = 1`, `W[g, ξ] = -1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_linear_ode2, ComplexSamples, Direction};
use crate::potential::SampledPotential;

/// Below this modulus `e(i/2, 0)` or `g(i/2, 0)` cannot anchor `η`, `ξ`.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct JostBasis {
    /// `e(i/2, x) e^{x/2}` and its derivative.
    pub e_hat: ComplexSamples,
    pub e_hat_prime: ComplexSamples,
    /// `g(i/2, x) e^{-x/2}` and its derivative.
    pub g_hat: ComplexSamples,
    pub g_hat_prime: ComplexSamples,
    pub e: ComplexSamples,
    pub e_prime: ComplexSamples,
    pub g: ComplexSamples,
    pub g_prime: ComplexSamples,
    pub eta: ComplexSamples,
    pub eta_prime: ComplexSamples,
    pub xi: ComplexSamples,
    pub xi_prime: ComplexSamples,
}

impl JostBasis {
    /// `max |e η' - e' η - 1|` and `max |g ξ' - g' ξ + 1|` over the grid.
    pub fn wronskian_defects(&self) -> (f64, f64) {
        let one = Complex64::new(1.0, 0.0);
        let mut de: f64 = 0.0;
        let mut dg: f64 = 0.0;
        for j in 0..self.e.len() {
            let we = self.e[j] * self.eta_prime[j] - self.e_prime[j] * self.eta[j];
            let wg = self.g[j] * self.xi_prime[j] - self.g_prime[j] * self.xi[j];
            de = de.max((we - one).norm());
            dg = dg.max((wg + one).norm());
        }
        (de, dg)
    }
}

pub fn compute_basis(p: &SampledPotential) -> Result<JostBasis> {
    let grid = p.grid;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    // w = e e^{x/2}: w'' - w' = q1 w
    let we = integrate_linear_ode2(&p.q1, -1.0, grid.last_index(), one, zero, Direction::Left)?;
    let (e, e_prime) = unshift(&we.w, &we.w_prime, -0.5);
    // w = g e^{-x/2}: w'' + w' = q1 w
    let wg = integrate_linear_ode2(&p.q1, 1.0, 0, one, zero, Direction::Right)?;
    let (g, g_prime) = unshift(&wg.w, &wg.w_prime, 0.5);

    let z = grid.zero_index();
    let (e0, g0) = (e[z], g[z]);
    if !(e0.norm() >= DEGENERACY_THRESHOLD) {
        return Err(Error::BasisDegenerate { which: "e", value: e0.norm() });
    }
    if !(g0.norm() >= DEGENERACY_THRESHOLD) {
        return Err(Error::BasisDegenerate { which: "g", value: g0.norm() });
    }

    // Second solutions of y'' = (q1 + 1/4) y anchored at x = 0.
    let shifted = p.q1.map(|_, v| v + 0.25);
    let (eta, eta_prime) = two_sided(&shifted, z, one / e0)?;
    let (xi, xi_prime) = two_sided(&shifted, z, -one / g0)?;

    Ok(JostBasis {
        e_hat: we.w,
        e_hat_prime: we.w_prime,
        g_hat: wg.w,
        g_hat_prime: wg.w_prime,
        e,
        e_prime, g, g_prime, eta, eta_prime, xi, xi_prime })
}

/// Given `w = y e^{-sx}` returns `y = w e^{sx}` and `y' = (w' + s w) e^{sx}`.
fn unshift(w: &ComplexSamples, wp: &ComplexSamples, s: f64) -> (ComplexSamples, ComplexSamples) {
    let y = w.map(|x, v| v * (s * x).exp());
    let yp = wp.zip_with(w, |d, v| d + v * s).map(|x, v| v * (s * x).exp());
    (y, yp)
}

fn two_sided(q: &ComplexSamples, z: usize, slope: Complex64) -> Result<(ComplexSamples, ComplexSamples)> {
    let zero = Complex64::new(0.0, 0.0);
    let right = integrate_linear_ode2(q, 0.0, z, zero, slope, Direction::Right)?;
    let left = integrate_linear_ode2(q, 0.0, z, zero, slope, Direction::Left)?;
    let mut y = right.w;
    let mut yp = right.w_prime;
    y.values_mut()[..z].copy_from_slice(&left.w.values()[..z]);
    yp.values_mut()[..z].copy_from_slice(&left.w_prime.values()[..z]);
    Ok((y, yp))
}
