//! The `z`-map and truncated series for the Zakharov-Shabat Jost solutions
//!
//! ```text
//! φ1 = e^{-iρx} (1 + (z+1) Σ (-z)^n Re b_n(x))     ψ1 = -e^{iρx} (z+1) Σ (-z)^n Im a_n(x)
//! φ2 = e^{-iρx} (z+1) Σ (-z)^n Im b_n(x)           ψ2 =  e^{iρx} (1 + (z+1) Σ (-z)^n Re a_n(x))
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::{tail_estimate, CoefficientTable};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `z = (1/2 + iρ) / (1/2 - iρ)`.
pub fn z_of_rho(rho: Complex64) -> Complex64 {
    (0.5 + I * rho) / (0.5 - I * rho)
}

/// `ρ = i(1 - z) / (2(1 + z))`.
pub fn rho_of_z(z: Complex64) -> Result<Complex64> {
    let d = 1.0 + z;
    if d.norm() == 0.0 {
        return Err(Error::PoleAtMinusOne);
    }
    Ok(I * (1.0 - z) / (2.0 * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub rho: Complex64,
    pub z: Complex64,
}

impl SpectralPoint {
    pub fn new(rho: Complex64) -> Result<Self> {
        if !(rho.re.is_finite() && rho.im.is_finite()) {
            return Err(Error::non_finite("spectral parameter"));
        }
        if rho.im < 0.0 {
            return Err(Error::InvalidInput(format!("spectral parameter {rho} lies in the lower half-plane")));
        }
        Ok(Self { rho, z: z_of_rho(rho) })
    }

    pub fn real(rho: f64) -> Result<Self> {
        Self::new(Complex64::new(rho, 0.0))
    }

    pub fn from_z(z: Complex64) -> Result<Self> {
        Ok(Self { rho: rho_of_z(z)?, z })
    }
}

/// `Σ_{n=0}^{N} c_n (-z)^n` by Horner's rule.
pub fn alternating_series<C>(coeffs: C, z: Complex64) -> Complex64
where
    C: DoubleEndedIterator<Item = f64>,
{
    let w = -z;
    coeffs.rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JostPair {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub psi1: Complex64,
    pub psi2: Complex64,
}

impl JostPair {
    pub fn phi(&self) -> [Complex64; 2] {
        [self.phi1, self.phi2]
    }

    pub fn psi(&self) -> [Complex64; 2] {
        [self.psi1, self.psi2]
    }
}

pub fn eval_jost(sp: SpectralPoint, j: usize, table: &CoefficientTable, n: usize) -> JostPair {
    assert!(n <= table.n_max(), "truncation {n} exceeds table order {}", table.n_max());
    let x = table.grid().x(j);
    let z = sp.z;
    let zp1 = z + 1.0;
    let re_b = alternating_series((0..=n).map(|k| table.b(k)[j].re), z);
    let im_b = alternating_series((0..=n).map(|k| table.b(k)[j].im), z);
    let re_a = alternating_series((0..=n).map(|k| table.a(k)[j].re), z);
    let im_a = alternating_series((0..=n).map(|k| table.a(k)[j].im), z);
    let left = (-I * sp.rho * x).exp();
    let right = (I * sp.rho * x).exp();
    JostPair {
        phi1: left * (1.0 + zp1 * re_b),
        phi2: left * zp1 * im_b,
        psi1: -right * zp1 * im_a,
        psi2: right * (1.0 + zp1 * re_a),
    }
}

/// Like [`eval_jost`], also returning the bound `ε_N(x) e^{-Im ρ x} / sqrt(2 Im ρ)`
/// on the remainder of `φ` when `Im ρ > 0`.
pub fn eval_jost_with_bound(sp: SpectralPoint, j: usize, table: &CoefficientTable, n: usize) -> (JostPair, Option<f64>) {
    let pair = eval_jost(sp, j, table, n);
    let bound = (sp.rho.im > 0.0).then(|| {
        let x = table.grid().x(j);
        tail_estimate(table, n, j) * (-sp.rho.im * x).exp() / (2.0 * sp.rho.im).sqrt()
    });
    (pair, bound)
}
