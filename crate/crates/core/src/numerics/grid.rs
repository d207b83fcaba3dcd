use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[-half_width, half_width]` with an odd node count, so that
/// `x = 0` is always a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    half_width: f64,
    n_points: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width must be positive and finite, got {half_width}")));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::InvalidGrid(format!("node count must be odd and at least 3, got {n_points}")));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Index of the node at `x = 0`.
    pub fn zero_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn last_index(&self) -> usize {
        self.n_points - 1
    }

    /// Node `x_j`. Nodes are computed symmetrically about the centre so that
    /// `x(zero_index)` is exactly `0.0` and `x(j) == -x(n-1-j)`.
    pub fn x(&self, j: usize) -> f64 {
        let c = self.zero_index() as isize;
        (j as isize - c) as f64 * self.step()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the node closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.half_width) / self.step()).round();
        j.clamp(0.0, self.last_index() as f64) as usize
    }

    /// Indices of nodes with `|x| <= fraction * half_width`.
    pub fn inner_range(&self, fraction: f64) -> std::ops::RangeInclusive<usize> {
        let c = self.zero_index();
        let k = ((fraction * self.half_width) / self.step() + 1e-9).floor() as usize;
        let k = k.min(c);
        (c - k)..=(c + k)
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexSamples {
        ComplexSamples::from_fn(*self, f)
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> ComplexSamples {
        ComplexSamples::from_fn(*self, |x| Complex64::new(f(x), 0.0))
    }
}

/// Complex values attached to the nodes of a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSamples {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl ComplexSamples {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: UniformGrid, f: F) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: UniformGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self.values.iter().enumerate().map(|(j, &v)| f(self.grid.x(j), v)).collect();
        Self { grid: self.grid, values }
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid, values }
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<usize> for ComplexSamples {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        &self.values[j]
    }
}
