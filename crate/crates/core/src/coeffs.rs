//! Fourier-Laguerre coefficients `a_n(x)`, `b_n(x)` of the transmutation
//! kernels, produced by recurrent integration from the basis at `ρ = i/2`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::JostBasis;
use crate::error::{Error, Result};
use crate::numerics::quadrature::{cumulative_integral_from_left, cumulative_integral_from_right};
use crate::numerics::{ComplexSamples, UniformGrid};
use crate::potential::SampledPotential;

pub const DEFAULT_N_MAX: usize = 250;

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    grid: UniformGrid,
    a: Vec<Vec<Complex64>>,
    b: Vec<Vec<Complex64>>,
}

impl CoefficientTable {
    /// Builds a table from explicit rows. Every row must have one value per node.
    pub fn from_rows(grid: UniformGrid, a: Vec<Vec<Complex64>>, b: Vec<Vec<Complex64>>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::LengthMismatch { expected: a.len().max(1), found: b.len() });
        }
        for row in a.iter().chain(&b) {
            if row.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: row.len() });
            }
        }
        Ok(Self { grid, a, b })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self, n: usize) -> &[Complex64] {
        &self.a[n]
    }

    pub fn b(&self, n: usize) -> &[Complex64] {
        &self.b[n]
    }

    /// `a_0(x_j), ..., a_N(x_j)`.
    pub fn a_at(&self, j: usize, n: usize) -> Vec<Complex64> {
        self.a[..=n].iter().map(|row| row[j]).collect()
    }

    pub fn b_at(&self, j: usize, n: usize) -> Vec<Complex64> {
        self.b[..=n].iter().map(|row| row[j]).collect()
    }

    /// Keeps rows `0..=n`.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.n_max());
        Self { grid: self.grid, a: self.a[..=n].to_vec(), b: self.b[..=n].to_vec() }
    }

    /// Writes `n,x,re_a,im_a,re_b,im_b`, one row per coefficient and node.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "x", "re_a", "im_a", "re_b", "im_b"])?;
        for n in 0..=self.n_max() {
            for j in 0..self.grid.len() {
                let (a, b) = (self.a[n][j], self.b[n][j]);
                w.write_record([
                    n.to_string(),
                    format!("{:.17e}", self.grid.x(j)),
                    format!("{:.17e}", a.re),
                    format!("{:.17e}", a.im),
                    format!("{:.17e}", b.re),
                    format!("{:.17e}", b.im),
                ])?;
            }
        }
        w.flush().map_err(|source| Error::Io { path: "<csv>".into(), source })?;
        Ok(())
    }
}

pub fn compute_coefficients(basis: &JostBasis, p: &SampledPotential, n_max: usize) -> Result<CoefficientTable> {
    let grid = p.grid;
    if basis.e.grid() != &grid {
        return Err(Error::InvalidGrid("basis and potential are sampled on different grids".into()));
    }
    let n = grid.len();
    let xs = grid.nodes();
    let half = |s: f64| -> Vec<f64> { xs.iter().map(|x| (s * x).exp()).collect() };
    let (em, ep) = (half(-0.5), half(0.5));
    let (e_minus, e_plus) = (half(-1.0), half(1.0));

    let a0: Vec<Complex64> = basis.e_hat.values().iter().map(|w| w - 1.0).collect();
    let b0: Vec<Complex64> = basis.g_hat.values().iter().map(|w| w - 1.0).collect();

    // e^{-x/2} e, e^{-x/2} η and their derivatives; likewise e^{x/2} g, e^{x/2} ξ.
    let (we, wep, wg, wgp) = (&basis.e_hat, &basis.e_hat_prime, &basis.g_hat, &basis.g_hat_prime);
    let alpha1: Vec<Complex64> = (0..n).map(|j| we[j] * e_minus[j]).collect();
    let dalpha1: Vec<Complex64> = (0..n).map(|j| (wep[j] - we[j]) * e_minus[j]).collect();
    let alpha2: Vec<Complex64> = (0..n).map(|j| basis.eta[j] * em[j]).collect();
    let dalpha2: Vec<Complex64> = (0..n).map(|j| (basis.eta_prime[j] - basis.eta[j] * 0.5) * em[j]).collect();
    let beta1: Vec<Complex64> = (0..n).map(|j| wg[j] * e_plus[j]).collect();
    let dbeta1: Vec<Complex64> = (0..n).map(|j| (wgp[j] + wg[j]) * e_plus[j]).collect();
    let beta2: Vec<Complex64> = (0..n).map(|j| basis.xi[j] * ep[j]).collect();
    let dbeta2: Vec<Complex64> = (0..n).map(|j| (basis.xi_prime[j] + basis.xi[j] * 0.5) * ep[j]).collect();

    let zero = Complex64::new(0.0, 0.0);
    let (mut j1, mut j2, mut i1, mut i2) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut a_rows = vec![a0.clone()];
    let mut b_rows = vec![b0.clone()];

    let product = |d: &[Complex64], c: &[Complex64]| -> ComplexSamples {
        let v = d.iter().zip(c).map(|(x, y)| x * y).collect();
        ComplexSamples::new(grid, v).expect("grid length")
    };

    for order in 1..=n_max {
        let prev_a = &a_rows[order - 1];
        let prev_b = &b_rows[order - 1];
        let r1 = cumulative_integral_from_right(&product(&dalpha1, prev_a));
        let r2 = cumulative_integral_from_right(&product(&dalpha2, prev_a));
        let l1 = cumulative_integral_from_left(&product(&dbeta1, prev_b));
        let l2 = cumulative_integral_from_left(&product(&dbeta2, prev_b));

        let mut a_n = vec![zero; n];
        let mut b_n = vec![zero; n];
        for k in 0..n {
            j1[k] = j1[k] - alpha1[k] * prev_a[k] - r1[k];
            j2[k] = j2[k] - alpha2[k] * prev_a[k] - r2[k];
            i1[k] = i1[k] + beta1[k] * prev_b[k] - l1[k];
            i2[k] = i2[k] + beta2[k] * prev_b[k] - l2[k];
            a_n[k] = a0[k] - (basis.eta[k] * j1[k] - basis.e[k] * j2[k]) * (2.0 * ep[k]);
            b_n[k] = b0[k] + (basis.xi[k] * i1[k] - basis.g[k] * i2[k]) * (2.0 * em[k]);
        }
        if a_n.iter().chain(&b_n).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::non_finite(format!("coefficient row n = {order}")));
        }
        a_rows.push(a_n);
        b_rows.push(b_n);
    }

    Ok(CoefficientTable { grid, a: a_rows, b: b_rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub n_left: usize,
    pub n_right: usize,
    /// `|Σ_0^N b_n(0) - ½∫_{-a}^0 q1|` for `N = 0..=N_max`.
    pub eps_left: Vec<f64>,
    /// `|Σ_0^N a_n(0) - ½∫_0^a q1|`.
    pub eps_right: Vec<f64>,
    pub chosen_n: usize,
}

pub fn select_truncation_direct(table: &CoefficientTable, p: &SampledPotential) -> TruncationReport {
    let z = table.grid.zero_index();
    let right_ref = cumulative_integral_from_right(&p.q1)[z] * 0.5;
    let left_ref = cumulative_integral_from_left(&p.q1)[z] * 0.5;
    let gaps = |rows: &[Vec<Complex64>], target: Complex64| -> Vec<f64> {
        let mut sum = Complex64::new(0.0, 0.0);
        rows.iter()
            .map(|row| {
                sum += row[z];
                (sum - target).norm()
            })
            .collect()
    };
    let eps_left = gaps(&table.b, left_ref);
    let eps_right = gaps(&table.a, right_ref);
    let n_left = argmin(&eps_left);
    let n_right = argmin(&eps_right);
    TruncationReport { n_left, n_right, chosen_n: n_left.max(n_right), eps_left, eps_right }
}

/// First index of the smallest value; NaN entries never win.
fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] || v[best].is_nan() {
            best = i;
        }
    }
    best
}

/// `(Σ_{n=N+1}^{N_max} |b_n(x_j)|²)^{1/2}`.
pub fn tail_estimate(table: &CoefficientTable, n: usize, j: usize) -> f64 {
    table.b.iter().skip(n + 1).map(|row| row[j].norm_sqr()).sum::<f64>().sqrt()
}

/// Same tail for the `a` coefficients.
pub fn tail_estimate_a(table: &CoefficientTable, n: usize, j: usize) -> f64 {
    table.a.iter().skip(n + 1).map(|row| row[j].norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::compute_basis;
    use crate::potential::{evaluate, PotentialSpec, Preset, SampledTable};

    fn table_for(spec: &PotentialSpec, grid: UniformGrid, n_max: usize) -> (SampledPotential, CoefficientTable) {
        let p = evaluate(spec, grid).unwrap();
        let basis = compute_basis(&p).unwrap();
        let t = compute_coefficients(&basis, &p, n_max).unwrap();
        (p, t)
    }

    #[test]
    fn zero_potential_gives_zero_rows() {
        let g = UniformGrid::new(15.0, 2001).unwrap();
        let (p, t) = table_for(&Preset::Zero.into(), g, 20);
        for n in 0..=20 {
            assert!(t.a(n).iter().chain(t.b(n)).all(|v| v.norm() == 0.0), "n={n}");
        }
        let r = select_truncation_direct(&t, &p);
        assert_eq!(r.chosen_n, 0);
        assert!(r.eps_left.iter().chain(&r.eps_right).all(|&e| e == 0.0));
        assert_eq!(tail_estimate(&t, 3, g.zero_index()), 0.0);
    }

    #[test]
    fn example1_sum_rule_and_choice() {
        let g = UniformGrid::new(15.0, 4001).unwrap();
        let (p, t) = table_for(&Preset::example1().into(), g, 120);
        let r = select_truncation_direct(&t, &p);
        assert!(r.eps_right[r.n_right] < 1e-6, "{}", r.eps_right[r.n_right]);
        assert!(r.eps_left[r.n_left] < 1e-6, "{}", r.eps_left[r.n_left]);
        assert!(r.chosen_n <= 120);
        assert_eq!(tail_estimate(&t, 120, g.zero_index()), 0.0);
    }

    #[test]
    fn tail_estimate_is_monotone() {
        let g = UniformGrid::new(15.0, 4001).unwrap();
        let (_, t) = table_for(&Preset::example1().into(), g, 60);
        let z = g.zero_index();
        let tails: Vec<f64> = (0..=60).map(|n| tail_estimate(&t, n, z)).collect();
        assert!(tails.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn conjugate_potential_gives_conjugate_rows() {
        let g = UniformGrid::new(15.0, 4001).unwrap();
        let p = evaluate(&Preset::example3().into(), g).unwrap();
        let pc = p.conjugate_problem();
        let t = compute_coefficients(&compute_basis(&p).unwrap(), &p, 30).unwrap();
        let tc = compute_coefficients(&compute_basis(&pc).unwrap(), &pc, 30).unwrap();
        let z = g.zero_index();
        for n in 0..=30 {
            assert!((t.a(n)[z].conj() - tc.a(n)[z]).norm() < 1e-8, "a n={n}");
            assert!((t.b(n)[z].conj() - tc.b(n)[z]).norm() < 1e-8, "b n={n}");
        }
    }

    #[test]
    fn shift_moves_zeroth_rows() {
        let g = UniformGrid::new(15.0, 4001).unwrap();
        let shift = 200;
        let delta = shift as f64 * g.step();
        let preset = Preset::example3();
        let xs = g.nodes();
        let qs: Vec<f64> = xs.iter().map(|&x| preset.q(x - delta)).collect();
        let (_, t0) = table_for(&preset.into(), g, 0);
        let (_, t1) = table_for(&PotentialSpec::Sampled(SampledTable::new(xs.clone(), qs).unwrap()), g, 0);
        for j in g.inner_range(0.5) {
            assert!((t0.a(0)[j] - t1.a(0)[j + shift]).norm() < 1e-6, "a0 at {}", xs[j]);
            assert!((t0.b(0)[j] - t1.b(0)[j + shift]).norm() < 1e-6, "b0 at {}", xs[j]);
        }
    }

    #[test]
    fn csv_dump_has_one_row_per_entry() {
        let g = UniformGrid::new(2.0, 11).unwrap();
        let (_, t) = table_for(&Preset::example1().into(), g, 2);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 11);
        assert!(text.starts_with("n,x,re_a,im_a,re_b,im_b"));
    }
}
