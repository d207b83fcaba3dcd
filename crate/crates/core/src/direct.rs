//! Scattering data from the coefficients at `x = 0`: `a(ρ)`, `b(ρ)`, the
//! eigenvalues (zeros of `a` in the unit `z`-disk) and norming constants.
//!
//! With `P_b = 1 + (z+1) Σ (-z)^n Re b_n(0)`, `S_b = Σ (-z)^n Im b_n(0)` and
//! `P_a`, `S_a` built the same way from `a_n(0)`,
//!
//! ```text
//! a(ρ) = P_b P_a + (z+1)^2 S_b S_a
//! b(ρ) = conj(P_a) (z+1) S_b - conj((z+1) S_a) P_b      (ρ real)
//! ```

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::compute_basis;
use crate::coeffs::{compute_coefficients, select_truncation_direct, CoefficientTable, TruncationReport};
use crate::error::{Error, Result};
use crate::jost::{alternating_series, rho_of_z, z_of_rho};
use crate::numerics::interp::at_fraction;
use crate::numerics::roots::{eval, polynomial_roots};
use crate::numerics::UniformGrid;
use crate::potential::{evaluate, PotentialSpec, SampledPotential};

/// Roots with `|z| >= 1 - DISK_MARGIN` are discarded.
pub const DISK_MARGIN: f64 = 1e-6;
/// Relative residual `|a(z)| / Σ|c_k||z|^k` a root must satisfy.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Largest move in `ρ` of a root between `N` and `N - STABILITY_DROP` terms.
pub const STABILITY_TOLERANCE: f64 = 1e-4;
pub const STABILITY_DROP: usize = 5;
/// Smallest admissible denominator in the norming-constant quotients.
pub const NORMING_DENOMINATOR_FLOOR: f64 = 1e-10;
/// Smallest `|a|` for the reflection and transmission coefficients.
pub const DIVISION_FLOOR: f64 = 1e-12;

pub const DEFAULT_RHO_MAX: f64 = 30.0;
pub const DEFAULT_RHO_COUNT: usize = 4000;

/// `count` equally spaced points on `[-rho_max, rho_max]`, endpoints included.
pub fn default_rho_grid(rho_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let h = 2.0 * rho_max / (count - 1) as f64;
            (0..count).map(|k| -rho_max + k as f64 * h).collect()
        }
    }
}

/// The four factor polynomials of a truncated table at `x = 0`.
#[derive(Debug, Clone)]
struct Factors {
    re_b: Vec<f64>,
    im_b: Vec<f64>,
    re_a: Vec<f64>,
    im_a: Vec<f64>,
}

impl Factors {
    fn new(table: &CoefficientTable, n: usize) -> Self {
        assert!(n <= table.n_max(), "truncation {n} exceeds table order {}", table.n_max());
        let z = table.grid().zero_index();
        let pick = |f: &dyn Fn(usize) -> f64| (0..=n).map(f).collect::<Vec<f64>>();
        Self {
            re_b: pick(&|k| table.b(k)[z].re),
            im_b: pick(&|k| table.b(k)[z].im),
            re_a: pick(&|k| table.a(k)[z].re),
            im_a: pick(&|k| table.a(k)[z].im),
        }
    }

    /// `(P_b, S_b, P_a, S_a)` at `z`.
    fn eval(&self, z: Complex64) -> [Complex64; 4] {
        let s = |c: &[f64]| alternating_series(c.iter().copied(), z);
        let zp1 = z + 1.0;
        [1.0 + zp1 * s(&self.re_b), s(&self.im_b), 1.0 + zp1 * s(&self.re_a), s(&self.im_a)]
    }

    fn a(&self, z: Complex64) -> Complex64 {
        let [pb, sb, pa, sa] = self.eval(z);
        let zp1 = z + 1.0;
        pb * pa + zp1 * zp1 * sb * sa
    }

    fn b(&self, z: Complex64) -> Complex64 {
        let [pb, sb, pa, sa] = self.eval(z);
        let zp1 = z + 1.0;
        pa.conj() * zp1 * sb - (zp1 * sa).conj() * pb
    }

    /// Ascending coefficients of `a` as a polynomial in `z`.
    fn a_polynomial(&self) -> Vec<f64> {
        let alt = |c: &[f64]| c.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v } else { -v }).collect::<Vec<_>>();
        let one_plus = |c: &[f64]| {
            let mut p = convolve(&[1.0, 1.0], &alt(c));
            p[0] += 1.0;
            p
        };
        let pb = one_plus(&self.re_b);
        let pa = one_plus(&self.re_a);
        let ss = convolve(&convolve(&alt(&self.im_b), &alt(&self.im_a)), &[1.0, 2.0, 1.0]);
        let mut out = convolve(&pb, &pa);
        for (k, v) in ss.into_iter().enumerate() {
            out[k] += v;
        }
        while out.len() > 1 && out[out.len() - 1] == 0.0 {
            out.pop();
        }
        out
    }
}

fn convolve(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `a(ρ)` and `b(ρ)` on a real grid from the first `n + 1` coefficients.
pub fn scattering_coefficients(table: &CoefficientTable, n: usize, rho: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let f = Factors::new(table, n);
    rho.iter()
        .map(|&r| {
            let z = z_of_rho(Complex64::new(r, 0.0));
            (f.a(z), f.b(z))
        })
        .unzip()
}

/// `a(ρ)` anywhere in the closed upper half-plane.
pub fn a_at(table: &CoefficientTable, n: usize, rho: Complex64) -> Complex64 {
    Factors::new(table, n).a(z_of_rho(rho))
}

/// Real ascending coefficients of the truncated `a` as a polynomial in `z`,
/// of degree at most `2n + 2`.
pub fn a_polynomial(table: &CoefficientTable, n: usize) -> Vec<f64> {
    Factors::new(table, n).a_polynomial()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub rho: Complex64,
    pub z: Complex64,
    /// Relative polynomial residual at the root.
    pub residual: f64,
}

/// Counts of roots removed by each stage of the acceptance cascade.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EigenvalueFilterReport {
    pub in_disk: usize,
    pub rejected_residual: usize,
    pub rejected_stability: usize,
    pub rejected_unpaired: usize,
}

/// Zeros of `a` in the upper half-plane.
///
/// Roots of the polynomial inside `|z| < 1 - δ` are kept if their residual
/// is small, if a root within `STABILITY_TOLERANCE` (in `ρ`) persists with
/// `n - 5` terms, and if their mirror `conj z` also survives. Pairs are
/// symmetrized so that the list is exactly closed under `ρ -> -conj ρ`.
pub fn find_eigenvalues(poly: &[f64], table: &CoefficientTable, n: usize) -> Result<(Vec<Eigenvalue>, EigenvalueFilterReport)> {
    let mut report = EigenvalueFilterReport::default();
    if poly.len() < 2 {
        return Ok((Vec::new(), report));
    }
    let in_disk = disk_roots(poly)?;
    report.in_disk = in_disk.len();

    let cpoly: Vec<Complex64> = poly.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let mut candidates = Vec::new();
    for z in in_disk {
        let scale: f64 = poly.iter().enumerate().map(|(k, c)| c.abs() * z.norm().powi(k as i32)).sum();
        let residual = eval(&cpoly, z).norm() / scale.max(f64::MIN_POSITIVE);
        if residual <= RESIDUAL_TOLERANCE {
            candidates.push(Eigenvalue { rho: rho_of_z(z)?, z, residual });
        } else {
            report.rejected_residual += 1;
        }
    }

    let stable: Vec<Eigenvalue> = if n > STABILITY_DROP {
        let coarse = a_polynomial(table, n - STABILITY_DROP);
        let coarse_roots: Vec<Complex64> =
            if coarse.len() < 2 { Vec::new() } else { disk_roots(&coarse)?.into_iter().filter_map(|z| rho_of_z(z).ok()).collect() };
        candidates
            .iter()
            .copied()
            .filter(|e| coarse_roots.iter().any(|r| (r - e.rho).norm() < STABILITY_TOLERANCE))
            .collect()
    } else {
        candidates.clone()
    };
    report.rejected_stability = candidates.len() - stable.len();
    if !candidates.is_empty() && 2 * report.rejected_stability > candidates.len() {
        return Err(Error::UnstableSpectrum { failed: report.rejected_stability, total: candidates.len() });
    }

    let mut out: Vec<Eigenvalue> = Vec::new();
    let mut used = vec![false; stable.len()];
    for i in 0..stable.len() {
        if used[i] {
            continue;
        }
        let e = stable[i];
        if e.z.im.abs() <= 1e-8 {
            used[i] = true;
            let z = Complex64::new(e.z.re, 0.0);
            out.push(Eigenvalue { z, rho: rho_of_z(z)?, residual: e.residual });
            continue;
        }
        let partner = (0..stable.len())
            .filter(|&k| k != i && !used[k])
            .min_by(|&k, &l| (stable[k].z - e.z.conj()).norm().total_cmp(&(stable[l].z - e.z.conj()).norm()));
        match partner {
            Some(k) if (stable[k].z - e.z.conj()).norm() < 1e-6 => {
                used[i] = true;
                used[k] = true;
                let z = (e.z + stable[k].z.conj()) * 0.5;
                let residual = e.residual.max(stable[k].residual);
                out.push(Eigenvalue { z, rho: rho_of_z(z)?, residual });
                out.push(Eigenvalue { z: z.conj(), rho: rho_of_z(z.conj())?, residual });
            }
            _ => {
                used[i] = true;
                report.rejected_unpaired += 1;
            }
        }
    }
    out.retain(|e| e.rho.im > 0.0);
    out.sort_by(|a, b| a.rho.re.total_cmp(&b.rho.re).then(b.rho.im.total_cmp(&a.rho.im)));
    Ok((out, report))
}

fn disk_roots(poly: &[f64]) -> Result<Vec<Complex64>> {
    let cpoly: Vec<Complex64> = poly.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    Ok(polynomial_roots(&cpoly)?.into_iter().filter(|z| z.norm() < 1.0 - DISK_MARGIN).collect())
}

/// `c(ρ_m) = -P_b(z_m) / ((z_m+1) S_a(z_m))`, falling back to the equivalent
/// quotient `(z_m+1) S_b(z_m) / P_a(z_m)` when the first denominator vanishes.
pub fn norming_constants(table: &CoefficientTable, n: usize, eigenvalues: &[Eigenvalue]) -> Result<Vec<Complex64>> {
    let f = Factors::new(table, n);
    eigenvalues
        .iter()
        .map(|e| {
            let [pb, sb, pa, sa] = f.eval(e.z);
            let zp1 = e.z + 1.0;
            let d1 = zp1 * sa;
            if d1.norm() >= NORMING_DENOMINATOR_FLOOR {
                Ok(-pb / d1)
            } else if pa.norm() >= NORMING_DENOMINATOR_FLOOR {
                Ok(zp1 * sb / pa)
            } else {
                Err(Error::DegenerateNormalization { rho: e.rho.to_string(), threshold: NORMING_DENOMINATOR_FLOOR })
            }
        })
        .collect()
}

/// Options for the independent Magnus integrator used as an oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Magnus steps per grid cell.
    pub substeps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { substeps: 2 }
    }
}

/// `a(ρ)`, `b(ρ)` by direct integration of the Zakharov-Shabat system
/// `φ' = [[-iρ, q], [-q, iρ]] φ` from `φ(-a) = (e^{iρa}, 0)` with the fourth
/// order Magnus scheme; `q` at the Gauss points comes from cubic
/// interpolation of the samples.
pub fn oracle_scatter(p: &SampledPotential, rho: &[f64], config: OracleConfig) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = p.grid;
    let m = config.substeps.max(1);
    let q: Vec<Complex64> = p.q.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let h = grid.step() / m as f64;
    let g = 3f64.sqrt() / 6.0;
    // q at the two Gauss points of every sub-step, in order
    let mut gauss = Vec::with_capacity(2 * m * (grid.len() - 1));
    let tables: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..m)
        .map(|s| {
            let t1 = (s as f64 + 0.5 - g) / m as f64;
            let t2 = (s as f64 + 0.5 + g) / m as f64;
            (at_fraction(&q, t1), at_fraction(&q, t2))
        })
        .collect();
    for j in 0..grid.len() - 1 {
        for (q1, q2) in &tables {
            gauss.push((q1[j].re, q2[j].re));
        }
    }
    let a_half = grid.half_width();
    let c = 3f64.sqrt() / 12.0 * h * h;

    rho.iter()
        .map(|&r| {
            let ir = Complex64::new(0.0, r);
            let mut y = [(ir * a_half).exp(), Complex64::new(0.0, 0.0)];
            for &(q1, q2) in &gauss {
                // Ω = h/2 (A1 + A2) + √3/12 h² [A2, A1], with A = [[-iρ, q], [-q, iρ]]
                // [A2, A1] = 2iρ (q2 - q1) [[0, 1], [1, 0]]
                let s = 0.5 * h * (q1 + q2);
                let k = c * 2.0 * (q2 - q1);
                let d = -ir * h;
                let off12 = Complex64::new(s, 0.0) + ir * k;
                let off21 = Complex64::new(-s, 0.0) + ir * k;
                let theta = (d * d + off12 * off21).sqrt();
                let (ch, sh) = if theta.norm() < 1e-8 {
                    (1.0 + theta * theta / 2.0, 1.0 + theta * theta / 6.0)
                } else {
                    (theta.cosh(), theta.sinh() / theta)
                };
                let y0 = y[0] * (ch + sh * d) + y[1] * (sh * off12);
                let y1 = y[0] * (sh * off21) + y[1] * (ch - sh * d);
                y = [y0, y1];
            }
            ((y[0] * (ir * a_half).exp()), (y[1] * (-ir * a_half).exp()))
        })
        .unzip()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub rho: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub norming: Vec<Complex64>,
    pub n_terms: usize,
    pub potential_desc: String,
}

#[derive(Serialize, Deserialize)]
struct Pair {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ScatteringFile {
    rho: Vec<f64>,
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
    eigenvalues: Vec<Pair>,
    norming: Vec<Pair>,
    n_terms: usize,
    potential_desc: String,
}

impl ScatteringData {
    /// `R(ρ_k) = b / a`.
    pub fn reflection(&self, k: usize) -> Result<Complex64> {
        let a = self.a[k];
        if a.norm() < DIVISION_FLOOR {
            return Err(Error::DivisionNearZero { value: a.norm() });
        }
        Ok(self.b[k] / a)
    }

    /// `T(ρ_k) = 1 / a`.
    pub fn transmission(&self, k: usize) -> Result<Complex64> {
        let a = self.a[k];
        if a.norm() < DIVISION_FLOOR {
            return Err(Error::DivisionNearZero { value: a.norm() });
        }
        Ok(1.0 / a)
    }

    /// `max ||a|² + |b|² - 1|` over the grid.
    pub fn unitarity_defect(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ScatteringFile {
            rho: self.rho.clone(),
            a_re: self.a.iter().map(|v| v.re).collect(),
            a_im: self.a.iter().map(|v| v.im).collect(),
            b_re: self.b.iter().map(|v| v.re).collect(),
            b_im: self.b.iter().map(|v| v.im).collect(),
            eigenvalues: self.eigenvalues.iter().map(|e| Pair { re: e.rho.re, im: e.rho.im }).collect(),
            norming: self.norming.iter().map(|c| Pair { re: c.re, im: c.im }).collect(),
            n_terms: self.n_terms,
            potential_desc: self.potential_desc.clone(),
        };
        crate::json::to_string(&file)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ScatteringFile = serde_json::from_str(text)?;
        let k = f.rho.len();
        for len in [f.a_re.len(), f.a_im.len(), f.b_re.len(), f.b_im.len()] {
            if len != k {
                return Err(Error::LengthMismatch { expected: k, found: len });
            }
        }
        if f.eigenvalues.len() != f.norming.len() {
            return Err(Error::MissingSpectrumData { eigenvalues: f.eigenvalues.len(), constants: f.norming.len() });
        }
        let eigenvalues = f
            .eigenvalues
            .iter()
            .map(|p| {
                let rho = Complex64::new(p.re, p.im);
                if !(p.im > 0.0) {
                    return Err(Error::InvalidInput(format!("eigenvalue {rho} is not in the upper half-plane")));
                }
                Ok(Eigenvalue { rho, z: z_of_rho(rho), residual: f64::NAN })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rho: f.rho,
            a: f.a_re.iter().zip(&f.a_im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
            b: f.b_re.iter().zip(&f.b_im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
            eigenvalues,
            norming: f.norming.iter().map(|p| Complex64::new(p.re, p.im)).collect(),
            n_terms: f.n_terms,
            potential_desc: f.potential_desc,
        })
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        Self::from_json(&text)
    }

    /// `rho,re_a,im_a,re_b,im_b` per grid point.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["rho", "re_a", "im_a", "re_b", "im_b"])?;
        for ((r, a), b) in self.rho.iter().zip(&self.a).zip(&self.b) {
            w.write_record([r, &a.re, &a.im, &b.re, &b.im].map(|v| format!("{v:.17e}")))?;
        }
        w.flush().map_err(|source| Error::Io { path: "<csv>".into(), source })?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DirectConfig {
    pub grid: UniformGrid,
    pub n_max: usize,
    /// Fixed truncation order; chosen from the sum rule when `None`.
    pub n_terms: Option<usize>,
    pub rho: Vec<f64>,
}

impl DirectConfig {
    pub fn new(grid: UniformGrid) -> Self {
        Self {
            grid,
            n_max: crate::coeffs::DEFAULT_N_MAX,
            n_terms: None,
            rho: default_rho_grid(DEFAULT_RHO_MAX, DEFAULT_RHO_COUNT),
        }
    }
}

/// Everything the forward pipeline produces.
#[derive(Debug, Clone)]
pub struct DirectSolution {
    pub potential: SampledPotential,
    pub table: CoefficientTable,
    pub truncation: TruncationReport,
    pub n_terms: usize,
    pub data: ScatteringData,
    pub filter_report: EigenvalueFilterReport,
}

pub fn solve_direct(spec: &PotentialSpec, config: &DirectConfig) -> Result<DirectSolution> {
    let potential = evaluate(spec, config.grid)?;
    let basis = compute_basis(&potential)?;
    let n_max = config.n_max.max(config.n_terms.unwrap_or(0));
    let table = compute_coefficients(&basis, &potential, n_max)?;
    let truncation = select_truncation_direct(&table, &potential);
    let n = config.n_terms.unwrap_or(truncation.chosen_n);
    let (a, b) = scattering_coefficients(&table, n, &config.rho);
    let poly = a_polynomial(&table, n);
    let (eigenvalues, filter_report) = find_eigenvalues(&poly, &table, n)?;
    let norming = norming_constants(&table, n, &eigenvalues)?;
    let data = ScatteringData {
        rho: config.rho.clone(),
        a,
        b,
        eigenvalues,
        norming,
        n_terms: n,
        potential_desc: potential.description.clone(),
    };
    Ok(DirectSolution { potential, table, truncation, n_terms: n, data, filter_report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Preset;
    use std::f64::consts::PI;

    fn solve(preset: Preset, points: usize, rho_count: usize) -> DirectSolution {
        let mut cfg = DirectConfig::new(UniformGrid::new(15.0, points).unwrap());
        cfg.rho = default_rho_grid(30.0, rho_count);
        solve_direct(&preset.into(), &cfg).unwrap()
    }

    #[test]
    fn zero_potential() {
        let s = solve(Preset::Zero, 2001, 101);
        assert!(s.data.a.iter().all(|a| (a - 1.0).norm() < 1e-15));
        assert!(s.data.b.iter().all(|b| b.norm() < 1e-15));
        assert_eq!(a_polynomial(&s.table, 0), vec![1.0]);
        assert!(s.data.eigenvalues.is_empty());
        let (a, b) = oracle_scatter(&s.potential, &[-3.0, 0.0, 2.5], OracleConfig::default());
        assert!(a.iter().all(|v| (v - 1.0).norm() < 1e-11));
        assert!(b.iter().all(|v| v.norm() < 1e-11));
    }

    #[test]
    fn polynomial_matches_direct_evaluation() {
        let s = solve(Preset::example3(), 4001, 11);
        let n = s.n_terms;
        let poly: Vec<Complex64> = a_polynomial(&s.table, n).into_iter().map(|c| Complex64::new(c, 0.0)).collect();
        assert!(poly.len() <= 2 * n + 3);
        for k in 0..50 {
            let r = -30.0 + 60.0 * (k as f64 * 0.6180339887).fract();
            let z = z_of_rho(Complex64::new(r, 0.0));
            let direct = a_at(&s.table, n, Complex64::new(r, 0.0));
            assert!((eval(&poly, z) - direct).norm() < 1e-10, "rho={r}");
        }
    }

    #[test]
    fn example1_eigenvalue_and_reflectionless() {
        let s = solve(Preset::example1(), 4001, 401);
        assert_eq!(s.data.eigenvalues.len(), 1, "{:?}", s.data.eigenvalues);
        let e = s.data.eigenvalues[0].rho;
        assert!((e - Complex64::new(0.0, PI / 2.0)).norm() < 1e-8, "{e}");
        assert!(s.data.b.iter().all(|b| b.norm() < 1e-6));
    }

    #[test]
    fn spps_agrees_with_oracle() {
        let s = solve(Preset::example3(), 4001, 201);
        let (a, b) = oracle_scatter(&s.potential, &s.data.rho, OracleConfig::default());
        for k in 0..s.data.rho.len() {
            assert!((a[k] - s.data.a[k]).norm() < 1e-5, "a at {}", s.data.rho[k]);
            assert!((b[k] - s.data.b[k]).norm() < 1e-5, "b at {}", s.data.rho[k]);
        }
    }

    #[test]
    fn parity_relations() {
        let s = solve(Preset::example3(), 4001, 400);
        let n = s.n_terms;
        for k in 0..s.data.rho.len() {
            let m = s.data.rho.len() - 1 - k;
            assert!((s.data.b[m] - s.data.b[k].conj()).norm() < 1e-10);
        }
        for k in 0..50 {
            let t = k as f64 * 0.7548776662;
            let rho = Complex64::new(10.0 * (t.fract() - 0.5), 5.0 * (1.3 * t).fract());
            let lhs = a_at(&s.table, n, -rho.conj());
            assert!((lhs - a_at(&s.table, n, rho).conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let s = solve(Preset::example3(), 2001, 21);
        let text = s.data.to_json().unwrap();
        let back = ScatteringData::from_json(&text).unwrap();
        assert_eq!(back.rho, s.data.rho);
        assert_eq!(back.a, s.data.a);
        assert_eq!(back.b, s.data.b);
        assert_eq!(back.norming, s.data.norming);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn reflection_guards_small_a() {
        let data = ScatteringData {
            rho: vec![0.0],
            a: vec![Complex64::new(1e-13, 0.0)],
            b: vec![Complex64::new(1.0, 0.0)],
            eigenvalues: vec![],
            norming: vec![],
            n_terms: 0,
            potential_desc: String::new(),
        };
        assert!(matches!(data.reflection(0), Err(Error::DivisionNearZero { .. })));
        assert!(matches!(data.transmission(0), Err(Error::DivisionNearZero { .. })));
    }

    #[test]
    fn rho_grid_endpoints() {
        let g = default_rho_grid(30.0, 4000);
        assert_eq!(g.len(), 4000);
        assert_eq!(g[0], -30.0);
        assert!((g[3999] - 30.0).abs() < 1e-12);
    }
}
