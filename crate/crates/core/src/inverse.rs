//! Recovery of `q` from scattering data.
//!
//! At every node `x` the truncated series for `φ`, `ψ` are substituted into
//! `φ(ρ) = b(ρ) ψ(ρ) + a(ρ) ψ~(ρ)` on the real collocation points and into
//! `φ(ρ_m) = c_m ψ(ρ_m)` at the eigenvalues. Real and imaginary parts give an
//! overdetermined real system for
//! `X = ({Re b_n}, {Im b_n}, {Re a_n}, {Im a_n})`, `n = 0..=N`. The
//! collocation rows are solved in the least-squares sense with the
//! eigenvalue rows imposed exactly: they are identities of the data, and as
//! four rows among thousands they would otherwise carry almost no weight.
//! The potential follows from `b_0` (or `a_0`) and its derivative.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::direct::ScatteringData;
use crate::error::{Error, Result};
use crate::numerics::diff::{differentiate_real, differentiate_real_high_order};
use crate::numerics::{constrained_least_squares_solve, nested_least_squares, Mat, UniformGrid};

/// `|denominator|` below this on the inner window aborts the recovery.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;
/// Fraction of the grid, centred at 0, on which recovery is checked and reported.
pub const INNER_FRACTION: f64 = 0.9;

/// Weight of the eigenvalue rows in the truncation search, where they are
/// imposed by weighting instead of exactly.
pub const CONSTRAINT_WEIGHT: f64 = 1e6;

/// Candidates whose `ε(N)` is within this factor of the smallest are treated
/// as tied, and the smallest such `N` wins. Past the optimum `ε(N)` sits on a
/// plateau set by the accuracy of the data, where its variations are noise.
pub const SELECTION_TIE_FACTOR: f64 = 2.0;

pub fn default_candidates() -> Vec<usize> {
    (5..=100).step_by(5).collect()
}

#[derive(Debug, Clone)]
pub struct InverseConfig {
    /// Nodes at which the systems are solved.
    pub grid: UniformGrid,
    /// Number of real collocation points, taken evenly from the data grid;
    /// all of them when `None`.
    pub k: Option<usize>,
    /// Fixed truncation order; chosen by [`select_truncation_inverse`] when `None`.
    pub n_terms: Option<usize>,
    pub candidates: Vec<usize>,
    /// Nodes of the coarser grid used for the truncation search.
    pub selection_points: usize,
}

impl InverseConfig {
    pub fn new(grid: UniformGrid) -> Self {
        Self { grid, k: None, n_terms: None, candidates: default_candidates(), selection_points: 81 }
    }
}

/// `count` indices spread evenly over `0..len`, endpoints included.
pub fn spread_indices(len: usize, count: usize) -> Vec<usize> {
    if count >= len {
        return (0..len).collect();
    }
    if count <= 1 {
        return vec![len / 2];
    }
    (0..count).map(|i| ((i as f64) * (len - 1) as f64 / (count - 1) as f64).round() as usize).collect()
}

/// Column order of the unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `[Re b_0..N, Im b_0..N, Re a_0..N, Im a_0..N]`.
    Blocked,
    /// `[Re b_0, Im b_0, Re a_0, Im a_0, Re b_1, ...]`, so that the problem
    /// for a smaller `N` is a leading column block.
    Interleaved,
}

impl Layout {
    fn column(self, group: usize, n: usize, order: usize) -> usize {
        match self {
            Layout::Blocked => group * (order + 1) + n,
            Layout::Interleaved => 4 * n + group,
        }
    }
}

const RE_B: usize = 0;
const IM_B: usize = 1;
const RE_A: usize = 2;
const IM_A: usize = 3;

/// The `x`-independent part of the system: collocation points and the
/// factor tables `(z+1)(-z)^n`.
#[derive(Debug, Clone)]
pub struct SystemFactors {
    order: usize,
    rho: Vec<f64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    /// `(z_k+1)(-z_k)^n`, row-major `k * (order+1) + n`.
    t: Vec<Complex64>,
    eig_rho: Vec<Complex64>,
    eig_c: Vec<Complex64>,
    eig_t: Vec<Complex64>,
}

impl SystemFactors {
    pub fn new(sd: &ScatteringData, rho_indices: &[usize], order: usize) -> Result<Self> {
        if sd.eigenvalues.len() != sd.norming.len() {
            return Err(Error::MissingSpectrumData { eigenvalues: sd.eigenvalues.len(), constants: sd.norming.len() });
        }
        let powers = |z: Complex64| -> Vec<Complex64> {
            let w = -z;
            let mut p = z + 1.0;
            (0..=order)
                .map(|_| {
                    let v = p;
                    p *= w;
                    v
                })
                .collect()
        };
        let mut rho = Vec::with_capacity(rho_indices.len());
        let mut a = Vec::with_capacity(rho_indices.len());
        let mut b = Vec::with_capacity(rho_indices.len());
        let mut t = Vec::with_capacity(rho_indices.len() * (order + 1));
        for &k in rho_indices {
            let r = sd.rho[k];
            rho.push(r);
            a.push(sd.a[k]);
            b.push(sd.b[k]);
            t.extend(powers(crate::jost::z_of_rho(Complex64::new(r, 0.0))));
        }
        let eig_rho: Vec<Complex64> = sd.eigenvalues.iter().map(|e| e.rho).collect();
        let eig_t = eig_rho.iter().flat_map(|&r| powers(crate::jost::z_of_rho(r))).collect();
        Ok(Self { order, rho, a, b, t, eig_rho, eig_c: sd.norming.clone(), eig_t })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Rows from the real collocation points; the eigenvalue rows follow.
    pub fn collocation_rows(&self) -> usize {
        4 * self.rho.len()
    }

    pub fn rows(&self) -> usize {
        4 * (self.rho.len() + self.eig_rho.len())
    }

    /// `A` and `B` at `x` for truncation `n <= order`.
    pub fn assemble(&self, x: f64, n: usize, layout: Layout) -> (Mat<f64>, Vec<f64>) {
        assert!(n <= self.order, "truncation {n} exceeds factor order {}", self.order);
        let cols = 4 * (n + 1);
        let mut a = Mat::<f64>::zeros(self.rows(), cols);
        let mut rhs = vec![0.0; self.rows()];
        let col = |g: usize, k: usize| layout.column(g, k, n);
        let w = self.order + 1;

        for (k, &r) in self.rho.iter().enumerate() {
            let em = Complex64::from_polar(1.0, -r * x);
            let ep = em.conj();
            let (ak, bk) = (self.a[k], self.b[k]);
            let p2 = -ak * em;
            let p3 = bk * ep;
            let row = 4 * k;
            let s1 = (ak - 1.0) * em;
            let s2 = p3;
            rhs[row] = s1.re;
            rhs[row + 1] = s1.im;
            rhs[row + 2] = s2.re;
            rhs[row + 3] = s2.im;
            for (m, &t) in self.t[k * w..k * w + n + 1].iter().enumerate() {
                let tc = t.conj();
                let c_reb = em * t;
                let c_rea = p2 * tc;
                let c_ima = p3 * t;
                // (s1): Re b, Re a, Im a
                put(&mut a, row, col(RE_B, m), c_reb);
                put(&mut a, row, col(RE_A, m), c_rea);
                put(&mut a, row, col(IM_A, m), c_ima);
                // (s2): Im b, Re a, Im a
                put(&mut a, row + 2, col(IM_B, m), c_reb);
                put(&mut a, row + 2, col(RE_A, m), -c_ima);
                put(&mut a, row + 2, col(IM_A, m), c_rea);
            }
        }

        let base = 4 * self.rho.len();
        for (e, (&r, &c)) in self.eig_rho.iter().zip(&self.eig_c).enumerate() {
            // e^{∓iρ_m x} grow or decay exponentially; scale both equations to unit size
            let em = (-Complex64::i() * r * x).exp();
            let cp = c * (Complex64::i() * r * x).exp();
            let scale = em.norm().max(cp.norm());
            let (em, cp) = (em / scale, cp / scale);
            let row = base + 4 * e;
            let s3 = -em;
            rhs[row] = s3.re;
            rhs[row + 1] = s3.im;
            rhs[row + 2] = cp.re;
            rhs[row + 3] = cp.im;
            for (m, &t) in self.eig_t[e * w..e * w + n + 1].iter().enumerate() {
                put(&mut a, row, col(RE_B, m), em * t);
                put(&mut a, row, col(IM_A, m), cp * t);
                put(&mut a, row + 2, col(IM_B, m), em * t);
                put(&mut a, row + 2, col(RE_A, m), -cp * t);
            }
        }
        (a, rhs)
    }
}

/// Writes the real and imaginary parts of `v` into rows `row`, `row + 1`.
fn put(a: &mut Mat<f64>, row: usize, col: usize, v: Complex64) {
    a[(row, col)] = v.re;
    a[(row + 1, col)] = v.im;
}

/// `A` and `B` at `x` for the full data set, in the blocked column order.
pub fn assemble_system(x: f64, sd: &ScatteringData, n: usize) -> Result<(Mat<f64>, Vec<f64>)> {
    let all: Vec<usize> = (0..sd.rho.len()).collect();
    Ok(SystemFactors::new(sd, &all, n)?.assemble(x, n, Layout::Blocked))
}

#[derive(Debug, Clone)]
pub struct RecoveredCoefficients {
    pub grid: UniformGrid,
    pub n_terms: usize,
    /// Per node, the solution in the blocked order.
    pub x: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    /// `||B||` per node, for relative residuals.
    pub rhs_norm: Vec<f64>,
    pub condition: Vec<f64>,
}

impl RecoveredCoefficients {
    fn group(&self, g: usize) -> Vec<f64> {
        self.x.iter().map(|v| v[g * (self.n_terms + 1)]).collect()
    }

    pub fn re_b0(&self) -> Vec<f64> {
        self.group(RE_B)
    }

    pub fn im_b0(&self) -> Vec<f64> {
        self.group(IM_B)
    }

    pub fn re_a0(&self) -> Vec<f64> {
        self.group(RE_A)
    }

    pub fn im_a0(&self) -> Vec<f64> {
        self.group(IM_A)
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residual.iter().zip(&self.rhs_norm).map(|(r, b)| if *b > 0.0 { r / b } else { *r }).fold(0.0, f64::max)
    }
}

/// Solves the system independently at every node of `cfg.grid`, the
/// eigenvalue rows as equality constraints.
pub fn solve_all(sd: &ScatteringData, cfg: &InverseConfig, n: usize) -> Result<RecoveredCoefficients> {
    let indices = spread_indices(sd.rho.len(), cfg.k.unwrap_or(sd.rho.len()));
    let factors = SystemFactors::new(sd, &indices, n)?;
    check_shape(&factors, n)?;
    let grid = cfg.grid;
    let solved: Vec<Result<(Vec<f64>, f64, f64, f64)>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let x = grid.x(j);
            let (a, b) = factors.assemble(x, n, Layout::Blocked);
            let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            if bn == 0.0 {
                return Ok((vec![0.0; a.ncols()], 0.0, 0.0, 1.0));
            }
            let split = factors.collocation_rows();
            let (ar, ae) = (a.subrows(0, split), a.subrows(split, a.nrows() - split));
            let s = constrained_least_squares_solve(ar, &b[..split], ae, &b[split..])
                .map_err(|e| Error::SolveFailedAt { x, source: Box::new(e) })?;
            Ok((s.x, s.residual_norm, bn, s.condition_estimate))
        })
        .collect();
    let mut out = RecoveredCoefficients {
        grid,
        n_terms: n,
        x: Vec::with_capacity(grid.len()),
        residual: Vec::with_capacity(grid.len()),
        rhs_norm: Vec::with_capacity(grid.len()),
        condition: Vec::with_capacity(grid.len()),
    };
    for r in solved {
        let (x, res, bn, cond) = r?;
        out.x.push(x);
        out.residual.push(res);
        out.rhs_norm.push(bn);
        out.condition.push(cond);
    }
    Ok(out)
}

fn check_shape(factors: &SystemFactors, n: usize) -> Result<()> {
    let (rows, cols) = (factors.rows(), 4 * (n + 1));
    if rows < cols {
        return Err(Error::Underdetermined { rows, cols });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseTruncation {
    pub candidates: Vec<usize>,
    /// `max_x |d/dx ((1+Re b0)(1+Re a0) + Im b0 Im a0)|` per candidate.
    pub eps: Vec<f64>,
    pub chosen_n: usize,
}

/// Picks `N` minimizing the variation of the Wronskian at `ρ = i/2`.
///
/// All candidates are solved at once per node from a single QR of the
/// interleaved system, on a grid of `cfg.selection_points` nodes; the
/// maximum is taken over its inner window.
pub fn select_truncation_inverse(sd: &ScatteringData, cfg: &InverseConfig) -> Result<InverseTruncation> {
    let mut candidates = cfg.candidates.clone();
    candidates.sort_unstable();
    candidates.dedup();
    let top = *candidates.last().ok_or_else(|| Error::InvalidInput("empty candidate list".into()))?;
    let indices = spread_indices(sd.rho.len(), cfg.k.unwrap_or(sd.rho.len()));
    let factors = SystemFactors::new(sd, &indices, top)?;
    check_shape(&factors, top)?;

    let points = cfg.selection_points.max(5) | 1;
    let grid = UniformGrid::new(cfg.grid.half_width(), points)?;
    let sizes: Vec<usize> = candidates.iter().map(|n| 4 * (n + 1)).collect();
    // per node, per candidate: (Re b0, Im b0, Re a0, Im a0)
    let rows: Vec<Result<Vec<Option<[f64; 4]>>>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let (a, b) = factors.assemble(grid.x(j), top, Layout::Interleaved);
            if b.iter().all(|v| *v == 0.0) {
                return Ok(vec![Some([0.0; 4]); sizes.len()]);
            }
            let (a, b) = constraints_first(&factors, &a, &b);
            let sols = nested_least_squares(a.as_ref(), &b, &sizes)?;
            Ok(sols.into_iter().map(|s| s.map(|v| [v[0], v[1], v[2], v[3]])).collect())
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let inner = grid.inner_range(INNER_FRACTION);
    let eps: Vec<f64> = (0..candidates.len())
        .map(|c| {
            let w: Option<Vec<f64>> = rows
                .iter()
                .map(|r| r[c].map(|[rb, ib, ra, ia]| (1.0 + rb) * (1.0 + ra) + ib * ia))
                .collect();
            match w {
                Some(w) => {
                    let dw = differentiate_real(&w, grid.step());
                    dw[inner.clone()].iter().map(|v| v.abs()).fold(0.0, f64::max)
                }
                None => f64::INFINITY,
            }
        })
        .collect();
    let floor = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let best = eps.iter().position(|&e| e <= SELECTION_TIE_FACTOR * floor).unwrap_or(0);
    Ok(InverseTruncation { chosen_n: candidates[best], candidates, eps })
}

/// Moves the eigenvalue rows to the top and scales them by
/// [`CONSTRAINT_WEIGHT`], so that an unpivoted QR treats them as constraints.
fn constraints_first(factors: &SystemFactors, a: &Mat<f64>, b: &[f64]) -> (Mat<f64>, Vec<f64>) {
    let split = factors.collocation_rows();
    let extra = a.nrows() - split;
    let row = |i: usize| if i < extra { (split + i, CONSTRAINT_WEIGHT) } else { (i - extra, 1.0) };
    let m = Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let (r, w) = row(i);
        w * a[(r, j)]
    });
    let rhs = (0..a.nrows())
        .map(|i| {
            let (r, w) = row(i);
            w * b[r]
        })
        .collect();
    (m, rhs)
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveredPotential {
    pub x: Vec<f64>,
    pub q_from_b0: Vec<f64>,
    pub q_from_a0: Vec<f64>,
    /// At each node, the estimate whose denominator is larger in modulus.
    /// Both vanish somewhere for some potentials, and each formula loses
    /// accuracy near its own zeros.
    pub chosen: Vec<f64>,
    /// `max |q_from_b0 - q_from_a0|` on the inner window.
    pub discrepancy: f64,
}

pub fn recover_potential(c: &RecoveredCoefficients) -> Result<RecoveredPotential> {
    let grid = c.grid;
    let h = grid.step();
    let (rb, ib, ra, ia) = (c.re_b0(), c.im_b0(), c.re_a0(), c.im_a0());
    let diff = differentiate_real_high_order;
    let (drb, dib, dra, dia) =
        (diff(&rb, h), diff(&ib, h), diff(&ra, h), diff(&ia, h));
    let inner = grid.inner_range(INNER_FRACTION);
    let n = grid.len();
    let mut q_b = vec![0.0; n];
    let mut q_a = vec![0.0; n];
    let mut chosen = vec![0.0; n];
    for j in 0..n {
        let den_b = ib[j] - rb[j] - 1.0;
        let den_a = 1.0 + ra[j] + ia[j];
        if inner.contains(&j) {
            for den in [den_b, den_a] {
                if den.abs() < DENOMINATOR_FLOOR {
                    return Err(Error::DenominatorNearZero { x: grid.x(j), value: den });
                }
            }
        }
        q_b[j] = (0.5 * (1.0 + rb[j] + ib[j]) + drb[j] + dib[j]) / den_b + 0.5;
        q_a[j] = (-0.5 * (1.0 + ra[j] - ia[j]) + dra[j] - dia[j]) / den_a + 0.5;
        chosen[j] = if den_b.abs() >= den_a.abs() { q_b[j] } else { q_a[j] };
    }
    if inner.clone().any(|j| !(q_b[j].is_finite() && q_a[j].is_finite())) {
        return Err(Error::non_finite("recovered potential"));
    }
    let discrepancy = inner.map(|j| (q_b[j] - q_a[j]).abs()).fold(0.0, f64::max);
    Ok(RecoveredPotential { x: grid.nodes(), chosen, q_from_b0: q_b, q_from_a0: q_a, discrepancy })
}

impl RecoveredPotential {
    /// `max |chosen - q|` over the inner window.
    pub fn max_error<F: Fn(f64) -> f64>(&self, grid: &UniformGrid, q: F) -> f64 {
        grid.inner_range(INNER_FRACTION).map(|j| (self.chosen[j] - q(self.x[j])).abs()).fold(0.0, f64::max)
    }

    /// Writes `x,q_recovered,q_from_a0,residual`.
    pub fn write_csv<W: Write>(&self, coeffs: &RecoveredCoefficients, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "q_recovered", "q_from_a0", "residual"])?;
        for j in 0..self.x.len() {
            w.write_record(
                [self.x[j], self.chosen[j], self.q_from_a0[j], coeffs.residual[j]].map(|v| format!("{v:.17e}")),
            )?;
        }
        w.flush().map_err(|source| Error::Io { path: "<csv>".into(), source })?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseSummary {
    pub n_terms: usize,
    pub candidates: Vec<usize>,
    pub eps: Vec<f64>,
    pub k: usize,
    pub eigenvalues: usize,
    pub rows: usize,
    pub cols: usize,
    pub max_residual: f64,
    pub max_relative_residual: f64,
    pub max_condition: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone)]
pub struct InverseSolution {
    pub coefficients: RecoveredCoefficients,
    pub potential: RecoveredPotential,
    pub truncation: Option<InverseTruncation>,
    pub summary: InverseSummary,
}

/// Chooses `N` (unless fixed), solves at every node and recovers `q`.
pub fn solve_inverse(sd: &ScatteringData, cfg: &InverseConfig) -> Result<InverseSolution> {
    let truncation = match cfg.n_terms {
        Some(_) => None,
        None => Some(select_truncation_inverse(sd, cfg)?),
    };
    let n = cfg.n_terms.or(truncation.as_ref().map(|t| t.chosen_n)).unwrap_or(0);
    let coefficients = solve_all(sd, cfg, n)?;
    let potential = recover_potential(&coefficients)?;
    let k = spread_indices(sd.rho.len(), cfg.k.unwrap_or(sd.rho.len())).len();
    let summary = InverseSummary {
        n_terms: n,
        candidates: truncation.as_ref().map(|t| t.candidates.clone()).unwrap_or_default(),
        eps: truncation.as_ref().map(|t| t.eps.clone()).unwrap_or_default(),
        k,
        eigenvalues: sd.eigenvalues.len(),
        rows: 4 * (k + sd.eigenvalues.len()),
        cols: 4 * (n + 1),
        max_residual: coefficients.residual.iter().copied().fold(0.0, f64::max),
        max_relative_residual: coefficients.max_relative_residual(),
        max_condition: coefficients.condition.iter().copied().fold(0.0, f64::max),
        discrepancy: potential.discrepancy,
    };
    Ok(InverseSolution { coefficients, potential, truncation, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::{default_rho_grid, solve_direct, DirectConfig};
    use crate::potential::Preset;

    fn trivial_data(k: usize) -> ScatteringData {
        let rho = default_rho_grid(30.0, k);
        ScatteringData {
            a: vec![Complex64::new(1.0, 0.0); k],
            b: vec![Complex64::new(0.0, 0.0); k],
            rho,
            eigenvalues: vec![],
            norming: vec![],
            n_terms: 0,
            potential_desc: "zero".into(),
        }
    }

    #[test]
    fn trivial_data_gives_zero_potential() {
        let sd = trivial_data(200);
        let mut cfg = InverseConfig::new(UniformGrid::new(15.0, 101).unwrap());
        cfg.candidates = vec![5, 10, 15];
        let s = solve_inverse(&sd, &cfg).unwrap();
        assert_eq!(s.summary.n_terms, 5);
        assert!(s.truncation.unwrap().eps.iter().all(|&e| e == 0.0));
        assert!(s.coefficients.x.iter().flatten().all(|&v| v == 0.0));
        assert!(s.potential.chosen.iter().chain(&s.potential.q_from_a0).all(|&q| q == 0.0));
        let (_, b) = assemble_system(0.3, &sd, 5).unwrap();
        assert!(b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_follows_data() {
        let sd = trivial_data(100);
        let (a, b) = assemble_system(1.0, &sd, 7).unwrap();
        assert_eq!(a.shape(), (400, 32));
        assert_eq!(b.len(), 400);
    }

    #[test]
    fn missing_norming_constants_are_rejected() {
        let mut sd = trivial_data(10);
        sd.eigenvalues.push(crate::direct::Eigenvalue {
            rho: Complex64::new(0.0, 1.0),
            z: crate::jost::z_of_rho(Complex64::new(0.0, 1.0)),
            residual: 0.0,
        });
        assert!(matches!(assemble_system(0.0, &sd, 3), Err(Error::MissingSpectrumData { .. })));
    }

    #[test]
    fn layouts_hold_the_same_system() {
        let mut cfg = DirectConfig::new(UniformGrid::new(15.0, 2001).unwrap());
        cfg.rho = default_rho_grid(30.0, 60);
        let d = solve_direct(&Preset::example3().into(), &cfg).unwrap();
        let idx: Vec<usize> = (0..60).collect();
        let f = SystemFactors::new(&d.data, &idx, 6).unwrap();
        let (ab, bb) = f.assemble(0.7, 6, Layout::Blocked);
        let (ai, bi) = f.assemble(0.7, 6, Layout::Interleaved);
        assert_eq!(bb, bi);
        for g in 0..4 {
            for n in 0..=6 {
                for r in 0..f.rows() {
                    assert_eq!(ab[(r, g * 7 + n)], ai[(r, 4 * n + g)]);
                }
            }
        }
    }

    #[test]
    fn exact_coefficients_satisfy_the_system() {
        // forward coefficients leave only the truncation residual, which shrinks with N
        let grid = UniformGrid::new(15.0, 4001).unwrap();
        let mut cfg = DirectConfig::new(grid);
        cfg.rho = default_rho_grid(30.0, 400);
        let d = solve_direct(&Preset::example3().into(), &cfg).unwrap();
        assert_eq!(d.data.eigenvalues.len(), 2);
        let relative = |x: f64, n: usize| {
            let j = grid.nearest_index(x);
            let (a, b) = assemble_system(grid.x(j), &d.data, n).unwrap();
            let mut xv = vec![0.0; 4 * (n + 1)];
            for k in 0..=n {
                xv[k] = d.table.b(k)[j].re;
                xv[n + 1 + k] = d.table.b(k)[j].im;
                xv[2 * (n + 1) + k] = d.table.a(k)[j].re;
                xv[3 * (n + 1) + k] = d.table.a(k)[j].im;
            }
            let r = crate::numerics::lstsq::residual_norm(a.as_ref(), &xv, &b);
            r / b.iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        for x in [0.0, 2.0] {
            assert!(relative(x, 120) < 1e-5, "x={x}");
        }
        let r: Vec<f64> = [20, 40, 80, 120].iter().map(|&n| relative(-3.0, n)).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    }

    #[test]
    fn spread_indices_cover_the_ends() {
        assert_eq!(spread_indices(10, 3), vec![0, 5, 9]);
        assert_eq!(spread_indices(4, 10), vec![0, 1, 2, 3]);
        assert_eq!(spread_indices(4000, 1000).len(), 1000);
    }
}
