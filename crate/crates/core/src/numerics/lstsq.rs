//! Dense real least squares backed by faer's Householder QR.

use faer::linalg::solvers::{ColPivQr, Llt, Qr, Solve, SolveLstsq};
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Diagonal entries of `R` below this fraction of the largest are treated as
/// numerically zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LeastSquaresSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    /// `max |R_ii| / min |R_ii|` of the column-pivoted factor.
    pub condition_estimate: f64,
}

/// Minimizer of `||A x - b||_2` through a column-pivoted QR factorization.
pub fn least_squares_solve(a: MatRef<'_, f64>, b: &[f64]) -> Result<LeastSquaresSolution> {
    let (m, n) = a.shape();
    if n == 0 || m < n {
        return Err(Error::Underdetermined { rows: m, cols: n });
    }
    assert_eq!(b.len(), m, "right-hand side length");

    let qr = ColPivQr::new(a);
    let r = qr.R();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().copied().fold(0.0, f64::max);
    let threshold = RANK_TOLERANCE * largest;
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, &d)| !(d > threshold)) {
        return Err(Error::RankDeficient { index, value, threshold });
    }
    let smallest = diag.iter().copied().fold(f64::INFINITY, f64::min);

    let rhs = Mat::from_fn(m, 1, |i, _| b[i]);
    let sol = qr.solve_lstsq(rhs.as_ref());
    let x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("least-squares solution"));
    }

    Ok(LeastSquaresSolution { residual_norm: residual_norm(a, &x, b), condition_estimate: largest / smallest, x })
}

/// Above this condition estimate [`tall_least_squares_solve`] abandons the
/// Gram matrix for a Householder reduction.
pub const GRAM_CONDITION_LIMIT: f64 = 1e6;

/// Least squares for tall, well-conditioned systems.
///
/// Cholesky factor of `A^T A` with one step of refinement on the residual
/// (corrected semi-normal equations), which matches Householder accuracy
/// while `cond(A)^2 u` stays small. The condition estimate and rank check
/// come from a column-pivoted QR of the `n x n` triangular factor, which
/// has the same singular values as `A`. Systems whose estimate exceeds
/// [`GRAM_CONDITION_LIMIT`], or whose Gram matrix is not numerically
/// positive definite, are first reduced by an unpivoted Householder QR of
/// `[A | b]` and then handed to [`least_squares_solve`] at size `n x n`.
pub fn tall_least_squares_solve(a: MatRef<'_, f64>, b: &[f64]) -> Result<LeastSquaresSolution> {
    let (m, n) = a.shape();
    if n == 0 || m < n {
        return Err(Error::Underdetermined { rows: m, cols: n });
    }
    assert_eq!(b.len(), m, "right-hand side length");
    semi_normal(a, b, None)
}

/// Minimizer `y` of `||A Z y - b||_2`, `Z = I` when `basis` is `None`,
/// without forming `A Z` unless the Householder fallback is taken.
fn semi_normal(a: MatRef<'_, f64>, b: &[f64], basis: Option<MatRef<'_, f64>>) -> Result<LeastSquaresSolution> {
    let m = a.nrows();
    let fallback = || match basis {
        Some(z) => reduced_least_squares_solve((a * z).as_ref(), b),
        None => reduced_least_squares_solve(a, b),
    };
    let project = |v: Mat<f64>| match basis {
        Some(z) => z.transpose() * v,
        None => v,
    };
    let lift = |y: &Mat<f64>| match basis {
        Some(z) => z * y,
        None => y.clone(),
    };

    let full = a.transpose() * a;
    let gram = match basis {
        Some(z) => z.transpose() * &full * z,
        None => full,
    };
    let n = gram.nrows();
    let Ok(llt) = Llt::new(gram.as_ref(), Side::Lower) else {
        return fallback();
    };
    let r = llt.L().transpose().to_owned();
    let rq = ColPivQr::new(r.as_ref());
    let rr = rq.R();
    let diag: Vec<f64> = (0..n).map(|i| rr[(i, i)].abs()).collect();
    let largest = diag.iter().copied().fold(0.0, f64::max);
    let smallest = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smallest > 0.0) || largest / smallest > GRAM_CONDITION_LIMIT {
        return fallback();
    }

    let rhs = Mat::from_fn(m, 1, |i, _| b[i]);
    let mut y = llt.solve(project(a.transpose() * &rhs));
    let res = &rhs - a * lift(&y);
    y += llt.solve(project(a.transpose() * &res));
    let y: Vec<f64> = (0..n).map(|i| y[(i, 0)]).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("least-squares solution"));
    }
    let ym = Mat::from_fn(n, 1, |i, _| y[i]);
    let fitted = a * lift(&ym);
    let residual = (0..m).map(|i| (b[i] - fitted[(i, 0)]).powi(2)).sum::<f64>().sqrt();
    Ok(LeastSquaresSolution { residual_norm: residual, condition_estimate: largest / smallest, x: y })
}

fn reduced_least_squares_solve(a: MatRef<'_, f64>, b: &[f64]) -> Result<LeastSquaresSolution> {
    let (m, n) = a.shape();
    let aug = Mat::from_fn(m, n + 1, |i, j| if j < n { a[(i, j)] } else { b[i] });
    let qr = Qr::new(aug.as_ref());
    let r = qr.thin_R();
    let c: Vec<f64> = (0..n).map(|i| r[(i, n)]).collect();
    let small = least_squares_solve(r.submatrix(0, 0, n, n), &c)?;
    Ok(LeastSquaresSolution { residual_norm: residual_norm(a, &small.x, b), ..small })
}

/// Minimizer of `||A x - b||_2` subject to `C x = d`, by the null-space
/// method: a QR factorization of `C^T` splits `x` into a particular
/// solution of the constraints plus a free part in their null space, which
/// is fitted like [`tall_least_squares_solve`]. Constraint rows that are
/// numerically dependent on the others are dropped. The reported residual
/// and condition estimate belong to the reduced problem.
pub fn constrained_least_squares_solve(
    a: MatRef<'_, f64>,
    b: &[f64],
    c: MatRef<'_, f64>,
    d: &[f64],
) -> Result<LeastSquaresSolution> {
    let (m, n) = a.shape();
    let p = c.nrows();
    assert_eq!(c.ncols(), n, "constraint width");
    assert_eq!(d.len(), p, "constraint right-hand side length");
    if p == 0 {
        return tall_least_squares_solve(a, b);
    }
    if p >= n {
        return Err(Error::InvalidInput(format!("{p} constraints leave no freedom among {n} unknowns")));
    }
    assert_eq!(b.len(), m, "right-hand side length");

    // column-pivoted so that dependent or vanishing constraint rows drop out
    let qr = ColPivQr::new(c.transpose());
    let r = qr.R();
    let largest = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if !(largest > 0.0) {
        return tall_least_squares_solve(a, b);
    }
    let rank = (0..p).take_while(|&i| r[(i, i)].abs() > RANK_TOLERANCE * largest).count();
    if m < n - rank {
        return Err(Error::Underdetermined { rows: m, cols: n - rank });
    }
    let kept = &qr.P().arrays().0[..rank];
    let q = qr.compute_Q();

    // R^T u = d (kept rows), x_p = Q_1 u
    let mut u: Vec<f64> = kept.iter().map(|&i| d[i]).collect();
    for i in 0..rank {
        let s: f64 = (0..i).map(|j| r[(j, i)] * u[j]).sum();
        u[i] = (u[i] - s) / r[(i, i)];
    }
    let xp = Mat::from_fn(n, 1, |i, _| (0..rank).map(|j| q[(i, j)] * u[j]).sum::<f64>());
    let free = n - rank;
    let z = q.subcols(rank, free);
    let rhs_full = Mat::from_fn(m, 1, |i, _| b[i]);
    let rhs = &rhs_full - a * &xp;
    let rhs: Vec<f64> = (0..m).map(|i| rhs[(i, 0)]).collect();
    let reduced = semi_normal(a, &rhs, Some(z))?;
    let y = Mat::from_fn(free, 1, |i, _| reduced.x[i]);
    let x = &xp + z * &y;
    Ok(LeastSquaresSolution { x: (0..n).map(|i| x[(i, 0)]).collect(), ..reduced })
}

/// `||A x - b||_2`.
pub fn residual_norm(a: MatRef<'_, f64>, x: &[f64], b: &[f64]) -> f64 {
    let (m, n) = a.shape();
    let mut r = b.to_vec();
    for j in 0..n {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        let col = a.col(j);
        for i in 0..m {
            r[i] -= col[i] * xj;
        }
    }
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Least-squares solutions for every leading column block `A[:, ..k]`,
/// `k` in `sizes`, from a single unpivoted QR of `[A | b]`.
///
/// Householder QR without pivoting factors the leading `k` columns
/// identically for every `k`, so each truncated problem reduces to a
/// triangular solve with the leading block of `R`. Returns `None` for sizes
/// whose triangular block is numerically singular.
pub fn nested_least_squares(a: MatRef<'_, f64>, b: &[f64], sizes: &[usize]) -> Result<Vec<Option<Vec<f64>>>> {
    let (m, n) = a.shape();
    if n == 0 || m < n + 1 {
        return Err(Error::Underdetermined { rows: m, cols: n });
    }
    assert_eq!(b.len(), m, "right-hand side length");
    let aug = Mat::from_fn(m, n + 1, |i, j| if j < n { a[(i, j)] } else { b[i] });
    let qr = Qr::new(aug.as_ref());
    let r = qr.thin_R();
    let scale = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);

    Ok(sizes
        .iter()
        .map(|&k| {
            assert!(k >= 1 && k <= n, "block size {k} outside 1..={n}");
            if (0..k).any(|i| !(r[(i, i)].abs() > RANK_TOLERANCE * scale)) {
                return None;
            }
            let mut y: Vec<f64> = (0..k).map(|i| r[(i, n)]).collect();
            for i in (0..k).rev() {
                let mut s = y[i];
                for j in i + 1..k {
                    s -= r[(i, j)] * y[j];
                }
                y[i] = s / r[(i, i)];
            }
            Some(y)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_system() {
        let a = Mat::<f64>::identity(3, 3);
        let s = least_squares_solve(a.as_ref(), &[1.0, 2.0, 3.0]).unwrap();
        for (x, e) in s.x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-15);
        }
        assert!(s.residual_norm < 1e-15);
        assert!((s.condition_estimate - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mean_of_two_points() {
        let a = Mat::from_fn(2, 1, |_, _| 1.0);
        let s = least_squares_solve(a.as_ref(), &[0.0, 2.0]).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-15);
        assert!((s.residual_norm - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rank_deficiency_is_detected() {
        let a = Mat::from_fn(5, 2, |i, _| i as f64);
        assert!(matches!(least_squares_solve(a.as_ref(), &[0.0; 5]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn underdetermined_is_rejected() {
        let a = Mat::<f64>::zeros(2, 3);
        assert!(matches!(least_squares_solve(a.as_ref(), &[0.0; 2]), Err(Error::Underdetermined { .. })));
    }

    /// Normal equations `A^T A x = A^T b` solved by Gaussian elimination
    /// with partial pivoting and one step of iterative refinement.
    fn normal_equations(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
        let (m, n) = a.shape();
        let mut g = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = (0..m).map(|k| a[(k, i)] * a[(k, j)]).sum();
            }
            g[i][n] = (0..m).map(|k| a[(k, i)] * b[k]).sum();
        }
        let solve = |mut g: Vec<Vec<f64>>| {
            for col in 0..n {
                let p = (col..n).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs())).unwrap();
                g.swap(col, p);
                for row in col + 1..n {
                    let f = g[row][col] / g[col][col];
                    for k in col..=n {
                        g[row][k] -= f * g[col][k];
                    }
                }
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let s: f64 = (i + 1..n).map(|j| g[i][j] * x[j]).sum();
                x[i] = (g[i][n] - s) / g[i][i];
            }
            x
        };
        let x0 = solve(g.clone());
        let mut g2 = g.clone();
        for i in 0..n {
            let gx: f64 = (0..n).map(|j| g[i][j] * x0[j]).sum();
            g2[i][n] = g[i][n] - gx;
        }
        let dx = solve(g2);
        x0.iter().zip(dx).map(|(a, b)| a + b).collect()
    }

    fn random_system(seed: u64, m: usize, n: usize) -> (Mat<f64>, Vec<f64>) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let a = Mat::from_fn(m, n, |i, j| rng.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 });
        let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (a, b)
    }

    #[test]
    fn matches_normal_equations_oracle() {
        for seed in 0..5 {
            let (a, b) = random_system(seed, 40, 10);
            let s = least_squares_solve(a.as_ref(), &b).unwrap();
            let oracle = normal_equations(&a, &b);
            for (x, o) in s.x.iter().zip(&oracle) {
                assert!((x - o).abs() < 1e-8, "seed {seed}: {x} vs {o}");
            }
        }
    }

    #[test]
    fn residual_is_orthogonal_to_columns() {
        for seed in 10..15 {
            let (a, b) = random_system(seed, 60, 12);
            let s = least_squares_solve(a.as_ref(), &b).unwrap();
            let mut r = b.clone();
            for j in 0..12 {
                for i in 0..60 {
                    r[i] -= a[(i, j)] * s.x[j];
                }
            }
            let rn: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((rn - s.residual_norm).abs() < 1e-12);
            for j in 0..12 {
                let dot: f64 = (0..60).map(|i| a[(i, j)] * r[i]).sum();
                let cn: f64 = (0..60).map(|i| a[(i, j)].powi(2)).sum::<f64>().sqrt();
                assert!(dot.abs() <= 1e-8 * cn * rn.max(1.0));
            }
        }
    }

    #[test]
    fn tall_solver_matches_householder() {
        for seed in 20..25 {
            let (a, b) = random_system(seed, 300, 24);
            let h = least_squares_solve(a.as_ref(), &b).unwrap();
            let t = tall_least_squares_solve(a.as_ref(), &b).unwrap();
            for (x, y) in t.x.iter().zip(&h.x) {
                assert!((x - y).abs() < 1e-12, "seed {seed}: {x} vs {y}");
            }
            assert!((t.residual_norm - h.residual_norm).abs() < 1e-12);
            assert!((t.condition_estimate / h.condition_estimate).log10().abs() < 1.0);
        }
    }

    #[test]
    fn tall_solver_falls_back_when_ill_conditioned() {
        // columns 1, x, ..., x^11 on [0, 1] are far beyond the Gram limit
        let m = 200;
        let a = Mat::from_fn(m, 12, |i, j| (i as f64 / (m - 1) as f64).powi(j as i32));
        let b: Vec<f64> = (0..m).map(|i| (i as f64 / (m - 1) as f64).exp()).collect();
        let h = least_squares_solve(a.as_ref(), &b).unwrap();
        let t = tall_least_squares_solve(a.as_ref(), &b).unwrap();
        assert!(h.condition_estimate > GRAM_CONDITION_LIMIT);
        let scale = h.x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (x, y) in t.x.iter().zip(&h.x) {
            assert!((x - y).abs() <= 1e-6 * scale, "{x} vs {y}");
        }
        assert!((t.residual_norm - h.residual_norm).abs() <= 1e-10);
        assert!(matches!(
            tall_least_squares_solve(Mat::from_fn(5, 2, |i, _| i as f64).as_ref(), &[0.0; 5]),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn constraints_hold_and_match_heavy_weighting() {
        let (a, b) = random_system(7, 80, 10);
        let (c, d) = random_system(8, 3, 10);
        let s = constrained_least_squares_solve(a.as_ref(), &b, c.as_ref(), &d).unwrap();
        for i in 0..3 {
            let ci: f64 = (0..10).map(|j| c[(i, j)] * s.x[j]).sum();
            assert!((ci - d[i]).abs() < 1e-12);
        }
        // oracle: the constraint rows weighted by 1e6 on top of the system
        let w = 1e6;
        let stacked = Mat::from_fn(83, 10, |i, j| if i < 3 { w * c[(i, j)] } else { a[(i - 3, j)] });
        let rhs: Vec<f64> = (0..83).map(|i| if i < 3 { w * d[i] } else { b[i - 3] }).collect();
        let heavy = least_squares_solve(stacked.as_ref(), &rhs).unwrap();
        for (x, y) in s.x.iter().zip(&heavy.x) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
        assert!((s.residual_norm - residual_norm(a.as_ref(), &s.x, &b)).abs() < 1e-12);
    }

    #[test]
    fn dependent_constraints_are_dropped() {
        let (a, b) = random_system(17, 60, 8);
        let (c, d) = random_system(18, 2, 8);
        // a zero row first, then the two constraints, then their sum
        let c4 = Mat::from_fn(4, 8, |i, j| match i {
            0 => 0.0,
            3 => c[(0, j)] + c[(1, j)],
            _ => c[(i - 1, j)],
        });
        let d4 = [0.0, d[0], d[1], d[0] + d[1]];
        let full = constrained_least_squares_solve(a.as_ref(), &b, c4.as_ref(), &d4).unwrap();
        let plain = constrained_least_squares_solve(a.as_ref(), &b, c.as_ref(), &d).unwrap();
        for (x, y) in full.x.iter().zip(&plain.x) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn no_constraints_is_plain_least_squares() {
        let (a, b) = random_system(9, 30, 5);
        let c = Mat::<f64>::zeros(0, 5);
        let s = constrained_least_squares_solve(a.as_ref(), &b, c.as_ref(), &[]).unwrap();
        let t = least_squares_solve(a.as_ref(), &b).unwrap();
        for (x, y) in s.x.iter().zip(&t.x) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_solutions_match_separate_solves() {
        let (a, b) = random_system(42, 50, 12);
        let sizes = [1, 4, 8, 12];
        let nested = nested_least_squares(a.as_ref(), &b, &sizes).unwrap();
        for (&k, sol) in sizes.iter().zip(&nested) {
            let sub = Mat::from_fn(50, k, |i, j| a[(i, j)]);
            let direct = least_squares_solve(sub.as_ref(), &b).unwrap();
            let sol = sol.as_ref().unwrap();
            for (x, y) in sol.iter().zip(&direct.x) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
