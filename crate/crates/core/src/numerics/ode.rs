//! Classical RK4 for linear second-order equations `w'' + drift * w' = Q * w`
//! sampled on a uniform grid.

use num_complex::Complex64;

use super::grid::ComplexSamples;
use super::interp;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Towards increasing `x`.
    Right,
    /// Towards decreasing `x`.
    Left,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub w: ComplexSamples,
    pub w_prime: ComplexSamples,
}

/// Integrates from `start_index` to the end of the grid in `direction`.
///
/// `Q` is needed at half steps; it is taken from cubic interpolation of the
/// samples. Nodes behind the start are left at zero.
pub fn integrate_linear_ode2(
    q: &ComplexSamples,
    drift: f64,
    start_index: usize,
    start_value: Complex64,
    start_slope: Complex64,
    direction: Direction,
) -> Result<OdeSolution> {
    let grid = *q.grid();
    let n = grid.len();
    assert!(start_index < n, "start index {start_index} outside grid of {n} nodes");
    let qv = q.values();
    let qmid = interp::midpoints(qv);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut wp = vec![Complex64::new(0.0, 0.0); n];
    w[start_index] = start_value;
    wp[start_index] = start_slope;

    let step = match direction {
        Direction::Right => grid.step(),
        Direction::Left => -grid.step(),
    };
    let rhs = |qq: Complex64, y: Complex64, v: Complex64| (v, qq * y - v * drift);

    let mut j = start_index;
    loop {
        let next = match direction {
            Direction::Right if j + 1 < n => j + 1,
            Direction::Left if j > 0 => j - 1,
            _ => break,
        };
        let (q0, q1) = (qv[j], qv[next]);
        let qh = qmid[j.min(next)];
        let (y, v) = (w[j], wp[j]);

        let k1 = rhs(q0, y, v);
        let k2 = rhs(qh, y + k1.0 * (0.5 * step), v + k1.1 * (0.5 * step));
        let k3 = rhs(qh, y + k2.0 * (0.5 * step), v + k2.1 * (0.5 * step));
        let k4 = rhs(q1, y + k3.0 * step, v + k3.1 * step);

        let y1 = y + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (step / 6.0);
        let v1 = v + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (step / 6.0);
        if !(y1.re.is_finite() && y1.im.is_finite() && v1.re.is_finite() && v1.im.is_finite()) {
            return Err(Error::non_finite(format!("ODE state at x = {}", grid.x(next))));
        }
        w[next] = y1;
        wp[next] = v1;
        j = next;
    }

    Ok(OdeSolution {
        w: ComplexSamples::new(grid, w)?,
        w_prime: ComplexSamples::new(grid, wp)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::UniformGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_solution_with_drift() {
        let g = UniformGrid::new(5.0, 101).unwrap();
        let q = ComplexSamples::zeros(g);
        let sol = integrate_linear_ode2(&q, -1.0, g.last_index(), c(1.0, 0.0), c(0.0, 0.0), Direction::Left).unwrap();
        for j in 0..g.len() {
            assert!((sol.w[j] - c(1.0, 0.0)).norm() < 1e-15);
            assert!(sol.w_prime[j].norm() < 1e-15);
        }
    }

    #[test]
    fn linear_solution_both_ways() {
        let g = UniformGrid::new(2.0, 41).unwrap();
        let q = ComplexSamples::zeros(g);
        let z = g.zero_index();
        let right = integrate_linear_ode2(&q, 0.0, z, c(0.0, 0.0), c(1.0, 0.0), Direction::Right).unwrap();
        let left = integrate_linear_ode2(&q, 0.0, z, c(0.0, 0.0), c(1.0, 0.0), Direction::Left).unwrap();
        for j in z..g.len() {
            assert!((right.w[j].re - g.x(j)).abs() < 1e-13);
        }
        for j in 0..=z {
            assert!((left.w[j].re - g.x(j)).abs() < 1e-13);
        }
        assert_eq!(right.w[0], c(0.0, 0.0));
    }

    fn constant_q_error(n: usize, qc: Complex64) -> f64 {
        // w'' = qc w, w(0) = 1, w'(0) = 0  =>  w = cosh(sqrt(qc) x)
        let g = UniformGrid::new(1.0, n).unwrap();
        let q = g.sample(|_| qc);
        let k = qc.sqrt();
        let sol = integrate_linear_ode2(&q, 0.0, 0, c(1.0, 0.0), c(0.0, 0.0), Direction::Right).unwrap();
        (0..g.len())
            .map(|j| {
                let x = g.x(j) + 1.0;
                let exact = (k * x).cosh();
                let exact_d = k * (k * x).sinh();
                (sol.w[j] - exact).norm().max((sol.w_prime[j] - exact_d).norm())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_potential_matches_closed_form() {
        // oscillatory: Q = -16 gives cos(4x); mixed: complex Q
        assert!(constant_q_error(2001, c(-16.0, 0.0)) < 1e-8);
        assert!(constant_q_error(2001, c(2.0, -3.0)) < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let e1 = constant_q_error(101, c(-16.0, 0.0));
        let e2 = constant_q_error(201, c(-16.0, 0.0));
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn overflow_is_reported() {
        let g = UniformGrid::new(50.0, 101).unwrap();
        let q = g.sample(|_| c(1e6, 0.0));
        let err = integrate_linear_ode2(&q, 0.0, 0, c(1.0, 0.0), c(0.0, 0.0), Direction::Right).unwrap_err();
        assert_eq!(err.name(), "NonFiniteValue");
    }
}
